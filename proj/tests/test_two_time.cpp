// Copyright 2026 The wflab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <string>

#include "test_support.hpp"
#include "wflab/two_time.hpp"

using namespace wflab;
using wflab_test::kPi;

namespace {

Mat plus_state() {
  const double s = 1.0 / std::sqrt(2.0);
  return projector(Ket{s, s});
}

/// Random config over the feasible angles with a random phase and a random
/// prepared state.
ScenarioConfig rand_feasible_cfg(SplitMix64& rng) {
  const double thetas[] = {0.0, kPi / 4, kPi / 2};
  ScenarioConfig cfg = ScenarioConfig::from_angles(
      thetas[rng.next() % 3], 2 * kPi * rng.uniform());
  const auto [alpha, beta] = wflab_test::rand_amp_pair(rng);
  cfg.alpha = alpha;
  cfg.beta = beta;
  return cfg;
}

}  // namespace

TEST_CASE("frozen one-time probabilities at pi/8", "[two_time]") {
  const ScenarioConfig cfg = ScenarioConfig::from_angles(kPi / 8);
  CHECK(std::abs(one_time_prob(cfg, plus_state(), TimeTag::t2, Outcome::U) -
                 0.75) < 1e-12);
  CHECK(std::abs(one_time_prob(cfg, plus_state(), TimeTag::t1, Outcome::U) -
                 0.5) < 1e-12);
  const Mat up = projector(Ket::basis(2, 0));
  CHECK(std::abs(one_time_prob(cfg, up, TimeTag::t2, Outcome::U) - 0.75) <
        1e-12);
  CHECK(std::abs(one_time_prob(cfg, up, TimeTag::t1, Outcome::U) - 1.0) <
        1e-12);
}

TEST_CASE("one-time probabilities sum to one", "[two_time]") {
  SplitMix64 rng(51);
  for (int rep = 0; rep < 100; ++rep) {
    ScenarioConfig cfg;
    auto [a, b] = wflab_test::rand_amp_pair(rng);
    cfg.a = a;
    cfg.b = b;
    const Mat rho = wflab_test::rand_density(rng, 2);
    for (TimeTag t : {TimeTag::t1, TimeTag::t2}) {
      const double pu = one_time_prob(cfg, rho, t, Outcome::U);
      const double pd = one_time_prob(cfg, rho, t, Outcome::D);
      CHECK(std::abs(pu + pd - 1.0) < 1e-12);
      CHECK(pu > -1e-12);
      CHECK(pd > -1e-12);
    }
  }
}

TEST_CASE("aligned basis: the record is remembered exactly", "[two_time]") {
  SplitMix64 rng(52);
  const ScenarioConfig cfg = ScenarioConfig::from_angles(0.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Mat rho = wflab_test::rand_density(rng, 2);
    const TwoTimeTable table = two_time_table(cfg, rho);
    for (int f1 = 0; f1 < 2; ++f1) {
      REQUIRE(table.cond[f1][f1].has_value());
      CHECK(std::abs(*table.cond[f1][f1] - 1.0) < 1e-12);
      CHECK(std::abs(*table.cond[f1][1 - f1]) < 1e-12);
    }
    CHECK(std::abs(table.joint[0][0] - rho(0, 0).real()) < 1e-12);
    CHECK(std::abs(table.joint[1][1] - rho(1, 1).real()) < 1e-12);
  }
}

TEST_CASE("balanced basis: the later readout is a coin flip", "[two_time]") {
  SplitMix64 rng(53);
  const ScenarioConfig cfg = ScenarioConfig::from_angles(kPi / 4);
  for (int rep = 0; rep < 50; ++rep) {
    const Mat rho = wflab_test::rand_density(rng, 2);
    const TwoTimeTable table = two_time_table(cfg, rho);
    for (int f1 = 0; f1 < 2; ++f1) {
      REQUIRE(table.cond[f1][0].has_value());
      CHECK(std::abs(*table.cond[f1][0] - 0.5) < 1e-12);
      CHECK(std::abs(*table.cond[f1][1] - 0.5) < 1e-12);
      CHECK(std::abs(table.joint[f1][0] - table.marg_t1[f1] / 2) < 1e-12);
    }
  }
}

TEST_CASE("table entries follow the product rule when defined", "[two_time]") {
  SplitMix64 rng(54);
  for (int rep = 0; rep < 60; ++rep) {
    const ScenarioConfig cfg = rand_feasible_cfg(rng);
    const Mat rho = wflab_test::rand_density(rng, 2);
    const TwoTimeTable table = two_time_table(cfg, rho);
    const Povm e1 = effective_record_povm(cfg, TimeTag::t1);
    const Povm e2 = effective_record_povm(cfg, TimeTag::t2);
    double total = 0;
    for (Outcome f1 : kOutcomes) {
      for (Outcome f2 : kOutcomes) {
        // At commuting points the unique joint effect is the plain product.
        const double oracle =
            trace(e1.effect(f1) * e2.effect(f2) * rho).real();
        CHECK(std::abs(table.p(f1, f2) - oracle) < 1e-10);
        CHECK(table.p(f1, f2) > -1e-12);
        total += table.p(f1, f2);
      }
      CHECK(std::abs(table.marg_t1[static_cast<int>(f1)] -
                     one_time_prob(cfg, rho, TimeTag::t1, f1)) < 1e-10);
      CHECK(std::abs(table.marg_t2[static_cast<int>(f1)] -
                     one_time_prob(cfg, rho, TimeTag::t2, f1)) < 1e-10);
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("table is linear in the prepared state", "[two_time]") {
  SplitMix64 rng(55);
  for (int rep = 0; rep < 40; ++rep) {
    const ScenarioConfig cfg = rand_feasible_cfg(rng);
    const Mat rho1 = wflab_test::rand_density(rng, 2);
    const Mat rho2 = wflab_test::rand_density(rng, 2);
    const double lam = rng.uniform();
    const Mat mix = cplx(lam) * rho1 + cplx(1 - lam) * rho2;
    const TwoTimeTable tm = two_time_table(cfg, mix);
    const TwoTimeTable t1 = two_time_table(cfg, rho1);
    const TwoTimeTable t2 = two_time_table(cfg, rho2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(tm.joint[i][j] - lam * t1.joint[i][j] -
                       (1 - lam) * t2.joint[i][j]) < 1e-12);
  }
}

TEST_CASE("zero marginal leaves the conditional row undefined", "[two_time]") {
  const ScenarioConfig cfg = ScenarioConfig::from_angles(0.0);
  const Mat down = projector(Ket::basis(2, 1));
  const TwoTimeTable table = two_time_table(cfg, down);
  CHECK_FALSE(table.cond[0][0].has_value());
  CHECK_FALSE(table.cond[0][1].has_value());
  REQUIRE(table.cond[1][1].has_value());
  CHECK(std::abs(*table.cond[1][1] - 1.0) < 1e-12);
  CHECK(std::abs(table.marg_t1[0]) < 1e-14);
}

TEST_CASE("rotated basis refuses to fabricate a joint table", "[two_time]") {
  const ScenarioConfig cfg = ScenarioConfig::from_angles(kPi / 8);
  try {
    two_time_table(cfg, plus_state());
    FAIL("expected NoJointDistribution");
  } catch (const NoJointDistribution& err) {
    const std::string what = err.what();
    CHECK(what.find("jointly measurable") != std::string::npos);
    CHECK(what.find(to_json(cfg).dump()) != std::string::npos);
    CHECK(err.verdict().status == Feasibility::Infeasible);
    CHECK(std::abs(err.verdict().commutator_norm - 0.25) < 1e-12);
  }
}

TEST_CASE("unitary variant also refuses the joint table", "[two_time]") {
  ScenarioConfig cfg;
  const double s = 1.0 / std::sqrt(2.0);
  cfg.a = s;
  cfg.b = s;
  cfg.variant = Variant::HadamardUnitary;
  CHECK_THROWS_AS(two_time_table(cfg, plus_state()), NoJointDistribution);
}

TEST_CASE("config overload uses the declared pure state", "[two_time]") {
  SplitMix64 rng(56);
  for (int rep = 0; rep < 20; ++rep) {
    const ScenarioConfig cfg = rand_feasible_cfg(rng);
    const TwoTimeTable implicit = two_time_table(cfg);
    const TwoTimeTable explicit_rho =
        two_time_table(cfg, projector(cfg.system_ket()));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(implicit.joint[i][j] == explicit_rho.joint[i][j]);
  }
}

TEST_CASE("prediction inputs are validated", "[two_time]") {
  const ScenarioConfig cfg = ScenarioConfig::from_angles(0.0);
  const Mat rho = plus_state();
  CHECK_THROWS_AS(one_time_prob(cfg, rho, TimeTag::t0, Outcome::U),
                  ContractError);
  CHECK_THROWS_AS(one_time_prob(cfg, Mat::identity(2), TimeTag::t1, Outcome::U),
                  ContractError);
  CHECK_THROWS_AS(two_time_table(cfg, Mat::identity(4)), ContractError);
  CHECK_THROWS_AS(two_time_table(cfg, cplx(2.0) * rho), ContractError);
  ScenarioConfig bad = cfg;
  bad.a = 1.0;
  bad.b = 1.0;
  CHECK_THROWS_AS(two_time_table(bad, rho), ContractError);
}

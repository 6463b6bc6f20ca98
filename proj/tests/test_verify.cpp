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
#include <cstdlib>
#include <set>
#include <string>

#include "test_support.hpp"
#include "wflab/report_io.hpp"
#include "wflab/verify.hpp"

using namespace wflab;
using wflab_test::kPi;

TEST_CASE("all invariant suites pass at their own tolerances", "[verify]") {
  for (std::uint64_t seed : {2026ull, 7ull}) {
    const std::vector<SuiteResult> suites = run_verification(seed);
    CHECK(suites.size() >= 20);
    std::set<std::string> names;
    for (const SuiteResult& s : suites) {
      INFO(s.name << " deviation " << s.max_deviation << " tolerance "
                  << s.tolerance);
      CHECK(s.pass);
      CHECK(s.max_deviation <= s.tolerance);
      CHECK(s.tolerance > 0);
      names.insert(s.name);
    }
    CHECK(names.size() == suites.size());
  }
}

TEST_CASE("forcing tolerance to zero exposes real float deviations", "[verify]") {
  const std::vector<SuiteResult> suites = run_verification(2026, 0.0);
  bool any_fail = false;
  for (const SuiteResult& s : suites) {
    CHECK(s.tolerance == 0.0);
    any_fail = any_fail || !s.pass;
  }
  CHECK(any_fail);
}

TEST_CASE("verification is deterministic in the seed", "[verify]") {
  const std::vector<SuiteResult> a = run_verification(99);
  const std::vector<SuiteResult> b = run_verification(99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].max_deviation == b[i].max_deviation);
  }
}

TEST_CASE("showcase configs carry the advertised parameters", "[verify]") {
  const ScenarioConfig bell = showcase_config("bell");
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(bell.a - cplx(s)) < 1e-15);
  CHECK(std::abs(bell.alpha - cplx(s)) < 1e-15);
  const ScenarioConfig comp = showcase_config("computational");
  CHECK(comp.alpha == cplx(0.6));
  CHECK(comp.beta == cplx(0.8));
  CHECK(comp.a == cplx(1.0));
  CHECK_THROWS_AS(showcase_config("bogus"), ContractError);
}

TEST_CASE("fifteen-digit formatting round-trips doubles", "[verify]") {
  SplitMix64 rng(71);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = rng.uniform();
    CHECK(std::abs(std::strtod(fmt15(x).c_str(), nullptr) - x) <= 1e-15);
  }
  CHECK(fmt15(0.25) == "0.25");
  CHECK(fmt15(0.0) == "0");
  CHECK(fmt15(1.0) == "1");
}

TEST_CASE("scan serialization is stable field for field", "[verify]") {
  ClassifiedPoint p;
  p.theta = 0.25;
  p.config = ScenarioConfig::from_angles(0.25);
  p.status = Feasibility::Infeasible;
  p.commutator_norm = 0.125;
  p.residual = 0.5;
  p.iterations = 42;
  ClassifiedPoint q;
  q.theta = 0;
  q.config = ScenarioConfig::from_angles(0);
  q.status = Feasibility::Feasible;
  q.iterations = 1;
  const std::string csv = scan_csv({p, q});
  CHECK(csv ==
        "theta,re_a,im_a,re_b,im_b,commutator_norm,feasible,residual,iters\n"
        "0.25,0.968912421710645,0,0.247403959254523,0,0.125,0,0.5,42\n"
        "0,1,0,0,0,0,1,0,1\n");
  const std::string summary = scan_summary({p, q});
  CHECK(summary == "points=2 feasible=1 infeasible=1 indeterminate=0\n");
  ClassifiedPoint r = q;
  r.status = Feasibility::Indeterminate;
  CHECK(scan_csv({r}).find(",-1,") != std::string::npos);
  CHECK(scan_summary({r}) == "points=1 feasible=0 infeasible=0 indeterminate=1\n");
}

TEST_CASE("prediction serialization encodes undefined rows as null", "[verify]") {
  const ScenarioConfig cfg = showcase_config("computational");
  const Mat down = projector(Ket::basis(2, 1));
  const nlohmann::ordered_json j = predict_json(two_time_table(cfg, down));
  CHECK(j["feasible"] == true);
  CHECK(j["conditionals"]["U"]["U"].is_null());
  CHECK(j["conditionals"]["D"]["D"] == 1.0);
  CHECK(j["joint"]["DD"] == 1.0);
  CHECK(j["marginals"]["t1"]["D"] == 1.0);
  CHECK(j["config"]["a"][0] == 1.0);
}

TEST_CASE("comparison serialization carries both views", "[verify]") {
  const ScenarioConfig cfg = showcase_config("bell");
  const CollapseReport analytic = collapse_predictions(cfg);
  const EmpiricalReport empirical = trajectory_sampler(cfg, 1000, 3);
  const std::string csv = compare_csv(empirical);
  CHECK(csv.rfind("f1,w,f2,count,frequency,analytic_p,std_err\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);  // header + 10 cells
  const nlohmann::ordered_json j = compare_json(analytic, empirical);
  CHECK(j["analytic"]["max_gap"].get<double>() < 1e-12);
  CHECK(j["empirical"]["shots"] == 1000);
  CHECK(j["empirical"]["seed"] == 3);
  CHECK(j["empirical"]["cells"].size() == 10);
  CHECK(j["empirical"]["cells"][8]["f1"] == "-");
  CHECK(j["empirical"]["cells"][8]["w"] == 0);
}

TEST_CASE("verification serialization reflects suite outcomes", "[verify]") {
  std::vector<SuiteResult> suites;
  suites.push_back({"alpha", 1e-13, 1e-12, true});
  suites.push_back({"beta", 2.0, 1.0, false});
  const nlohmann::ordered_json j = verify_json(5, suites);
  CHECK(j["seed"] == 5);
  CHECK(j["all_pass"] == false);
  CHECK(j["suites"][0]["name"] == "alpha");
  CHECK(j["suites"][0]["pass"] == true);
  CHECK(j["suites"][1]["pass"] == false);
  CHECK(j["suites"][1]["tolerance"] == 1.0);
}

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

#ifndef WFLAB_TWO_TIME_HPP_
#define WFLAB_TWO_TIME_HPP_

/// Two-time prediction tables for the friend's memory record.
///
/// A single record observable lives at each of t1 and t2; both are pulled
/// back to the t0 system qubit (povm.hpp). Asking for one joint table
/// p(f1, f2) over both readouts presumes the two effective observables are
/// jointly measurable. When they are, the joint observable is unique and
/// every entry is a Born weight of its effects; when they are not, no
/// candidate table reproduces both one-time distributions, and this header
/// refuses to fabricate one: two_time_table throws NoJointDistribution
/// instead of returning numbers that correspond to no experiment.

#include <optional>
#include <stdexcept>
#include <string>

#include "wflab/joint.hpp"
#include "wflab/matrix.hpp"
#include "wflab/povm.hpp"
#include "wflab/scenario.hpp"

namespace wflab {

/// Marginals below this floor leave the conditional row undefined rather
/// than dividing by numerical noise.
inline constexpr double kMarginalFloor = 1e-12;

/// Raised when a joint record distribution is requested for a scenario
/// whose effective record observables are not jointly measurable.
class NoJointDistribution : public std::runtime_error {
 public:
  NoJointDistribution(std::string message, JointVerdict verdict)
      : std::runtime_error(std::move(message)), verdict_(std::move(verdict)) {}

  /// The decision record that ruled the joint table out.
  const JointVerdict& verdict() const { return verdict_; }

 private:
  JointVerdict verdict_;
};

/// Probability of reading outcome f from the record at a single time.
inline double one_time_prob(const ScenarioConfig& cfg, const Mat& rho,
                            TimeTag t, Outcome f) {
  if (t == TimeTag::t0) {
    throw ContractError("one_time_prob: the record exists at t1 and t2 only");
  }
  if (rho.rows() != 2 || !is_density(rho)) {
    throw ContractError("one_time_prob: rho must be a 2x2 density matrix");
  }
  const Povm e = effective_record_povm(cfg, t);
  return trace(e.effect(f) * rho).real();
}

/// Joint and conditional record probabilities for one scenario and one
/// prepared state. Marginals are row/column sums of the joint block, so the
/// table is internally consistent by construction.
struct TwoTimeTable {
  ScenarioConfig config;
  /// joint[f1][f2] = p(f1, f2).
  double joint[2][2] = {{0, 0}, {0, 0}};
  /// cond[f1][f2] = p(f2 | f1); empty when p(f1) is below kMarginalFloor.
  std::optional<double> cond[2][2];
  double marg_t1[2] = {0, 0};
  double marg_t2[2] = {0, 0};

  double p(Outcome f1, Outcome f2) const {
    return joint[static_cast<int>(f1)][static_cast<int>(f2)];
  }
  const std::optional<double>& conditional(Outcome f1, Outcome f2) const {
    return cond[static_cast<int>(f1)][static_cast<int>(f2)];
  }
};

/// Builds the two-time table for a prepared 2x2 density matrix, deciding
/// joint measurability first. The closed-form criterion is used whenever
/// the t1 record observable is sharp (always true for scenario-built
/// POVMs); the numerical solver covers the remaining cases.
inline TwoTimeTable two_time_table(const ScenarioConfig& cfg, const Mat& rho,
                                   const SolverOptions& opts = {}) {
  cfg.validate();
  if (rho.rows() != 2 || !is_density(rho)) {
    throw ContractError("two_time_table: rho must be a 2x2 density matrix");
  }
  const Povm e1 = effective_record_povm(cfg, TimeTag::t1);
  const Povm e2 = effective_record_povm(cfg, TimeTag::t2);
  const JointVerdict verdict = is_sharp(e1) ? commutator_criterion(e1, e2)
                                            : feasibility_solver(e1, e2, opts);
  if (!verdict.jointly_measurable()) {
    throw NoJointDistribution(
        "no joint record distribution: the effective observables at t1 and "
        "t2 are not jointly measurable (commutator norm " +
            std::to_string(verdict.commutator_norm) +
            "), so no table p(f1, f2) reproduces both one-time "
            "distributions; config " +
            to_json(cfg).dump(),
        verdict);
  }

  TwoTimeTable table;
  table.config = cfg;
  for (Outcome f1 : kOutcomes) {
    for (Outcome f2 : kOutcomes) {
      const double p = trace(verdict.witness->effect(f1, f2) * rho).real();
      table.joint[static_cast<int>(f1)][static_cast<int>(f2)] = p;
    }
  }
  for (int i = 0; i < 2; ++i) {
    table.marg_t1[i] = table.joint[i][0] + table.joint[i][1];
    table.marg_t2[i] = table.joint[0][i] + table.joint[1][i];
  }
  for (int f1 = 0; f1 < 2; ++f1) {
    if (table.marg_t1[f1] > kMarginalFloor) {
      for (int f2 = 0; f2 < 2; ++f2) {
        table.cond[f1][f2] = table.joint[f1][f2] / table.marg_t1[f1];
      }
    }
  }
  return table;
}

/// Convenience overload for the pure state declared in the config itself.
inline TwoTimeTable two_time_table(const ScenarioConfig& cfg,
                                   const SolverOptions& opts = {}) {
  return two_time_table(cfg, projector(cfg.system_ket()), opts);
}

}  // namespace wflab

#endif  // WFLAB_TWO_TIME_HPP_

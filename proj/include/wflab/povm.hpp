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

// Effective measurements on the system qubit, obtained by pulling record
// projectors back through the dilation isometries (Heisenberg picture):
// E_f = V' Pi_f V. Probabilities of the friend's record value f at time t_i
// are then tr(E^i_f rho) for any prepared system state rho.

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wflab/matrix.hpp"
#include "wflab/scenario.hpp"

namespace wflab {

/// A discrete positive operator-valued measure: one labeled effect per
/// outcome, all effects positive semidefinite and summing to the identity.
struct Povm {
  std::size_t dim = 0;
  std::vector<std::string> labels;
  std::vector<Mat> effects;

  void validate() const {
    if (labels.size() != effects.size() || effects.empty()) {
      throw ContractError("Povm: labels and effects must pair up");
    }
    Mat sum(dim, dim);
    for (const Mat& e : effects) {
      if (e.rows() != dim || e.cols() != dim) {
        throw ContractError("Povm: effect dimension mismatch");
      }
      if (!is_hermitian(e)) {
        throw ContractError("Povm: effect is not Hermitian");
      }
      if (eig_min_hermitian(e) < -tol::kPsd) {
        throw ContractError("Povm: effect is not positive semidefinite");
      }
      sum = sum + e;
    }
    if (max_abs_diff(sum, Mat::identity(dim)) > tol::kNorm) {
      throw ContractError("Povm: effects do not sum to the identity");
    }
  }

  const Mat& effect(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return effects[i];
    throw ContractError("Povm: no effect labeled '" + label + "'");
  }

  const Mat& effect(Outcome f) const { return effects.at(static_cast<std::size_t>(f)); }
};

/// True when every effect is a projector (E^2 = E within eps), i.e. the POVM
/// is sharp.
inline bool is_sharp(const Povm& povm, double eps = tol::kSharp) {
  for (const Mat& e : povm.effects)
    if (max_abs_diff(e * e, e) > eps) return false;
  return true;
}

/// Pulls a labeled set of projectors back through an isometry. The
/// projectors must be idempotent, Hermitian, and sum to the identity on the
/// isometry's range space.
inline Povm pullback(const Isometry& v,
                     const std::vector<std::pair<std::string, Mat>>& projectors) {
  Mat sum(v.range_dim(), v.range_dim());
  Povm out;
  out.dim = v.domain_dim();
  for (const auto& [label, pi] : projectors) {
    if (pi.rows() != v.range_dim() || pi.cols() != v.range_dim()) {
      throw ContractError("pullback: projector dimension mismatch");
    }
    if (!is_hermitian(pi) || max_abs_diff(pi * pi, pi) > tol::kNorm) {
      throw ContractError("pullback: '" + label + "' is not a projector");
    }
    sum = sum + pi;
    out.labels.push_back(label);
    out.effects.push_back(v.pull(pi));
  }
  if (max_abs_diff(sum, Mat::identity(v.range_dim())) > tol::kNorm) {
    throw ContractError("pullback: projectors do not sum to the identity");
  }
  out.validate();
  return out;
}

/// Effective POVM for the friend's record value at t1 or t2.
inline Povm effective_record_povm(const ScenarioConfig& cfg, TimeTag t) {
  return pullback(build_isometry(cfg, t),
                  {{"U", friend_record_projector(Outcome::U)},
                   {"D", friend_record_projector(Outcome::D)}});
}

}  // namespace wflab

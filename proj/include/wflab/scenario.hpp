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

// Scenario construction for the two-observer memory experiment.
//
// Registers and basis ordering (fixed throughout the library):
//   S = the observed qubit, basis (up, down)           -> s in {0, 1}
//   F = the friend's record qubit, basis (U, D)        -> f in {0, 1}
//   W = the superobserver's pointer qubit              -> w in {0, 1}
// Composite index is row-major over (S, F, W): index = 4 s + 2 f + w.
//
// The W register convention: before the superobserver acts, W sits in its
// ready state, stored at w = 0. After the projective variant acts, the two
// pointer outcomes occupy w = 0 and w = 1. The ready state and the first
// pointer outcome share an index; they never coexist at the same time tag.
// The F register reuses f = 0 the same way at the initial time.
//
// Three time tags:
//   t0: system prepared as alpha|up> + beta|down>, F and W ready.
//   t1: after the friend's record interaction,
//       |Psi(t1)> = alpha|up,U> + beta|down,D> (tensor W ready).
//   t2: after the superobserver. In the "measurement" variant the
//       superobserver measures SF in the basis {|1>, |2>} with
//       |1> = a|up,U> + b|down,D>, |2> = b*|up,U> - a*|down,D>,
//       recording the outcome in W:
//       |Psi(t2)> = (alpha a* + beta b*)|1>|1_W> + (alpha b - beta a)|2>|2_W>.
//       In the "hadamard" variant the superobserver instead applies the
//       unitary |up,U> -> (|up,U>+|down,D>)/sqrt2,
//               |down,D> -> (|up,U>-|down,D>)/sqrt2 and W stays ready.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "wflab/matrix.hpp"

namespace wflab {

enum class TimeTag { t0, t1, t2 };
enum class Variant { Measurement, HadamardUnitary };

/// The friend's record value.
enum class Outcome : int { U = 0, D = 1 };

inline constexpr Outcome kOutcomes[2] = {Outcome::U, Outcome::D};

inline const char* to_label(Outcome f) { return f == Outcome::U ? "U" : "D"; }

inline std::size_t composite_index(int s, int f, int w) {
  return static_cast<std::size_t>(4 * s + 2 * f + w);
}

inline constexpr std::size_t kGlobalDim = 8;

/// Scenario parameters: the prepared system state (alpha, beta) and the
/// superobserver basis amplitudes (a, b). Both pairs must be unit-normalized;
/// phases are kept exactly as given.
struct ScenarioConfig {
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
  Variant variant = Variant::Measurement;

  void validate() const {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > tol::kNorm) {
      throw ContractError("ScenarioConfig: |alpha|^2 + |beta|^2 != 1");
    }
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > tol::kNorm) {
      throw ContractError("ScenarioConfig: |a|^2 + |b|^2 != 1");
    }
  }

  Ket system_ket() const { return Ket{alpha, beta}; }

  /// First superobserver basis vector on the SF pair, reduced to S
  /// coordinates: phi1 = (a, b).
  Ket phi1() const { return Ket{a, b}; }

  /// Second superobserver basis vector: phi2 = (b*, -a*).
  Ket phi2() const { return Ket{std::conj(b), -std::conj(a)}; }

  /// Convenience for parameter scans: a = e^{i chi} cos theta, b = sin theta,
  /// system prepared in |up>.
  static ScenarioConfig from_angles(double theta, double chi = 0.0,
                                    Variant variant = Variant::Measurement) {
    ScenarioConfig cfg;
    cfg.alpha = 1.0;
    cfg.beta = 0.0;
    cfg.a = cplx(std::cos(chi), std::sin(chi)) * std::cos(theta);
    cfg.b = std::sin(theta);
    cfg.variant = variant;
    return cfg;
  }
};

inline const char* to_label(Variant v) {
  return v == Variant::Measurement ? "measurement" : "hadamard";
}

inline nlohmann::ordered_json to_json(const ScenarioConfig& cfg) {
  return nlohmann::ordered_json{
      {"alpha", {cfg.alpha.real(), cfg.alpha.imag()}},
      {"beta", {cfg.beta.real(), cfg.beta.imag()}},
      {"a", {cfg.a.real(), cfg.a.imag()}},
      {"b", {cfg.b.real(), cfg.b.imag()}},
      {"variant", to_label(cfg.variant)},
  };
}

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  const auto as_cplx = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) {
      throw ContractError(std::string("ScenarioConfig: field '") + key +
                          "' must be a [re, im] pair");
    }
    return cplx(v[0].get<double>(), v[1].get<double>());
  };
  ScenarioConfig cfg;
  cfg.alpha = as_cplx("alpha");
  cfg.beta = as_cplx("beta");
  cfg.a = as_cplx("a");
  cfg.b = as_cplx("b");
  const std::string variant = j.value("variant", "measurement");
  if (variant == "measurement") {
    cfg.variant = Variant::Measurement;
  } else if (variant == "hadamard") {
    cfg.variant = Variant::HadamardUnitary;
  } else {
    throw ContractError("ScenarioConfig: unknown variant '" + variant + "'");
  }
  cfg.validate();
  return cfg;
}

/// A time-tagged pure state of the full S x F x W register.
struct GlobalState {
  TimeTag time;
  Ket ket;
};

namespace detail {

inline Ket sf_pair_ket(const cplx& up_u, const cplx& down_d) {
  Ket k(4);
  k[0] = up_u;  // (s=0, f=0)
  k[3] = down_d;  // (s=1, f=1)
  return k;
}

/// Superobserver basis vector |k> on the SF pair (k is 1 or 2), dim 4.
inline Ket wigner_basis_sf(const ScenarioConfig& cfg, int k) {
  if (k == 1) return sf_pair_ket(cfg.a, cfg.b);
  if (k == 2) return sf_pair_ket(std::conj(cfg.b), -std::conj(cfg.a));
  throw ContractError("wigner_basis_sf: outcome index must be 1 or 2");
}

}  // namespace detail

/// Writes the state at the requested time tag directly from its amplitude
/// expansion. Kept independent of build_isometry so the two construction
/// routes cross-validate.
inline GlobalState build_state(const ScenarioConfig& cfg, TimeTag t) {
  cfg.validate();
  Ket psi(kGlobalDim);
  switch (t) {
    case TimeTag::t0:
      psi[composite_index(0, 0, 0)] = cfg.alpha;
      psi[composite_index(1, 0, 0)] = cfg.beta;
      break;
    case TimeTag::t1:
      psi[composite_index(0, 0, 0)] = cfg.alpha;
      psi[composite_index(1, 1, 0)] = cfg.beta;
      break;
    case TimeTag::t2: {
      if (cfg.variant == Variant::HadamardUnitary) {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        psi[composite_index(0, 0, 0)] = (cfg.alpha + cfg.beta) * inv_sqrt2;
        psi[composite_index(1, 1, 0)] = (cfg.alpha - cfg.beta) * inv_sqrt2;
        break;
      }
      const cplx c1 = std::conj(cfg.a) * cfg.alpha + std::conj(cfg.b) * cfg.beta;
      const cplx c2 = cfg.b * cfg.alpha - cfg.a * cfg.beta;
      psi[composite_index(0, 0, 0)] = cfg.a * c1;
      psi[composite_index(1, 1, 0)] = cfg.b * c1;
      psi[composite_index(0, 0, 1)] = std::conj(cfg.b) * c2;
      psi[composite_index(1, 1, 1)] = -std::conj(cfg.a) * c2;
      break;
    }
  }
  return GlobalState{t, psi};
}

/// Unitary on the full register implementing the "hadamard" variant: a
/// Hadamard rotation of the span{|up,U>, |down,D>} plane of the SF pair,
/// identity on its orthocomplement and on W.
inline Mat hadamard_record_unitary() {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Mat u(4, 4);
  u(0, 0) = inv_sqrt2;
  u(0, 3) = inv_sqrt2;
  u(3, 0) = inv_sqrt2;
  u(3, 3) = -inv_sqrt2;
  u(1, 1) = 1.0;
  u(2, 2) = 1.0;
  return kron(u, Mat::identity(2));
}

/// Dilation isometry from the system qubit into the full register at t1 or
/// t2, built from the measurement-model outer products. t0 has no isometry.
inline Isometry build_isometry(const ScenarioConfig& cfg, TimeTag t) {
  cfg.validate();
  const Ket ready_w = Ket::basis(2, 0);
  const Ket up = Ket::basis(2, 0);
  const Ket down = Ket::basis(2, 1);
  // V1 |up> = |up, U, ready>, V1 |down> = |down, D, ready>.
  const Ket up_u = kron(detail::sf_pair_ket(1.0, 0.0), ready_w);
  const Ket down_d = kron(detail::sf_pair_ket(0.0, 1.0), ready_w);
  const Mat v1 = outer(up_u, up) + outer(down_d, down);
  switch (t) {
    case TimeTag::t0:
      throw ContractError("build_isometry: no dilation is defined at t0");
    case TimeTag::t1:
      return Isometry(v1);
    case TimeTag::t2: {
      if (cfg.variant == Variant::HadamardUnitary) {
        return Isometry(hadamard_record_unitary() * v1);
      }
      // V2 = |1>_SF |1>_W <phi1| + |2>_SF |2>_W <phi2| with the pointer
      // outcomes at w = 0 and w = 1.
      const Ket k1 = kron(detail::wigner_basis_sf(cfg, 1), Ket::basis(2, 0));
      const Ket k2 = kron(detail::wigner_basis_sf(cfg, 2), Ket::basis(2, 1));
      return Isometry(outer(k1, cfg.phi1()) + outer(k2, cfg.phi2()));
    }
  }
  throw ContractError("build_isometry: unknown time tag");
}

/// Pushes a mixed system state through the dilation: rho -> V rho V'.
inline Mat evolve_mixed(const ScenarioConfig& cfg, const Mat& rho, TimeTag t) {
  if (rho.rows() != 2 || rho.cols() != 2 || !is_density(rho)) {
    throw ContractError("evolve_mixed: rho is not a qubit density matrix");
  }
  return build_isometry(cfg, t).push(rho);
}

/// Projector onto the friend's record value f on the full register.
inline Mat friend_record_projector(Outcome f) {
  Mat p(kGlobalDim, kGlobalDim);
  for (int s = 0; s < 2; ++s)
    for (int w = 0; w < 2; ++w)
      p(composite_index(s, static_cast<int>(f), w),
        composite_index(s, static_cast<int>(f), w)) = 1.0;
  return p;
}

/// Projector onto superobserver outcome k in {1, 2} on the SF pair,
/// extended by identity on W. Used by the projective collapse chain.
inline Mat wigner_outcome_projector(const ScenarioConfig& cfg, int k) {
  cfg.validate();
  return kron(projector(detail::wigner_basis_sf(cfg, k)), Mat::identity(2));
}

}  // namespace wflab

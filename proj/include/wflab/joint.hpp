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

// Joint measurability of the two record POVMs, decided two independent ways:
//
//  1. commutator_criterion: when the first POVM is sharp, a joint observable
//     exists iff the two U effects commute, and then the unique joint effect
//     is G_{f1 f2} = E1_{f1} E2_{f2}. Exact, closed form.
//
//  2. feasibility_solver: numerical convex feasibility, no sharpness
//     assumption. A two-outcome pair is jointly measurable iff some
//     Hermitian G satisfies
//         G >= 0,  G <= E1_U,  G <= E2_U,  G >= E1_U + E2_U - 1,
//     because fixing G = G_UU determines the other three joint effects
//     linearly. The solver runs Dykstra's alternating projections onto the
//     four shifted positive cones; a residual plateau above tolerance
//     triggers an infeasibility certificate.
//
// Certificate: the candidate set is swept on a grid and the reported
// residual is the grid minimum of the total constraint violation
// sum_i max(0, -lambda_min(M_i)). Whenever one of the four bounding
// effects is rank one (always true here, since E1 is sharp), the sandwich
// 0 <= X <= (rank-one bound) forces X onto a line segment, so the sweep is
// one-dimensional and exact up to the grid resolution. The general
// four-parameter sweep is kept as a coarse fallback.

#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wflab/matrix.hpp"
#include "wflab/povm.hpp"
#include "wflab/scenario.hpp"

namespace wflab {

enum class Feasibility { Feasible, Infeasible, Indeterminate };
enum class JmMethod { CommutatorExact, FeasibilitySolver };

inline const char* to_label(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible: return "feasible";
    case Feasibility::Infeasible: return "infeasible";
    case Feasibility::Indeterminate: return "indeterminate";
  }
  return "?";
}

/// A four-outcome joint observable for the record values (f1, f2). Its
/// marginals reproduce the two one-time POVMs by construction.
struct JointObservable {
  // effects[f1][f2], outcome order (U, D).
  std::array<std::array<Mat, 2>, 2> effects;

  const Mat& effect(Outcome f1, Outcome f2) const {
    return effects[static_cast<std::size_t>(f1)][static_cast<std::size_t>(f2)];
  }

  Mat marginal_t1(Outcome f1) const {
    return effect(f1, Outcome::U) + effect(f1, Outcome::D);
  }

  Mat marginal_t2(Outcome f2) const {
    return effect(Outcome::U, f2) + effect(Outcome::D, f2);
  }

  Povm to_povm() const {
    Povm p;
    p.dim = effects[0][0].dim();
    for (Outcome f1 : kOutcomes)
      for (Outcome f2 : kOutcomes) {
        p.labels.push_back(std::string(to_label(f1)) + to_label(f2));
        p.effects.push_back(effect(f1, f2));
      }
    p.validate();
    return p;
  }
};

/// Decision record. residual and iterations are solver diagnostics (zero for
/// the closed-form route); commutator_norm is filled by both methods.
struct JointVerdict {
  Feasibility status = Feasibility::Indeterminate;
  JmMethod method = JmMethod::CommutatorExact;
  double commutator_norm = 0;
  double residual = 0;
  long iterations = 0;
  std::optional<JointObservable> witness;

  bool jointly_measurable() const { return status == Feasibility::Feasible; }
};

struct SolverOptions {
  /// Feasibility threshold on the constraint residual.
  double tolerance = 1e-9;
  long max_iterations = 200000;
  /// Grid step of the infeasibility certificate sweep.
  double certificate_resolution = 2e-3;
  /// The iteration has plateaued when the residual decreases by less than
  /// plateau_epsilon over plateau_window consecutive cycles.
  double plateau_epsilon = 1e-14;
  long plateau_window = 1000;
};

namespace detail {

inline void require_qubit_pair(const Povm& e1, const Povm& e2, const char* who) {
  if (e1.dim != 2 || e2.dim != 2 || e1.effects.size() != 2 ||
      e2.effects.size() != 2) {
    throw ContractError(std::string(who) +
                        ": expects two two-outcome qubit POVMs");
  }
}

/// (AB + BA) / 2. Equals AB when A and B commute; Hermitian either way.
inline Mat jordan_product(const Mat& a, const Mat& b) {
  const Mat j = cplx(0.5) * (a * b + b * a);
  return cplx(0.5) * (j + dagger(j));
}

/// The other three joint effects are linear in G = G_UU.
inline JointObservable assemble_joint(const Mat& e1u, const Mat& e2u,
                                      const Mat& g) {
  JointObservable j;
  j.effects[0][0] = g;
  j.effects[0][1] = e1u - g;
  j.effects[1][0] = e2u - g;
  j.effects[1][1] = Mat::identity(2) - e1u - e2u + g;
  return j;
}

/// Total constraint violation of a candidate G: the sum over the four joint
/// effects of how far each dips below positive semidefiniteness.
inline double total_violation(const Mat& e1u, const Mat& e2u, const Mat& g) {
  const Mat lower = e1u + e2u - Mat::identity(2);
  double t = 0;
  t += std::max(0.0, -eig_min_hermitian(g));
  t += std::max(0.0, -eig_min_hermitian(e1u - g));
  t += std::max(0.0, -eig_min_hermitian(e2u - g));
  t += std::max(0.0, -eig_min_hermitian(g - lower));
  return t;
}

struct CertificateResult {
  double min_total_violation = std::numeric_limits<double>::infinity();
  Mat argmin;
};

/// Sweeps candidates X = x * (top eigenvector projector of `bound`) for
/// x in [0, lambda_max(bound)], mapping X back to G coordinates via
/// G = shift + sign * X.
inline void sweep_rank1_segment(const Mat& e1u, const Mat& e2u, const Mat& bound,
                                const Mat& shift, double sign, double resolution,
                                CertificateResult* best) {
  const EigSystem eig = hermitian_eigensystem(bound);
  const double top = eig.values.back();
  Ket u(2);
  u[0] = eig.vectors(0, 1);
  u[1] = eig.vectors(1, 1);
  const Mat unit = projector(u);
  const long steps = top > 0 ? static_cast<long>(std::floor(top / resolution)) : 0;
  for (long k = 0; k <= steps + 1; ++k) {
    const double x = std::min(top, static_cast<double>(k) * resolution);
    const Mat g = shift + (sign * x) * unit;
    const double t = total_violation(e1u, e2u, g);
    if (t < best->min_total_violation) {
      best->min_total_violation = t;
      best->argmin = g;
    }
    if (x >= top) break;
  }
}

/// Coarse fallback sweep over all Hermitian candidates when no bounding
/// effect is rank one: G = (t + x sx + y sy + z sz)/2 over t in [0,2] and
/// the ball coordinates in [-1,1]. Resolution is clamped to keep the
/// four-dimensional sweep bounded; the result is correspondingly coarse.
inline void sweep_full_bloch(const Mat& e1u, const Mat& e2u, double resolution,
                             CertificateResult* best) {
  const double step = std::max(resolution, 0.05);
  for (double t = 0; t <= 2 + 1e-12; t += step) {
    for (double x = -1; x <= 1 + 1e-12; x += step) {
      for (double y = -1; y <= 1 + 1e-12; y += step) {
        for (double z = -1; z <= 1 + 1e-12; z += step) {
          Mat g(2, 2);
          g(0, 0) = (t + z) / 2;
          g(1, 1) = (t - z) / 2;
          g(0, 1) = cplx(x, -y) / 2.0;
          g(1, 0) = cplx(x, y) / 2.0;
          const double v = total_violation(e1u, e2u, g);
          if (v < best->min_total_violation) {
            best->min_total_violation = v;
            best->argmin = g;
          }
        }
      }
    }
  }
}

/// Grid certificate for (in)feasibility of the G sandwich.
inline CertificateResult certificate_sweep(const Mat& e1u, const Mat& e2u,
                                           double resolution) {
  const Mat id = Mat::identity(2);
  const Mat zero = Mat::zero(2, 2);
  CertificateResult best;
  const auto is_rank1 = [](const Mat& m) {
    const EigSystem eig = hermitian_eigensystem(m);
    return eig.values[0] <= tol::kPsd && eig.values[1] > tol::kPsd;
  };
  // Each entry: (upper bound B, shift, sign) such that the sandwiched
  // variable X in [0, B] maps to G = shift + sign * X.
  // X = G:          0 <= G <= E1_U and 0 <= G <= E2_U.
  // X = E1_U - G:   0 <= X <= E2_D (from G >= E1_U + E2_U - 1).
  // X = E2_U - G:   0 <= X <= E1_D.
  const struct {
    Mat bound, shift;
    double sign;
  } routes[] = {
      {e1u, zero, 1.0},
      {e2u, zero, 1.0},
      {id - e2u, e1u, -1.0},
      {id - e1u, e2u, -1.0},
  };
  for (const auto& route : routes) {
    if (is_rank1(route.bound)) {
      sweep_rank1_segment(e1u, e2u, route.bound, route.shift, route.sign,
                          resolution, &best);
      return best;
    }
  }
  sweep_full_bloch(e1u, e2u, resolution, &best);
  return best;
}

}  // namespace detail

/// Operator norm of [E1_U, E2_U].
inline double record_commutator_norm(const Povm& e1, const Povm& e2) {
  detail::require_qubit_pair(e1, e2, "record_commutator_norm");
  return op_norm(commutator(e1.effects[0], e2.effects[0]));
}

/// Closed-form decision, valid when the first POVM is sharp: jointly
/// measurable iff the commutator norm is within comm_tol, with the unique
/// joint observable assembled from the effect products.
inline JointVerdict commutator_criterion(const Povm& e1, const Povm& e2,
                                         double comm_tol = tol::kCommute) {
  detail::require_qubit_pair(e1, e2, "commutator_criterion");
  if (!is_sharp(e1)) {
    throw ContractError(
        "commutator_criterion: first POVM is not sharp; use "
        "feasibility_solver instead");
  }
  JointVerdict v;
  v.method = JmMethod::CommutatorExact;
  v.commutator_norm = record_commutator_norm(e1, e2);
  if (v.commutator_norm <= comm_tol) {
    v.status = Feasibility::Feasible;
    v.witness = detail::assemble_joint(
        e1.effects[0], e2.effects[0],
        detail::jordan_product(e1.effects[0], e2.effects[0]));
  } else {
    v.status = Feasibility::Infeasible;
  }
  return v;
}

/// Numerical decision by Dykstra's alternating projections. Returns
/// Feasible with a witness, Infeasible with a certificate residual, or
/// Indeterminate when the iteration budget runs out first.
inline JointVerdict feasibility_solver(const Povm& e1, const Povm& e2,
                                       const SolverOptions& opts = {}) {
  detail::require_qubit_pair(e1, e2, "feasibility_solver");
  if (opts.tolerance <= 0 || opts.max_iterations < 1) {
    throw ContractError("feasibility_solver: invalid solver options");
  }
  // Hermitize the constants once: differences against exactly-Hermitian
  // matrices keep the Dykstra iterate exactly Hermitian even though the
  // correction terms grow without bound on infeasible instances.
  const Mat e1u = cplx(0.5) * (e1.effects[0] + dagger(e1.effects[0]));
  const Mat e2u = cplx(0.5) * (e2.effects[0] + dagger(e2.effects[0]));
  const Mat lower = e1u + e2u - Mat::identity(2);

  JointVerdict v;
  v.method = JmMethod::FeasibilitySolver;
  v.commutator_norm = record_commutator_norm(e1, e2);

  // Dykstra state: iterate plus one correction term per constraint set.
  Mat x = detail::jordan_product(e1u, e2u);
  Mat corrections[4] = {Mat::zero(2, 2), Mat::zero(2, 2), Mat::zero(2, 2),
                        Mat::zero(2, 2)};
  const auto project = [&](int which, const Mat& y) {
    switch (which) {
      case 0: return psd_project(y);
      case 1: return e1u - psd_project(e1u - y);
      case 2: return e2u - psd_project(e2u - y);
      default: return lower + psd_project(y - lower);
    }
  };

  // Ring buffer of recent residuals for the windowed plateau test.
  std::vector<double> history(static_cast<std::size_t>(opts.plateau_window),
                              std::numeric_limits<double>::infinity());
  double residual = std::numeric_limits<double>::infinity();
  for (long iter = 1; iter <= opts.max_iterations; ++iter) {
    for (int i = 0; i < 4; ++i) {
      const Mat y = x + corrections[i];
      const Mat z = project(i, y);
      corrections[i] = y - z;
      x = z;
    }
    x = cplx(0.5) * (x + dagger(x));
    residual =
        std::max({0.0, -eig_min_hermitian(x), -eig_min_hermitian(e1u - x),
                  -eig_min_hermitian(e2u - x), -eig_min_hermitian(x - lower)});
    if (residual <= opts.tolerance) {
      v.status = Feasibility::Feasible;
      v.residual = residual;
      v.iterations = iter;
      v.witness = detail::assemble_joint(e1u, e2u, x);
      return v;
    }
    const std::size_t slot =
        static_cast<std::size_t>(iter % opts.plateau_window);
    const double window_ago = history[slot];
    history[slot] = residual;
    if (window_ago - residual < opts.plateau_epsilon) {
      // Progress has stalled above tolerance: sweep the candidate set for
      // an explicit certificate and let it decide.
      const detail::CertificateResult cert =
          detail::certificate_sweep(e1u, e2u, opts.certificate_resolution);
      v.iterations = iter;
      v.residual = cert.min_total_violation;
      if (cert.min_total_violation <= opts.tolerance) {
        v.status = Feasibility::Feasible;
        v.witness = detail::assemble_joint(e1u, e2u, cert.argmin);
      } else {
        v.status = Feasibility::Infeasible;
      }
      return v;
    }
  }
  v.status = Feasibility::Indeterminate;
  v.residual = residual;
  v.iterations = opts.max_iterations;
  return v;
}

/// One grid point of a parameter scan with its verdict and diagnostics.
struct ClassifiedPoint {
  double theta = 0;
  ScenarioConfig config;
  Feasibility status = Feasibility::Indeterminate;
  double commutator_norm = 0;
  double residual = 0;
  long iterations = 0;
};

/// Runs both decision methods over a set of scan points and cross-checks
/// them. The exact criterion is authoritative whenever the first POVM is
/// sharp; a conclusive disagreement between the methods is an internal
/// invariant failure and throws.
inline std::vector<ClassifiedPoint> classify_parameter_space(
    const std::vector<std::pair<double, ScenarioConfig>>& points,
    const SolverOptions& opts = {}, int jobs = 1) {
  if (jobs < 1) {
    throw ContractError("classify_parameter_space: jobs must be >= 1");
  }
  std::vector<ClassifiedPoint> out(points.size());
  const auto work = [&](std::size_t index) {
    const auto& [theta, cfg] = points[index];
    ClassifiedPoint& row = out[index];
    row.theta = theta;
    row.config = cfg;
    const Povm first = effective_record_povm(cfg, TimeTag::t1);
    const Povm second = effective_record_povm(cfg, TimeTag::t2);
    const JointVerdict solved = feasibility_solver(first, second, opts);
    row.commutator_norm = solved.commutator_norm;
    row.residual = solved.residual;
    row.iterations = solved.iterations;
    row.status = solved.status;
    if (is_sharp(first)) {
      const JointVerdict exact = commutator_criterion(first, second);
      if (solved.status != Feasibility::Indeterminate &&
          solved.status != exact.status) {
        throw std::runtime_error(
            "classify_parameter_space: decision methods disagree at theta = " +
            std::to_string(theta));
      }
      row.status = exact.status;
    }
  };
  if (jobs == 1 || points.size() < 2) {
    for (std::size_t i = 0; i < points.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&, j] {
      try {
        for (std::size_t i = next.fetch_add(1); i < points.size();
             i = next.fetch_add(1)) {
          work(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(j)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

}  // namespace wflab

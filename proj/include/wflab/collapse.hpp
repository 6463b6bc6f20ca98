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

#ifndef WFLAB_COLLAPSE_HPP_
#define WFLAB_COLLAPSE_HPP_

/// Collapse-versus-unitary comparison and the trajectory sampler.
///
/// Two rival accounts of the friend's measurement make different
/// predictions for the record readout at t2:
///
///  * unitary     - nothing collapses at t1; the global state follows the
///                  dilation isometries and the t2 readout is a Born weight
///                  of the t2 state.
///  * collapse    - the friend's measurement ends in a definite record at
///                  t1; the state is projected branch by branch, carried to
///                  t2, and (in the "measurement" variant) projected again
///                  on the superobserver's pointer before the final record
///                  readout.
///
/// Every probability in this header is computed on the full register by
/// explicit projection chains, independently of the effective-POVM module,
/// so the two code paths cross-validate each other in the test suite. The
/// comparison is defined for every scenario: unlike the two-time table it
/// never requires joint measurability.
///
/// The trajectory sampler draws full collapse histories (f1, w, f2) and
/// unitary readouts f2 with a counter-based generator split over 64 fixed
/// shards, so results depend only on (config, state, shots, seed), not on
/// the worker count.

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wflab/matrix.hpp"
#include "wflab/rng.hpp"
#include "wflab/scenario.hpp"

namespace wflab {

/// Analytic comparison of the two hypotheses for one scenario and state.
struct CollapseReport {
  ScenarioConfig config;
  /// p(f1): friend's record distribution at t1 (same under both accounts).
  double p_f1[2] = {0, 0};
  /// joint_collapse[f1][f2]: p(f1, f2) under the collapse account,
  /// marginalized over the superobserver's pointer.
  double joint_collapse[2][2] = {{0, 0}, {0, 0}};
  /// cond_collapse[f1][f2] = p(f2 | f1); empty when p(f1) is negligible.
  std::optional<double> cond_collapse[2][2];
  /// p(f2) under each account.
  double p_f2_collapse[2] = {0, 0};
  double p_f2_unitary[2] = {0, 0};
  /// max over f2 of |p_f2_collapse - p_f2_unitary|.
  double max_gap = 0;
};

/// One sampled or analytic cell of the comparison: a collapse history
/// (f1 in {U, D}, w in {1, 2} for the "measurement" variant, 0 otherwise)
/// or a unitary readout (f1 = "-", w = 0).
struct SampleCell {
  std::string f1;
  int w = 0;
  std::string f2;
  long count = 0;
  double frequency = 0;
  double analytic_p = 0;
  double std_err = 0;
};

struct EmpiricalReport {
  ScenarioConfig config;
  long shots = 0;
  std::uint64_t seed = 0;
  /// Collapse cells in (f1, w, f2) order, then the two unitary cells.
  std::vector<SampleCell> cells;
};

namespace detail {

/// Spectral decomposition of a qubit density matrix into pure components,
/// dropping numerically empty eigenbranches.
inline std::vector<std::pair<double, Ket>> pure_components(const Mat& rho) {
  const EigSystem eig = hermitian_eigensystem(rho);
  std::vector<std::pair<double, Ket>> parts;
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] <= 1e-15) continue;
    Ket v(rho.rows());
    for (std::size_t i = 0; i < rho.rows(); ++i) v[i] = eig.vectors(i, k);
    parts.emplace_back(eig.values[k], v);
  }
  return parts;
}

/// Projector onto pointer value w (1 or 2) of the superobserver register.
inline Mat pointer_projector(int w) {
  return kron(Mat::identity(4), projector(Ket::basis(2, w == 1 ? 0 : 1)));
}

/// Static description of one collapse-history cell.
struct CellKey {
  Outcome f1;
  int w;  // 1 or 2 for the "measurement" variant, 0 for "hadamard"
  Outcome f2;
};

inline std::vector<CellKey> collapse_cell_keys(const ScenarioConfig& cfg) {
  std::vector<CellKey> keys;
  for (Outcome f1 : kOutcomes) {
    if (cfg.variant == Variant::Measurement) {
      for (int w : {1, 2})
        for (Outcome f2 : kOutcomes) keys.push_back({f1, w, f2});
    } else {
      for (Outcome f2 : kOutcomes) keys.push_back({f1, 0, f2});
    }
  }
  return keys;
}

/// Probability of each collapse history for one pure component, by explicit
/// projection: collapse the record at t1, carry the branch to t2 with
/// V2 V1' (an isometry on the reachable subspace), collapse the pointer
/// (when present), and read the record again.
inline std::vector<double> collapse_cell_probs(const ScenarioConfig& cfg,
                                               const Ket& psi) {
  const Isometry v1 = build_isometry(cfg, TimeTag::t1);
  const Isometry v2 = build_isometry(cfg, TimeTag::t2);
  const Mat transfer = v2.mat() * dagger(v1.mat());
  const Ket at_t1 = v1.apply(psi);
  std::vector<double> probs;
  for (const CellKey& key : collapse_cell_keys(cfg)) {
    Ket branch = friend_record_projector(key.f1) * at_t1;
    branch = transfer * branch;
    if (key.w != 0) branch = pointer_projector(key.w) * branch;
    branch = friend_record_projector(key.f2) * branch;
    probs.push_back(inner(branch, branch).real());
  }
  return probs;
}

/// p(f2) for one pure component under uninterrupted unitary evolution.
inline std::vector<double> unitary_probs(const ScenarioConfig& cfg,
                                         const Ket& psi) {
  const Ket at_t2 = build_isometry(cfg, TimeTag::t2).apply(psi);
  std::vector<double> probs;
  for (Outcome f2 : kOutcomes) {
    const Ket branch = friend_record_projector(f2) * at_t2;
    probs.push_back(inner(branch, branch).real());
  }
  return probs;
}

inline void require_qubit_density(const Mat& rho, const char* who) {
  if (rho.rows() != 2 || rho.cols() != 2 || !is_density(rho)) {
    throw ContractError(std::string(who) +
                        ": rho must be a 2x2 density matrix");
  }
}

}  // namespace detail

/// Analytic collapse-versus-unitary comparison for a prepared 2x2 density
/// matrix, averaging the projection chains over its pure components.
inline CollapseReport collapse_predictions(const ScenarioConfig& cfg,
                                           const Mat& rho) {
  cfg.validate();
  detail::require_qubit_density(rho, "collapse_predictions");
  const std::vector<detail::CellKey> keys = detail::collapse_cell_keys(cfg);
  std::vector<double> cell_p(keys.size(), 0.0);
  CollapseReport report;
  report.config = cfg;
  for (const auto& [weight, psi] : detail::pure_components(rho)) {
    const std::vector<double> cp = detail::collapse_cell_probs(cfg, psi);
    for (std::size_t i = 0; i < keys.size(); ++i) cell_p[i] += weight * cp[i];
    const std::vector<double> up = detail::unitary_probs(cfg, psi);
    for (int f2 = 0; f2 < 2; ++f2) report.p_f2_unitary[f2] += weight * up[f2];
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const int f1 = static_cast<int>(keys[i].f1);
    const int f2 = static_cast<int>(keys[i].f2);
    report.joint_collapse[f1][f2] += cell_p[i];
  }
  for (int f1 = 0; f1 < 2; ++f1) {
    report.p_f1[f1] =
        report.joint_collapse[f1][0] + report.joint_collapse[f1][1];
    for (int f2 = 0; f2 < 2; ++f2) {
      report.p_f2_collapse[f2] += report.joint_collapse[f1][f2];
    }
  }
  for (int f1 = 0; f1 < 2; ++f1) {
    if (report.p_f1[f1] > 1e-12) {
      for (int f2 = 0; f2 < 2; ++f2) {
        report.cond_collapse[f1][f2] =
            report.joint_collapse[f1][f2] / report.p_f1[f1];
      }
    }
  }
  for (int f2 = 0; f2 < 2; ++f2) {
    report.max_gap = std::max(
        report.max_gap,
        std::abs(report.p_f2_collapse[f2] - report.p_f2_unitary[f2]));
  }
  return report;
}

inline CollapseReport collapse_predictions(const ScenarioConfig& cfg) {
  return collapse_predictions(cfg, projector(cfg.system_ket()));
}

/// Monte-Carlo draw of `shots` collapse histories and `shots` unitary
/// readouts. Deterministic in (config, rho, shots, seed): shot i is served
/// by shard i mod 64 with its own counter-based stream, and jobs only
/// spreads shards over threads.
inline EmpiricalReport trajectory_sampler(const ScenarioConfig& cfg,
                                          const Mat& rho, long shots,
                                          std::uint64_t seed, int jobs = 1) {
  cfg.validate();
  detail::require_qubit_density(rho, "trajectory_sampler");
  if (shots < 1) throw ContractError("trajectory_sampler: shots must be >= 1");
  if (jobs < 1) throw ContractError("trajectory_sampler: jobs must be >= 1");

  const std::vector<detail::CellKey> keys = detail::collapse_cell_keys(cfg);
  const std::vector<std::pair<double, Ket>> parts =
      detail::pure_components(rho);

  // Per-component probability tables; one uniform picks the component, one
  // more picks the history (or the unitary readout).
  std::vector<double> weight_cum;
  std::vector<std::vector<double>> cell_cum;
  std::vector<std::vector<double>> unit_cum;
  std::vector<double> analytic(keys.size() + 2, 0.0);
  double acc = 0;
  for (const auto& [weight, psi] : parts) {
    acc += weight;
    weight_cum.push_back(acc);
    std::vector<double> cp = detail::collapse_cell_probs(cfg, psi);
    std::vector<double> up = detail::unitary_probs(cfg, psi);
    for (std::size_t i = 0; i < cp.size(); ++i) analytic[i] += weight * cp[i];
    analytic[keys.size()] += weight * up[0];
    analytic[keys.size() + 1] += weight * up[1];
    for (std::size_t i = 1; i < cp.size(); ++i) cp[i] += cp[i - 1];
    cell_cum.push_back(std::move(cp));
    for (std::size_t i = 1; i < up.size(); ++i) up[i] += up[i - 1];
    unit_cum.push_back(std::move(up));
  }
  const auto pick = [](const std::vector<double>& cum, double u) {
    const double target = u * cum.back();
    std::size_t i = 0;
    while (i + 1 < cum.size() && target >= cum[i]) ++i;
    return i;
  };

  constexpr int kShards = 64;
  std::vector<std::vector<long>> shard_counts(
      kShards, std::vector<long>(keys.size() + 2, 0));
  const auto run_shard = [&](int shard) {
    SplitMix64 rng = SplitMix64::fork(seed, static_cast<std::uint64_t>(shard));
    // Shard `shard` serves shot indices shard, shard + 64, ...
    const long n = shard < shots ? (shots - 1 - shard) / kShards + 1 : 0;
    std::vector<long>& counts = shard_counts[static_cast<std::size_t>(shard)];
    for (long s = 0; s < n; ++s) {
      const std::size_t k = pick(weight_cum, rng.uniform());
      const std::size_t cell = pick(cell_cum[k], rng.uniform());
      ++counts[cell];
    }
    for (long s = 0; s < n; ++s) {
      const std::size_t k = pick(weight_cum, rng.uniform());
      const std::size_t f2 = pick(unit_cum[k], rng.uniform());
      ++counts[keys.size() + f2];
    }
  };

  if (jobs == 1) {
    for (int shard = 0; shard < kShards; ++shard) run_shard(shard);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    const int workers = std::min(jobs, kShards);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int shard = next.fetch_add(1); shard < kShards;
             shard = next.fetch_add(1)) {
          try {
            run_shard(shard);
          } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<long> totals(keys.size() + 2, 0);
  for (const auto& counts : shard_counts) {
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += counts[i];
  }

  EmpiricalReport report;
  report.config = cfg;
  report.shots = shots;
  report.seed = seed;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    SampleCell cell;
    if (i < keys.size()) {
      cell.f1 = to_label(keys[i].f1);
      cell.w = keys[i].w;
      cell.f2 = to_label(keys[i].f2);
    } else {
      cell.f1 = "-";
      cell.w = 0;
      cell.f2 = to_label(kOutcomes[i - keys.size()]);
    }
    cell.count = totals[i];
    cell.frequency = static_cast<double>(totals[i]) / shots;
    cell.analytic_p = analytic[i];
    cell.std_err =
        std::sqrt(cell.frequency * (1.0 - cell.frequency) / shots);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

inline EmpiricalReport trajectory_sampler(const ScenarioConfig& cfg,
                                          long shots, std::uint64_t seed,
                                          int jobs = 1) {
  return trajectory_sampler(cfg, projector(cfg.system_ket()), shots, seed,
                            jobs);
}

}  // namespace wflab

#endif  // WFLAB_COLLAPSE_HPP_

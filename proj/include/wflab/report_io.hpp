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

#ifndef WFLAB_REPORT_IO_HPP_
#define WFLAB_REPORT_IO_HPP_

/// Stable CSV and JSON serialization of scan, prediction, comparison, and
/// verification results. Column sets and key names here are the artifact's
/// compatibility surface; floating-point values are written with 15
/// significant digits, enough to round-trip a double read back with strtod.
/// All output is assembled in fixed order from deterministic inputs, so a
/// repeated run writes byte-identical files.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wflab/collapse.hpp"
#include "wflab/joint.hpp"
#include "wflab/scenario.hpp"
#include "wflab/two_time.hpp"
#include "wflab/verify.hpp"

namespace wflab {

/// %.15g rendering used for every floating-point field in CSV output.
inline std::string fmt15(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline int feasibility_code(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible: return 1;
    case Feasibility::Infeasible: return 0;
    default: return -1;
  }
}

/// CSV block for a parameter scan, one row per grid point.
inline std::string scan_csv(const std::vector<ClassifiedPoint>& rows) {
  std::string out =
      "theta,re_a,im_a,re_b,im_b,commutator_norm,feasible,residual,iters\n";
  for (const ClassifiedPoint& row : rows) {
    out += fmt15(row.theta);
    out += ',';
    out += fmt15(row.config.a.real());
    out += ',';
    out += fmt15(row.config.a.imag());
    out += ',';
    out += fmt15(row.config.b.real());
    out += ',';
    out += fmt15(row.config.b.imag());
    out += ',';
    out += fmt15(row.commutator_norm);
    out += ',';
    out += std::to_string(feasibility_code(row.status));
    out += ',';
    out += fmt15(row.residual);
    out += ',';
    out += std::to_string(row.iterations);
    out += '\n';
  }
  return out;
}

/// One-line tally appended to scan output on stdout.
inline std::string scan_summary(const std::vector<ClassifiedPoint>& rows) {
  long feasible = 0, infeasible = 0, indeterminate = 0;
  for (const ClassifiedPoint& row : rows) {
    switch (row.status) {
      case Feasibility::Feasible: ++feasible; break;
      case Feasibility::Infeasible: ++infeasible; break;
      default: ++indeterminate; break;
    }
  }
  return "points=" + std::to_string(rows.size()) +
         " feasible=" + std::to_string(feasible) +
         " infeasible=" + std::to_string(infeasible) +
         " indeterminate=" + std::to_string(indeterminate) + "\n";
}

/// JSON document for a two-time prediction table. Undefined conditional
/// rows serialize as null.
inline nlohmann::ordered_json predict_json(const TwoTimeTable& table) {
  nlohmann::ordered_json joint;
  nlohmann::ordered_json conditionals;
  for (Outcome f1 : kOutcomes) {
    nlohmann::ordered_json row;
    for (Outcome f2 : kOutcomes) {
      joint[std::string(to_label(f1)) + to_label(f2)] = table.p(f1, f2);
      const std::optional<double>& c = table.conditional(f1, f2);
      row[to_label(f2)] =
          c.has_value() ? nlohmann::ordered_json(*c) : nlohmann::ordered_json();
    }
    conditionals[to_label(f1)] = std::move(row);
  }
  return nlohmann::ordered_json{
      {"config", to_json(table.config)},
      {"feasible", true},
      {"joint", std::move(joint)},
      {"conditionals", std::move(conditionals)},
      {"marginals",
       {{"t1", {{"U", table.marg_t1[0]}, {"D", table.marg_t1[1]}}},
        {"t2", {{"U", table.marg_t2[0]}, {"D", table.marg_t2[1]}}}}},
  };
}

/// CSV block for the trajectory sampler, one row per cell.
inline std::string compare_csv(const EmpiricalReport& report) {
  std::string out = "f1,w,f2,count,frequency,analytic_p,std_err\n";
  for (const SampleCell& cell : report.cells) {
    out += cell.f1;
    out += ',';
    out += std::to_string(cell.w);
    out += ',';
    out += cell.f2;
    out += ',';
    out += std::to_string(cell.count);
    out += ',';
    out += fmt15(cell.frequency);
    out += ',';
    out += fmt15(cell.analytic_p);
    out += ',';
    out += fmt15(cell.std_err);
    out += '\n';
  }
  return out;
}

/// JSON document pairing the analytic comparison with the sampler's cells.
inline nlohmann::ordered_json compare_json(const CollapseReport& analytic,
                                           const EmpiricalReport& empirical) {
  nlohmann::ordered_json cond;
  for (Outcome f1 : kOutcomes) {
    nlohmann::ordered_json row;
    for (Outcome f2 : kOutcomes) {
      const std::optional<double>& c =
          analytic.cond_collapse[static_cast<int>(f1)][static_cast<int>(f2)];
      row[to_label(f2)] =
          c.has_value() ? nlohmann::ordered_json(*c) : nlohmann::ordered_json();
    }
    cond[to_label(f1)] = std::move(row);
  }
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const SampleCell& cell : empirical.cells) {
    cells.push_back({{"f1", cell.f1},
                     {"w", cell.w},
                     {"f2", cell.f2},
                     {"count", cell.count},
                     {"frequency", cell.frequency},
                     {"analytic_p", cell.analytic_p},
                     {"std_err", cell.std_err}});
  }
  return nlohmann::ordered_json{
      {"config", to_json(analytic.config)},
      {"analytic",
       {{"p_f1", {{"U", analytic.p_f1[0]}, {"D", analytic.p_f1[1]}}},
        {"cond_collapse", std::move(cond)},
        {"p_f2_collapse",
         {{"U", analytic.p_f2_collapse[0]}, {"D", analytic.p_f2_collapse[1]}}},
        {"p_f2_unitary",
         {{"U", analytic.p_f2_unitary[0]}, {"D", analytic.p_f2_unitary[1]}}},
        {"max_gap", analytic.max_gap}}},
      {"empirical",
       {{"shots", empirical.shots},
        {"seed", empirical.seed},
        {"cells", std::move(cells)}}},
  };
}

/// JSON document for the verification run; per-suite deviations plus an
/// overall flag.
inline nlohmann::ordered_json verify_json(
    std::uint64_t seed, const std::vector<SuiteResult>& suites) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  bool all_pass = true;
  for (const SuiteResult& suite : suites) {
    all_pass = all_pass && suite.pass;
    rows.push_back({{"name", suite.name},
                    {"max_deviation", suite.max_deviation},
                    {"tolerance", suite.tolerance},
                    {"pass", suite.pass}});
  }
  return nlohmann::ordered_json{
      {"seed", seed}, {"suites", std::move(rows)}, {"all_pass", all_pass}};
}

}  // namespace wflab

#endif  // WFLAB_REPORT_IO_HPP_

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

// wflab command-line harness.
//
// Subcommands:
//   scan     - classify joint measurability over a theta grid (CSV).
//   verify   - run the named invariant suites (JSON report).
//   predict  - two-time prediction table for one config (JSON).
//   compare  - collapse-versus-unitary comparison with sampling (CSV/JSON).
//
// Exit codes: 0 success, 1 invariant failure, 2 no joint distribution,
// 3 I/O or config error. All outputs are deterministic functions of the
// flags (including --seed), byte-for-byte.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wflab/collapse.hpp"
#include "wflab/joint.hpp"
#include "wflab/report_io.hpp"
#include "wflab/scenario.hpp"
#include "wflab/two_time.hpp"
#include "wflab/verify.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

// Shared flag values; each subcommand registers the subset it uses.
struct Options {
  std::string config_path;
  std::string grid = "";  // "start:stop:step", radians; empty = 0:pi/2:pi/180
  int phases = 1;
  double tol = 0;
  bool tol_set = false;
  long max_iter = 200000;
  std::uint64_t seed = 2026;
  long shots = 1000000;
  int jobs = 1;
  std::string out_path;
  std::string format = "csv";
  std::string case_name;
};

/// Writes `text` to --out, or stdout when no path was given. A failed or
/// unwritable path is an I/O error (exit 3).
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open output path: " + out_path);
  }
  f << text;
  f.flush();
  if (!f) {
    throw std::runtime_error("cannot write output path: " + out_path);
  }
}

/// Fails fast on an unwritable --out before a long computation starts.
void require_writable(const std::string& out_path) {
  if (out_path.empty()) return;
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open output path: " + out_path);
  }
}

wflab::ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("cannot open config: " + path);
  }
  const nlohmann::json j = nlohmann::json::parse(f);
  return wflab::config_from_json(j);
}

struct GridSpec {
  double start = 0;
  double stop = kPi / 2;
  double step = kPi / 180;
};

GridSpec parse_grid(const std::string& spec) {
  GridSpec g;
  if (spec.empty()) return g;
  double v[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t next = spec.find(':', pos);
    if ((i < 2) == (next == std::string::npos)) {
      throw std::runtime_error("grid must be start:stop:step");
    }
    const std::string part = spec.substr(pos, next - pos);
    std::size_t used = 0;
    try {
      v[i] = std::stod(part, &used);
    } catch (const std::exception&) {
      throw std::runtime_error("grid has a non-numeric part: " + part);
    }
    if (used != part.size()) {
      throw std::runtime_error("grid has a non-numeric part: " + part);
    }
    pos = next + 1;
  }
  g.start = v[0];
  g.stop = v[1];
  g.step = v[2];
  return g;
}

std::vector<std::pair<double, wflab::ScenarioConfig>> grid_points(
    const GridSpec& g, int phases) {
  if (g.step <= 0) throw std::runtime_error("grid step must be > 0");
  if (g.start < -1e-12 || g.stop > kPi / 2 + 1e-12) {
    throw std::runtime_error("grid range must lie within [0, pi/2]");
  }
  if (phases < 1) throw std::runtime_error("phases must be >= 1");
  std::vector<std::pair<double, wflab::ScenarioConfig>> points;
  const double slack = g.step * 1e-9;
  for (long k = 0;; ++k) {
    const double theta = g.start + static_cast<double>(k) * g.step;
    if (theta > g.stop + slack) break;
    for (int j = 0; j < phases; ++j) {
      const double chi = 2 * kPi * j / phases;
      points.emplace_back(theta, wflab::ScenarioConfig::from_angles(theta, chi));
    }
  }
  if (points.empty()) throw std::runtime_error("empty grid");
  return points;
}

int cmd_scan(const Options& opt) {
  require_writable(opt.out_path);
  wflab::SolverOptions solver;
  if (opt.tol_set) solver.tolerance = opt.tol;
  solver.max_iterations = opt.max_iter;
  const auto points = grid_points(parse_grid(opt.grid), opt.phases);
  const std::vector<wflab::ClassifiedPoint> rows =
      wflab::classify_parameter_space(points, solver, opt.jobs);
  emit(wflab::scan_csv(rows), opt.out_path);
  std::fputs(wflab::scan_summary(rows).c_str(), stdout);
  return 0;
}

int cmd_verify(const Options& opt) {
  const std::optional<double> tol_override =
      opt.tol_set ? std::optional<double>(opt.tol) : std::nullopt;
  const std::vector<wflab::SuiteResult> suites =
      wflab::run_verification(opt.seed, tol_override);
  nlohmann::ordered_json report = wflab::verify_json(opt.seed, suites);
  if (!opt.case_name.empty()) {
    const wflab::ScenarioConfig cfg = wflab::showcase_config(opt.case_name);
    const nlohmann::ordered_json table =
        wflab::predict_json(wflab::two_time_table(cfg));
    report["case"] = {{"name", opt.case_name},
                      {"config", wflab::to_json(cfg)},
                      {"joint", table["joint"]},
                      {"conditionals", table["conditionals"]}};
  }
  emit(report.dump(2) + "\n", opt.out_path);
  for (const wflab::SuiteResult& suite : suites) {
    if (!suite.pass) {
      std::fprintf(stderr, "verification failed: %s (max deviation %.3e, tolerance %.3e)\n",
                   suite.name.c_str(), suite.max_deviation, suite.tolerance);
      return 1;
    }
  }
  return 0;
}

int cmd_predict(const Options& opt) {
  const wflab::ScenarioConfig cfg = load_config(opt.config_path);
  wflab::SolverOptions solver;
  if (opt.tol_set) solver.tolerance = opt.tol;
  solver.max_iterations = opt.max_iter;
  const wflab::TwoTimeTable table = wflab::two_time_table(cfg, solver);
  emit(wflab::predict_json(table).dump(2) + "\n", opt.out_path);
  return 0;
}

int cmd_compare(const Options& opt) {
  require_writable(opt.out_path);
  const wflab::ScenarioConfig cfg = load_config(opt.config_path);
  const wflab::CollapseReport analytic = wflab::collapse_predictions(cfg);
  const wflab::EmpiricalReport empirical =
      wflab::trajectory_sampler(cfg, opt.shots, opt.seed, opt.jobs);
  if (opt.format == "json") {
    emit(wflab::compare_json(analytic, empirical).dump(2) + "\n", opt.out_path);
  } else {
    emit(wflab::compare_csv(empirical), opt.out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "wflab: joint measurability of a friend's records at two times"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* scan = app.add_subcommand(
      "scan", "Classify joint measurability over a theta grid (CSV)");
  scan->add_option("--grid", opt.grid,
                   "Grid start:stop:step in radians (default 0:pi/2:pi/180)");
  scan->add_option("--phases", opt.phases,
                   "Phase samples chi_j = 2 pi j / N per theta (default 1)");
  CLI::Option* scan_tol =
      scan->add_option("--tol", opt.tol, "Solver feasibility tolerance");
  scan->add_option("--max-iter", opt.max_iter, "Solver iteration budget");
  scan->add_option("--jobs", opt.jobs, "Worker threads (default 1)");
  scan->add_option("--out", opt.out_path, "Output file (default stdout)");

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the named invariant suites (JSON report)");
  verify->add_option("--seed", opt.seed, "Suite randomization seed");
  CLI::Option* verify_tol = verify->add_option(
      "--tol", opt.tol, "Override every suite tolerance (0 must fail)");
  verify->add_option("--case", opt.case_name,
                     "Also print a showcase table: bell or computational");
  verify->add_option("--out", opt.out_path, "Output file (default stdout)");

  CLI::App* predict = app.add_subcommand(
      "predict", "Two-time prediction table for one config (JSON)");
  predict->add_option("--config", opt.config_path, "ScenarioConfig JSON path")
      ->required();
  CLI::Option* predict_tol =
      predict->add_option("--tol", opt.tol, "Solver feasibility tolerance");
  predict->add_option("--max-iter", opt.max_iter, "Solver iteration budget");
  predict->add_option("--out", opt.out_path, "Output file (default stdout)");

  CLI::App* compare = app.add_subcommand(
      "compare", "Collapse-versus-unitary comparison with sampling");
  compare->add_option("--config", opt.config_path, "ScenarioConfig JSON path")
      ->required();
  compare->add_option("--seed", opt.seed, "Sampler seed")->required();
  compare->add_option("--shots", opt.shots,
                      "Trajectories per hypothesis (default 1000000)");
  compare->add_option("--format", opt.format, "csv or json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  compare->add_option("--jobs", opt.jobs, "Worker threads (default 1)");
  compare->add_option("--out", opt.out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  opt.tol_set = scan_tol->count() > 0 || verify_tol->count() > 0 ||
                predict_tol->count() > 0;

  try {
    if (scan->parsed()) return cmd_scan(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (predict->parsed()) return cmd_predict(opt);
    return cmd_compare(opt);
  } catch (const wflab::NoJointDistribution& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

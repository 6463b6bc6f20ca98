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

// End-to-end tests of the wflab binary: flag handling, exit codes, file
// formats, and run-to-run determinism. The binary path and the example
// config directory are injected by the build system.

#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

/// Runs the binary with `args`, capturing stdout (and optionally stderr).
CliResult run_cli(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(WFLAB_CLI_PATH) + " " + args;
  cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    result.output.append(buf, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string config_path(const std::string& name) {
  return std::string(WFLAB_CONFIG_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    rows.push_back(std::move(fields));
  }
  return rows;
}

const std::string kPi16Grid = "--grid 0:1.5707963267948966:0.19634954084936207";

}  // namespace

TEST_CASE("scan emits the coarse-grid feasibility pattern", "[cli]") {
  const CliResult r = run_cli("scan " + kPi16Grid);
  REQUIRE(r.exit_code == 0);
  // Last stdout line is the tally.
  CHECK(r.output.find("points=9 feasible=3 infeasible=6 indeterminate=0\n") !=
        std::string::npos);
  const auto rows = parse_csv(r.output.substr(0, r.output.rfind("points=")));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == std::vector<std::string>{"theta", "re_a", "im_a", "re_b",
                                            "im_b", "commutator_norm",
                                            "feasible", "residual", "iters"});
  for (int k = 0; k < 9; ++k) {
    const bool expect_feasible = k == 0 || k == 4 || k == 8;
    CHECK(rows[k + 1][6] == (expect_feasible ? "1" : "0"));
    if (!expect_feasible) {
      CHECK(std::stod(rows[k + 1][7]) >= 1e-3);
    }
  }
}

TEST_CASE("scan output is byte-identical across runs", "[cli]") {
  const std::string out_a = "/tmp/wflab_scan_a.csv";
  const std::string out_b = "/tmp/wflab_scan_b.csv";
  const std::string args = "scan " + kPi16Grid + " --phases 2 --out ";
  REQUIRE(run_cli(args + out_a).exit_code == 0);
  REQUIRE(run_cli(args + out_b).exit_code == 0);
  CHECK(slurp(out_a) == slurp(out_b));
  std::remove(out_a.c_str());
  std::remove(out_b.c_str());
}

TEST_CASE("scan worker count does not change the bytes", "[cli]") {
  const std::string out_a = "/tmp/wflab_scan_j1.csv";
  const std::string out_b = "/tmp/wflab_scan_j4.csv";
  const std::string args = "scan " + kPi16Grid;
  REQUIRE(run_cli(args + " --jobs 1 --out " + out_a).exit_code == 0);
  REQUIRE(run_cli(args + " --jobs 4 --out " + out_b).exit_code == 0);
  CHECK(slurp(out_a) == slurp(out_b));
  std::remove(out_a.c_str());
  std::remove(out_b.c_str());
}

TEST_CASE("phase sweeps keep the balanced angle feasible", "[cli]") {
  const CliResult r = run_cli(
      "scan --grid 0.7853981633974483:0.7853981633974483:1 --phases 4");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("points=4 feasible=4 infeasible=0 indeterminate=0\n") !=
        std::string::npos);
}

TEST_CASE("scan rejects malformed grids", "[cli]") {
  CHECK(run_cli("scan --grid 1:0:0.1", true).exit_code == 3);
  CHECK(run_cli("scan --grid 1:0:0.1", true).output.find("empty grid") !=
        std::string::npos);
  CHECK(run_cli("scan --grid 0:1:0", true).exit_code == 3);
  CHECK(run_cli("scan --grid 0:2:0.5", true).exit_code == 3);
  CHECK(run_cli("scan --grid -1:1:0.5", true).exit_code == 3);
  CHECK(run_cli("scan --grid 0:1", true).exit_code == 3);
  CHECK(run_cli("scan --grid 0:1:abc", true).exit_code == 3);
}

TEST_CASE("unwritable output paths are I/O errors", "[cli]") {
  CHECK(run_cli("scan " + kPi16Grid + " --out /nonexistent-dir/out.csv", true)
            .exit_code == 3);
  CHECK(run_cli("predict --config " + config_path("case1.json") +
                " --out /nonexistent-dir/out.json", true)
            .exit_code == 3);
}

TEST_CASE("predict prints the perfectly-preserved table", "[cli]") {
  const CliResult r = run_cli("predict --config " + config_path("case1.json"));
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  CHECK(j["feasible"] == true);
  CHECK(std::abs(j["joint"]["UU"].get<double>() - 0.36) < 1e-12);
  CHECK(std::abs(j["joint"]["DD"].get<double>() - 0.64) < 1e-12);
  CHECK(std::abs(j["conditionals"]["U"]["U"].get<double>() - 1.0) < 1e-12);
  CHECK(std::abs(j["conditionals"]["D"]["D"].get<double>() - 1.0) < 1e-12);
  CHECK(std::abs(j["conditionals"]["U"]["D"].get<double>()) < 1e-12);
  CHECK(std::abs(j["marginals"]["t2"]["U"].get<double>() - 0.36) < 1e-12);
}

TEST_CASE("predict refuses the rotated basis with exit 2", "[cli]") {
  const CliResult r =
      run_cli("predict --config " + config_path("theta-pi8.json"), true);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("jointly measurable") != std::string::npos);
  // The message quotes the offending config.
  CHECK(r.output.find("0.9238795325112867") != std::string::npos);
}

TEST_CASE("predict maps missing files and bad JSON to exit 3", "[cli]") {
  CHECK(run_cli("predict --config /nonexistent.json", true).exit_code == 3);
  const std::string bad = "/tmp/wflab_bad_config.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run_cli("predict --config " + bad, true).exit_code == 3);
  std::ofstream(bad) << R"({"alpha":[1,0],"beta":[0,0],"a":[1,0]})";
  CHECK(run_cli("predict --config " + bad, true).exit_code == 3);
  std::remove(bad.c_str());
}

TEST_CASE("compare reproduces the quarter gap", "[cli]") {
  const CliResult r =
      run_cli("compare --config " + config_path("theta-pi8-plus.json") +
              " --seed 7 --shots 40000");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.output);
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] == std::vector<std::string>{"f1", "w", "f2", "count",
                                            "frequency", "analytic_p",
                                            "std_err"});
  double unitary_u = 0;
  double collapse_u = 0;
  long collapse_total = 0;
  long unitary_total = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double freq = std::stod(rows[i][4]);
    const double analytic = std::stod(rows[i][5]);
    const double sigma = std::sqrt(analytic * (1 - analytic) / 40000) + 1e-9;
    CHECK(std::abs(freq - analytic) < 5 * sigma);
    if (rows[i][0] == "-") {
      CHECK(rows[i][1] == "0");
      unitary_total += std::stol(rows[i][3]);
      if (rows[i][2] == "U") unitary_u = freq;
    } else {
      collapse_total += std::stol(rows[i][3]);
      if (rows[i][2] == "U") collapse_u += freq;
    }
  }
  CHECK(collapse_total == 40000);
  CHECK(unitary_total == 40000);
  CHECK(std::abs(unitary_u - collapse_u - 0.25) < 0.02);
}

TEST_CASE("compare JSON pairs analytics with the sampler", "[cli]") {
  const CliResult r =
      run_cli("compare --config " + config_path("theta-pi8-plus.json") +
              " --seed 3 --shots 1000 --format json");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  CHECK(std::abs(j["analytic"]["max_gap"].get<double>() - 0.25) < 1e-12);
  CHECK(std::abs(j["analytic"]["p_f2_unitary"]["U"].get<double>() - 0.75) <
        1e-12);
  CHECK(std::abs(j["analytic"]["p_f2_collapse"]["U"].get<double>() - 0.5) <
        1e-12);
  CHECK(std::abs(j["analytic"]["cond_collapse"]["U"]["U"].get<double>() -
                 0.75) < 1e-12);
  CHECK(j["empirical"]["shots"] == 1000);
  CHECK(j["empirical"]["seed"] == 3);
  CHECK(j["empirical"]["cells"].size() == 10);
}

TEST_CASE("compare is seed-deterministic and seed-sensitive", "[cli]") {
  const std::string base = "compare --config " +
                           config_path("theta-pi8-plus.json") +
                           " --shots 5000 --seed ";
  const CliResult a = run_cli(base + "11");
  const CliResult b = run_cli(base + "11 --jobs 4");
  const CliResult c = run_cli(base + "12");
  REQUIRE(a.exit_code == 0);
  CHECK(a.output == b.output);
  CHECK(a.output != c.output);
}

TEST_CASE("compare requires a seed", "[cli]") {
  CHECK(run_cli("compare --config " + config_path("bell.json"), true)
            .exit_code == 3);
}

TEST_CASE("hadamard config compares cleanly", "[cli]") {
  const CliResult r =
      run_cli("compare --config " + config_path("hadamard.json") +
              " --seed 5 --shots 1000 --format json");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  CHECK(std::abs(j["analytic"]["max_gap"].get<double>() - 0.5) < 1e-12);
  CHECK(j["empirical"]["cells"].size() == 6);
  // But predict must refuse it: the records are not jointly measurable.
  CHECK(run_cli("predict --config " + config_path("hadamard.json"), true)
            .exit_code == 2);
}

TEST_CASE("verify passes by default and honors --case", "[cli]") {
  const CliResult r = run_cli("verify --case bell");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  CHECK(j["all_pass"] == true);
  CHECK(j["suites"].size() >= 20);
  CHECK(j["case"]["name"] == "bell");
  for (const char* f1 : {"U", "D"})
    for (const char* f2 : {"U", "D"})
      CHECK(std::abs(j["case"]["conditionals"][f1][f2].get<double>() - 0.5) <
            1e-12);
  const CliResult comp = run_cli("verify --case computational");
  REQUIRE(comp.exit_code == 0);
  const nlohmann::json jc = nlohmann::json::parse(comp.output);
  CHECK(std::abs(jc["case"]["conditionals"]["U"]["U"].get<double>() - 1.0) <
        1e-12);
  CHECK(run_cli("verify --case bogus", true).exit_code == 3);
}

TEST_CASE("verify with zero tolerance fails and names a suite", "[cli]") {
  const CliResult r = run_cli("verify --tol 0", true);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("verification failed:") != std::string::npos);
  // Unbuffered stderr may land before the buffered stdout report when the
  // two streams are merged, so locate the JSON object explicitly.
  const std::size_t json_start = r.output.find('{');
  const std::size_t json_end = r.output.rfind('}');
  REQUIRE(json_start != std::string::npos);
  REQUIRE(json_end != std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(
      r.output.substr(json_start, json_end + 1 - json_start));
  CHECK(j["all_pass"] == false);
}

TEST_CASE("usage errors exit with code 3", "[cli]") {
  CHECK(run_cli("", true).exit_code == 3);
  CHECK(run_cli("frobnicate", true).exit_code == 3);
  CHECK(run_cli("predict", true).exit_code == 3);
  CHECK(run_cli("compare --seed 1", true).exit_code == 3);
  CHECK(run_cli("--help", true).exit_code == 0);
}

TEST_CASE("file output matches stdout output byte for byte", "[cli]") {
  const std::string out = "/tmp/wflab_predict_out.json";
  const CliResult direct =
      run_cli("predict --config " + config_path("bell.json"));
  REQUIRE(direct.exit_code == 0);
  REQUIRE(run_cli("predict --config " + config_path("bell.json") + " --out " +
                  out)
              .exit_code == 0);
  CHECK(slurp(out) == direct.output);
  std::remove(out.c_str());
}

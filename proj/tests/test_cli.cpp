// Copyright 2026 The fisherctl Authors.
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

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fisherctl/cli.hpp"
#include "json.hpp"

using namespace fisherctl;
using namespace fisherctl::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fisherctl");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return Outcome{code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return std::string(FISHERCTL_TEST_TMPDIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::vector<std::string> kQuick = {"--steps-per-unit", "10", "--max-iters", "4"};

std::vector<std::string> with_quick(std::vector<std::string> args) {
  args.insert(args.end(), kQuick.begin(), kQuick.end());
  return args;
}

}  // namespace

TEST_CASE("configuration errors exit with code 2") {
  CHECK(invoke({"sweep", "--model", "ising"}).code == kExitConfig);
  CHECK(invoke({"sweep", "--t-grid", "1:0.5:3"}).code == kExitConfig);
  CHECK(invoke({"sweep", "--t-grid", "0.1:1:0"}).code == kExitConfig);
  CHECK(invoke({"sweep", "--objective", "det"}).code == kExitConfig);
  CHECK(invoke({"sweep", "--model", "zz", "--objective", "fcle"}).code == kExitConfig);
  CHECK(invoke({"sweep", "--noise", "maybe"}).code == kExitConfig);
  CHECK(invoke({"sweep", "--bogus-flag"}).code == kExitConfig);
  CHECK(invoke({}).code == kExitConfig);
  CHECK(invoke({"--help"}).code == kExitOk);
}

TEST_CASE("an unwritable output path exits with code 3") {
  const Outcome o = invoke(with_quick({"sweep", "--t-grid", "0.5", "--out", "/nonexistent/dir/x.csv"}));
  CHECK(o.code == kExitIo);
  CHECK(invoke({"optimize", "--replay", tmp("missing-pulse.json")}).code == kExitIo);
}

TEST_CASE("sweep csv") {
  const Outcome o = invoke(with_quick({"sweep", "--model", "xxz", "--t-grid", "0.5:1.5:3", "--reproducible"}));
  REQUIRE(o.code == kExitOk);
  CHECK(o.out.rfind("t,tr_inv_uncontrolled,tr_inv_controlled,tr_inv_oracle,objective,iters,converged\n", 0) == 0);
  const auto rows = csv_rows(o.out);
  REQUIRE(rows.size() == 4);
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].size() == 7);
    const double t = std::stod(rows[i][0]);
    // Noiseless XXZ at zero control reaches 1/(2T²) already.
    CHECK(std::stod(rows[i][1]) == doctest::Approx(1 / (2 * t * t)).epsilon(1e-8));
    CHECK(std::stod(rows[i][3]) == doctest::Approx(1 / (2 * t * t)).epsilon(1e-10));
    CHECK(std::stoi(rows[i][5]) <= 4);
    CHECK((rows[i][6] == "true" || rows[i][6] == "false"));
  }
  const Outcome stamped = invoke(with_quick({"sweep", "--model", "xxz", "--t-grid", "0.5"}));
  CHECK(stamped.out.rfind("# generated ", 0) == 0);
}

TEST_CASE("divergent points serialize as inf") {
  // Noisy XXZ loses rank at 2T(x₁+x₂) = π/2.
  const Outcome o = invoke({"sweep", "--model", "xxz", "--noise", "on", "--t-grid", "0.3569991651806583",
                            "--steps-per-unit", "10", "--max-iters", "1", "--init", "zeros",
                            "--reproducible"});
  REQUIRE(o.code == kExitOk);
  const auto rows = csv_rows(o.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][1] == "inf");
  CHECK(rows[1][2] == "inf");
  CHECK(rows[1][3] == "inf");
  // Where the closed form itself is singular the oracle column reads na.
  const Outcome m = invoke({"sweep", "--t-grid", "3.14159265358979", "--steps-per-unit", "10",
                            "--max-iters", "1", "--init", "zeros", "--reproducible"});
  REQUIRE(m.code == kExitOk);
  CHECK(csv_rows(m.out)[1][1] == "inf");
  CHECK(csv_rows(m.out)[1][3] == "na");
}

TEST_CASE("reproducible runs are byte-identical") {
  const auto args = with_quick({"sweep", "--model", "magfield", "--noise", "on", "--t-grid", "0.4:1.2:3",
                                "--reproducible"});
  const Outcome a = invoke(args);
  const Outcome b = invoke(args);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  const auto warm = with_quick({"sweep", "--model", "xxz", "--t-grid", "0.4:1.2:3", "--reproducible",
                                "--warm-start"});
  CHECK(invoke(warm).out == invoke(warm).out);
}

TEST_CASE("json output and config file overlay") {
  const std::string cfg = tmp("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"model": "zz", "noise": {"enabled": true, "rates": [0.1, 0.05]},
             "t_grid": "0.5:1:2", "steps_per_unit": 10,
             "grape": {"max_iters": 3, "init": "zeros"}, "output": {"format": "json"},
             "reproducible": true})";
  }
  const Outcome o = invoke({"sweep", "--config", cfg});
  REQUIRE(o.code == kExitOk);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j["config"]["model"] == "zz");
  CHECK(j["records"].size() == 2);
  CHECK(j["records"][0]["iters"].get<int>() <= 3);
  CHECK_FALSE(j.contains("generated"));

  // Flags override the file.
  const Outcome over = invoke({"sweep", "--config", cfg, "--t-grid", "0.5", "--format", "csv"});
  REQUIRE(over.code == kExitOk);
  CHECK(csv_rows(over.out).size() == 2);

  {
    std::ofstream f(tmp("bad.json"));
    f << "{\"model\": ";
  }
  CHECK(invoke({"sweep", "--config", tmp("bad.json")}).code == kExitConfig);
  CHECK(invoke({"sweep", "--config", tmp("absent.json")}).code == kExitIo);
}

TEST_CASE("optimize writes a pulse that replays to the same numbers") {
  const std::string pulse = tmp("pulse.json");
  const Outcome o = invoke({"optimize", "--model", "xxz", "--noise", "on", "--time", "0.8",
                            "--steps-per-unit", "20", "--max-iters", "6", "--objective", "fcle",
                            "--pulse-out", pulse, "--reproducible"});
  REQUIRE(o.code == kExitOk);
  const Pulse p = read_pulse(pulse);
  CHECK(p.model == "xxz");
  CHECK(p.num_steps == 16);
  CHECK(p.amplitudes.rows() == 6);
  CHECK(p.amplitudes.cols() == 16);
  const Evaluation e = replay_pulse(p);
  CHECK(std::abs(e.objective - p.objective_value) <= 1e-9 * std::max(1.0, std::abs(p.objective_value)));
  CHECK(std::abs(e.tr_inv - p.tr_inv) <= 1e-9 * std::max(1.0, p.tr_inv));

  const Outcome r = invoke({"optimize", "--replay", pulse});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["objective_value"].get<double>() - j["stored_objective_value"].get<double>()) <=
        1e-9 * std::max(1.0, std::abs(p.objective_value)));
}

TEST_CASE("max_iters = 1 reports the initial pulse") {
  const Outcome o = invoke({"optimize", "--model", "xxz", "--time", "1", "--steps-per-unit", "10",
                            "--max-iters", "1", "--init", "zeros", "--reproducible"});
  REQUIRE(o.code == kExitOk);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j["iterations_used"] == 1);
  CHECK(j["final_tr_inv"].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("oracle tables") {
  SUBCASE("zz probabilities sum to one") {
    const Outcome o = invoke({"oracle", "--model", "zz", "--noise", "on", "--t-grid", "0.1:2:5", "--reproducible"});
    REQUIRE(o.code == kExitOk);
    const auto rows = csv_rows(o.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0][1] == "p_++");
    for (size_t i = 1; i < rows.size(); ++i) {
      double s = 0;
      for (int y = 1; y <= 4; ++y) s += std::stod(rows[i][static_cast<size_t>(y)]);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("noiseless xxz trace equals 1/(2T²)") {
    const Outcome o = invoke({"oracle", "--model", "xxz", "--t-grid", "0.5:2:4", "--reproducible"});
    REQUIRE(o.code == kExitOk);
    const auto rows = csv_rows(o.out);
    size_t col = 0;
    for (size_t c = 0; c < rows[0].size(); ++c) {
      if (rows[0][c] == "tr_inv") col = c;
    }
    REQUIRE(col > 0);
    for (size_t i = 1; i < rows.size(); ++i) {
      const double t = std::stod(rows[i][0]);
      CHECK(std::stod(rows[i][col]) == doctest::Approx(1 / (2 * t * t)).epsilon(1e-12));
    }
  }
  SUBCASE("magfield reports the spectrum") {
    const Outcome o = invoke({"oracle", "--noise", "on", "--t-grid", "1", "--reproducible"});
    REQUIRE(o.code == kExitOk);
    const auto rows = csv_rows(o.out);
    const auto& h = rows[0];
    CHECK(h[h.size() - 3] == "eig_lo");
    CHECK(std::stod(rows[1][h.size() - 3]) == doctest::Approx(0.5 * (1 - std::exp(-0.2))));
    CHECK(rows[1].back() == "ok");
  }
}

TEST_CASE("validate subcommand") {
  const Outcome o = invoke({"validate", "--t-grid", "0.5:1.5:2"});
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("FAIL") == std::string::npos);
  CHECK(o.out.find("PASS") != std::string::npos);
}

TEST_CASE("grid and noise parsing") {
  CHECK(parse_t_grid("0.1:3:30").size() == 30);
  CHECK(parse_t_grid("2.5") == std::vector<double>{2.5});
  CHECK(parse_t_grid("1:1:1") == std::vector<double>{1.0});
  CHECK_THROWS_AS(parse_t_grid("a:b:c"), ConfigError);
  RunConfig c = RunConfig::defaults();
  c.t_grid = parse_t_grid("-1:2:3");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig::defaults();
  apply_noise_flag(c, "0.3");
  CHECK(c.noise);
  CHECK(c.noise_rates == std::vector<double>{0.3});
  apply_noise_flag(c, "off");
  CHECK_FALSE(c.noise);
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(0.125) == "0.125");
  CHECK(c.steps_for(0.01) == 1);
}

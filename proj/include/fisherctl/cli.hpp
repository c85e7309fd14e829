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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fisherctl/error.hpp"
#include "fisherctl/grape.hpp"
#include "fisherctl/models.hpp"

namespace fisherctl::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

/// Invalid or inconsistent run configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Output could not be written or input could not be read (exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Every grid point failed numerically (exit code 4).
class AllPointsFailed : public Error {
 public:
  using Error::Error;
};

enum class OutputFormat { csv, json };

struct RunConfig {
  std::string model = "magfield";
  bool noise = false;
  /// Empty means the catalog rates of the model. A single rate applies to every channel.
  std::vector<double> noise_rates;
  /// Parameter values; empty means the catalog true values.
  std::vector<double> params;
  std::vector<double> t_grid;
  int steps_per_unit = 100;
  Objective objective = Objective::f0;
  GrapeConfig grape;
  std::string output_path;  // empty writes to stdout
  OutputFormat format = OutputFormat::csv;
  bool reproducible = false;
  bool warm_start = false;
  /// optimize only: the single target time and the pulse file to write or replay.
  std::optional<double> time;
  std::string pulse_out;
  std::string replay;

  static RunConfig defaults();
  /// Throws ConfigError.
  void validate() const;

  ParametricModel build_model() const;
  RVector true_values(const ParametricModel& model) const;
  int steps_for(double t) const;
};

/// start:stop:count, or a single value. Throws ConfigError.
std::vector<double> parse_t_grid(const std::string& spec);
/// "on", "off" or a comma-separated list of rates. Throws ConfigError.
void apply_noise_flag(RunConfig& config, const std::string& spec);
std::vector<double> parse_list(const std::string& spec);

/// Overlays a JSON config file onto `config`. Throws ConfigError or IoError.
void load_config_file(RunConfig& config, const std::string& path);
/// JSON rendering of the effective configuration (the "config" echo block).
std::string config_json(const RunConfig& config);

struct SweepRecord {
  double t = 0.0;
  double tr_inv_uncontrolled = 0.0;
  double tr_inv_controlled = 0.0;
  std::optional<double> tr_inv_oracle;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Set when the point failed numerically; the numeric fields are then NaN.
  bool flagged = false;
};

/// One sweep point: uncontrolled CFIM, GRAPE, controlled CFIM and the oracle value.
SweepRecord sweep_point(const RunConfig& config, double t,
                        const std::optional<ControlGrid>& warm = std::nullopt,
                        ControlGrid* pulse_out = nullptr);
std::vector<SweepRecord> run_sweep(const RunConfig& config);

/// 12 significant digits, "inf" for the divergence sentinel, "nan" for flagged values.
std::string format_number(double v);
void write_sweep_csv(std::ostream& out, const RunConfig& config,
                     const std::vector<SweepRecord>& records);
void write_sweep_json(std::ostream& out, const RunConfig& config,
                      const std::vector<SweepRecord>& records);

/// Multiple-T closed-form table. Columns are documented in the header row.
void write_oracle_table(std::ostream& out, const RunConfig& config);

struct Pulse {
  std::string model;
  std::vector<double> x_true;
  std::vector<double> noise_rates;
  double t = 0.0;
  int num_steps = 0;
  std::uint64_t seed = 0;
  Objective objective = Objective::f0;
  double objective_value = 0.0;
  double tr_inv = 0.0;
  std::vector<std::string> control_names;
  RMatrix amplitudes;
};

void write_pulse(const std::string& path, const Pulse& pulse);
Pulse read_pulse(const std::string& path);

struct OptimizeSummary {
  Pulse pulse;
  GrapeResult result;
};

OptimizeSummary run_optimize(const RunConfig& config);
/// Re-evaluates a stored pulse under its own model, parameters and noise.
Evaluation replay_pulse(const Pulse& pulse);

void write_optimize_summary(std::ostream& out, const RunConfig& config,
                            const OptimizeSummary& summary);

/// Invariant suite over every catalog model. Writes one PASS/FAIL line per check and returns
/// the number of failures.
int run_validate(std::ostream& out, const std::vector<double>& t_grid);

/// Truncates `path` and writes `content`. Throws IoError.
void write_text_file(const std::string& path, const std::string& content);

/// Entry point shared by the fisherctl tool and the CLI tests.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fisherctl::cli

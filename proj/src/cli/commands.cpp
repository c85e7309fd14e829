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

#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include "fisherctl/cli.hpp"
#include "fisherctl/oracles.hpp"
#include "json.hpp"

namespace fisherctl::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kPulseFormat = "fisherctl-pulse-1";

std::vector<double> channel_rates(const ParametricModel& m) {
  std::vector<double> r;
  for (const auto& c : m.noise.channels()) r.push_back(c.rate);
  return r;
}

std::vector<double> to_std(const RVector& v) { return {v.data(), v.data() + v.size()}; }

/// Non-finite values are not valid JSON numbers: +∞ becomes "inf" and NaN becomes null.
json json_number(double v) {
  if (std::isnan(v)) return json();
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

double number_from_json(const json& j) {
  if (j.is_null()) return kNaN;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("unexpected string '" + s + "' in place of a number");
  }
  return j.get<double>();
}

json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json_number(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Piecewise-constant resampling of a pulse onto `steps` segments of the same relative times.
RMatrix rescale_pulse(const RMatrix& amp, int steps) {
  RMatrix out(amp.rows(), steps);
  const auto old = static_cast<double>(amp.cols());
  for (int j = 0; j < steps; ++j) {
    const auto src = std::min<Eigen::Index>(
        amp.cols() - 1, static_cast<Eigen::Index>(std::floor((j + 0.5) / steps * old)));
    out.col(j) = amp.col(src);
  }
  return out;
}

GrapeProblem problem_for(const RunConfig& config, const ParametricModel& model, double t) {
  return GrapeProblem{model,  config.true_values(model), model.default_probe, model.default_povm,
                      t,      config.steps_for(t),     config.objective};
}

}  // namespace

SweepRecord sweep_point(const RunConfig& config, double t, const std::optional<ControlGrid>& warm,
                        ControlGrid* pulse_out) {
  const ParametricModel model = config.build_model();
  const GrapeProblem problem = problem_for(config, model, t);
  SweepRecord rec;
  rec.t = t;

  try {
    const oracle::OracleResult o =
        oracle::evaluate(model.name, problem.x, channel_rates(model), t);
    rec.tr_inv_oracle = o.tr_inv;
  } catch (const NumericalError&) {
    rec.tr_inv_oracle.reset();
  }

  try {
    const ControlGrid zero = ControlGrid::zeros(model.num_controls(), problem.num_steps, t);
    rec.tr_inv_uncontrolled = evaluate_controls(problem, zero).tr_inv;

    GrapeConfig g = config.grape;
    if (warm) {
      g.init = InitScheme::user_supplied;
      g.initial_controls = rescale_pulse(warm->amplitudes(), problem.num_steps);
    }
    const GrapeResult r = optimize(problem, g);
    rec.tr_inv_controlled = r.best_tr_inv;
    rec.objective = r.objective_history.back();
    rec.iterations = r.iterations_used;
    rec.converged = r.converged;
    if (pulse_out) *pulse_out = r.final_controls;
  } catch (const NumericalError&) {
    rec.flagged = true;
    rec.tr_inv_uncontrolled = rec.tr_inv_controlled = rec.objective = kNaN;
    rec.iterations = 0;
    rec.converged = false;
  }
  return rec;
}

std::vector<SweepRecord> run_sweep(const RunConfig& config) {
  config.validate();
  const int n = static_cast<int>(config.t_grid.size());
  std::vector<SweepRecord> records(static_cast<size_t>(n));
  if (config.warm_start) {
    std::optional<ControlGrid> prev;
    for (int i = 0; i < n; ++i) {
      ControlGrid pulse = ControlGrid::zeros(1, 1, 1.0);
      const auto ii = static_cast<size_t>(i);
      records[ii] = sweep_point(config, config.t_grid[ii], prev, &pulse);
      if (!records[ii].flagged) prev = pulse;
    }
  } else {
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
    // Grid points are independent; records land in grid order whatever the schedule.
#pragma omp parallel for schedule(dynamic) if (parallel::max_threads() > 1)
    for (int i = 0; i < n; ++i) {
      const auto ii = static_cast<size_t>(i);
      try {
        records[ii] = sweep_point(config, config.t_grid[ii]);
      } catch (...) {
        errors[ii] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  bool any_ok = false;
  for (const auto& r : records) any_ok = any_ok || !r.flagged;
  if (!any_ok) throw AllPointsFailed("sweep: every grid point failed numerically");
  return records;
}

void write_sweep_csv(std::ostream& out, const RunConfig& config,
                     const std::vector<SweepRecord>& records) {
  if (!config.reproducible) out << "# generated " << timestamp() << " by fisherctl\n";
  out << "t,tr_inv_uncontrolled,tr_inv_controlled,tr_inv_oracle,objective,iters,converged\n";
  for (const auto& r : records) {
    out << format_number(r.t) << ',' << format_number(r.tr_inv_uncontrolled) << ','
        << format_number(r.tr_inv_controlled) << ','
        << (r.tr_inv_oracle ? format_number(*r.tr_inv_oracle) : "na") << ','
        << format_number(r.objective) << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << '\n';
  }
}

void write_sweep_json(std::ostream& out, const RunConfig& config,
                      const std::vector<SweepRecord>& records) {
  json j;
  if (!config.reproducible) j["generated"] = timestamp();
  j["config"] = json::parse(config_json(config));
  json recs = json::array();
  for (const auto& r : records) {
    recs.push_back({{"t", r.t},
                    {"tr_inv_uncontrolled", json_number(r.tr_inv_uncontrolled)},
                    {"tr_inv_controlled", json_number(r.tr_inv_controlled)},
                    {"tr_inv_oracle", r.tr_inv_oracle ? json_number(*r.tr_inv_oracle) : json()},
                    {"objective", json_number(r.objective)},
                    {"iters", r.iterations},
                    {"converged", r.converged},
                    {"flagged", r.flagged}});
  }
  j["records"] = recs;
  out << j.dump(2) << '\n';
}

void write_oracle_table(std::ostream& out, const RunConfig& config) {
  config.validate();
  const ParametricModel model = config.build_model();
  const RVector x = config.true_values(model);
  const std::vector<double> rates = channel_rates(model);
  const int np = model.num_params();

  std::vector<oracle::OracleResult> rows;
  for (double t : config.t_grid) rows.push_back(oracle::evaluate(model.name, x, rates, t));
  const oracle::OracleResult& first = rows.front();
  const bool has_cfim = first.cfim.has_value() || first.cfim_singular;
  const bool has_qfim = first.qfim.has_value();
  const bool has_eig = first.eigenvalues.has_value();

  // Columns: t, p_<label> per outcome, cfim_ij and qfim_ij for i ≤ j (0-based), tr_inv of the
  // CFIM, the two non-zero eigenvalues where known, and flag ("ok" or "singular").
  if (!config.reproducible) out << "# generated " << timestamp() << " by fisherctl\n";
  out << "t";
  for (const auto& l : first.labels) out << ",p_" << l;
  auto pair_names = [&](const char* prefix) {
    for (int a = 0; a < np; ++a) {
      for (int b = a; b < np; ++b) out << ',' << prefix << a << b;
    }
  };
  if (has_cfim) {
    pair_names("cfim_");
    out << ",tr_inv";
  }
  if (has_qfim) pair_names("qfim_");
  if (has_eig) out << ",eig_lo,eig_hi";
  out << ",flag\n";

  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << format_number(config.t_grid[i]);
    for (Eigen::Index y = 0; y < r.probabilities->size(); ++y) {
      out << ',' << format_number((*r.probabilities)(y));
    }
    auto pairs = [&](const std::optional<FisherMatrix>& f) {
      for (int a = 0; a < np; ++a) {
        for (int b = a; b < np; ++b) out << ',' << format_number(f ? (*f)(a, b) : kNaN);
      }
    };
    if (has_cfim) {
      pairs(r.cfim);
      out << ',' << format_number(r.tr_inv ? *r.tr_inv : kNaN);
    }
    if (has_qfim) pairs(r.qfim);
    if (has_eig) {
      out << ',' << format_number((*r.eigenvalues)[0]) << ',' << format_number((*r.eigenvalues)[1]);
    }
    out << ',' << (r.cfim_singular ? "singular" : "ok") << '\n';
  }
}

void write_pulse(const std::string& path, const Pulse& p) {
  json j = {{"format", kPulseFormat},
            {"model", p.model},
            {"x_true", p.x_true},
            {"noise_rates", p.noise_rates},
            {"T", p.t},
            {"m", p.num_steps},
            {"seed", p.seed},
            {"objective", to_string(p.objective)},
            {"objective_value", json_number(p.objective_value)},
            {"tr_inv", json_number(p.tr_inv)},
            {"control_names", p.control_names},
            {"amplitudes", matrix_json(p.amplitudes)}};
  // nlohmann serializes doubles with the shortest round-trip representation (≤ 17 digits).
  write_text_file(path, j.dump(2) + "\n");
}

Pulse read_pulse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read pulse file '" + path + "'");
  json j;
  try {
    in >> j;
    if (j.value("format", "") != kPulseFormat) throw ConfigError("not a fisherctl pulse file");
    Pulse p;
    p.model = j.at("model").get<std::string>();
    p.x_true = j.at("x_true").get<std::vector<double>>();
    p.noise_rates = j.at("noise_rates").get<std::vector<double>>();
    p.t = j.at("T").get<double>();
    p.num_steps = j.at("m").get<int>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.objective = objective_from_string(j.at("objective").get<std::string>());
    p.objective_value = number_from_json(j.at("objective_value"));
    p.tr_inv = number_from_json(j.at("tr_inv"));
    p.control_names = j.at("control_names").get<std::vector<std::string>>();
    const json& rows = j.at("amplitudes");
    p.amplitudes.resize(static_cast<Eigen::Index>(rows.size()), p.num_steps);
    for (size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].size() != static_cast<size_t>(p.num_steps)) {
        throw ConfigError("pulse row " + std::to_string(k) + " has the wrong length");
      }
      for (int s = 0; s < p.num_steps; ++s) {
        p.amplitudes(static_cast<Eigen::Index>(k), s) = number_from_json(rows[k][static_cast<size_t>(s)]);
      }
    }
    return p;
  } catch (const json::exception& e) {
    throw ConfigError("pulse file '" + path + "': " + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError("pulse file '" + path + "': " + e.what());
  }
}

OptimizeSummary run_optimize(const RunConfig& config) {
  config.validate();
  double t = 0.0;
  if (config.time) {
    t = *config.time;
  } else if (config.t_grid.size() == 1) {
    t = config.t_grid.front();
  } else {
    throw ConfigError("optimize needs --time or a single-point T grid");
  }
  const ParametricModel model = config.build_model();
  const GrapeProblem problem = problem_for(config, model, t);
  OptimizeSummary s{Pulse{}, optimize(problem, config.grape)};
  Pulse& p = s.pulse;
  p.model = model.name;
  p.x_true = to_std(problem.x);
  p.noise_rates = channel_rates(model);
  p.t = t;
  p.num_steps = problem.num_steps;
  p.seed = config.grape.seed;
  p.objective = config.objective;
  p.objective_value = s.result.objective_history.back();
  p.tr_inv = s.result.final_tr_inv;
  p.control_names = model.control_names;
  p.amplitudes = s.result.final_controls.amplitudes();
  if (!config.pulse_out.empty()) write_pulse(config.pulse_out, p);
  return s;
}

Evaluation replay_pulse(const Pulse& pulse) {
  const ParametricModel model = [&] {
    try {
      return model_by_name(pulse.model).with_noise_rates(pulse.noise_rates);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("pulse: ") + e.what());
    }
  }();
  if (static_cast<int>(pulse.x_true.size()) != model.num_params() ||
      pulse.amplitudes.rows() != model.num_controls()) {
    throw ConfigError("pulse: shape does not match model " + pulse.model);
  }
  GrapeProblem problem{model,
                       Eigen::Map<const RVector>(pulse.x_true.data(),
                                                 static_cast<Eigen::Index>(pulse.x_true.size())),
                       model.default_probe,
                       model.default_povm,
                       pulse.t,
                       pulse.num_steps,
                       pulse.objective};
  return evaluate_controls(problem, ControlGrid(pulse.amplitudes, pulse.t));
}

void write_optimize_summary(std::ostream& out, const RunConfig& config,
                            const OptimizeSummary& s) {
  const GrapeResult& r = s.result;
  json j;
  if (!config.reproducible) j["generated"] = timestamp();
  j["model"] = s.pulse.model;
  j["T"] = s.pulse.t;
  j["m"] = s.pulse.num_steps;
  j["seed"] = s.pulse.seed;
  j["objective"] = to_string(s.pulse.objective);
  j["objective_value"] = json_number(s.pulse.objective_value);
  j["final_tr_inv"] = json_number(r.final_tr_inv);
  j["best_tr_inv"] = json_number(r.best_tr_inv);
  j["initial_objective"] = json_number(r.objective_history.front());
  j["iterations_used"] = r.iterations_used;
  j["converged"] = r.converged;
  j["stop_reason"] = r.stop_reason;
  j["final_cfim"] = matrix_json(r.final_cfim.entries());
  if (!config.pulse_out.empty()) j["pulse_file"] = config.pulse_out;
  out << j.dump(2) << '\n';
}

}  // namespace fisherctl::cli

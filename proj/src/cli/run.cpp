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
#include <cstdio>
#include <sstream>

#include "CLI11.hpp"
#include "fisherctl/cli.hpp"

namespace fisherctl::cli {

namespace {

struct Flags {
  std::string config_file;
  std::string model, noise, t_grid, objective, init, update, out, format, params;
  std::optional<int> steps_per_unit, max_iters, window;
  std::optional<std::uint64_t> seed;
  std::optional<double> step_size, tol, time, bound, init_amplitude;
  bool reproducible = false, warm_start = false, fixed_step = false;
  std::string replay, pulse_out;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_file, "JSON config file; flags override its values");
  app->add_option("--model", f.model, "magfield, zz or xxz");
  app->add_option("--noise", f.noise, "on, off, or rate[,rate]");
  app->add_option("--params", f.params, "parameter values x1[,x2...] (default: catalog values)");
  app->add_option("--t-grid", f.t_grid, "start:stop:count or a single T");
  app->add_option("--out", f.out, "output path (default: stdout)");
  app->add_option("--format", f.format, "csv or json");
  app->add_flag("--reproducible", f.reproducible, "omit the timestamp line");
}

void add_grape(CLI::App* app, Flags& f) {
  app->add_option("--steps-per-unit", f.steps_per_unit, "time steps per unit time (>= 10)");
  app->add_option("--objective", f.objective, "f0 or fcle");
  app->add_option("--seed", f.seed, "seed of the random initial pulse");
  app->add_option("--init", f.init, "zeros or random");
  app->add_option("--init-amplitude", f.init_amplitude, "half-width of the random initial pulse");
  app->add_option("--update", f.update, "gradient or bfgs");
  app->add_option("--max-iters", f.max_iters, "iteration cap, counting the initial pulse");
  app->add_option("--step-size", f.step_size, "initial gradient step");
  app->add_option("--tol", f.tol, "relative objective change that counts as converged");
  app->add_option("--window", f.window, "iterations spanned by the convergence test");
  app->add_option("--amplitude-bound", f.bound, "clip controls to +-bound");
  app->add_flag("--fixed-step", f.fixed_step, "plain gradient without line search");
}

RunConfig build_config(const Flags& f) {
  RunConfig c = RunConfig::defaults();
  if (!f.config_file.empty()) load_config_file(c, f.config_file);
  if (!f.model.empty()) c.model = f.model;
  if (!f.noise.empty()) apply_noise_flag(c, f.noise);
  if (!f.params.empty()) c.params = parse_list(f.params);
  if (!f.t_grid.empty()) c.t_grid = parse_t_grid(f.t_grid);
  if (f.steps_per_unit) c.steps_per_unit = *f.steps_per_unit;
  if (!f.objective.empty()) {
    try {
      c.objective = objective_from_string(f.objective);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (f.seed) c.grape.seed = *f.seed;
  if (!f.init.empty()) {
    if (f.init == "zeros") {
      c.grape.init = InitScheme::zeros;
    } else if (f.init == "random") {
      c.grape.init = InitScheme::uniform_random;
    } else {
      throw ConfigError("unknown init scheme '" + f.init + "' (expected zeros or random)");
    }
  }
  if (f.init_amplitude) c.grape.init_amplitude = *f.init_amplitude;
  if (!f.update.empty()) {
    if (f.update == "gradient") {
      c.grape.update = UpdateRule::plain_gradient;
    } else if (f.update == "bfgs") {
      c.grape.update = UpdateRule::bfgs;
    } else {
      throw ConfigError("unknown update rule '" + f.update + "' (expected gradient or bfgs)");
    }
  }
  if (f.max_iters) c.grape.max_iters = *f.max_iters;
  if (f.step_size) c.grape.step_size = *f.step_size;
  if (f.tol) c.grape.convergence_tol = *f.tol;
  if (f.window) c.grape.convergence_window = *f.window;
  if (f.bound) c.grape.amplitude_bound = *f.bound;
  if (f.fixed_step) c.grape.fixed_step = true;
  if (!f.out.empty()) c.output_path = f.out;
  if (!f.format.empty()) {
    if (f.format == "csv") {
      c.format = OutputFormat::csv;
    } else if (f.format == "json") {
      c.format = OutputFormat::json;
    } else {
      throw ConfigError("unknown format '" + f.format + "' (expected csv or json)");
    }
  }
  if (f.reproducible) c.reproducible = true;
  if (f.warm_start) c.warm_start = true;
  if (f.time) c.time = *f.time;
  c.pulse_out = f.pulse_out;
  c.replay = f.replay;
  return c;
}

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.output_path.empty()) {
    out << text;
  } else {
    write_text_file(c.output_path, text);
  }
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  if (const int n = parallel::threads_from_env(); n > 0) parallel::set_max_threads(n);

  CLI::App app{"Fisher-information precision limits and GRAPE control synthesis"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* sweep = app.add_subcommand("sweep", "optimize controls over a T grid");
  add_common(sweep, f);
  add_grape(sweep, f);
  sweep->add_flag("--warm-start", f.warm_start, "start each T from the previous pulse, rescaled");

  CLI::App* opt = app.add_subcommand("optimize", "one GRAPE run at a single T");
  add_common(opt, f);
  add_grape(opt, f);
  opt->add_option("--time", f.time, "target time T");
  opt->add_option("--pulse-out", f.pulse_out, "write the optimized pulse here");
  opt->add_option("--replay", f.replay, "re-evaluate a stored pulse instead of optimizing");

  CLI::App* orc = app.add_subcommand("oracle", "closed-form tables over a T grid");
  add_common(orc, f);

  CLI::App* val = app.add_subcommand("validate", "run the invariant suite");
  std::string val_grid = "0.1:3:20";
  val->add_option("--t-grid", val_grid, "start:stop:count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (val->parsed()) {
      const int failures = run_validate(out, parse_t_grid(val_grid));
      return failures == 0 ? kExitOk : kExitNumerical;
    }
    const RunConfig c = build_config(f);
    std::ostringstream text;
    if (sweep->parsed()) {
      const auto records = run_sweep(c);
      if (c.format == OutputFormat::csv) {
        write_sweep_csv(text, c, records);
      } else {
        write_sweep_json(text, c, records);
      }
    } else if (orc->parsed()) {
      write_oracle_table(text, c);
    } else if (!c.replay.empty()) {
      c.validate();
      const Pulse p = read_pulse(c.replay);
      const Evaluation e = replay_pulse(p);
      char buf[512];
      std::snprintf(buf, sizeof buf,
                    "{\n  \"replay\": \"%s\",\n  \"objective_value\": %.17g,\n  \"tr_inv\": %s,\n"
                    "  \"stored_objective_value\": %.17g,\n  \"stored_tr_inv\": %s\n}\n",
                    c.replay.c_str(), e.objective, format_number(e.tr_inv).c_str(),
                    p.objective_value, format_number(p.tr_inv).c_str());
      text << buf;
    } else {
      write_optimize_summary(text, c, run_optimize(c));
    }
    emit(c, out, text.str());
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "fisherctl: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "fisherctl: " << e.what() << '\n';
    return kExitIo;
  } catch (const AllPointsFailed& e) {
    err << "fisherctl: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    err << "fisherctl: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionError& e) {
    err << "fisherctl: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "fisherctl: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace fisherctl::cli

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
#include <fstream>
#include <sstream>

#include "fisherctl/cli.hpp"
#include "json.hpp"

namespace fisherctl::cli {

using nlohmann::json;

namespace {

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " '" + s + "'");
  }
}

std::string init_name(InitScheme s) {
  switch (s) {
    case InitScheme::zeros:
      return "zeros";
    case InitScheme::uniform_random:
      return "random";
    case InitScheme::user_supplied:
      return "user";
  }
  return "random";
}

InitScheme init_from_string(const std::string& s) {
  if (s == "zeros") return InitScheme::zeros;
  if (s == "random") return InitScheme::uniform_random;
  throw ConfigError("unknown init scheme '" + s + "' (expected zeros or random)");
}

UpdateRule update_from_string(const std::string& s) {
  if (s == "gradient") return UpdateRule::plain_gradient;
  if (s == "bfgs") return UpdateRule::bfgs;
  throw ConfigError("unknown update rule '" + s + "' (expected gradient or bfgs)");
}

Objective objective_checked(const std::string& s) {
  try {
    return objective_from_string(s);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.t_grid = parse_t_grid("0.1:3:30");
  return c;
}

void RunConfig::validate() const {
  const ParametricModel m = [&] {
    try {
      return model_by_name(model);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }();
  if (t_grid.empty()) throw ConfigError("T grid is empty");
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !std::isfinite(t_grid[i])) {
      throw ConfigError("T grid values must be positive and finite");
    }
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw ConfigError("T grid must be strictly increasing");
    }
  }
  if (steps_per_unit < 10) throw ConfigError("steps per unit time must be at least 10");
  if (objective == Objective::fcle && m.num_params() != 2) {
    throw ConfigError("objective fcle needs a two-parameter model");
  }
  const size_t channels = m.noise.channels().size();
  if (!noise_rates.empty() && noise_rates.size() != 1 && noise_rates.size() != channels) {
    throw ConfigError("model " + model + " takes " + std::to_string(channels) + " noise rates");
  }
  for (double r : noise_rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("noise rates must be non-negative");
  }
  if (!params.empty() && static_cast<int>(params.size()) != m.num_params()) {
    throw ConfigError("model " + model + " takes " + std::to_string(m.num_params()) +
                      " parameters");
  }
  if (time && !(*time > 0.0)) throw ConfigError("--time must be positive");
  try {
    GrapeConfig g = grape;
    if (g.init == InitScheme::user_supplied) g.init = InitScheme::zeros;
    g.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

ParametricModel RunConfig::build_model() const {
  ParametricModel m = model_by_name(model);
  if (!noise) return m.noiseless();
  if (noise_rates.empty()) return m;
  return m.with_noise_rates(noise_rates);
}

RVector RunConfig::true_values(const ParametricModel& m) const {
  if (params.empty()) return m.true_values;
  return Eigen::Map<const RVector>(params.data(), static_cast<Eigen::Index>(params.size()));
}

int RunConfig::steps_for(double t) const {
  return std::max(1, static_cast<int>(std::lround(steps_per_unit * t)));
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, "list value"));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<double> parse_t_grid(const std::string& spec) {
  if (spec.empty()) return {};
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() == 1) return {parse_double(parts[0], "T value")};
  if (parts.size() != 3) throw ConfigError("T grid must be start:stop:count");
  const double a = parse_double(parts[0], "T grid start");
  const double b = parse_double(parts[1], "T grid stop");
  const double n = parse_double(parts[2], "T grid count");
  if (n < 0 || n != std::floor(n)) throw ConfigError("T grid count must be a whole number");
  const int count = static_cast<int>(n);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
  }
  return out;
}

void apply_noise_flag(RunConfig& config, const std::string& spec) {
  if (spec == "off") {
    config.noise = false;
    config.noise_rates.clear();
  } else if (spec == "on") {
    config.noise = true;
    config.noise_rates.clear();
  } else {
    config.noise = true;
    config.noise_rates = parse_list(spec);
  }
}

void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  c.model = get_or<std::string>(j, "model", c.model);
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    if (n.is_boolean()) {
      c.noise = n.get<bool>();
    } else if (n.is_object()) {
      c.noise = get_or<bool>(n, "enabled", true);
      c.noise_rates = get_or<std::vector<double>>(n, "rates", {});
    } else {
      throw ConfigError("config key 'noise' must be a boolean or an object");
    }
  }
  c.params = get_or<std::vector<double>>(j, "params", c.params);
  if (j.contains("t_grid")) {
    const json& t = j.at("t_grid");
    if (t.is_array()) {
      c.t_grid = t.get<std::vector<double>>();
    } else if (t.is_string()) {
      c.t_grid = parse_t_grid(t.get<std::string>());
    } else {
      throw ConfigError("config key 't_grid' must be an array or a start:stop:count string");
    }
  }
  c.steps_per_unit = get_or<int>(j, "steps_per_unit", c.steps_per_unit);
  if (j.contains("objective")) c.objective = objective_checked(j.at("objective").get<std::string>());
  if (j.contains("time")) c.time = get_or<double>(j, "time", 0.0);
  if (j.contains("grape")) {
    const json& g = j.at("grape");
    GrapeConfig& gc = c.grape;
    gc.step_size = get_or<double>(g, "step_size", gc.step_size);
    gc.max_iters = get_or<int>(g, "max_iters", gc.max_iters);
    gc.convergence_tol = get_or<double>(g, "tol", gc.convergence_tol);
    gc.convergence_window = get_or<int>(g, "window", gc.convergence_window);
    if (g.contains("init")) gc.init = init_from_string(g.at("init").get<std::string>());
    gc.seed = get_or<std::uint64_t>(g, "seed", gc.seed);
    gc.init_amplitude = get_or<double>(g, "init_amplitude", gc.init_amplitude);
    if (g.contains("update")) gc.update = update_from_string(g.at("update").get<std::string>());
    gc.fixed_step = get_or<bool>(g, "fixed_step", gc.fixed_step);
    if (g.contains("amplitude_bound") && !g.at("amplitude_bound").is_null()) {
      gc.amplitude_bound = g.at("amplitude_bound").get<double>();
    }
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    c.output_path = get_or<std::string>(o, "path", c.output_path);
    if (o.contains("format")) {
      const auto f = o.at("format").get<std::string>();
      if (f == "csv") {
        c.format = OutputFormat::csv;
      } else if (f == "json") {
        c.format = OutputFormat::json;
      } else {
        throw ConfigError("unknown output format '" + f + "'");
      }
    }
  }
  c.reproducible = get_or<bool>(j, "reproducible", c.reproducible);
  c.warm_start = get_or<bool>(j, "warm_start", c.warm_start);
}

std::string config_json(const RunConfig& c) {
  json g = {{"step_size", c.grape.step_size},
            {"max_iters", c.grape.max_iters},
            {"tol", c.grape.convergence_tol},
            {"window", c.grape.convergence_window},
            {"init", init_name(c.grape.init)},
            {"seed", c.grape.seed},
            {"init_amplitude", c.grape.init_amplitude},
            {"update", c.grape.update == UpdateRule::bfgs ? "bfgs" : "gradient"},
            {"fixed_step", c.grape.fixed_step},
            {"amplitude_bound", c.grape.amplitude_bound ? json(*c.grape.amplitude_bound) : json()}};
  json j = {{"model", c.model},
            {"noise", {{"enabled", c.noise}, {"rates", c.noise_rates}}},
            {"params", c.params},
            {"t_grid", c.t_grid},
            {"steps_per_unit", c.steps_per_unit},
            {"objective", to_string(c.objective)},
            {"grape", g},
            {"output", {{"path", c.output_path}, {"format", c.format == OutputFormat::csv ? "csv" : "json"}}},
            {"reproducible", c.reproducible},
            {"warm_start", c.warm_start}};
  return j.dump();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace fisherctl::cli

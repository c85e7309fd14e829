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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "fisherctl/cli.hpp"
#include "fisherctl/oracles.hpp"

namespace fisherctl::cli {

namespace {

struct Check {
  std::string name;
  double worst = 0.0;  // worst observed margin, reported alongside the verdict
  bool ok = true;
  int points = 0;
};

void update(Check& c, bool ok, double value, bool lower_is_worse) {
  c.ok = c.ok && ok;
  if (c.points == 0) {
    c.worst = value;
  } else {
    c.worst = lower_is_worse ? std::min(c.worst, value) : std::max(c.worst, value);
  }
  ++c.points;
}

/// Probability oracles that are exact solutions of the master equation for this setting.
bool oracle_probs_exact(const std::string& model, bool noisy) {
  return !noisy || model != "magfield";
}

RMatrix random_amplitudes(int p, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RMatrix a(p, m);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < p; ++k) a(k, j) = 2.0 * std::generate_canonical<double, 53>(rng) - 1.0;
  }
  return a;
}

}  // namespace

int run_validate(std::ostream& out, const std::vector<double>& t_grid) {
  int failures = 0;
  for (const auto& name : model_names()) {
    for (bool noisy : {false, true}) {
      const ParametricModel base = model_by_name(name);
      const ParametricModel model = noisy ? base : base.noiseless();
      std::vector<double> rates;
      for (const auto& c : model.noise.channels()) rates.push_back(c.rate);

      Check sum{"probabilities_sum_to_one"}, trace{"trace_preserved"};
      Check dominance{"qfim_minus_cfim_psd"}, bound{"tr_inv_at_least_inverse_f0"};
      Check oracle_check{"oracle_probabilities"};
      for (double t : t_grid) {
        const int m = std::max(10, static_cast<int>(std::lround(20 * t)));
        for (int variant = 0; variant < 2; ++variant) {
          const ControlGrid controls =
              variant == 0 ? ControlGrid::zeros(model.num_controls(), m, t)
                           : ControlGrid(random_amplitudes(model.num_controls(), m, 7), t);
          const Trajectory tr = propagate(model, model.true_values, controls, model.default_probe);
          const MeasuredDerivs md = measure_derivs(tr, model.default_povm);
          update(sum, std::abs(md.p.sum() - 1.0) <= 1e-9, std::abs(md.p.sum() - 1.0), false);
          const double tr_err = std::abs(tr.final_state().trace() - Complex(1.0));
          update(trace, tr_err <= 1e-9, tr_err, false);

          const FisherMatrix fc = cfim(md.p, md.dp);
          const FisherMatrix fq = qfim(tr.final_density(), tr.final_derivs());
          const double min_eig =
              Eigen::SelfAdjointEigenSolver<RMatrix>(fq.entries() - fc.entries()).eigenvalues()(0);
          update(dominance, min_eig >= -1e-7, min_eig, true);

          const double ti = tr_inv(fc);
          const double f0 = objective_f0(fc);
          // 1/f0 = Σ 1/F_αα; with a vanishing diagonal both sides are +∞.
          const double margin = (f0 > 0.0 && std::isfinite(ti)) ? ti - 1.0 / f0 : 0.0;
          const bool ok = f0 > 0.0 ? ti >= (1.0 / f0) * (1.0 - 1e-9) : std::isinf(ti);
          update(bound, ok, margin, true);

          if (variant == 0 && oracle_probs_exact(name, noisy)) {
            const auto o = oracle::evaluate(name, model.true_values, rates, t);
            const double err = (md.p - *o.probabilities).cwiseAbs().maxCoeff();
            update(oracle_check, err <= 1e-9, err, false);
          }
        }
      }
      for (const Check* c : {&sum, &trace, &dominance, &bound, &oracle_check}) {
        if (c->points == 0) continue;
        char line[256];
        std::snprintf(line, sizeof line, "%s %s noise=%s %s points=%d worst=%.3e\n",
                      c->ok ? "PASS" : "FAIL", name.c_str(), noisy ? "on" : "off",
                      c->name.c_str(), c->points, c->worst);
        out << line;
        if (!c->ok) ++failures;
      }
    }
  }
  return failures;
}

}  // namespace fisherctl::cli

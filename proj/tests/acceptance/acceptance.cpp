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

// Acceptance checks. Usage: fisherctl_acceptance [criterion...]; no argument runs all of them.
// Prints one PASS/FAIL line per criterion and exits non-zero if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fisherctl/cli.hpp"
#include "fisherctl/dynamics.hpp"
#include "fisherctl/error.hpp"
#include "fisherctl/fisher.hpp"
#include "fisherctl/grape.hpp"
#include "fisherctl/models.hpp"
#include "fisherctl/oracles.hpp"
#include "oracle_support.hpp"

using namespace fisherctl;
namespace ts = fisherctl::testing;

namespace {

// Pinned thresholds.
constexpr double kProbTol = 1e-9;       // C1 max abs error
constexpr double kProbSeconds = 30.0;   // C1 runtime
constexpr double kFisherTol = 1e-6;     // C2 relative error
constexpr double kGradTol = 1e-3;       // C3 relative error at m = 100
constexpr int kGradSamples = 50;        // C3 samples per model
constexpr double kShrinkRatio = 1.8;    // C3 error ratio per doubling of m
constexpr double kGradSeconds = 120.0;  // C3 runtime
constexpr double kC4Tol = 0.05;         // C4 relative to 3/(4T²)
constexpr double kC4Seconds = 300.0;    // C4 runtime per T
constexpr double kC5Tol = 0.10;         // C5 relative to 3/(8T²)
constexpr double kPsdTol = 1e-7;        // C7 min eigenvalue of F_q − F_cl
constexpr double kBoundTol = 1e-9;      // C7 Tr F⁻¹ ≥ 1/f₀ slack

const double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}

int steps_for(double t, int per_unit) {
  return std::max(10, static_cast<int>(std::lround(per_unit * t)));
}

std::vector<double> rates_of(const ParametricModel& m) {
  std::vector<double> r;
  for (const auto& c : m.noise.channels()) r.push_back(c.rate);
  return r;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool report(int c, bool pass, const std::string& detail) {
  std::printf("%s C%d %s\n", pass ? "PASS" : "FAIL", c, detail.c_str());
  std::fflush(stdout);
  return pass;
}

/// Zero-control engine quantities.
struct Engine {
  RVector p;
  FisherMatrix cl;
  FisherMatrix q;
};

Engine engine_at(const ParametricModel& m, const RVector& x, const ControlGrid& c,
                 const Povm& povm) {
  const Trajectory tr = propagate(m, x, c, m.default_probe);
  const MeasuredDerivs md = measure_derivs(tr, povm);
  return Engine{md.p, cfim(md.p, md.dp), qfim(tr.final_density(), tr.final_derivs())};
}

// ---------------------------------------------------------------------------------------------
// C1: propagated probabilities match every closed-form probability display.

bool criterion1() {
  const auto t0 = Clock::now();
  std::string detail;
  bool pass = true;
  for (const auto& name : model_names()) {
    for (bool noisy : {false, true}) {
      const ParametricModel m = noisy ? model_by_name(name) : model_by_name(name).noiseless();
      const std::vector<double> rates =
          noisy ? rates_of(m) : std::vector<double>(m.noise.channels().size(), 0.0);
      double worst = 0.0;
      for (double t : linspace(0.1, 3.0, 20)) {
        const RVector want = *oracle::evaluate(name, m.true_values, rates, t).probabilities;
        PropagateOptions opt;
        opt.with_derivatives = false;
        const Trajectory tr = propagate(m, m.true_values, ControlGrid::zeros(6, steps_for(t, 100), t),
                                        m.default_probe, opt);
        worst = std::max(worst, (measure(tr.final_state(), m.default_povm) - want).cwiseAbs().maxCoeff());
      }
      pass = pass && worst < kProbTol;
      detail += name + (noisy ? "/noisy" : "/noiseless") + "=" + fmt(worst) + " ";
    }
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < kProbSeconds;
  return report(1, pass, "max_abs_err " + detail + "tol=" + fmt(kProbTol) + " time=" + fmt(secs) + "s");
}

// ---------------------------------------------------------------------------------------------
// C2: engine CFIM/QFIM match the closed forms.

/// Entrywise relative error. Entries that vanish by structure have no relative error of their
/// own; they are measured against √(F_αα F_ββ), the largest value Cauchy–Schwarz allows.
double fisher_rel_err(const RMatrix& got, const RMatrix& want) {
  double worst = 0.0;
  for (Eigen::Index a = 0; a < want.rows(); ++a) {
    for (Eigen::Index b = 0; b < want.cols(); ++b) {
      const double s = std::sqrt(std::abs(want(a, a) * want(b, b)));
      const double den = std::abs(want(a, b)) > 1e-6 * s ? std::abs(want(a, b)) : s;
      worst = std::max(worst, std::abs(got(a, b) - want(a, b)) / den);
    }
  }
  return worst;
}

bool criterion2() {
  std::map<std::string, double> worst;
  auto note = [&](const std::string& key, const RMatrix& got, const RMatrix& want) {
    worst[key] = std::max(worst[key], fisher_rel_err(got, want));
  };
  int singular = 0;
  for (double t : linspace(0.1, 3.0, 20)) {
    const int steps = steps_for(t, 100);
    const ControlGrid zero = ControlGrid::zeros(6, steps, t);
    for (bool noisy : {false, true}) {
      const std::string tag = noisy ? "noisy" : "noiseless";
      {
        const ParametricModel m = noisy ? model_magnetic_field() : model_magnetic_field().noiseless();
        const Engine e = engine_at(m, m.true_values, zero, m.default_povm);
        const double g = noisy ? rates_of(m)[0] : 0.0;
        const RVector& x = m.true_values;
        note("magfield_qfim/" + tag, e.q.entries(), oracle::magfield_qfim(x(0), x(1), x(2), g, t).entries());
        try {
          note("magfield_cfim/" + tag, e.cl.entries(),
               oracle::magfield_cfim(x(0), x(1), x(2), g, t).entries());
        } catch (const SingularDenominator&) {
          ++singular;
        }
      }
      {
        const ParametricModel m = noisy ? model_xxz() : model_xxz().noiseless();
        const Engine e = engine_at(m, m.true_values, zero, m.default_povm);
        const double g = noisy ? rates_of(m)[0] : 0.0;
        note("xxz_cfim/" + tag, e.cl.entries(),
             oracle::xxz_cfim(m.true_values(0), m.true_values(1), g, t).entries());
        if (!noisy) {
          RVector d(2);
          d << 8 * t * t, 4 * t * t;
          note("xxz_qfim", e.q.entries(), d.asDiagonal().toDenseMatrix());
        }
      }
    }
    const ParametricModel zz = model_zz().noiseless();
    const Engine e = engine_at(zz, zz.true_values, zero, zz.default_povm);
    note("zz_qfim", e.q.entries(), 4 * t * t * RMatrix::Identity(3, 3));
  }
  bool pass = true;
  std::string detail = "max_rel_err ";
  for (const auto& [k, v] : worst) {
    pass = pass && v < kFisherTol;
    detail += k + "=" + fmt(v) + " ";
  }
  if (singular > 0) detail += "singular_points_skipped=" + std::to_string(singular) + " ";
  return report(2, pass, detail + "tol=" + fmt(kFisherTol));
}

// ---------------------------------------------------------------------------------------------
// C3: analytic gradients against central differences.

struct Measured {
  RVector p;
  RMatrix dp;
  RMatrix f;
};

Measured measure_at(const ParametricModel& m, const ControlGrid& c) {
  const Trajectory tr = propagate(m, m.true_values, c, m.default_probe);
  const MeasuredDerivs md = measure_derivs(tr, m.default_povm);
  return Measured{md.p, md.dp, cfim(md.p, md.dp).entries()};
}

ControlGrid bump(const ControlGrid& c, int k, int s, double h) {
  RMatrix a = c.amplitudes();
  a(k, s) += h;
  return c.with_amplitudes(a);
}

double vec_rel(const RMatrix& got, const RMatrix& want) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(want.cwiseAbs().maxCoeff(), 1e-300);
}

double scalar_rel(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Worst relative error of the CFIM-entry gradient of `scheme` over fixed samples, for a
/// piecewise-constant pulse resampled onto `steps` segments.
double scheme_error(const ParametricModel& m, GradientScheme scheme, int steps) {
  const double t = 1.0;
  const RMatrix blocks = ts::random_controls(6, 5, 0.8, 71);
  RMatrix a(6, steps);
  for (int j = 0; j < steps; ++j) a.col(j) = blocks.col(j * 5 / steps);
  const ControlGrid c(a, t);
  const Trajectory tr = propagate(m, m.true_values, c, m.default_probe);
  const GradientEngine e(tr, m.default_povm, scheme);
  double worst = 0.0;
  for (double where : {0.15, 0.55, 0.85}) {
    const int s = static_cast<int>(where * steps);
    for (int k : {0, 4}) {
      const Measured up = measure_at(m, bump(c, k, s, 1e-5));
      const Measured dn = measure_at(m, bump(c, k, s, -1e-5));
      const RMatrix fd = (up.f - dn.f) / 2e-5;
      RMatrix g(fd.rows(), fd.cols());
      for (int i = 0; i < fd.rows(); ++i) {
        for (int j = 0; j < fd.cols(); ++j) g(i, j) = e.cfim_entry_gradient(i, j, k, s);
      }
      worst = std::max(worst, vec_rel(g, fd));
    }
  }
  return worst;
}

bool criterion3() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const auto& name : model_names()) {
    const ParametricModel m = model_by_name(name);
    const int steps = 100;
    const ControlGrid c(ts::random_controls(6, steps, 0.5, 72), 1.0);
    const Trajectory tr = propagate(m, m.true_values, c, m.default_probe);
    const GradientEngine e(tr, m.default_povm);
    const RMatrix g_f0 = e.objective_gradient(Objective::f0);
    const bool two = m.num_params() == 2;
    const RMatrix g_le = two ? e.objective_gradient(Objective::fcle) : RMatrix();

    std::mt19937_64 rng(73);
    std::uniform_int_distribution<int> uk(0, 5), us(0, steps - 1), ua(0, m.num_params() - 1);
    double w_prob = 0, w_dprob = 0, w_entry = 0, w_obj = 0;
    const double h = 1e-5;
    for (int n = 0; n < kGradSamples; ++n) {
      const int k = uk(rng), s = us(rng), a = ua(rng), b = ua(rng);
      const Measured up = measure_at(m, bump(c, k, s, h));
      const Measured dn = measure_at(m, bump(c, k, s, -h));
      w_prob = std::max(w_prob, vec_rel(e.prob_gradient(k, s), (up.p - dn.p) / (2 * h)));
      w_dprob = std::max(w_dprob, vec_rel(e.dprob_gradient(k, s), (up.dp - dn.dp) / (2 * h)));
      w_entry = std::max(w_entry, scalar_rel(e.cfim_entry_gradient(a, b, k, s), (up.f(a, b) - dn.f(a, b)) / (2 * h)));
      auto fd_obj = [&](Objective o) {
        return (objective_value(o, FisherMatrix(up.f, FisherKind::classical)) -
                objective_value(o, FisherMatrix(dn.f, FisherKind::classical))) /
               (2 * h);
      };
      w_obj = std::max(w_obj, scalar_rel(g_f0(k, s), fd_obj(Objective::f0)));
      if (two) w_obj = std::max(w_obj, scalar_rel(g_le(k, s), fd_obj(Objective::fcle)));
    }
    const double worst = std::max({w_prob, w_dprob, w_entry, w_obj});
    pass = pass && worst < kGradTol;
    detail += name + "(prob=" + fmt(w_prob) + ",dprob=" + fmt(w_dprob) + ",entry=" + fmt(w_entry) +
              ",objective=" + fmt(w_obj) + ") ";
  }

  // Discrepancy of the first-order formulas as m doubles.
  const ParametricModel mf = model_magnetic_field();
  const double e100 = scheme_error(mf, GradientScheme::first_order, 100);
  const double e200 = scheme_error(mf, GradientScheme::first_order, 200);
  const double e400 = scheme_error(mf, GradientScheme::first_order, 400);
  const double r1 = e100 / e200, r2 = e200 / e400;
  pass = pass && r1 >= kShrinkRatio && r2 >= kShrinkRatio;
  detail += "first_order_err(m=100,200,400)=" + fmt(e100) + "," + fmt(e200) + "," + fmt(e400) +
            " ratios=" + fmt(r1) + "," + fmt(r2) + " ";

  const double secs = seconds_since(t0);
  pass = pass && secs < kGradSeconds;
  return report(3, pass, detail + "tol=" + fmt(kGradTol) + " time=" + fmt(secs) + "s");
}

// ---------------------------------------------------------------------------------------------
// GRAPE helpers.

GrapeConfig bfgs_config(InitScheme init, int max_iters) {
  GrapeConfig cfg;
  cfg.update = UpdateRule::bfgs;
  cfg.init = init;
  cfg.max_iters = max_iters;
  return cfg;
}

// C4: noiseless magnetic field reaches 3/(4T²).
bool criterion4() {
  bool pass = true;
  std::string detail;
  for (double t : {0.5, 1.0, 2.0}) {
    const auto t0 = Clock::now();
    const ParametricModel m = model_magnetic_field().noiseless();
    const GrapeProblem prob =
        GrapeProblem::for_model(m, t, steps_for(t, 100), Objective::f0);
    const GrapeResult r = optimize(prob, bfgs_config(InitScheme::uniform_random, 1000));
    const double target = 0.75 / (t * t);
    const double rel = std::abs(r.best_tr_inv - target) / target;
    const double secs = seconds_since(t0);
    pass = pass && rel <= kC4Tol && secs < kC4Seconds;
    detail += "T=" + fmt(t) + ":tr_inv=" + fmt(r.best_tr_inv) + ",target=" + fmt(target) +
              ",rel=" + fmt(rel) + ",iters=" + std::to_string(r.iterations_used) + ",time=" +
              fmt(secs) + "s ";
  }
  return report(4, pass, detail + "tol=" + fmt(kC4Tol));
}

// C5: noiseless XXZ reaches 3/(8T²) and beats 1/(2T²).
bool criterion5() {
  bool pass = true;
  std::string detail;
  for (double t : {0.5, 1.0, 2.0}) {
    const ParametricModel m = model_xxz().noiseless();
    const GrapeProblem prob = GrapeProblem::for_model(m, t, steps_for(t, 100), Objective::fcle);
    const GrapeResult r = optimize(prob, bfgs_config(InitScheme::uniform_random, 1000));
    const double target = 3.0 / (8 * t * t), uncontrolled = 1.0 / (2 * t * t);
    const double rel = std::abs(r.best_tr_inv - target) / target;
    pass = pass && rel <= kC5Tol && r.best_tr_inv < uncontrolled;
    detail += "T=" + fmt(t) + ":tr_inv=" + fmt(r.best_tr_inv) + ",target=" + fmt(target) +
              ",uncontrolled=" + fmt(uncontrolled) + ",rel=" + fmt(rel) + " ";
  }
  return report(5, pass, detail + "tol=" + fmt(kC5Tol));
}

// C6: divergences of the noisy XXZ information and their removal by control.
bool criterion6() {
  const ParametricModel m = model_xxz();
  const double s_plus = m.true_values(0) + m.true_values(1);
  const double s_minus = std::abs(m.true_values(0) - m.true_values(1));
  const double t_lo = 0.1, t_hi = 3.0;
  const std::vector<double> grid = linspace(t_lo, t_hi, 30);
  const double spacing = grid[1] - grid[0];
  constexpr int kSpu = 100;

  auto uncontrolled = [&](double t) {
    return evaluate_controls(GrapeProblem::for_model(m, t, steps_for(t, kSpu), Objective::f0),
                             ControlGrid::zeros(6, steps_for(t, kSpu), t))
        .tr_inv;
  };

  std::vector<double> t_div;
  for (double s : {s_plus, s_minus}) {
    for (int n = 0;; ++n) {
      const double v = (M_PI / 2 + n * M_PI) / (2 * s);
      if (v > t_hi) break;
      if (v >= t_lo) t_div.push_back(v);
    }
  }
  std::sort(t_div.begin(), t_div.end());

  bool pass = true;
  std::string detail;

  // Uncontrolled: +inf exactly at the divergence times, finite on every grid point away from them.
  bool sentinel = true;
  for (double t : t_div) sentinel = sentinel && uncontrolled(t) == kInf;
  std::vector<double> unc(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    unc[i] = uncontrolled(grid[i]);
    bool near = false;
    for (double t : t_div) near = near || std::abs(grid[i] - t) < spacing;
    if (!near && !std::isfinite(unc[i])) sentinel = false;
  }
  pass = pass && sentinel;
  detail += "divergences=" + std::to_string(t_div.size()) + " sentinel=" + (sentinel ? "ok" : "bad") + " ";

  // Controlled at each divergence time versus its uncontrolled grid neighbours.
  bool beaten = true;
  for (double td : t_div) {
    const GrapeProblem prob = GrapeProblem::for_model(m, td, steps_for(td, kSpu), Objective::f0);
    const GrapeResult r = optimize(prob, bfgs_config(InitScheme::uniform_random, 600));
    const auto hi = std::upper_bound(grid.begin(), grid.end(), td);
    double neighbour_min = kInf;
    if (hi != grid.end()) neighbour_min = std::min(neighbour_min, unc[static_cast<size_t>(hi - grid.begin())]);
    if (hi != grid.begin()) neighbour_min = std::min(neighbour_min, unc[static_cast<size_t>(hi - grid.begin() - 1)]);
    const bool ok = std::isfinite(r.best_tr_inv) && r.best_tr_inv < neighbour_min;
    beaten = beaten && ok;
    detail += "T=" + fmt(td) + ":controlled=" + fmt(r.best_tr_inv) + ",neighbours>=" + fmt(neighbour_min) + " ";
  }
  pass = pass && beaten;

  // Pointwise: zero-init ascent never ends above the uncontrolled value.
  bool monotone = true;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const GrapeProblem prob = GrapeProblem::for_model(m, t, steps_for(t, kSpu), Objective::f0);
    const GrapeResult r = optimize(prob, bfgs_config(InitScheme::zeros, 60));
    if (r.final_tr_inv > unc[i] * (1 + 1e-12)) monotone = false;
  }
  pass = pass && monotone;

  // Time stability: spread of T²·Tr F⁻¹ over the grid, random-init controls.
  std::vector<double> ctrl_rand(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const GrapeProblem prob = GrapeProblem::for_model(m, t, steps_for(t, kSpu), Objective::f0);
    ctrl_rand[i] = optimize(prob, bfgs_config(InitScheme::uniform_random, 150)).best_tr_inv;
  }
  auto spread = [&](const std::vector<double>& v) {
    double lo = kInf, hi = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      const double s = grid[i] * grid[i] * v[i];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    return hi / lo;
  };
  const double spread_unc = spread(unc), spread_ctrl = spread(ctrl_rand);
  const bool stable = spread_ctrl < spread_unc;
  pass = pass && stable;
  detail += std::string("zero_init_monotone=") + (monotone ? "ok" : "bad") + " spread_uncontrolled=" +
            fmt(spread_unc) + " spread_controlled=" + fmt(spread_ctrl);
  return report(6, pass, detail);
}

// ---------------------------------------------------------------------------------------------
// C7: F_q − F_cl ⪰ 0 and Tr F⁻¹ ≥ 1/f₀.

Povm computational_povm() {
  std::vector<std::pair<std::string, CVector>> basis;
  const char* labels[] = {"00", "01", "10", "11"};
  for (int i = 0; i < 4; ++i) {
    CVector v = CVector::Zero(4);
    v(i) = 1.0;
    basis.emplace_back(labels[i], v);
  }
  return Povm::projective(basis);
}

bool criterion7() {
  const std::vector<std::pair<std::string, Povm>> povms = {
      {"bell", bell_povm()}, {"plusminus", plus_minus_povm()}, {"computational", computational_povm()}};
  double min_eig = kInf, worst_bound = kInf;
  int points = 0, singular = 0;
  for (const auto& name : model_names()) {
    for (bool noisy : {false, true}) {
      const ParametricModel m = noisy ? model_by_name(name) : model_by_name(name).noiseless();
      for (double t : linspace(0.1, 3.0, 20)) {
        const int steps = steps_for(t, 20);
        const ControlGrid c(ts::random_controls(6, steps, 0.7, 74), t);
        const Trajectory tr = propagate(m, m.true_values, c, m.default_probe);
        const FisherMatrix q = qfim(tr.final_density(), tr.final_derivs());
        for (const auto& [pname, povm] : povms) {
          std::optional<FisherMatrix> fo;
          try {
            const MeasuredDerivs md = measure_derivs(tr, povm);
            fo = cfim(md.p, md.dp);
          } catch (const SingularContribution&) {
            ++singular;
            continue;
          }
          const FisherMatrix& f = *fo;
          ++points;
          min_eig = std::min(
              min_eig, Eigen::SelfAdjointEigenSolver<RMatrix>(q.entries() - f.entries()).eigenvalues()(0));
          const double inv_f0 = 1.0 / objective_f0(f);
          const double ti = tr_inv(f);
          // Slack relative to the size of the bound; positive means satisfied.
          if (std::isfinite(inv_f0)) {
            worst_bound = std::min(worst_bound, (ti - inv_f0) / std::max(1.0, inv_f0));
          }
        }
      }
    }
  }
  const bool pass = min_eig >= -kPsdTol && worst_bound >= -kBoundTol;
  return report(7, pass, "points=" + std::to_string(points) + " singular_skipped=" +
                             std::to_string(singular) + " min_eig(Fq-Fcl)=" + fmt(min_eig) +
                             " min_slack(trinv-1/f0)=" + fmt(worst_bound) + " tol_psd=" + fmt(kPsdTol));
}

// ---------------------------------------------------------------------------------------------
// C8: reproducible sweeps are byte-identical.

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fisherctl");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

bool criterion8() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("fisherctl_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  bool pass = true;
  std::string detail;
  const std::vector<std::vector<std::string>> configs = {
      {"sweep", "--model", "magfield", "--noise", "on", "--t-grid", "0.2:2:6", "--steps-per-unit", "30",
       "--max-iters", "25", "--reproducible"},
      {"sweep", "--model", "xxz", "--noise", "on", "--t-grid", "0.2:2:6", "--steps-per-unit", "30",
       "--max-iters", "25", "--update", "bfgs", "--warm-start", "--format", "json", "--reproducible"}};
  int idx = 0;
  for (const auto& cfg : configs) {
    // Identical configs include the output path, which the JSON format echoes.
    const auto path = dir / ("run" + std::to_string(idx));
    auto args = cfg;
    args.insert(args.end(), {"--out", path.string()});
    std::vector<std::string> outputs;
    int codes = 0;
    for (int rep = 0; rep < 2; ++rep) {
      std::filesystem::remove(path);
      codes += invoke(args);
      outputs.push_back(slurp(path));
    }
    const std::string& a = outputs[0];
    const std::string& b = outputs[1];
    const bool same = codes == 0 && !a.empty() && a == b;
    pass = pass && same;
    detail += cfg[2] + "=" + (same ? "identical" : "differ") + "(" + std::to_string(a.size()) + "B) ";
    ++idx;
  }
  std::filesystem::remove_all(dir);
  return report(8, pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int i = 1; i <= 8; ++i) which.push_back(i);
  }
  int failures = 0;
  for (int c : which) {
    if (c < 1 || c > 8) {
      std::fprintf(stderr, "unknown criterion %d\n", c);
      return 2;
    }
    try {
      if (!criteria[static_cast<size_t>(c - 1)]()) ++failures;
    } catch (const std::exception& e) {
      report(c, false, std::string("exception: ") + e.what());
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

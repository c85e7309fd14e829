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

#include "fisherctl/grape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "fisherctl/error.hpp"
#include "fisherctl/expm.hpp"

namespace fisherctl {

Objective objective_from_string(const std::string& s) {
  if (s == "f0") return Objective::f0;
  if (s == "fcle") return Objective::fcle;
  throw InvalidArgument("unknown objective '" + s + "' (expected f0 or fcle)");
}

std::string to_string(Objective o) { return o == Objective::f0 ? "f0" : "fcle"; }

double objective_value(Objective objective, const FisherMatrix& f) {
  return objective == Objective::f0 ? objective_f0(f) : objective_fcle(f);
}

// ---------------------------------------------------------------------------------------------

GradientEngine::GradientEngine(const Trajectory& trajectory, const Povm& povm,
                               GradientScheme scheme, Execution execution)
    : tr_(&trajectory),
      povm_(&povm),
      scheme_(scheme),
      execution_(execution),
      f_([&] {
        const MeasuredDerivs md = measure_derivs(trajectory, povm);
        return fisherctl::cfim(md.p, md.dp);
      }()) {
  if (povm.dim() != trajectory.dim) throw DimensionError("GradientEngine: POVM dimension mismatch");
  const MeasuredDerivs md = measure_derivs(trajectory, povm);
  p_ = md.p;
  dp_ = md.dp;
  for (const auto& o : povm.outcomes()) effects_.push_back(vec(o.effect));

  if (scheme_ == GradientScheme::exact) {
    if (trajectory.propagator_derivs.size() != static_cast<size_t>(trajectory.num_steps)) {
      throw InvalidArgument("GradientEngine: exact scheme needs exact propagator derivatives");
    }
    return;
  }
  if (scheme_ != GradientScheme::midpoint) return;
  const int m = trajectory.num_steps;
  half_.resize(static_cast<size_t>(m));
  const bool par = execution_ == Execution::parallel && !parallel::in_parallel();
#pragma omp parallel for schedule(static) if (par)
  for (int s = 0; s < m; ++s) {
    const auto ss = static_cast<size_t>(s);
    half_[ss] = expm_dense(0.5 * trajectory.dt * trajectory.liouvillians[ss]);
  }
}

void GradientEngine::check_indices(int k, int s) const {
  if (k < 0 || k >= tr_->num_fields()) {
    throw InvalidArgument("gradient: control index " + std::to_string(k) + " out of range");
  }
  if (s < 0 || s >= tr_->num_steps) {
    throw InvalidArgument("gradient: step index " + std::to_string(s) + " out of range");
  }
}

CVector GradientEngine::apply_dv(int k, int s, const CVector& x) const {
  const auto ss = static_cast<size_t>(s);
  const CMatrix& g = tr_->control_generators[static_cast<size_t>(k)];
  if (scheme_ == GradientScheme::first_order) return tr_->dt * (g * (tr_->propagators[ss] * x));
  return tr_->dt * (half_[ss] * (g * (half_[ss] * x)));
}

CVector GradientEngine::apply_dx(int a, int s, const CVector& x) const {
  const auto ss = static_cast<size_t>(s);
  const CMatrix& kk = tr_->param_generators[static_cast<size_t>(a)];
  if (scheme_ == GradientScheme::first_order) return tr_->dt * (kk * (tr_->propagators[ss] * x));
  if (scheme_ == GradientScheme::exact) {
    return tr_->propagator_derivs[ss][static_cast<size_t>(a)] * x;
  }
  return tr_->dt * (half_[ss] * (kk * (half_[ss] * x)));
}

CVector GradientEngine::apply_dx_adjoint(int a, int s, const CVector& y) const {
  const auto ss = static_cast<size_t>(s);
  const CMatrix& kk = tr_->param_generators[static_cast<size_t>(a)];
  if (scheme_ == GradientScheme::first_order) {
    return tr_->dt * (tr_->propagators[ss].adjoint() * (kk.adjoint() * y));
  }
  if (scheme_ == GradientScheme::exact) {
    return tr_->propagator_derivs[ss][static_cast<size_t>(a)].adjoint() * y;
  }
  return tr_->dt * (half_[ss].adjoint() * (kk.adjoint() * (half_[ss].adjoint() * y)));
}

CVector GradientEngine::apply_dvx(int k, int a, int s, const CVector& x) const {
  const auto ss = static_cast<size_t>(s);
  const CMatrix& g = tr_->control_generators[static_cast<size_t>(k)];
  const CMatrix& kk = tr_->param_generators[static_cast<size_t>(a)];
  const double dt2 = tr_->dt * tr_->dt;
  if (scheme_ == GradientScheme::first_order) {
    return dt2 * (g * (kk * (tr_->propagators[ss] * x)));
  }
  const CVector sx = half_[ss] * x;
  return (0.5 * dt2) * (half_[ss] * (g * (kk * sx) + kk * (g * sx)));
}

GradientEngine::SegmentSeed GradientEngine::dual_taylor_seed(int k, int s) const {
  // Propagate ρ + ε_x ∂ρ through exp(Δt(L + ε_V G + ε_x K)) with ε_V² = ε_x² = 0, one ε_x per
  // parameter. Components: a (value), b (ε_V), c[α] (ε_x), d[α] (ε_V ε_x).
  const auto ss = static_cast<size_t>(s);
  const int np = tr_->num_params();
  const auto nps = static_cast<size_t>(np);
  const CMatrix& l = tr_->liouvillians[ss];
  const CMatrix& g = tr_->control_generators[static_cast<size_t>(k)];
  const auto& kk = tr_->param_generators;

  const double norm = tr_->dt * l.cwiseAbs().colwise().sum().maxCoeff();
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm / 0.5)));
  const double h = tr_->dt / substeps;

  CVector a = vec(tr_->states[ss]);
  CVector b = CVector::Zero(a.size());
  std::vector<CVector> c(nps), d(nps, CVector::Zero(a.size()));
  for (size_t i = 0; i < nps; ++i) c[i] = vec(tr_->param_derivs[i][ss]);

  for (int sub = 0; sub < substeps; ++sub) {
    CVector ta = a, tb = b;
    std::vector<CVector> tc = c, td = d;
    for (int n = 1; n <= 60; ++n) {
      const double f = h / n;
      std::vector<CVector> nd(nps), nc(nps);
      for (size_t i = 0; i < nps; ++i) {
        nd[i] = f * (l * td[i] + g * tc[i] + kk[i] * tb);
        nc[i] = f * (l * tc[i] + kk[i] * ta);
      }
      const CVector nb = f * (l * tb + g * ta);
      const CVector na = f * (l * ta);
      ta = na;
      tb = nb;
      tc = std::move(nc);
      td = std::move(nd);
      a += ta;
      b += tb;
      double tnorm = ta.norm() + tb.norm();
      double snorm = a.norm() + b.norm();
      for (size_t i = 0; i < nps; ++i) {
        c[i] += tc[i];
        d[i] += td[i];
        tnorm += tc[i].norm() + td[i].norm();
        snorm += c[i].norm() + d[i].norm();
      }
      if (tnorm <= 1e-17 * snorm) break;
    }
  }
  return SegmentSeed{std::move(b), std::move(d)};
}

GradientEngine::SegmentSeed GradientEngine::seed(int k, int s) const {
  if (scheme_ == GradientScheme::exact) return dual_taylor_seed(k, s);
  const auto ss = static_cast<size_t>(s);
  const int np = tr_->num_params();
  const CVector rho = vec(tr_->states[ss]);
  SegmentSeed out{apply_dv(k, s, rho), std::vector<CVector>(static_cast<size_t>(np))};
  for (int a = 0; a < np; ++a) {
    const auto aa = static_cast<size_t>(a);
    out.u[aa] = apply_dv(k, s, vec(tr_->param_derivs[aa][ss])) + apply_dvx(k, a, s, rho);
  }
  return out;
}

GradientEngine::Tangent GradientEngine::tangent(int k, int s) const {
  check_indices(k, s);
  const int np = tr_->num_params();
  const int m = tr_->num_steps;
  SegmentSeed sd = seed(k, s);
  CVector& w = sd.w;
  std::vector<CVector>& u = sd.u;
  for (int t = s + 1; t < m; ++t) {
    const CMatrix& e = tr_->propagators[static_cast<size_t>(t)];
    for (int a = 0; a < np; ++a) {
      auto& ua = u[static_cast<size_t>(a)];
      ua = e * ua + apply_dx(a, t, w);
    }
    w = e * w;
  }

  Tangent out;
  const int ny = povm_->size();
  out.dp.resize(ny);
  out.ddp.resize(np, ny);
  for (int y = 0; y < ny; ++y) {
    const auto& ey = effects_[static_cast<size_t>(y)];
    out.dp(y) = ey.dot(w).real();
    for (int a = 0; a < np; ++a) out.ddp(a, y) = ey.dot(u[static_cast<size_t>(a)]).real();
  }
  return out;
}

RVector GradientEngine::prob_gradient(int k, int s) const { return tangent(k, s).dp; }

RMatrix GradientEngine::dprob_gradient(int k, int s) const { return tangent(k, s).ddp; }

namespace {

/// δF_αβ from first-order changes in p and ∂p, over the outcomes kept by cfim().
double fisher_entry_delta(const RVector& p, const RMatrix& dp, const RVector& dp_delta,
                          const RMatrix& ddp_delta, int a, int b) {
  double v = 0.0;
  for (Eigen::Index y = 0; y < p.size(); ++y) {
    if (p(y) <= fisher_tol::eps_p) continue;
    v += (ddp_delta(a, y) * dp(b, y) + dp(a, y) * ddp_delta(b, y)) / p(y) -
         dp(a, y) * dp(b, y) * dp_delta(y) / (p(y) * p(y));
  }
  return v;
}

}  // namespace

double GradientEngine::cfim_entry_gradient(int alpha, int beta, int k, int s) const {
  const int np = tr_->num_params();
  if (alpha < 0 || alpha >= np || beta < 0 || beta >= np) {
    throw InvalidArgument("cfim_entry_gradient: parameter index out of range");
  }
  const Tangent t = tangent(k, s);
  // Evaluate in canonical order so (α, β) and (β, α) agree bitwise.
  const int a = std::min(alpha, beta), b = std::max(alpha, beta);
  return fisher_entry_delta(p_, dp_, t.dp, t.ddp, a, b);
}

std::vector<RMatrix> GradientEngine::cfim_gradient_grid() const {
  const int np = tr_->num_params();
  const int p = tr_->num_fields();
  const int m = tr_->num_steps;
  std::vector<RMatrix> grid(static_cast<size_t>(np * np), RMatrix::Zero(p, m));
  for (int k = 0; k < p; ++k) {
    for (int s = 0; s < m; ++s) {
      const Tangent t = tangent(k, s);
      for (int a = 0; a < np; ++a) {
        for (int b = a; b < np; ++b) {
          const double v = fisher_entry_delta(p_, dp_, t.dp, t.ddp, a, b);
          grid[static_cast<size_t>(a * np + b)](k, s) = v;
          grid[static_cast<size_t>(b * np + a)](k, s) = v;
        }
      }
    }
  }
  return grid;
}

RMatrix GradientEngine::objective_weights(Objective objective) const {
  const RMatrix& f = f_.entries();
  const int n = f_.dim();
  RMatrix c = RMatrix::Zero(n, n);
  const double eps = singular_threshold(f);
  if (objective == Objective::f0) {
    bool degenerate = false;
    for (int a = 0; a < n; ++a) degenerate = degenerate || f(a, a) <= eps;
    if (degenerate) {
      // f₀ is pinned at 0 here; push the vanishing diagonals up instead.
      for (int a = 0; a < n; ++a) c(a, a) = f(a, a) <= eps ? 1.0 : 0.0;
      return c;
    }
    const double f0 = objective_f0(f_);
    for (int a = 0; a < n; ++a) c(a, a) = f0 * f0 / (f(a, a) * f(a, a));
    return c;
  }
  if (n != 2) throw DimensionError("objective fcle requires two parameters");
  const double tr = f(0, 0) + f(1, 1);
  if (tr <= eps) {
    c(0, 0) = c(1, 1) = 0.5;
    return c;
  }
  c(0, 0) = (f(1, 1) * f(1, 1) + f(0, 1) * f(0, 1)) / (tr * tr);
  c(1, 1) = (f(0, 0) * f(0, 0) + f(0, 1) * f(0, 1)) / (tr * tr);
  c(0, 1) = c(1, 0) = -f(0, 1) / tr;
  return c;
}

RMatrix GradientEngine::objective_gradient(Objective objective) const {
  return objective_gradient(objective, execution_);
}

RMatrix GradientEngine::objective_gradient(Objective objective, Execution execution) const {
  const int np = tr_->num_params();
  const int p = tr_->num_fields();
  const int m = tr_->num_steps;
  const int ny = povm_->size();
  const RMatrix c = objective_weights(objective);

  // Ŵ_α = Σ_β (c_αβ + c_βα) L̃₁_β and Ŵ₀ = Σ_αβ c_αβ L̃₂_αβ, both diagonal in the effects.
  std::vector<CVector> w_alpha(static_cast<size_t>(np), CVector::Zero(tr_->dim * tr_->dim));
  CVector w0 = CVector::Zero(tr_->dim * tr_->dim);
  for (int y = 0; y < ny; ++y) {
    if (p_(y) <= fisher_tol::eps_p) continue;
    const auto& ey = effects_[static_cast<size_t>(y)];
    double c0 = 0.0;
    for (int a = 0; a < np; ++a) {
      double ca = 0.0;
      for (int b = 0; b < np; ++b) {
        ca += (c(a, b) + c(b, a)) * dp_(b, y) / p_(y);
        c0 += c(a, b) * dp_(a, y) * dp_(b, y) / (p_(y) * p_(y));
      }
      w_alpha[static_cast<size_t>(a)] += ca * ey;
    }
    w0 += c0 * ey;
  }

  // Backward sweeps: lam[α][l] pairs with a perturbation of ρ_l, mu[α][l] with a perturbation
  // of ρ_l through the downstream parameter derivative.
  const auto ms = static_cast<size_t>(m);
  std::vector<std::vector<CVector>> lam(static_cast<size_t>(np), std::vector<CVector>(ms + 1));
  std::vector<std::vector<CVector>> mu(static_cast<size_t>(np), std::vector<CVector>(ms + 1));
  std::vector<CVector> lam0(ms + 1);
  lam0[ms] = w0;
  for (int a = 0; a < np; ++a) {
    const auto aa = static_cast<size_t>(a);
    lam[aa][ms] = w_alpha[aa];
    mu[aa][ms] = CVector::Zero(w0.size());
  }
  for (int l = m - 1; l >= 1; --l) {
    const auto ll = static_cast<size_t>(l);
    const CMatrix eh = tr_->propagators[ll].adjoint();
    lam0[ll] = eh * lam0[ll + 1];
    for (int a = 0; a < np; ++a) {
      const auto aa = static_cast<size_t>(a);
      mu[aa][ll] = apply_dx_adjoint(a, l, lam[aa][ll + 1]) + eh * mu[aa][ll + 1];
      lam[aa][ll] = eh * lam[aa][ll + 1];
    }
  }

  RMatrix grad(p, m);
  const bool par = execution == Execution::parallel && !parallel::in_parallel();
#pragma omp parallel for schedule(static) if (par)
  for (int s = 0; s < m; ++s) {
    const auto ss = static_cast<size_t>(s);
    for (int k = 0; k < p; ++k) {
      const SegmentSeed sd = seed(k, s);
      Complex total = -lam0[ss + 1].dot(sd.w);
      for (int a = 0; a < np; ++a) {
        const auto aa = static_cast<size_t>(a);
        total += lam[aa][ss + 1].dot(sd.u[aa]) + mu[aa][ss + 1].dot(sd.w);
      }
      grad(k, s) = total.real();
    }
  }
  return grad;
}

RMatrix GradientEngine::objective_gradient_reference(Objective objective) const {
  const int np = tr_->num_params();
  const int p = tr_->num_fields();
  const int m = tr_->num_steps;
  const RMatrix c = objective_weights(objective);
  RMatrix grad(p, m);
  for (int k = 0; k < p; ++k) {
    for (int s = 0; s < m; ++s) {
      const Tangent t = tangent(k, s);
      double v = 0.0;
      for (int a = 0; a < np; ++a) {
        for (int b = 0; b < np; ++b) {
          if (c(a, b) != 0.0) v += c(a, b) * fisher_entry_delta(p_, dp_, t.dp, t.ddp, a, b);
        }
      }
      grad(k, s) = v;
    }
  }
  return grad;
}

RVector gradient_prob(const Trajectory& trajectory, const Povm& povm, int k, int s,
                      GradientScheme scheme) {
  return GradientEngine(trajectory, povm, scheme).prob_gradient(k, s);
}

RMatrix gradient_dprob(const Trajectory& trajectory, const Povm& povm, int k, int s,
                       GradientScheme scheme) {
  return GradientEngine(trajectory, povm, scheme).dprob_gradient(k, s);
}

double gradient_cfim_entry(const Trajectory& trajectory, const Povm& povm, int alpha, int beta,
                           int k, int s, GradientScheme scheme) {
  return GradientEngine(trajectory, povm, scheme).cfim_entry_gradient(alpha, beta, k, s);
}

RMatrix gradient_objective(const Trajectory& trajectory, const Povm& povm, Objective objective,
                           GradientScheme scheme) {
  return GradientEngine(trajectory, povm, scheme).objective_gradient(objective);
}

// ---------------------------------------------------------------------------------------------

void GrapeConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw InvalidArgument("GrapeConfig: step_size must be positive");
  }
  if (max_iters < 1) throw InvalidArgument("GrapeConfig: max_iters must be at least 1");
  if (!(convergence_tol > 0.0)) throw InvalidArgument("GrapeConfig: tolerance must be positive");
  if (convergence_window < 1) throw InvalidArgument("GrapeConfig: window must be at least 1");
  if (!(init_amplitude >= 0.0)) throw InvalidArgument("GrapeConfig: init amplitude is negative");
  if (amplitude_bound && !(*amplitude_bound > 0.0)) {
    throw InvalidArgument("GrapeConfig: amplitude bound must be positive");
  }
  if (init == InitScheme::user_supplied && !initial_controls) {
    throw InvalidArgument("GrapeConfig: user_supplied init needs initial_controls");
  }
}

GrapeProblem GrapeProblem::for_model(const ParametricModel& model, double total_time,
                                     int num_steps, Objective objective) {
  return GrapeProblem{model,      model.true_values, model.default_probe, model.default_povm,
                      total_time, num_steps,         objective};
}

Evaluation evaluate_controls(const GrapeProblem& problem, const ControlGrid& controls,
                             Execution execution) {
  PropagateOptions opts;
  opts.execution = execution;
  const Trajectory tr = propagate(problem.model, problem.x, controls, problem.probe, opts);
  const MeasuredDerivs md = measure_derivs(tr, problem.povm);
  FisherMatrix f = cfim(md.p, md.dp);
  const double obj = objective_value(problem.objective, f);
  if (!std::isfinite(obj)) throw NumericalError("evaluate_controls: non-finite objective");
  const double ti = tr_inv(f);
  return Evaluation{obj, std::move(f), ti};
}

ControlGrid initial_controls(const GrapeProblem& problem, const GrapeConfig& config) {
  const int p = problem.model.num_controls();
  const int m = problem.num_steps;
  RMatrix amp;
  switch (config.init) {
    case InitScheme::zeros:
      amp = RMatrix::Zero(p, m);
      break;
    case InitScheme::uniform_random: {
      std::mt19937_64 rng(config.seed);
      amp.resize(p, m);
      // Fill in a fixed order so the grid depends only on the seed and the shape.
      for (int j = 0; j < m; ++j) {
        for (int k = 0; k < p; ++k) {
          const double u = std::generate_canonical<double, 53>(rng);
          amp(k, j) = config.init_amplitude * (2.0 * u - 1.0);
        }
      }
      break;
    }
    case InitScheme::user_supplied:
      amp = *config.initial_controls;
      if (amp.rows() != p || amp.cols() != m) {
        throw DimensionError("initial controls have shape " + std::to_string(amp.rows()) + "x" +
                             std::to_string(amp.cols()) + ", expected " + std::to_string(p) +
                             "x" + std::to_string(m));
      }
      break;
  }
  return ControlGrid(std::move(amp), problem.total_time, config.amplitude_bound).clipped();
}

namespace {

struct Iterate {
  ControlGrid controls;
  std::shared_ptr<Trajectory> trajectory;
  double objective;
  FisherMatrix cfim;
  double tr_inv;
};

std::optional<Iterate> try_evaluate(const GrapeProblem& problem, const ControlGrid& controls,
                                    Execution execution) {
  try {
    PropagateOptions opts;
    opts.execution = execution;
    auto tr = std::make_shared<Trajectory>(
        propagate(problem.model, problem.x, controls, problem.probe, opts));
    const MeasuredDerivs md = measure_derivs(*tr, problem.povm);
    FisherMatrix f = cfim(md.p, md.dp);
    const double obj = objective_value(problem.objective, f);
    if (!std::isfinite(obj)) return std::nullopt;
    const double ti = tr_inv(f);
    return Iterate{controls, std::move(tr), obj, std::move(f), ti};
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

RVector flat_gradient(const GrapeProblem& problem, const GrapeConfig& config, const Iterate& it) {
  const GradientEngine engine(*it.trajectory, problem.povm, config.gradient_scheme,
                              config.execution);
  const RMatrix g = engine.objective_gradient(problem.objective);
  return Eigen::Map<const RVector>(g.data(), g.size());
}

}  // namespace

GrapeResult optimize(const GrapeProblem& problem, const GrapeConfig& config) {
  config.validate();
  if (!(problem.total_time > 0.0) || problem.num_steps < 1) {
    throw InvalidArgument("optimize: total time and step count must be positive");
  }
  const ControlGrid init = initial_controls(problem, config);
  std::optional<Iterate> first = try_evaluate(problem, init, config.execution);
  if (!first) throw NumericalError("optimize: the initial controls cannot be evaluated");

  Iterate cur = std::move(*first);
  ControlGrid best_controls = cur.controls;
  double best_tr_inv = cur.tr_inv;
  std::vector<double> history{cur.objective};
  bool converged = false;
  std::string reason = "max_iters";

  const Eigen::Index n = cur.controls.flatten().size();
  double eps = config.step_size;
  RMatrix hinv;
  bool hinv_scaled = false;
  bool just_reset = false;
  RVector prev_x, prev_g;

  auto accept = [&](Iterate next) {
    cur = std::move(next);
    history.push_back(cur.objective);
    if (cur.tr_inv < best_tr_inv) {
      best_tr_inv = cur.tr_inv;
      best_controls = cur.controls;
    }
  };
  auto window_converged = [&] {
    const auto w = static_cast<size_t>(config.convergence_window);
    if (history.size() <= w) return false;
    const double now = history.back();
    return std::abs(now - history[history.size() - 1 - w]) <= config.convergence_tol * std::abs(now);
  };

  while (static_cast<int>(history.size()) < config.max_iters) {
    const RVector x = cur.controls.flatten();
    const RVector g = flat_gradient(problem, config, cur);
    if (!g.allFinite()) {
      reason = "non-finite gradient";
      break;
    }
    if (g.squaredNorm() == 0.0) {
      converged = true;
      reason = "zero gradient";
      break;
    }

    std::optional<Iterate> next;
    if (config.update == UpdateRule::plain_gradient) {
      if (config.fixed_step) {
        next = try_evaluate(problem, cur.controls.with_flat(x + eps * g).clipped(), config.execution);
        if (!next) {
          reason = "evaluation failed";
          break;
        }
      } else {
        double step = eps;
        for (int h = 0; h <= 30; ++h, step *= 0.5) {
          auto trial = try_evaluate(problem, cur.controls.with_flat(x + step * g).clipped(),
                                    config.execution);
          if (trial && trial->objective >= cur.objective) {
            next = std::move(trial);
            eps = (h == 0) ? 2.0 * step : step;
            break;
          }
        }
        if (!next) {
          converged = true;
          reason = "line search exhausted";
          break;
        }
      }
    } else {
      // BFGS on −f: y = ∇(−f)_new − ∇(−f)_old = g_old − g_new.
      if (hinv.size() == 0) {
        hinv = config.step_size * RMatrix::Identity(n, n);
      } else if (prev_x.size() == n) {
        const RVector sv = x - prev_x;
        const RVector yv = prev_g - g;
        const double sy = sv.dot(yv);
        if (sy > 0.0) {
          if (!hinv_scaled) {
            hinv = (sy / yv.squaredNorm()) * RMatrix::Identity(n, n);
            hinv_scaled = true;
          }
          const double rho = 1.0 / sy;
          const RVector hy = hinv * yv;
          const double yhy = yv.dot(hy);
          hinv.noalias() -= rho * (sv * hy.transpose() + hy * sv.transpose());
          hinv.noalias() += (rho * rho * yhy + rho) * (sv * sv.transpose());
        }
      }
      RVector d = hinv * g;
      if (!(d.dot(g) > 0.0)) {
        hinv = config.step_size * RMatrix::Identity(n, n);
        hinv_scaled = false;
        d = hinv * g;
      }
      const double slope = d.dot(g);
      double alpha = 1.0;
      for (int h = 0; h <= 30; ++h, alpha *= 0.5) {
        auto trial = try_evaluate(problem, cur.controls.with_flat(x + alpha * d).clipped(),
                                  config.execution);
        if (trial && trial->objective >= cur.objective + 1e-4 * alpha * slope) {
          next = std::move(trial);
          break;
        }
      }
      if (!next) {
        if (just_reset) {
          converged = true;
          reason = "line search exhausted";
          break;
        }
        // Retry once from steepest ascent before giving up.
        hinv = config.step_size * RMatrix::Identity(n, n);
        hinv_scaled = false;
        just_reset = true;
        prev_x.resize(0);
        continue;
      }
      just_reset = false;
      prev_x = x;
      prev_g = g;
    }

    accept(std::move(*next));
    if (window_converged()) {
      converged = true;
      reason = "objective converged";
      break;
    }
  }

  GrapeResult result{cur.controls,
                     std::move(history),
                     cur.cfim,
                     cur.tr_inv,
                     0,
                     converged,
                     best_controls,
                     best_tr_inv,
                     reason};
  result.iterations_used = static_cast<int>(result.objective_history.size());
  return result;
}

}  // namespace fisherctl

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
#include <string>
#include <vector>

#include "fisherctl/dynamics.hpp"
#include "fisherctl/fisher.hpp"
#include "fisherctl/models.hpp"
#include "fisherctl/parallel.hpp"

namespace fisherctl {

/// How a perturbation of V_k(s) enters segment s.
///
/// first_order inserts Δt·G after the segment exponential and orders mixed terms as G·K, i.e.
/// δe^{ΔtL} ≈ Δt G e^{ΔtL} and δ(∂e^{ΔtL}) ≈ Δt² G K e^{ΔtL}. Its error is O(Δt).
///
/// midpoint inserts the generator at the centre of the segment, Δt·S G S with
/// S = e^{ΔtL/2}, and uses the symmetric mixed term ½Δt²·S(GK + KG)S. Its error is O(Δt²).
///
/// exact differentiates the segment exponentials themselves: the perturbed segment is
/// propagated as a truncated Taylor series over dual numbers ε_V, ε_x with ε² = 0, and the
/// downstream ∂e^{ΔtL}/∂x are the Fréchet derivatives stored by propagate(). Errors are at
/// roundoff level. It needs a trajectory propagated with DerivativeScheme::exact.
enum class GradientScheme { first_order, midpoint, exact };

enum class Objective { f0, fcle };

Objective objective_from_string(const std::string& s);
std::string to_string(Objective o);

/// Scalar objective value of a Fisher matrix.
double objective_value(Objective objective, const FisherMatrix& f);

/// Analytic control gradients on one trajectory. Step indices are 0-based: s refers to the
/// segment that maps ρ_s to ρ_{s+1}.
class GradientEngine {
 public:
  GradientEngine(const Trajectory& trajectory, const Povm& povm,
                 GradientScheme scheme = GradientScheme::exact,
                 Execution execution = Execution::parallel);

  const Trajectory& trajectory() const { return *tr_; }
  GradientScheme scheme() const { return scheme_; }

  /// δp_y/δV_k(s) for every outcome y.
  RVector prob_gradient(int k, int s) const;
  /// δ(∂_α p_y)/δV_k(s), laid out n_params × n_outcomes.
  RMatrix dprob_gradient(int k, int s) const;
  /// δF_αβ/δV_k(s) for the classical Fisher matrix of the POVM.
  double cfim_entry_gradient(int alpha, int beta, int k, int s) const;
  /// Full p×m gradient of every CFIM entry, grid[α·n + β](k, s).
  std::vector<RMatrix> cfim_gradient_grid() const;

  /// p×m gradient of the objective by backward (adjoint) propagation. Columns are computed
  /// independently, so `execution` only changes the schedule and not the result.
  RMatrix objective_gradient(Objective objective) const;
  RMatrix objective_gradient(Objective objective, Execution execution) const;
  /// Same gradient from forward tangent propagation, one (k, s) at a time, serially.
  RMatrix objective_gradient_reference(Objective objective) const;

  /// Objective chain-rule weights: δf = Σ_αβ c_αβ δF_αβ.
  RMatrix objective_weights(Objective objective) const;

  const RVector& probabilities() const { return p_; }
  const RMatrix& prob_derivs() const { return dp_; }
  const FisherMatrix& cfim() const { return f_; }

 private:
  struct Tangent {
    RVector dp;   // n_outcomes
    RMatrix ddp;  // n_params × n_outcomes
  };
  /// Perturbation leaving segment s: w = δρ_{s+1}, u[α] = δ(∂_α ρ_{s+1}).
  struct SegmentSeed {
    CVector w;
    std::vector<CVector> u;
  };
  SegmentSeed seed(int k, int s) const;
  Tangent tangent(int k, int s) const;
  void check_indices(int k, int s) const;

  CVector apply_dv(int k, int s, const CVector& x) const;
  CVector apply_dx(int a, int s, const CVector& x) const;
  SegmentSeed dual_taylor_seed(int k, int s) const;
  CVector apply_dx_adjoint(int a, int s, const CVector& y) const;
  CVector apply_dvx(int k, int a, int s, const CVector& x) const;

  const Trajectory* tr_;
  const Povm* povm_;
  GradientScheme scheme_;
  Execution execution_;
  std::vector<CMatrix> half_;  // e^{ΔtL_s/2}, midpoint scheme only
  std::vector<CVector> effects_;
  RVector p_;
  RMatrix dp_;
  FisherMatrix f_;
};

// Free-function forms of the engine for single queries.
RVector gradient_prob(const Trajectory& trajectory, const Povm& povm, int k, int s,
                      GradientScheme scheme = GradientScheme::exact);
RMatrix gradient_dprob(const Trajectory& trajectory, const Povm& povm, int k, int s,
                       GradientScheme scheme = GradientScheme::exact);
double gradient_cfim_entry(const Trajectory& trajectory, const Povm& povm, int alpha, int beta,
                           int k, int s, GradientScheme scheme = GradientScheme::exact);
RMatrix gradient_objective(const Trajectory& trajectory, const Povm& povm, Objective objective,
                           GradientScheme scheme = GradientScheme::exact);

enum class InitScheme { zeros, uniform_random, user_supplied };
enum class UpdateRule { plain_gradient, bfgs };

struct GrapeConfig {
  double step_size = 0.01;
  int max_iters = 1000;  // counts the evaluation of the initial controls
  double convergence_tol = 1e-6;
  int convergence_window = 5;
  InitScheme init = InitScheme::uniform_random;
  std::uint64_t seed = 20190101;
  double init_amplitude = 0.1;
  std::optional<RMatrix> initial_controls;  // required for user_supplied
  UpdateRule update = UpdateRule::plain_gradient;
  /// Plain gradient only: take every step at step_size with no line search.
  bool fixed_step = false;
  std::optional<double> amplitude_bound;
  GradientScheme gradient_scheme = GradientScheme::exact;
  Execution execution = Execution::parallel;

  void validate() const;
};

struct GrapeProblem {
  ParametricModel model;
  RVector x;
  DensityMatrix probe;
  Povm povm;
  double total_time = 1.0;
  int num_steps = 100;
  Objective objective = Objective::f0;

  static GrapeProblem for_model(const ParametricModel& model, double total_time, int num_steps,
                                Objective objective);
};

struct GrapeResult {
  ControlGrid final_controls;
  std::vector<double> objective_history;  // one entry per accepted iterate
  FisherMatrix final_cfim;
  double final_tr_inv;
  int iterations_used = 0;
  bool converged = false;
  /// Iterate with the smallest Tr F⁻¹ seen along the ascent path.
  ControlGrid best_controls;
  double best_tr_inv;
  std::string stop_reason;
};

struct Evaluation {
  double objective = 0.0;
  FisherMatrix cfim;
  double tr_inv = 0.0;
};

/// Propagates `controls` and returns the CFIM, Tr F⁻¹ and objective.
Evaluation evaluate_controls(const GrapeProblem& problem, const ControlGrid& controls,
                             Execution execution = Execution::parallel);

ControlGrid initial_controls(const GrapeProblem& problem, const GrapeConfig& config);

GrapeResult optimize(const GrapeProblem& problem, const GrapeConfig& config);

}  // namespace fisherctl

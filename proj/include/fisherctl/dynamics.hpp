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

#include <optional>
#include <vector>

#include "fisherctl/operators.hpp"
#include "fisherctl/parallel.hpp"

namespace fisherctl {

struct ParametricModel;

/// Dephasing-type channel contributing (rate/2)(A ρ A − ρ), with A Hermitian and A² = 𝟙.
struct NoiseChannel {
  CMatrix jump;
  double rate = 0.0;
};

class NoiseSpec {
 public:
  NoiseSpec() = default;
  explicit NoiseSpec(std::vector<NoiseChannel> channels);

  const std::vector<NoiseChannel>& channels() const { return channels_; }
  bool empty() const;  // true when there are no channels or every rate is zero

  /// Same jump operators with new rates; `rates` must have one entry per channel.
  NoiseSpec with_rates(const std::vector<double>& rates) const;

 private:
  std::vector<NoiseChannel> channels_;
};

/// Piecewise-constant amplitudes V_k(j): row k is field k, column j is time step j (0-based).
class ControlGrid {
 public:
  ControlGrid(RMatrix amplitudes, double total_time, std::optional<double> bound = std::nullopt);

  static ControlGrid zeros(int num_fields, int num_steps, double total_time);

  int num_fields() const { return static_cast<int>(amp_.rows()); }
  int num_steps() const { return static_cast<int>(amp_.cols()); }
  double total_time() const { return total_time_; }
  double dt() const { return total_time_ / num_steps(); }
  const RMatrix& amplitudes() const { return amp_; }
  double amplitude(int k, int j) const { return amp_(k, j); }
  const std::optional<double>& bound() const { return bound_; }

  /// Column-major flattening: index k + p·j.
  RVector flatten() const;
  ControlGrid with_flat(const RVector& flat) const;
  ControlGrid with_amplitudes(RMatrix amplitudes) const;
  /// Returns a copy with every amplitude clipped to ±bound (no-op without a bound).
  ControlGrid clipped() const;

 private:
  RMatrix amp_;
  double total_time_;
  std::optional<double> bound_;
};

enum class DerivativeScheme {
  exact,        // ∂e^{ΔtL} from the Fréchet derivative of the exponential
  first_order,  // ∂e^{ΔtL} ≈ Δt (∂L) e^{ΔtL}
};

/// All intermediates of one propagation. Step s (0-based) maps states[s] to states[s + 1]
/// through propagators[s] = exp(dt · liouvillians[s]). A product of segment propagators
/// over an empty index range is the identity.
struct Trajectory {
  int dim = 0;
  int num_steps = 0;
  double dt = 0.0;
  DerivativeScheme scheme = DerivativeScheme::exact;

  std::vector<CMatrix> states;        // ρ_0 … ρ_m, d×d
  std::vector<CMatrix> liouvillians;  // L_0 … L_{m−1}, d²×d²
  std::vector<CMatrix> propagators;   // exp(dt L_s), d²×d²
  /// param_derivs[α][j] = ∂ρ_j/∂x_α for j = 0 … m (empty when derivatives were not requested).
  std::vector<std::vector<CMatrix>> param_derivs;
  /// propagator_derivs[s][α] = ∂exp(dt L_s)/∂x_α (exact scheme with derivatives only).
  std::vector<std::vector<CMatrix>> propagator_derivs;
  /// ∂L/∂x_α = −i (∂H₀/∂x_α)^×, d²×d². Noise rates carry no parameter dependence.
  std::vector<CMatrix> param_generators;
  /// −i H_k^×, the derivative of L with respect to V_k.
  std::vector<CMatrix> control_generators;

  int num_params() const { return static_cast<int>(param_generators.size()); }
  int num_fields() const { return static_cast<int>(control_generators.size()); }
  const CMatrix& final_state() const { return states.back(); }
  /// Validated copy of ρ_m.
  DensityMatrix final_density() const;
  std::vector<CMatrix> final_derivs() const;
};

struct PropagateOptions {
  DerivativeScheme scheme = DerivativeScheme::exact;
  Execution execution = Execution::parallel;
  bool with_derivatives = true;
};

Superoperator build_liouvillian(const HermitianOperator& h, const NoiseSpec& noise);

std::vector<Superoperator> step_liouvillians(const ParametricModel& model, const RVector& x,
                                             const ControlGrid& controls);

/// Throws NumericalError when Tr ρ_j drifts from 1 by more than 1e-6 at any step.
Trajectory propagate(const ParametricModel& model, const RVector& x, const ControlGrid& controls,
                     const DensityMatrix& probe, const PropagateOptions& options = {});

/// p_y = Tr(ρ E_y). Values in [−1e-12, 0) are clamped to 0; anything lower throws.
RVector measure(const CMatrix& rho, const Povm& povm);
RVector measure(const DensityMatrix& rho, const Povm& povm);

struct MeasuredDerivs {
  RVector p;   // n_outcomes
  RMatrix dp;  // n_params × n_outcomes
};

MeasuredDerivs measure_derivs(const Trajectory& trajectory, const Povm& povm);

}  // namespace fisherctl

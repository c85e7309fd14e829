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

#include <functional>
#include <string>
#include <vector>

#include "fisherctl/dynamics.hpp"
#include "fisherctl/operators.hpp"

namespace fisherctl {

/// Two-qubit catalog systems. Basis order is |00⟩, |01⟩, |10⟩, |11⟩ with qubit 1 leftmost.
struct ParametricModel {
  std::string name;
  int hilbert_dim = 0;
  std::vector<std::string> param_names;
  std::function<HermitianOperator(const RVector&)> h0;
  /// ∂H₀/∂x_α at x. Constant for zz and xxz, point-dependent for magfield.
  std::function<std::vector<HermitianOperator>(const RVector&)> dh0;
  std::vector<std::string> control_names;
  std::vector<HermitianOperator> control_hams;
  NoiseSpec noise;
  DensityMatrix default_probe;
  Povm default_povm;
  RVector true_values;

  int num_params() const { return static_cast<int>(param_names.size()); }
  int num_controls() const { return static_cast<int>(control_hams.size()); }

  /// One rate per noise channel, or a single rate applied to every channel.
  ParametricModel with_noise_rates(const std::vector<double>& rates) const;
  ParametricModel noiseless() const;
};

/// H₀ = B n(θ, φ)·σ on qubit 1, dephasing σ₃ on qubit 1 at γ = 0.2, Bell probe and POVM.
ParametricModel model_magnetic_field();
/// H₀ = ω₁σ₃⁽¹⁾ + ω₂σ₃⁽²⁾ + gσ₃⁽¹⁾σ₃⁽²⁾, local dephasing γ₁ = γ₂ = 0.1, |++⟩ probe, σ₁⊗σ₁ basis.
ParametricModel model_zz();
/// H₀ = −x₁(σ₁σ₁ + σ₂σ₂) − x₂σ₃σ₃, local dephasing γ₁ = γ₂ = 0.1, |0⟩(|0⟩ + i|1⟩)/√2 probe.
ParametricModel model_xxz();

/// Accepts "magfield", "zz", "xxz"; throws InvalidArgument otherwise.
ParametricModel model_by_name(const std::string& name);
std::vector<std::string> model_names();

/// σ_i on qubit `q` (1 or 2) of a two-qubit register; i ∈ {1, 2, 3}.
CMatrix two_qubit_pauli(int q, int i);

namespace states {
CVector bell_phi_plus();
CVector bell_phi_minus();
CVector bell_psi_plus();
CVector bell_psi_minus();
CVector plus_plus();
}  // namespace states

Povm bell_povm();
/// Projectors onto |±±⟩, labels "++", "+-", "-+", "--".
Povm plus_minus_povm();

}  // namespace fisherctl

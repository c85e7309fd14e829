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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fisherctl/fisher.hpp"
#include "fisherctl/operators.hpp"

// Closed-form probabilities, Fisher matrices and states for the catalog models at zero
// control. The magnetic-field expressions describe the noiseless rotation followed by a single
// σ₃⁽¹⁾ dephasing of strength γT; they coincide with the master-equation solution when γ = 0 or
// θ = 0. The XXZ Fisher matrix assumes equal dephasing rates on both qubits.

namespace fisherctl::oracle {

/// Minimum magnitude accepted for a denominator before SingularDenominator is thrown.
inline constexpr double kMinDenominator = 1e-12;

// Magnetic field: parameters (B, θ, φ), outcomes ordered Φ+, Φ−, Ψ+, Ψ−.
RVector magfield_bell_probs(double b, double theta, double phi, double gamma, double t);
FisherMatrix magfield_cfim(double b, double theta, double phi, double gamma, double t);
FisherMatrix magfield_qfim(double b, double theta, double phi, double gamma, double t);
/// Leading terms of Tr F_cl⁻¹ for small θ (θ⁻² and θ⁰ orders). An approximation, not an oracle.
double magfield_trinv_small_theta(double b, double theta, double phi, double gamma, double t);
/// The two non-zero eigenvalues ½(1 ∓ e^{−γT}), ascending.
std::array<double, 2> magfield_eigenvalues(double gamma, double t);
/// Noiseless state from the (|00⟩ + |11⟩)/√2 probe.
CVector magfield_state(double b, double theta, double phi, double t);

// ZZ coupling: parameters (ω₁, ω₂, g), outcomes ordered ++, +−, −+, −−.
RVector zz_probs(double w1, double w2, double g, double gamma1, double gamma2, double t);
/// Pure-probe QFIM from ⟨σ₃⁽¹⁾⟩, ⟨σ₃⁽²⁾⟩ and ⟨σ₃⁽¹⁾σ₃⁽²⁾⟩ in the probe.
FisherMatrix zz_qfim_pure(double z1, double z2, double zz, double t);
/// Entrywise solution of the dephased ZZ dynamics for an arbitrary initial ρ(0).
CMatrix zz_state(const CMatrix& rho0, double w1, double w2, double g, double gamma1,
                 double gamma2, double t);

// XXZ coupling: parameters (x₁, x₂), outcomes ordered ++, +−, −+, −−.
RVector xxz_probs(double x1, double x2, double gamma1, double gamma2, double t);
/// δ± of the equal-rate CFIM; exactly 1 when γ = 0.
std::array<double, 2> xxz_deltas(double x1, double x2, double gamma, double t);
FisherMatrix xxz_cfim(double x1, double x2, double gamma, double t);
/// Tr F⁻¹ of xxz_cfim with the same +∞ convention as fisherctl::tr_inv.
double xxz_trinv(double x1, double x2, double gamma, double t);
/// Pure-probe QFIM from ⟨σ₃σ₃⟩ and ⟨σ₁σ₁ + σ₂σ₂⟩ in the probe.
FisherMatrix xxz_qfim_pure(double zz, double xx_plus_yy, double t);
/// Noiseless state from the |0⟩(|0⟩ + i|1⟩)/√2 probe, global phase removed.
CVector xxz_state(double x1, double x2, double t);

struct OracleResult {
  std::vector<std::string> labels;
  std::optional<RVector> probabilities;
  std::optional<FisherMatrix> cfim;
  std::optional<FisherMatrix> qfim;
  std::optional<double> tr_inv;
  std::optional<std::array<double, 2>> eigenvalues;
  /// The CFIM applies here but its closed form hits a removable singularity at this point.
  bool cfim_singular = false;
};

/// Every closed form that applies to `model` at parameters x, dephasing `rates` (one per
/// channel of the catalog model) and time t. Quantities whose assumptions do not hold are
/// left empty.
OracleResult evaluate(const std::string& model, const RVector& x, const std::vector<double>& rates,
                      double t);

}  // namespace fisherctl::oracle

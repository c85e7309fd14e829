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

#include <vector>

#include "fisherctl/operators.hpp"

namespace fisherctl {

namespace fisher_tol {
/// Outcomes with p ≤ eps_p are left out of the classical sum.
inline constexpr double eps_p = 1e-12;
/// An excluded outcome whose derivative exceeds this is a singular contribution.
inline constexpr double singular_deriv = 1e-6;
/// Relative cutoff on λ_m + λ_n (times Tr ρ) for the SLD support.
inline constexpr double eps_lambda = 1e-10;
/// tr_inv treats eigenvalues below max(eps_rel · λ_max, eps_abs) as zero.
inline constexpr double eps_rel = 1e-10;
inline constexpr double eps_abs = 1e-14;
}  // namespace fisher_tol

enum class FisherKind { classical, quantum };

class FisherMatrix {
 public:
  /// Symmetrizes `entries` after checking symmetry to 1e-10 (scaled by max(1, max|F|)) and
  /// PSD to −1e-8 (same scaling).
  FisherMatrix(RMatrix entries, FisherKind kind);

  int dim() const { return static_cast<int>(entries_.rows()); }
  FisherKind kind() const { return kind_; }
  const RMatrix& entries() const { return entries_; }
  double operator()(int a, int b) const { return entries_(a, b); }

 private:
  RMatrix entries_;
  FisherKind kind_;
};

/// F_αβ = Σ_{p_y > eps_p} ∂_α p_y ∂_β p_y / p_y with dp laid out n_params × n_outcomes.
/// Throws SingularContribution when an excluded outcome has |∂_α p_y| > singular_deriv.
FisherMatrix cfim(const RVector& p, const RMatrix& dp);

/// SLD quantum Fisher information from the spectral decomposition of ρ.
FisherMatrix qfim(const CMatrix& rho, const std::vector<CMatrix>& drho);
FisherMatrix qfim(const DensityMatrix& rho, const std::vector<CMatrix>& drho);

/// Tr F⁻¹, or +∞ when F is numerically singular.
double tr_inv(const RMatrix& f);
double tr_inv(const FisherMatrix& f);

/// (Σ_α 1/F_αα)⁻¹; 0 when any diagonal entry is at or below the singular threshold.
double objective_f0(const FisherMatrix& f);
/// det F / Tr F for a 2×2 matrix; 0 when Tr F is at or below the singular threshold.
double objective_fcle(const FisherMatrix& f);

/// Threshold used by the objectives: max(eps_rel · max|F_αα|, eps_abs).
double singular_threshold(const RMatrix& f);

}  // namespace fisherctl

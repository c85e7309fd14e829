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

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace fisherctl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-10;
inline constexpr double psd = 1e-10;
inline constexpr double completeness = 1e-10;
}  // namespace tol

bool all_finite(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double tolerance = tol::hermitian);

/// Throws DimensionError unless `m` is square and non-empty, NumericalError if any entry is
/// NaN or Inf.
void require_square_finite(const CMatrix& m, const char* what);

class HermitianOperator {
 public:
  /// Validates A = A† entrywise to `tolerance`, then stores the exactly symmetrized matrix.
  explicit HermitianOperator(const CMatrix& m, double tolerance = tol::hermitian);

  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

 private:
  CMatrix m_;
};

/// Unit-trace, Hermitian, positive semidefinite state operator.
class DensityMatrix {
 public:
  explicit DensityMatrix(const CMatrix& m);

  static DensityMatrix from_pure(const CVector& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
};

struct PovmOutcome {
  std::string label;
  CMatrix effect;
};

/// Positive effects summing to the identity.
class Povm {
 public:
  explicit Povm(std::vector<PovmOutcome> outcomes);

  /// Projective measurement onto an orthonormal set of vectors.
  static Povm projective(const std::vector<std::pair<std::string, CVector>>& basis);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(outcomes_.size()); }
  const std::vector<PovmOutcome>& outcomes() const { return outcomes_; }
  const CMatrix& effect(int y) const { return outcomes_.at(static_cast<size_t>(y)).effect; }
  const std::string& label(int y) const { return outcomes_.at(static_cast<size_t>(y)).label; }

 private:
  std::vector<PovmOutcome> outcomes_;
  int dim_ = 0;
};

/// Linear map on d×d operators, stored as a d²×d² matrix acting on column-stacked
/// vectorizations: vec(X)[i + d·j] = X(i, j). Every superoperator in the library uses this
/// convention, so vec(A X B) = (Bᵀ ⊗ A) vec(X).
class Superoperator {
 public:
  Superoperator(int dim, CMatrix map);

  static Superoperator identity(int dim);
  static Superoperator zero(int dim);

  int dim() const { return dim_; }
  const CMatrix& map() const { return map_; }

  Superoperator operator+(const Superoperator& o) const;
  Superoperator operator-(const Superoperator& o) const;
  Superoperator operator*(Complex s) const;
  /// Composition: (this ∘ o)(X) = this(o(X)).
  Superoperator operator*(const Superoperator& o) const;

 private:
  int dim_;
  CMatrix map_;
};

CVector vec(const CMatrix& x);
CMatrix devec(const CVector& v, int dim);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// A^× = [A, ·], i.e. 𝟙⊗A − Aᵀ⊗𝟙 under column stacking.
Superoperator commutator_superop(const HermitianOperator& h);
Superoperator commutator_superop(const CMatrix& a);

/// X ↦ A X B as a superoperator.
Superoperator sandwich_superop(const CMatrix& a, const CMatrix& b);

/// exp(t·S). Returns the identity without any arithmetic when t == 0.
Superoperator expm(const Superoperator& s, double t);

CMatrix apply_superop(const Superoperator& s, const CMatrix& x);

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns
};

EigenDecomposition eigh(const HermitianOperator& h);
EigenDecomposition eigh(const DensityMatrix& rho);
/// Hermiticity is checked at 1e-10·max(1, max|A_ij|) so propagated states are accepted.
EigenDecomposition eigh(const CMatrix& a);

/// Hilbert-Schmidt pairing Tr(A·X) for Hermitian A, evaluated on vectorizations.
inline Complex trace_product(const CVector& vec_a, const CVector& vec_x) {
  return vec_a.dot(vec_x);
}

namespace pauli {
CMatrix identity();
CMatrix x();
CMatrix y();
CMatrix z();
}  // namespace pauli

}  // namespace fisherctl

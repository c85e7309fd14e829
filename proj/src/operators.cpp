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

#include "fisherctl/operators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "fisherctl/error.hpp"
#include "fisherctl/expm.hpp"

namespace fisherctl {

namespace {

double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::string dims(const CMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) return false;
  }
  return true;
}

bool is_hermitian(const CMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

void require_square_finite(const CMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         dims(m));
  }
  if (!all_finite(m)) throw NumericalError(std::string(what) + ": non-finite entry");
}

// ---------------------------------------------------------------------------------------------

HermitianOperator::HermitianOperator(const CMatrix& m, double tolerance) {
  require_square_finite(m, "HermitianOperator");
  if (!is_hermitian(m, tolerance)) {
    throw InvalidArgument("HermitianOperator: matrix is not Hermitian");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(CMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw DimensionError("HermitianOperator: dimension mismatch in sum");
  return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(m_ * s);
}

DensityMatrix::DensityMatrix(const CMatrix& m) {
  require_square_finite(m, "DensityMatrix");
  if (!is_hermitian(m, tol::hermitian)) {
    throw InvalidArgument("DensityMatrix: matrix is not Hermitian");
  }
  const double tr_err = std::abs(m.trace() - Complex(1.0, 0.0));
  if (tr_err >= tol::trace) {
    throw InvalidArgument("DensityMatrix: trace differs from 1 by " + std::to_string(tr_err));
  }
  m_ = 0.5 * (m + m.adjoint());
  if (min_eigenvalue(m_) < -tol::psd) {
    throw InvalidArgument("DensityMatrix: matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::from_pure(const CVector& psi) {
  const double n = psi.norm();
  if (psi.size() == 0 || !(n > 0.0)) throw InvalidArgument("from_pure: zero state vector");
  const CVector u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

Povm::Povm(std::vector<PovmOutcome> outcomes) : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw InvalidArgument("Povm: no outcomes");
  dim_ = static_cast<int>(outcomes_.front().effect.rows());
  CMatrix sum = CMatrix::Zero(dim_, dim_);
  for (auto& o : outcomes_) {
    require_square_finite(o.effect, "Povm effect");
    if (o.effect.rows() != dim_) throw DimensionError("Povm: effects have different dimensions");
    if (!is_hermitian(o.effect, tol::hermitian)) {
      throw InvalidArgument("Povm: effect '" + o.label + "' is not Hermitian");
    }
    o.effect = 0.5 * (o.effect + o.effect.adjoint());
    if (min_eigenvalue(o.effect) < -tol::psd) {
      throw InvalidArgument("Povm: effect '" + o.label + "' is not positive semidefinite");
    }
    sum += o.effect;
  }
  if ((sum - CMatrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > tol::completeness) {
    throw InvalidArgument("Povm: effects do not sum to the identity");
  }
}

Povm Povm::projective(const std::vector<std::pair<std::string, CVector>>& basis) {
  std::vector<PovmOutcome> out;
  out.reserve(basis.size());
  for (const auto& [label, v] : basis) {
    const CVector u = v / v.norm();
    out.push_back({label, u * u.adjoint()});
  }
  return Povm(std::move(out));
}

// ---------------------------------------------------------------------------------------------

Superoperator::Superoperator(int dim, CMatrix map) : dim_(dim), map_(std::move(map)) {
  if (dim < 1) throw DimensionError("Superoperator: dimension must be positive");
  if (map_.rows() != dim * dim || map_.cols() != dim * dim) {
    throw DimensionError("Superoperator: expected " + std::to_string(dim * dim) + "x" +
                         std::to_string(dim * dim) + " map, got " + dims(map_));
  }
  if (!all_finite(map_)) throw NumericalError("Superoperator: non-finite entry");
}

Superoperator Superoperator::identity(int dim) {
  return Superoperator(dim, CMatrix::Identity(dim * dim, dim * dim));
}

Superoperator Superoperator::zero(int dim) {
  return Superoperator(dim, CMatrix::Zero(dim * dim, dim * dim));
}

Superoperator Superoperator::operator+(const Superoperator& o) const {
  if (o.dim_ != dim_) throw DimensionError("Superoperator: dimension mismatch in sum");
  return Superoperator(dim_, map_ + o.map_);
}

Superoperator Superoperator::operator-(const Superoperator& o) const {
  if (o.dim_ != dim_) throw DimensionError("Superoperator: dimension mismatch in difference");
  return Superoperator(dim_, map_ - o.map_);
}

Superoperator Superoperator::operator*(Complex s) const { return Superoperator(dim_, map_ * s); }

Superoperator Superoperator::operator*(const Superoperator& o) const {
  if (o.dim_ != dim_) throw DimensionError("Superoperator: dimension mismatch in composition");
  return Superoperator(dim_, map_ * o.map_);
}

CVector vec(const CMatrix& x) {
  return Eigen::Map<const CVector>(x.data(), x.size());
}

CMatrix devec(const CVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw DimensionError("devec: vector length " + std::to_string(v.size()) +
                         " is not dim² for dim " + std::to_string(dim));
  }
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Superoperator commutator_superop(const CMatrix& a) {
  require_square_finite(a, "commutator_superop");
  const auto d = a.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  return Superoperator(static_cast<int>(d), kron(id, a) - kron(a.transpose(), id));
}

Superoperator commutator_superop(const HermitianOperator& h) {
  return commutator_superop(h.matrix());
}

Superoperator sandwich_superop(const CMatrix& a, const CMatrix& b) {
  require_square_finite(a, "sandwich_superop");
  require_square_finite(b, "sandwich_superop");
  if (a.rows() != b.rows()) throw DimensionError("sandwich_superop: dimension mismatch");
  return Superoperator(static_cast<int>(a.rows()), kron(b.transpose(), a));
}

Superoperator expm(const Superoperator& s, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("expm: non-finite duration");
  if (t == 0.0) return Superoperator::identity(s.dim());
  CMatrix e = expm_dense(s.map() * t);
  if (!all_finite(e)) throw NumericalError("expm: non-finite result");
  return Superoperator(s.dim(), std::move(e));
}

CMatrix apply_superop(const Superoperator& s, const CMatrix& x) {
  if (x.rows() != s.dim() || x.cols() != s.dim()) {
    throw DimensionError("apply_superop: operand is " + dims(x) + ", superoperator acts on " +
                         std::to_string(s.dim()) + "x" + std::to_string(s.dim()));
  }
  return devec(s.map() * vec(x), s.dim());
}

EigenDecomposition eigh(const CMatrix& a) {
  require_square_finite(a, "eigh");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (!is_hermitian(a, 1e-10 * scale)) throw InvalidArgument("eigh: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("eigh: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

EigenDecomposition eigh(const HermitianOperator& h) { return eigh(h.matrix()); }

EigenDecomposition eigh(const DensityMatrix& rho) { return eigh(rho.matrix()); }

namespace pauli {

CMatrix identity() { return CMatrix::Identity(2, 2); }

CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

}  // namespace fisherctl

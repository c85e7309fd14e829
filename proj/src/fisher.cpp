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

#include "fisherctl/fisher.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "fisherctl/error.hpp"

namespace fisherctl {

FisherMatrix::FisherMatrix(RMatrix entries, FisherKind kind)
    : entries_(std::move(entries)), kind_(kind) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw DimensionError("FisherMatrix: expected a non-empty square matrix");
  }
  if (!entries_.allFinite()) throw NumericalError("FisherMatrix: non-finite entry");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericalError("FisherMatrix: matrix is not symmetric");
  }
  entries_ = 0.5 * (entries_ + entries_.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(entries_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8 * scale) {
    std::ostringstream os;
    os << "FisherMatrix: matrix is not positive semidefinite (min eigenvalue "
       << es.eigenvalues().minCoeff() << ")";
    throw NumericalError(os.str());
  }
}

FisherMatrix cfim(const RVector& p, const RMatrix& dp) {
  if (dp.cols() != p.size()) {
    throw DimensionError("cfim: derivative matrix has " + std::to_string(dp.cols()) +
                         " outcome columns, probability vector has " + std::to_string(p.size()));
  }
  if (dp.rows() == 0) throw DimensionError("cfim: no parameters");
  if (!p.allFinite() || !dp.allFinite()) throw NumericalError("cfim: non-finite input");
  if ((p.array() < 0.0).any() || (p.array() > 1.0).any() || std::abs(p.sum() - 1.0) > 1e-9) {
    throw InvalidArgument("cfim: p is not a probability vector");
  }
  const auto n = dp.rows();
  RMatrix f = RMatrix::Zero(n, n);
  for (Eigen::Index y = 0; y < p.size(); ++y) {
    if (p(y) <= fisher_tol::eps_p) {
      const double worst = dp.col(y).cwiseAbs().maxCoeff();
      if (worst > fisher_tol::singular_deriv) {
        std::ostringstream os;
        os << "cfim: outcome " << y << " has p = " << p(y) << " but |dp| = " << worst;
        throw SingularContribution(os.str());
      }
      continue;
    }
    f.noalias() += (dp.col(y) * dp.col(y).transpose()) / p(y);
  }
  return FisherMatrix(std::move(f), FisherKind::classical);
}

FisherMatrix qfim(const CMatrix& rho, const std::vector<CMatrix>& drho) {
  if (drho.empty()) throw DimensionError("qfim: no parameters");
  const EigenDecomposition ed = eigh(rho);
  const auto d = rho.rows();
  const double cut = fisher_tol::eps_lambda * rho.trace().real();

  std::vector<CMatrix> rotated;
  rotated.reserve(drho.size());
  for (const auto& dr : drho) {
    if (dr.rows() != d || dr.cols() != d) throw DimensionError("qfim: derivative shape mismatch");
    if (!is_hermitian(dr, 1e-8)) throw InvalidArgument("qfim: derivative is not Hermitian");
    if (std::abs(dr.trace()) > 1e-8) throw InvalidArgument("qfim: derivative is not traceless");
    rotated.push_back(ed.vectors.adjoint() * dr * ed.vectors);
  }

  const auto np = static_cast<Eigen::Index>(drho.size());
  RMatrix f = RMatrix::Zero(np, np);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      const double s = ed.values(m) + ed.values(n);
      if (s <= cut) continue;
      for (Eigen::Index a = 0; a < np; ++a) {
        for (Eigen::Index b = a; b < np; ++b) {
          const double v =
              2.0 * (rotated[static_cast<size_t>(a)](m, n) * rotated[static_cast<size_t>(b)](n, m))
                        .real() /
              s;
          f(a, b) += v;
          if (b != a) f(b, a) += v;
        }
      }
    }
  }
  return FisherMatrix(std::move(f), FisherKind::quantum);
}

FisherMatrix qfim(const DensityMatrix& rho, const std::vector<CMatrix>& drho) {
  return qfim(rho.matrix(), drho);
}

double tr_inv(const RMatrix& f) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (f + f.transpose()));
  const RVector& ev = es.eigenvalues();
  const double floor = std::max(fisher_tol::eps_rel * ev.maxCoeff(), fisher_tol::eps_abs);
  if (ev.minCoeff() < floor) return std::numeric_limits<double>::infinity();
  return ev.cwiseInverse().sum();
}

double tr_inv(const FisherMatrix& f) { return tr_inv(f.entries()); }

double singular_threshold(const RMatrix& f) {
  return std::max(fisher_tol::eps_rel * f.diagonal().cwiseAbs().maxCoeff(), fisher_tol::eps_abs);
}

double objective_f0(const FisherMatrix& f) {
  const double eps = singular_threshold(f.entries());
  double sum = 0.0;
  for (int a = 0; a < f.dim(); ++a) {
    if (f(a, a) <= eps) return 0.0;
    sum += 1.0 / f(a, a);
  }
  return 1.0 / sum;
}

double objective_fcle(const FisherMatrix& f) {
  if (f.dim() != 2) throw DimensionError("objective_fcle: requires a 2x2 Fisher matrix");
  const double tr = f(0, 0) + f(1, 1);
  if (tr <= singular_threshold(f.entries())) return 0.0;
  return (f(0, 0) * f(1, 1) - f(0, 1) * f(0, 1)) / tr;
}

}  // namespace fisherctl

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

#include "fisherctl/expm.hpp"

#include <Eigen/LU>
#include <array>
#include <cmath>

#include "fisherctl/error.hpp"

namespace fisherctl {

namespace {

constexpr double kTheta13 = 5.371920351148152;

constexpr std::array<double, 14> kB = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

int scaling_exponent(const CMatrix& a) {
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1)) throw NumericalError("expm: non-finite input");
  if (norm1 <= kTheta13) return 0;
  return std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
}

ExpmFrechet pade13(const CMatrix& a_in, std::span<const CMatrix> dirs_in, bool with_derivs) {
  const auto n = a_in.rows();
  const int s = scaling_exponent(a_in);
  const double scale = std::ldexp(1.0, -s);
  const CMatrix a = a_in * scale;
  const CMatrix id = CMatrix::Identity(n, n);

  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a2 * a4;

  const CMatrix w1 = kB[13] * a6 + kB[11] * a4 + kB[9] * a2;
  const CMatrix w2 = kB[7] * a6 + kB[5] * a4 + kB[3] * a2 + kB[1] * id;
  const CMatrix z1 = kB[12] * a6 + kB[10] * a4 + kB[8] * a2;
  const CMatrix z2 = kB[6] * a6 + kB[4] * a4 + kB[2] * a2 + kB[0] * id;
  const CMatrix w = a6 * w1 + w2;
  const CMatrix u = a * w;
  const CMatrix v = a6 * z1 + z2;

  Eigen::PartialPivLU<CMatrix> lu(v - u);
  CMatrix r = lu.solve(v + u);

  ExpmFrechet out;
  if (with_derivs) {
    out.derivatives.reserve(dirs_in.size());
    for (const CMatrix& e_in : dirs_in) {
      if (e_in.rows() != n || e_in.cols() != n) {
        throw DimensionError("expm_frechet: direction shape does not match the matrix");
      }
      const CMatrix e = e_in * scale;
      const CMatrix l2 = a * e + e * a;
      const CMatrix l4 = a2 * l2 + l2 * a2;
      const CMatrix l6 = a4 * l2 + l4 * a2;
      const CMatrix lw1 = kB[13] * l6 + kB[11] * l4 + kB[9] * l2;
      const CMatrix lw2 = kB[7] * l6 + kB[5] * l4 + kB[3] * l2;
      const CMatrix lz1 = kB[12] * l6 + kB[10] * l4 + kB[8] * l2;
      const CMatrix lz2 = kB[6] * l6 + kB[4] * l4 + kB[2] * l2;
      const CMatrix lw = a6 * lw1 + l6 * w1 + lw2;
      const CMatrix lu_term = a * lw + e * w;
      const CMatrix lv = a6 * lz1 + l6 * z1 + lz2;
      out.derivatives.push_back(lu.solve(lu_term + lv + (lu_term - lv) * r));
    }
  }

  for (int k = 0; k < s; ++k) {
    for (CMatrix& l : out.derivatives) l = r * l + l * r;
    r = r * r;
  }
  out.value = std::move(r);
  return out;
}

}  // namespace

CMatrix expm_dense(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("expm: matrix is not square");
  if (a.size() == 0) return a;
  return pade13(a, {}, false).value;
}

ExpmFrechet expm_frechet(const CMatrix& a, std::span<const CMatrix> directions) {
  if (a.rows() != a.cols()) throw DimensionError("expm_frechet: matrix is not square");
  return pade13(a, directions, true);
}

}  // namespace fisherctl

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

#include "fisherctl/oracles.hpp"

#include <cmath>

#include "fisherctl/error.hpp"

namespace fisherctl::oracle {

namespace {

double checked(double den, const char* what) {
  if (!(std::abs(den) >= kMinDenominator)) {
    throw SingularDenominator(std::string(what) + ": denominator vanishes at this point");
  }
  return den;
}

double sq(double v) { return v * v; }

RVector four(double a, double b, double c, double d) {
  RVector v(4);
  v << a, b, c, d;
  return v;
}

}  // namespace

RVector magfield_bell_probs(double b, double theta, double phi, double gamma, double t) {
  const double e = std::exp(-gamma * t);
  const double c2 = sq(std::cos(b * t));
  const double s2 = sq(std::sin(b * t));
  const double ct2 = sq(std::cos(theta));
  const double st2 = sq(std::sin(theta));
  return four(0.5 * ((1 + e) * c2 + (1 - e) * s2 * ct2), 0.5 * ((1 - e) * c2 + (1 + e) * s2 * ct2),
              0.5 * s2 * st2 * (1 + e * std::cos(2 * phi)),
              0.5 * s2 * st2 * (1 - e * std::cos(2 * phi)));
}

FisherMatrix magfield_cfim(double b, double theta, double phi, double gamma, double t) {
  const double e2 = std::exp(-2 * gamma * t);
  const double c = sq(std::cos(b * t));
  const double s = sq(std::sin(b * t));
  const double ct = sq(std::cos(theta));
  const double st = sq(std::sin(theta));
  const double den = checked(sq(c + s * ct) - e2 * sq(c - s * ct), "magfield_cfim");
  const double den_pp = checked(1 - e2 * sq(std::cos(2 * phi)), "magfield_cfim");

  const double f_pp = 4 * e2 * s * st * sq(std::sin(2 * phi)) / den_pp;
  const double f_tt = 4 * s * (ct + s * st * ct * ((1 + 3 * e2) * c + (1 - e2) * s * ct) / den);
  const double f_bb =
      4 * t * t * c *
      (st + s * ((sq(st) + e2 * sq(1 + ct)) * (1 - s * st) + 2 * e2 * st * (1 + ct) * (-c + s * ct)) /
                den);
  const double f_bt =
      t * std::sin(2 * b * t) * std::sin(2 * theta) *
      (1 + s * ((1 + e2) * c * st + (1 - e2) * s * ct * st - 2 * e2 * c * (1 + ct)) / den);

  RMatrix f(3, 3);
  f << f_bb, f_bt, 0.0, f_bt, f_tt, 0.0, 0.0, 0.0, f_pp;
  return FisherMatrix(std::move(f), FisherKind::classical);
}

FisherMatrix magfield_qfim(double b, double theta, double phi, double gamma, double t) {
  (void)phi;
  const double e2 = std::exp(-2 * gamma * t);
  const double s = sq(std::sin(b * t));
  const double c = sq(std::cos(b * t));
  const double ct = sq(std::cos(theta));
  const double st = sq(std::sin(theta));
  const double sin2bt = std::sin(2 * b * t);
  const double sin2th = std::sin(2 * theta);

  RMatrix f(3, 3);
  f(0, 0) = 4 * t * t * (ct * e2 + st);
  f(1, 1) = 4 * s * (ct + st * (e2 * c + s));
  f(2, 2) = 4 * st * s * (1 - (1 - e2) * st * s);
  f(0, 1) = f(1, 0) = (1 - e2) * t * sin2bt * sin2th;
  f(0, 2) = f(2, 0) = -2 * (1 - e2) * t * sin2th * std::sin(theta) * s;
  f(1, 2) = f(2, 1) = 2 * (1 - e2) * std::pow(std::sin(theta), 3) * sin2bt * s;
  return FisherMatrix(std::move(f), FisherKind::quantum);
}

double magfield_trinv_small_theta(double b, double theta, double phi, double gamma, double t) {
  const double e2 = std::exp(2 * gamma * t);
  const double c4 = std::cos(4 * b * t);
  const double lead = (e2 - sq(std::cos(2 * phi))) /
                      checked(2 * (1 - std::cos(2 * b * t)) * sq(std::sin(2 * phi)) * theta * theta,
                              "magfield_trinv_small_theta");
  const double den = checked(1 - c4, "magfield_trinv_small_theta");
  return lead - (1 + std::cos(2 * b * t)) / den - (1 - 2 * e2 + c4) / (4 * t * t * den);
}

std::array<double, 2> magfield_eigenvalues(double gamma, double t) {
  const double e = std::exp(-gamma * t);
  return {0.5 * (1 - e), 0.5 * (1 + e)};
}

CVector magfield_state(double b, double theta, double phi, double t) {
  const Complex i(0, 1);
  const double cb = std::cos(b * t), sb = std::sin(b * t);
  CVector v(4);
  v << cb - i * sb * std::cos(theta), -i * sb * std::sin(theta) * std::exp(-i * phi),
      -i * sb * std::sin(theta) * std::exp(i * phi), cb + i * sb * std::cos(theta);
  return v / std::sqrt(2.0);
}

RVector zz_probs(double w1, double w2, double g, double gamma1, double gamma2, double t) {
  const double a = std::exp(-gamma1 * t) * std::cos(2 * g * t) * std::cos(2 * w1 * t);
  const double b = std::exp(-gamma2 * t) * std::cos(2 * g * t) * std::cos(2 * w2 * t);
  const double c = std::exp(-(gamma1 + gamma2) * t) * std::cos(2 * w1 * t) * std::cos(2 * w2 * t);
  return four(0.25 * (1 + a + b + c), 0.25 * (1 + a - b - c), 0.25 * (1 - a + b - c),
              0.25 * (1 - a - b + c));
}

FisherMatrix zz_qfim_pure(double z1, double z2, double zz, double t) {
  const double k = 4 * t * t;
  RMatrix f(3, 3);
  f(0, 0) = k * (1 - z1 * z1);
  f(1, 1) = k * (1 - z2 * z2);
  f(2, 2) = k * (1 - zz * zz);
  f(0, 1) = f(1, 0) = k * (zz - z1 * z2);
  f(0, 2) = f(2, 0) = k * (z2 - z1 * zz);
  f(1, 2) = f(2, 1) = k * (z1 - z2 * zz);
  return FisherMatrix(std::move(f), FisherKind::quantum);
}

CMatrix zz_state(const CMatrix& rho0, double w1, double w2, double g, double gamma1,
                 double gamma2, double t) {
  if (rho0.rows() != 4 || rho0.cols() != 4) throw DimensionError("zz_state: expected 4x4 ρ(0)");
  const Complex i(0, 1);
  // Each basis label |ab⟩ has energy ε_ab and dephasing acts on the qubits whose labels differ.
  const double eps[4] = {w1 + w2 + g, w1 - w2 - g, -w1 + w2 - g, -w1 - w2 + g};
  const int bits[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CMatrix out(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double decay = 0.0;
      if (bits[r][0] != bits[c][0]) decay += gamma1;
      if (bits[r][1] != bits[c][1]) decay += gamma2;
      out(r, c) = rho0(r, c) * std::exp(-i * (eps[r] - eps[c]) * t - decay * t);
    }
  }
  return out;
}

RVector xxz_probs(double x1, double x2, double gamma1, double gamma2, double t) {
  const double a = std::sin(2 * x1 * t) * std::cos(2 * x2 * t) * std::exp(-gamma1 * t);
  const double b = std::cos(2 * x1 * t) * std::sin(2 * x2 * t) * std::exp(-gamma2 * t);
  return four(0.25 * (1 - a + b), 0.25 * (1 - a - b), 0.25 * (1 + a + b), 0.25 * (1 + a - b));
}

std::array<double, 2> xxz_deltas(double x1, double x2, double gamma, double t) {
  if (gamma == 0.0) return {1.0, 1.0};
  const double e = std::exp(2 * gamma * t);
  const double sp = std::sin(2 * t * (x1 + x2));
  const double sm = std::sin(2 * t * (x1 - x2));
  const double cp = std::cos(2 * t * (x1 + x2));
  const double cm = std::cos(2 * t * (x1 - x2));
  return {cp * cp / checked(e - sp * sp, "xxz_deltas"), cm * cm / checked(e - sm * sm, "xxz_deltas")};
}

FisherMatrix xxz_cfim(double x1, double x2, double gamma, double t) {
  const auto [dp, dm] = xxz_deltas(x1, x2, gamma, t);
  const double k = 2 * t * t;
  RMatrix f(2, 2);
  f << k * (dp + dm), k * (dp - dm), k * (dp - dm), k * (dp + dm);
  return FisherMatrix(std::move(f), FisherKind::classical);
}

double xxz_trinv(double x1, double x2, double gamma, double t) {
  return fisherctl::tr_inv(xxz_cfim(x1, x2, gamma, t));
}

FisherMatrix xxz_qfim_pure(double zz, double xx_plus_yy, double t) {
  const double k = 4 * t * t;
  RMatrix f(2, 2);
  f(0, 0) = k * (2 - 2 * zz - xx_plus_yy * xx_plus_yy);
  f(1, 1) = k * (1 - zz * zz);
  f(0, 1) = f(1, 0) = -k * xx_plus_yy * (1 + zz);
  return FisherMatrix(std::move(f), FisherKind::quantum);
}

CVector xxz_state(double x1, double x2, double t) {
  const Complex i(0, 1);
  CVector v(4);
  v << std::exp(2.0 * i * x2 * t), i * std::cos(2 * x1 * t), -std::sin(2 * x1 * t), 0.0;
  return v / std::sqrt(2.0);
}

OracleResult evaluate(const std::string& model, const RVector& x, const std::vector<double>& rates,
                      double t) {
  OracleResult r;
  r.labels = {"++", "+-", "-+", "--"};
  auto rate = [&](size_t i) { return i < rates.size() ? rates[i] : (rates.empty() ? 0.0 : rates[0]); };
  if (model == "magfield") {
    if (x.size() != 3) throw DimensionError("oracle: magfield takes 3 parameters");
    const double g = rate(0);
    r.labels = {"Phi+", "Phi-", "Psi+", "Psi-"};
    r.probabilities = magfield_bell_probs(x(0), x(1), x(2), g, t);
    r.eigenvalues = magfield_eigenvalues(g, t);
    r.qfim = magfield_qfim(x(0), x(1), x(2), g, t);
    try {
      r.cfim = magfield_cfim(x(0), x(1), x(2), g, t);
      r.tr_inv = fisherctl::tr_inv(*r.cfim);
    } catch (const SingularDenominator&) {
      r.cfim_singular = true;
    }
  } else if (model == "zz") {
    if (x.size() != 3) throw DimensionError("oracle: zz takes 3 parameters");
    r.probabilities = zz_probs(x(0), x(1), x(2), rate(0), rate(1), t);
    if (rate(0) == 0.0 && rate(1) == 0.0) r.qfim = zz_qfim_pure(0.0, 0.0, 0.0, t);
  } else if (model == "xxz") {
    if (x.size() != 2) throw DimensionError("oracle: xxz takes 2 parameters");
    r.probabilities = xxz_probs(x(0), x(1), rate(0), rate(1), t);
    if (rate(0) == rate(1)) {
      try {
        r.cfim = xxz_cfim(x(0), x(1), rate(0), t);
        r.tr_inv = fisherctl::tr_inv(*r.cfim);
      } catch (const SingularDenominator&) {
        r.cfim_singular = true;
      }
    }
    if (rate(0) == 0.0 && rate(1) == 0.0) r.qfim = xxz_qfim_pure(0.0, 0.0, t);
  } else {
    throw InvalidArgument("oracle: unknown model '" + model + "'");
  }
  return r;
}

}  // namespace fisherctl::oracle

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

#include "fisherctl/models.hpp"

#include <cmath>
#include <numbers>

#include "fisherctl/error.hpp"

namespace fisherctl {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

CVector basis4(Complex c00, Complex c01, Complex c10, Complex c11) {
  CVector v(4);
  v << c00, c01, c10, c11;
  return v;
}

std::vector<HermitianOperator> local_controls() {
  std::vector<HermitianOperator> out;
  for (int q = 1; q <= 2; ++q) {
    for (int i = 1; i <= 3; ++i) out.emplace_back(two_qubit_pauli(q, i));
  }
  return out;
}

std::vector<std::string> local_control_names() { return {"x1", "y1", "z1", "x2", "y2", "z2"}; }

NoiseSpec local_dephasing(double g1, double g2) {
  return NoiseSpec({{two_qubit_pauli(1, 3), g1}, {two_qubit_pauli(2, 3), g2}});
}

/// Builds a model whose H₀ is Σ_α x_α G_α for constant generators G_α.
ParametricModel linear_model(std::string name, std::vector<std::string> params,
                             std::vector<CMatrix> generators, NoiseSpec noise, CVector probe,
                             Povm povm, RVector truth) {
  std::vector<HermitianOperator> gens;
  for (const auto& g : generators) gens.emplace_back(g);
  auto h0 = [gens](const RVector& x) {
    CMatrix h = CMatrix::Zero(4, 4);
    for (size_t a = 0; a < gens.size(); ++a) h += x(static_cast<Eigen::Index>(a)) * gens[a].matrix();
    return HermitianOperator(h);
  };
  auto dh0 = [gens](const RVector&) { return gens; };
  return ParametricModel{std::move(name),  4,
                         std::move(params), h0,
                         dh0,              local_control_names(),
                         local_controls(), std::move(noise),
                         DensityMatrix::from_pure(probe), std::move(povm),
                         std::move(truth)};
}

}  // namespace

CMatrix two_qubit_pauli(int q, int i) {
  CMatrix s;
  switch (i) {
    case 1: s = pauli::x(); break;
    case 2: s = pauli::y(); break;
    case 3: s = pauli::z(); break;
    default: throw InvalidArgument("two_qubit_pauli: Pauli index must be 1, 2 or 3");
  }
  if (q == 1) return kron(s, pauli::identity());
  if (q == 2) return kron(pauli::identity(), s);
  throw InvalidArgument("two_qubit_pauli: qubit index must be 1 or 2");
}

namespace states {
CVector bell_phi_plus() { return basis4(kInvSqrt2, 0, 0, kInvSqrt2); }
CVector bell_phi_minus() { return basis4(kInvSqrt2, 0, 0, -kInvSqrt2); }
CVector bell_psi_plus() { return basis4(0, kInvSqrt2, kInvSqrt2, 0); }
CVector bell_psi_minus() { return basis4(0, kInvSqrt2, -kInvSqrt2, 0); }
CVector plus_plus() { return basis4(0.5, 0.5, 0.5, 0.5); }
}  // namespace states

Povm bell_povm() {
  return Povm::projective({{"Phi+", states::bell_phi_plus()},
                           {"Phi-", states::bell_phi_minus()},
                           {"Psi+", states::bell_psi_plus()},
                           {"Psi-", states::bell_psi_minus()}});
}

Povm plus_minus_povm() {
  return Povm::projective({{"++", basis4(0.5, 0.5, 0.5, 0.5)},
                           {"+-", basis4(0.5, -0.5, 0.5, -0.5)},
                           {"-+", basis4(0.5, 0.5, -0.5, -0.5)},
                           {"--", basis4(0.5, -0.5, -0.5, 0.5)}});
}

ParametricModel model_magnetic_field() {
  const CMatrix s1 = two_qubit_pauli(1, 1);
  const CMatrix s2 = two_qubit_pauli(1, 2);
  const CMatrix s3 = two_qubit_pauli(1, 3);
  auto h0 = [=](const RVector& x) {
    const double b = x(0), th = x(1), ph = x(2);
    return HermitianOperator(b * (std::sin(th) * std::cos(ph) * s1 +
                                  std::sin(th) * std::sin(ph) * s2 + std::cos(th) * s3));
  };
  auto dh0 = [=](const RVector& x) {
    const double b = x(0), th = x(1), ph = x(2);
    std::vector<HermitianOperator> out;
    out.emplace_back(std::sin(th) * std::cos(ph) * s1 + std::sin(th) * std::sin(ph) * s2 +
                     std::cos(th) * s3);
    out.emplace_back(b * (std::cos(th) * std::cos(ph) * s1 + std::cos(th) * std::sin(ph) * s2 -
                          std::sin(th) * s3));
    out.emplace_back(b * std::sin(th) * (-std::sin(ph) * s1 + std::cos(ph) * s2));
    return out;
  };
  RVector truth(3);
  truth << 1.0, std::numbers::pi / 4, std::numbers::pi / 4;
  return ParametricModel{"magfield",
                         4,
                         {"B", "theta", "phi"},
                         h0,
                         dh0,
                         local_control_names(),
                         local_controls(),
                         NoiseSpec({{s3, 0.2}}),
                         DensityMatrix::from_pure(states::bell_phi_plus()),
                         bell_povm(),
                         truth};
}

ParametricModel model_zz() {
  RVector truth(3);
  truth << 1.0, 1.2, 0.1;
  const CMatrix z1 = two_qubit_pauli(1, 3);
  const CMatrix z2 = two_qubit_pauli(2, 3);
  return linear_model("zz", {"omega1", "omega2", "g"}, {z1, z2, z1 * z2},
                      local_dephasing(0.1, 0.1), states::plus_plus(), plus_minus_povm(), truth);
}

ParametricModel model_xxz() {
  RVector truth(2);
  truth << 1.0, 1.2;
  const CMatrix xx = two_qubit_pauli(1, 1) * two_qubit_pauli(2, 1);
  const CMatrix yy = two_qubit_pauli(1, 2) * two_qubit_pauli(2, 2);
  const CMatrix zz = two_qubit_pauli(1, 3) * two_qubit_pauli(2, 3);
  return linear_model("xxz", {"x1", "x2"}, {-(xx + yy), -zz}, local_dephasing(0.1, 0.1),
                      basis4(kInvSqrt2, Complex(0, kInvSqrt2), 0, 0), plus_minus_povm(), truth);
}

ParametricModel model_by_name(const std::string& name) {
  if (name == "magfield") return model_magnetic_field();
  if (name == "zz") return model_zz();
  if (name == "xxz") return model_xxz();
  throw InvalidArgument("unknown model '" + name + "' (expected magfield, zz or xxz)");
}

std::vector<std::string> model_names() { return {"magfield", "zz", "xxz"}; }

ParametricModel ParametricModel::with_noise_rates(const std::vector<double>& rates) const {
  ParametricModel out = *this;
  if (rates.size() == 1 && noise.channels().size() > 1) {
    out.noise = noise.with_rates(std::vector<double>(noise.channels().size(), rates.front()));
  } else {
    out.noise = noise.with_rates(rates);
  }
  return out;
}

ParametricModel ParametricModel::noiseless() const {
  return with_noise_rates(std::vector<double>(noise.channels().size(), 0.0));
}

}  // namespace fisherctl

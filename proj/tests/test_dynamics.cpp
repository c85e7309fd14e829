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

#include <cmath>
#include <random>

#include "doctest.h"
#include "fisherctl/dynamics.hpp"
#include "fisherctl/error.hpp"
#include "fisherctl/models.hpp"
#include "oracle_support.hpp"

using namespace fisherctl;
namespace ts = fisherctl::testing;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ControlGrid zero_controls(const ParametricModel& m, int steps, double t) {
  return ControlGrid::zeros(m.num_controls(), steps, t);
}

RVector probs_at(const ParametricModel& m, const RVector& x, const ControlGrid& c) {
  PropagateOptions o;
  o.with_derivatives = false;
  return measure(propagate(m, x, c, m.default_probe, o).final_state(), m.default_povm);
}

}  // namespace

TEST_CASE("build_liouvillian") {
  const NoiseSpec none;
  CHECK(max_abs(build_liouvillian(HermitianOperator::zero(2), none).map()) == 0.0);

  const NoiseSpec deph({{pauli::z(), 0.7}});
  const CMatrix out = apply_superop(build_liouvillian(HermitianOperator::zero(2), deph), pauli::x());
  CHECK(max_abs(out + 0.7 * pauli::x()) < 1e-15);

  std::mt19937_64 rng(21);
  const CMatrix h = ts::random_hermitian(4, rng);
  const NoiseSpec two({{two_qubit_pauli(1, 3), 0.1}, {two_qubit_pauli(2, 1), 0.35}});
  const CMatrix want = ts::brute_liouvillian(h, two.channels());
  CHECK(max_abs(build_liouvillian(HermitianOperator(h), two).map() - want) < 1e-14);

  CHECK_THROWS_AS(NoiseSpec({{pauli::z(), -0.1}}), InvalidArgument);
  CHECK_THROWS_AS(NoiseSpec({{2.0 * pauli::z(), 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(build_liouvillian(HermitianOperator::zero(4), deph), DimensionError);
}

TEST_CASE("ZZ Liouvillian reproduces the dephased solution entrywise") {
  const ParametricModel m = model_zz();
  const double t = 1.3;
  std::mt19937_64 rng(22);
  const CMatrix rho0 = ts::random_density(4, rng);
  const Trajectory tr =
      propagate(m, m.true_values, zero_controls(m, 40, t), DensityMatrix(rho0));
  const double w1 = 1.0, w2 = 1.2, g = 0.1, g1 = 0.1, g2 = 0.1;
  // ρ₀₁(T) = ρ₀₁(0) e^{−2i(g+ω₂)T − γ₂T}
  const Complex want01 = rho0(0, 1) * std::exp(Complex(-g2 * t, -2 * (g + w2) * t));
  CHECK(std::abs(tr.final_state()(0, 1) - want01) < 1e-12);
  // Every other entry: each basis label has its own energy and the dephasing acts on the
  // qubits whose labels differ.
  const double eps[4] = {w1 + w2 + g, w1 - w2 - g, -w1 + w2 - g, -w1 - w2 + g};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double decay = ((r >> 1) != (c >> 1) ? g1 : 0.0) + ((r & 1) != (c & 1) ? g2 : 0.0);
      const Complex w = rho0(r, c) * std::exp(Complex(-decay * t, -(eps[r] - eps[c]) * t));
      CHECK(std::abs(tr.final_state()(r, c) - w) < 1e-12);
    }
  }
}

TEST_CASE("step_liouvillians") {
  const ParametricModel m = model_magnetic_field();
  const auto ls = step_liouvillians(m, m.true_values, zero_controls(m, 5, 1.0));
  REQUIRE(ls.size() == 5);
  for (const auto& l : ls) CHECK(l.map() == ls.front().map());

  RMatrix amp = RMatrix::Zero(6, 2);
  amp(0, 0) = 0.4;
  amp(4, 1) = -0.3;
  const auto two = step_liouvillians(m, m.true_values, ControlGrid(amp, 1.0));
  CMatrix diff = CMatrix::Zero(16, 16);
  for (int k = 0; k < 6; ++k) {
    diff += (amp(k, 0) - amp(k, 1)) * Complex(0, -1) *
            commutator_superop(m.control_hams[static_cast<size_t>(k)]).map();
  }
  CHECK(max_abs(two[0].map() - two[1].map() - diff) < 1e-14);
  CHECK_THROWS_AS(step_liouvillians(m, m.true_values, ControlGrid(RMatrix::Zero(3, 2), 1.0)),
                  DimensionError);
}

TEST_CASE("a control that cancels H0 returns the probe") {
  const ParametricModel m = model_magnetic_field().noiseless();
  const double b = 1.0, th = M_PI / 4, ph = M_PI / 4;
  RMatrix amp = RMatrix::Zero(6, 10);
  amp.row(0).setConstant(-b * std::sin(th) * std::cos(ph));
  amp.row(1).setConstant(-b * std::sin(th) * std::sin(ph));
  amp.row(2).setConstant(-b * std::cos(th));
  const Trajectory tr = propagate(m, m.true_values, ControlGrid(amp, 1.0), m.default_probe);
  CHECK(max_abs(tr.final_state() - m.default_probe.matrix()) < 1e-12);
}

TEST_CASE("propagate against closed forms") {
  SUBCASE("no Hamiltonian, no noise") {
    const ParametricModel m = model_magnetic_field().noiseless();
    RVector x(3);
    x << 0.0, 0.3, 0.2;
    const Trajectory tr = propagate(m, x, zero_controls(m, 8, 1.0), m.default_probe);
    for (const auto& s : tr.states) CHECK(max_abs(s - m.default_probe.matrix()) < 1e-15);
  }
  SUBCASE("noiseless Bell probe follows the rotated state") {
    const ParametricModel m = model_magnetic_field().noiseless();
    const double t = 1.4;
    const Trajectory tr = propagate(m, m.true_values, zero_controls(m, 50, t), m.default_probe);
    CVector psi(4);
    const Complex i(0, 1);
    const double b = 1.0, th = M_PI / 4, ph = M_PI / 4;
    psi << std::cos(b * t) - i * std::sin(b * t) * std::cos(th),
        -i * std::sin(b * t) * std::sin(th) * std::exp(-i * ph),
        -i * std::sin(b * t) * std::sin(th) * std::exp(i * ph),
        std::cos(b * t) + i * std::sin(b * t) * std::cos(th);
    psi /= std::sqrt(2.0);
    CHECK(max_abs(tr.final_state() - psi * psi.adjoint()) < 1e-12);
  }
  SUBCASE("pure dephasing scales the off-diagonal block") {
    const ParametricModel m = model_magnetic_field();
    RVector x(3);
    x << 0.0, M_PI / 4, M_PI / 4;
    const double t = 2.0;
    const Trajectory tr = propagate(m, x, zero_controls(m, 20, t), m.default_probe);
    CMatrix want = m.default_probe.matrix();
    want.block(0, 2, 2, 2) *= std::exp(-0.2 * t);
    want.block(2, 0, 2, 2) *= std::exp(-0.2 * t);
    CHECK(max_abs(tr.final_state() - want) < 1e-13);
  }
}

TEST_CASE("trajectory invariants under random controls") {
  for (const auto& name : model_names()) {
    CAPTURE(name);
    const ParametricModel m = model_by_name(name);
    const ControlGrid c(ts::random_controls(6, 30, 1.0, 23), 1.5);
    const Trajectory tr = propagate(m, m.true_values, c, m.default_probe);
    REQUIRE(tr.states.size() == 31);
    for (size_t j = 0; j < tr.states.size(); ++j) {
      CHECK(std::abs(tr.states[j].trace() - 1.0) < 1e-9);
      for (int a = 0; a < m.num_params(); ++a) {
        CHECK(std::abs(tr.param_derivs[static_cast<size_t>(a)][j].trace()) < 1e-9);
      }
    }
    const CMatrix ref =
        ts::reference_final_state(m, m.true_values, c, m.default_probe.matrix());
    CHECK(max_abs(tr.final_state() - ref) < 1e-10);

    const Trajectory clean = propagate(m.noiseless(), m.true_values, c, m.default_probe);
    const CMatrix& r = clean.final_state();
    CHECK(std::abs((r * r).trace() - 1.0) < 1e-9);
    const Trajectory zero_rate =
        propagate(m.with_noise_rates({0.0}), m.true_values, c, m.default_probe);
    CHECK(max_abs(zero_rate.final_state() - r) < 1e-10);
  }
}

TEST_CASE("refining the grid of a constant pulse leaves rho(T) unchanged") {
  const ParametricModel m = model_xxz();
  const double t = 1.0;
  const Trajectory a = propagate(m, m.true_values, ControlGrid(RMatrix::Constant(6, 20, 0.3), t),
                                 m.default_probe);
  const Trajectory b = propagate(m, m.true_values, ControlGrid(RMatrix::Constant(6, 40, 0.3), t),
                                 m.default_probe);
  CHECK(max_abs(a.final_state() - b.final_state()) < 1e-12);
}

TEST_CASE("first-order derivative recursion converges linearly") {
  const ParametricModel m = model_magnetic_field();
  const double t = 1.0;
  const double h = 1e-6;
  double prev = 0.0;
  for (int steps : {50, 100, 200}) {
    PropagateOptions fo;
    fo.scheme = DerivativeScheme::first_order;
    const ControlGrid c = zero_controls(m, steps, t);
    const Trajectory tr = propagate(m, m.true_values, c, m.default_probe, fo);
    RVector xp = m.true_values, xm = m.true_values;
    xp(0) += h;
    xm(0) -= h;
    const CMatrix fd = (ts::reference_final_state(m, xp, c, m.default_probe.matrix()) -
                        ts::reference_final_state(m, xm, c, m.default_probe.matrix())) /
                       (2 * h);
    const double err = max_abs(tr.final_derivs()[0] - fd);
    if (prev > 0.0) CHECK(prev / err >= 1.9);
    prev = err;
  }
}

TEST_CASE("measure") {
  const Povm bell = bell_povm();
  const RVector p = measure(DensityMatrix::maximally_mixed(4), bell);
  for (int y = 0; y < 4; ++y) CHECK(p(y) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(measure(DensityMatrix::maximally_mixed(2), bell), DimensionError);

  SUBCASE("noisy XXZ under the local-x basis") {
    const ParametricModel m = model_xxz();
    const double t = 0.8, x1 = 1.0, x2 = 1.2, g = 0.1;
    const RVector q = probs_at(m, m.true_values, zero_controls(m, 30, t));
    const double want = 0.25 * (1 - std::sin(2 * x1 * t) * std::cos(2 * x2 * t) * std::exp(-g * t) +
                                std::cos(2 * x1 * t) * std::sin(2 * x2 * t) * std::exp(-g * t));
    CHECK(std::abs(q(0) - want) < 1e-12);
  }
  SUBCASE("noisy Bell probabilities along the dephasing axis") {
    // With θ = 0 the field commutes with the dephasing and the displayed forms are exact.
    const ParametricModel m = model_magnetic_field();
    RVector x(3);
    x << 1.0, 0.0, 0.3;
    const double t = 1.1, g = 0.2, e = std::exp(-g * t);
    const RVector q = probs_at(m, x, zero_controls(m, 30, t));
    CHECK(std::abs(q(0) - 0.5 * (1 + e) * std::pow(std::cos(t), 2) - 0.5 * (1 - e) * std::pow(std::sin(t), 2)) < 1e-12);
    CHECK(std::abs(q(1) - 0.5 * (1 - e) * std::pow(std::cos(t), 2) - 0.5 * (1 + e) * std::pow(std::sin(t), 2)) < 1e-12);
  }
  SUBCASE("probability derivatives sum to zero") {
    const ParametricModel m = model_zz();
    const Trajectory tr = propagate(m, m.true_values, zero_controls(m, 30, 1.0), m.default_probe);
    const MeasuredDerivs md = measure_derivs(tr, m.default_povm);
    CHECK(std::abs(md.p.sum() - 1.0) < 1e-9);
    CHECK(md.dp.rowwise().sum().cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("measure_derivs matches finite differences") {
  for (const auto& name : model_names()) {
    const ParametricModel m = model_by_name(name);
    for (double t : {0.5, 1.0, 2.0}) {
      CAPTURE(name);
      CAPTURE(t);
      const int steps = static_cast<int>(100 * t);
      const ControlGrid c(ts::random_controls(6, steps, 0.5, 24), t);
      const Trajectory tr = propagate(m, m.true_values, c, m.default_probe);
      const MeasuredDerivs md = measure_derivs(tr, m.default_povm);
      const double h = 1e-5;
      for (int a = 0; a < m.num_params(); ++a) {
        RVector xp = m.true_values, xm = m.true_values;
        xp(a) += h;
        xm(a) -= h;
        const RVector fd = (probs_at(m, xp, c) - probs_at(m, xm, c)) / (2 * h);
        const double scale = fd.cwiseAbs().maxCoeff();
        CHECK((md.dp.row(a).transpose() - fd).cwiseAbs().maxCoeff() <= 1e-4 * scale);
      }
    }
  }
}

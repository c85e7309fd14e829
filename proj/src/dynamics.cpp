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

#include "fisherctl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fisherctl/error.hpp"
#include "fisherctl/expm.hpp"
#include "fisherctl/models.hpp"

namespace fisherctl {

namespace {

constexpr double kTraceDrift = 1e-6;
constexpr double kProbFloor = -1e-12;

const Complex kMinusI(0.0, -1.0);

}  // namespace

NoiseSpec::NoiseSpec(std::vector<NoiseChannel> channels) : channels_(std::move(channels)) {
  for (auto& c : channels_) {
    require_square_finite(c.jump, "NoiseSpec jump operator");
    if (!std::isfinite(c.rate) || c.rate < 0.0) {
      throw InvalidArgument("NoiseSpec: rate must be finite and non-negative");
    }
    if (!is_hermitian(c.jump, tol::hermitian)) {
      throw InvalidArgument("NoiseSpec: jump operator is not Hermitian");
    }
    const auto d = c.jump.rows();
    if ((c.jump * c.jump - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
      throw InvalidArgument("NoiseSpec: jump operator does not square to the identity");
    }
  }
}

bool NoiseSpec::empty() const {
  for (const auto& c : channels_) {
    if (c.rate != 0.0) return false;
  }
  return true;
}

NoiseSpec NoiseSpec::with_rates(const std::vector<double>& rates) const {
  if (rates.size() != channels_.size()) {
    throw InvalidArgument("NoiseSpec: expected " + std::to_string(channels_.size()) +
                          " rates, got " + std::to_string(rates.size()));
  }
  std::vector<NoiseChannel> out = channels_;
  for (size_t i = 0; i < out.size(); ++i) out[i].rate = rates[i];
  return NoiseSpec(std::move(out));
}

// ---------------------------------------------------------------------------------------------

ControlGrid::ControlGrid(RMatrix amplitudes, double total_time, std::optional<double> bound)
    : amp_(std::move(amplitudes)), total_time_(total_time), bound_(bound) {
  if (amp_.rows() < 1 || amp_.cols() < 1) {
    throw InvalidArgument("ControlGrid: need at least one field and one step");
  }
  if (!std::isfinite(total_time_) || total_time_ <= 0.0) {
    throw InvalidArgument("ControlGrid: total time must be positive");
  }
  if (!amp_.allFinite()) throw InvalidArgument("ControlGrid: non-finite amplitude");
  if (bound_ && !(*bound_ > 0.0)) throw InvalidArgument("ControlGrid: bound must be positive");
}

ControlGrid ControlGrid::zeros(int num_fields, int num_steps, double total_time) {
  return ControlGrid(RMatrix::Zero(num_fields, num_steps), total_time);
}

RVector ControlGrid::flatten() const { return Eigen::Map<const RVector>(amp_.data(), amp_.size()); }

ControlGrid ControlGrid::with_flat(const RVector& flat) const {
  if (flat.size() != amp_.size()) throw DimensionError("ControlGrid: flat vector length mismatch");
  return ControlGrid(Eigen::Map<const RMatrix>(flat.data(), amp_.rows(), amp_.cols()),
                     total_time_, bound_);
}

ControlGrid ControlGrid::with_amplitudes(RMatrix amplitudes) const {
  if (amplitudes.rows() != amp_.rows() || amplitudes.cols() != amp_.cols()) {
    throw DimensionError("ControlGrid: amplitude shape mismatch");
  }
  return ControlGrid(std::move(amplitudes), total_time_, bound_);
}

ControlGrid ControlGrid::clipped() const {
  if (!bound_) return *this;
  return ControlGrid(amp_.cwiseMax(-*bound_).cwiseMin(*bound_), total_time_, bound_);
}

// ---------------------------------------------------------------------------------------------

DensityMatrix Trajectory::final_density() const { return DensityMatrix(final_state()); }

std::vector<CMatrix> Trajectory::final_derivs() const {
  std::vector<CMatrix> out;
  out.reserve(param_derivs.size());
  for (const auto& d : param_derivs) out.push_back(d.back());
  return out;
}

Superoperator build_liouvillian(const HermitianOperator& h, const NoiseSpec& noise) {
  const int d = h.dim();
  CMatrix map = kMinusI * commutator_superop(h).map();
  const CMatrix id = CMatrix::Identity(d * d, d * d);
  for (const auto& c : noise.channels()) {
    if (c.jump.rows() != d) throw DimensionError("build_liouvillian: noise dimension mismatch");
    if (c.rate == 0.0) continue;
    map += (0.5 * c.rate) * (kron(c.jump.transpose(), c.jump) - id);
  }
  return Superoperator(d, std::move(map));
}

namespace {

HermitianOperator step_hamiltonian(const HermitianOperator& h0,
                                   const std::vector<HermitianOperator>& hk,
                                   const ControlGrid& controls, int j) {
  CMatrix h = h0.matrix();
  for (int k = 0; k < controls.num_fields(); ++k) {
    const double v = controls.amplitude(k, j);
    if (v != 0.0) h += v * hk[static_cast<size_t>(k)].matrix();
  }
  return HermitianOperator(h);
}

void check_controls(const ParametricModel& model, const ControlGrid& controls) {
  if (controls.num_fields() != model.num_controls()) {
    throw DimensionError("controls have " + std::to_string(controls.num_fields()) +
                         " fields, model '" + model.name + "' has " +
                         std::to_string(model.num_controls()));
  }
}

void check_params(const ParametricModel& model, const RVector& x) {
  if (x.size() != model.num_params()) {
    throw DimensionError("parameter vector has " + std::to_string(x.size()) +
                         " entries, model '" + model.name + "' has " +
                         std::to_string(model.num_params()));
  }
  if (!x.allFinite()) throw InvalidArgument("parameter vector is not finite");
}

}  // namespace

std::vector<Superoperator> step_liouvillians(const ParametricModel& model, const RVector& x,
                                             const ControlGrid& controls) {
  check_params(model, x);
  check_controls(model, controls);
  const HermitianOperator h0 = model.h0(x);
  std::vector<Superoperator> out;
  out.reserve(static_cast<size_t>(controls.num_steps()));
  for (int j = 0; j < controls.num_steps(); ++j) {
    out.push_back(
        build_liouvillian(step_hamiltonian(h0, model.control_hams, controls, j), model.noise));
  }
  return out;
}

Trajectory propagate(const ParametricModel& model, const RVector& x, const ControlGrid& controls,
                     const DensityMatrix& probe, const PropagateOptions& options) {
  check_params(model, x);
  check_controls(model, controls);
  if (probe.dim() != model.hilbert_dim) {
    throw DimensionError("probe dimension does not match model '" + model.name + "'");
  }

  const int d = model.hilbert_dim;
  const int m = controls.num_steps();
  const int np = model.num_params();
  const double dt = controls.dt();
  const HermitianOperator h0 = model.h0(x);

  Trajectory tr;
  tr.dim = d;
  tr.num_steps = m;
  tr.dt = dt;
  tr.scheme = options.scheme;
  for (const auto& g : model.dh0(x)) {
    tr.param_generators.push_back(kMinusI * commutator_superop(g).map());
  }
  for (const auto& hk : model.control_hams) {
    tr.control_generators.push_back(kMinusI * commutator_superop(hk).map());
  }
  tr.liouvillians.resize(static_cast<size_t>(m));
  tr.propagators.resize(static_cast<size_t>(m));

  const bool exact = options.with_derivatives && options.scheme == DerivativeScheme::exact;
  std::vector<std::vector<CMatrix>> step_derivs(exact ? static_cast<size_t>(m) : 0);
  std::vector<CMatrix> directions;
  if (exact) {
    for (const auto& k : tr.param_generators) directions.push_back(dt * k);
  }

  // Steps are independent until they are composed, so the exponentials run in parallel.
  // Each iteration writes only its own slots.
  const bool par = options.execution == Execution::parallel && !parallel::in_parallel();
  std::string failure;
#pragma omp parallel for schedule(static) if (par)
  for (int s = 0; s < m; ++s) {
    try {
      const auto ss = static_cast<size_t>(s);
      tr.liouvillians[ss] =
          build_liouvillian(step_hamiltonian(h0, model.control_hams, controls, s), model.noise)
              .map();
      if (exact) {
        ExpmFrechet ef = expm_frechet(dt * tr.liouvillians[ss], directions);
        tr.propagators[ss] = std::move(ef.value);
        step_derivs[ss] = std::move(ef.derivatives);
      } else {
        tr.propagators[ss] = expm_dense(dt * tr.liouvillians[ss]);
      }
    } catch (const std::exception& e) {
#pragma omp critical(fisherctl_propagate_error)
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw NumericalError("propagate: " + failure);

  tr.states.reserve(static_cast<size_t>(m) + 1);
  tr.states.push_back(probe.matrix());
  if (options.with_derivatives) {
    tr.param_derivs.assign(static_cast<size_t>(np), {});
    for (auto& pd : tr.param_derivs) {
      pd.reserve(static_cast<size_t>(m) + 1);
      pd.push_back(CMatrix::Zero(d, d));
    }
  }

  for (int s = 0; s < m; ++s) {
    const auto ss = static_cast<size_t>(s);
    const CVector rho = vec(tr.states[ss]);
    const CVector next = tr.propagators[ss] * rho;
    if (!next.allFinite()) {
      throw NumericalError("propagate: non-finite state at step " + std::to_string(s + 1));
    }
    CMatrix next_m = devec(next, d);
    const double drift = std::abs(next_m.trace() - Complex(1.0, 0.0));
    if (drift > kTraceDrift) {
      std::ostringstream os;
      os << "propagate: trace drift " << drift << " at step " << s + 1 << " of " << m
         << " (model '" << model.name << "')";
      throw NumericalError(os.str());
    }
    if (options.with_derivatives) {
      for (int a = 0; a < np; ++a) {
        const auto aa = static_cast<size_t>(a);
        const CVector prev = vec(tr.param_derivs[aa][ss]);
        CVector dnext = tr.propagators[ss] * prev;
        if (exact) {
          dnext += step_derivs[ss][aa] * rho;
        } else {
          dnext += dt * (tr.param_generators[aa] * next);
        }
        tr.param_derivs[aa].push_back(devec(dnext, d));
      }
    }
    tr.states.push_back(std::move(next_m));
  }
  tr.propagator_derivs = std::move(step_derivs);
  return tr;
}

RVector measure(const CMatrix& rho, const Povm& povm) {
  if (rho.rows() != povm.dim() || rho.cols() != povm.dim()) {
    throw DimensionError("measure: POVM dimension " + std::to_string(povm.dim()) +
                         " does not match state dimension " + std::to_string(rho.rows()));
  }
  RVector p(povm.size());
  for (int y = 0; y < povm.size(); ++y) {
    double v = (povm.effect(y).cwiseProduct(rho.transpose())).sum().real();
    if (v < kProbFloor) {
      throw NumericalError("measure: probability " + std::to_string(v) + " for outcome '" +
                           povm.label(y) + "' is negative");
    }
    p(y) = std::clamp(v, 0.0, 1.0);
  }
  if (std::abs(p.sum() - 1.0) > 1e-9) {
    throw NumericalError("measure: probabilities sum to " + std::to_string(p.sum()));
  }
  return p;
}

RVector measure(const DensityMatrix& rho, const Povm& povm) { return measure(rho.matrix(), povm); }

MeasuredDerivs measure_derivs(const Trajectory& trajectory, const Povm& povm) {
  if (trajectory.param_derivs.size() != trajectory.param_generators.size()) {
    throw InvalidArgument("measure_derivs: trajectory was propagated without derivatives");
  }
  MeasuredDerivs out;
  out.p = measure(trajectory.final_state(), povm);
  const int np = trajectory.num_params();
  out.dp.resize(np, povm.size());
  for (int a = 0; a < np; ++a) {
    const CMatrix& dr = trajectory.param_derivs[static_cast<size_t>(a)].back();
    for (int y = 0; y < povm.size(); ++y) {
      out.dp(a, y) = (povm.effect(y).cwiseProduct(dr.transpose())).sum().real();
    }
  }
  return out;
}

}  // namespace fisherctl

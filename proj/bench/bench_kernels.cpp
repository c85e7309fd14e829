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

// Wall-clock comparison of the OpenMP kernels against their serial counterparts.
//
//   fisherctl_bench [steps] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "fisherctl/grape.hpp"
#include "fisherctl/models.hpp"

using namespace fisherctl;

namespace {

double seconds(const std::function<void()>& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, dt);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int m = argc > 1 ? std::atoi(argv[1]) : 200;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  if (m < 1 || repeats < 1) {
    std::fprintf(stderr, "usage: fisherctl_bench [steps >= 1] [repeats >= 1]\n");
    return 2;
  }
  if (const int n = parallel::threads_from_env(); n > 0) parallel::set_max_threads(n);
  std::printf("threads=%d steps=%d repeats=%d (best of)\n", parallel::max_threads(), m, repeats);
  std::printf("%-10s %-26s %12s\n", "model", "kernel", "seconds");

  for (const auto& name : model_names()) {
    const ParametricModel model = model_by_name(name);
    std::mt19937_64 rng(1);
    RMatrix amp(model.num_controls(), m);
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < model.num_controls(); ++k) {
        amp(k, j) = 0.2 * std::generate_canonical<double, 53>(rng) - 0.1;
      }
    }
    const ControlGrid controls(amp, 1.0);
    const Objective obj = model.num_params() == 2 ? Objective::fcle : Objective::f0;

    PropagateOptions serial{DerivativeScheme::exact, Execution::serial, true};
    PropagateOptions par{DerivativeScheme::exact, Execution::parallel, true};
    Trajectory tr;
    const double t_prop_s = seconds(
        [&] { tr = propagate(model, model.true_values, controls, model.default_probe, serial); },
        repeats);
    const double t_prop_p = seconds(
        [&] { tr = propagate(model, model.true_values, controls, model.default_probe, par); },
        repeats);

    const GradientEngine engine(tr, model.default_povm, GradientScheme::exact);
    RMatrix g_ref, g_ser, g_par;
    const double t_ref = seconds([&] { g_ref = engine.objective_gradient_reference(obj); }, repeats);
    const double t_ser =
        seconds([&] { g_ser = engine.objective_gradient(obj, Execution::serial); }, repeats);
    const double t_par =
        seconds([&] { g_par = engine.objective_gradient(obj, Execution::parallel); }, repeats);

    std::printf("%-10s %-26s %12.4f\n", name.c_str(), "propagate serial", t_prop_s);
    std::printf("%-10s %-26s %12.4f\n", name.c_str(), "propagate omp", t_prop_p);
    std::printf("%-10s %-26s %12.4f\n", name.c_str(), "gradient tangent (serial)", t_ref);
    std::printf("%-10s %-26s %12.4f\n", name.c_str(), "gradient adjoint serial", t_ser);
    std::printf("%-10s %-26s %12.4f\n", name.c_str(), "gradient adjoint omp", t_par);
    std::printf("%-10s %-26s %12.3e\n", name.c_str(), "max |adjoint - tangent|",
                (g_par - g_ref).cwiseAbs().maxCoeff());
    std::printf("%-10s %-26s %12.3e\n", name.c_str(), "max |omp - serial|",
                (g_par - g_ser).cwiseAbs().maxCoeff());
  }
  return 0;
}

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

#include <span>
#include <vector>

#include "fisherctl/operators.hpp"

namespace fisherctl {

// Dense matrix exponential by scaling and squaring with the degree-13 Padé approximant
// (Higham 2005), and its Fréchet derivative L(A, E) = d/dε exp(A + εE)|₀ computed alongside
// it (Al-Mohy & Higham 2009). Accuracy is at the level of unit roundoff times ‖A‖ for the
// d² ≤ 256 matrices used here.

CMatrix expm_dense(const CMatrix& a);

struct ExpmFrechet {
  CMatrix value;
  std::vector<CMatrix> derivatives;  // one per direction, same order
};

ExpmFrechet expm_frechet(const CMatrix& a, std::span<const CMatrix> directions);

}  // namespace fisherctl

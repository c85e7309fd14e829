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

namespace fisherctl {

/// Selects the OpenMP kernel or the plain serial loop. Both produce bitwise
/// identical results: parallel loops never reduce across threads.
enum class Execution { serial, parallel };

namespace parallel {

int max_threads();
void set_max_threads(int n);

/// Reads FISHERCTL_THREADS; returns 0 when unset or unparsable.
int threads_from_env();

/// True inside an active OpenMP parallel region.
bool in_parallel();

}  // namespace parallel
}  // namespace fisherctl

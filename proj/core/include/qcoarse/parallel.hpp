// Copyright 2026 The qcoarse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCOARSE_PARALLEL_HPP
#define QCOARSE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace qcoarse {

/// Environment variable overriding the worker count.
inline constexpr const char *kWorkersEnv = "QCOARSE_WORKERS";

/// Workers from QCOARSE_WORKERS, else std::thread::hardware_concurrency().
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Results must
/// be written to per-index slots; if any call throws, the exception from the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

}  // namespace qcoarse

#endif  // QCOARSE_PARALLEL_HPP

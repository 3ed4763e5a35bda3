/*
 * Copyright 2026 The deepforest Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DEEPFOREST_PARALLEL_H_
#define DEEPFOREST_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace deepforest {

// Upper bound on worker threads used by ParallelFor. Defaults to the
// GCFOREST_THREADS environment variable when set, otherwise to the hardware
// concurrency. 0 restores the default.
void SetThreadCap(std::size_t threads);
std::size_t ThreadCap();

// Runs fn(i) for every i in [0, n). Work items must write disjoint outputs;
// results never depend on the number of threads. Calls nested inside a
// running ParallelFor execute serially on the calling worker. The first
// exception thrown by any item is rethrown after all workers finish.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace deepforest

#endif  // DEEPFOREST_PARALLEL_H_

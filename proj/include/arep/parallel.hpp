// Copyright 2026 the arep authors.
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

#include <thread>
#include <vector>

namespace arep {

/// Runs fn(i) for i in [0, count) over `jobs` threads in contiguous chunks.
/// Replicate work must key its randomness off the index, so scheduling never
/// affects results; jobs <= 1 degenerates to a plain loop.
template <typename Fn>
void parallel_for(long count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  int workers = static_cast<int>(std::min<long>(jobs, count));
  std::vector<std::thread> threads;
  long chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    long lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace arep

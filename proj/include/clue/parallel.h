// Copyright 2026 The CLUE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLUE_PARALLEL_H_
#define CLUE_PARALLEL_H_

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace clue {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers write
// results by index, so output order never depends on completion order. If
// any call throws, the exception from the lowest failing index is rethrown
// after all workers finish.
template <typename Fn>
void ParallelFor(size_t n, size_t workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto body = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const size_t count = workers < n ? workers : n;
  pool.reserve(count);
  for (size_t t = 0; t < count; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace clue

#endif  // CLUE_PARALLEL_H_

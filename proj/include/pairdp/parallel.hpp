// Copyright 2026 The Pairdp Authors
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
//
// Deterministic work distribution. Work is split into fixed blocks whose
// boundaries depend only on the problem size, never on the thread count.
// Each block writes into its own slot and the caller reduces the slots in
// block order, so results are bitwise identical for any number of workers.

#ifndef PAIRDP_PARALLEL_HPP_
#define PAIRDP_PARALLEL_HPP_

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pairdp {

// Runs fn(block_index) for every block in [0, num_blocks). Blocks are claimed
// dynamically, so fn must only touch per-block state. Exceptions thrown by fn
// are captured and the first one is rethrown after all workers finish.
inline void parallel_for_blocks(std::int64_t num_blocks, int threads,
                                const std::function<void(std::int64_t)>& fn) {
  if (num_blocks <= 0) return;
  if (threads <= 1 || num_blocks == 1) {
    for (std::int64_t b = 0; b < num_blocks; ++b) fn(b);
    return;
  }
  const int workers =
      static_cast<int>(std::min<std::int64_t>(threads, num_blocks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&]() {
    while (true) {
      const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= num_blocks) return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pairdp

#endif  // PAIRDP_PARALLEL_HPP_

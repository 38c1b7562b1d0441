// Copyright 2026 The ropelength Authors.
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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace ropelength {

namespace detail {
inline std::atomic<unsigned> &thread_count_storage() {
  static std::atomic<unsigned> count{1};
  return count;
}
}  // namespace detail

/// Number of worker threads used by the pairwise scans. Results never depend
/// on this value: every reduction merges per-chunk results in chunk order.
inline void set_thread_count(unsigned n) {
  detail::thread_count_storage().store(std::max(1u, n));
}
inline unsigned thread_count() { return detail::thread_count_storage().load(); }

namespace detail {

// Splits [0, n) into contiguous chunks and calls fn(chunk, begin, end) for
// each, possibly on several threads. Returns the number of chunks so callers
// can size per-chunk result buffers up front via chunk_count().
inline std::size_t chunk_count(std::size_t n) {
  const std::size_t threads = thread_count();
  return std::max<std::size_t>(1, std::min(threads, n));
}

template <class Fn>
void parallel_chunks(std::size_t n, Fn &&fn) {
  const std::size_t chunks = chunk_count(n);
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    workers.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
  }
}

}  // namespace detail
}  // namespace ropelength

// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace voxelray {

void parallel_chunks(std::size_t count, int threads,
                     const std::function<void(int, std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const int chunks = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::size_t>(
                                                            count, 1 << 16))));
  if (chunks == 1) {
    body(0, 0, count);
    return;
  }
  // Even split; the first (count % chunks) chunks take one extra element.
  const std::size_t base = count / chunks;
  const std::size_t extra = count % chunks;
  std::vector<std::thread> workers;
  workers.reserve(chunks);
  std::size_t begin = 0;
  for (int c = 0; c < chunks; ++c) {
    const std::size_t size = base + (static_cast<std::size_t>(c) < extra ? 1 : 0);
    const std::size_t end = begin + size;
    workers.emplace_back([&body, c, begin, end] { body(c, begin, end); });
    begin = end;
  }
  for (auto& worker : workers) worker.join();
}

}  // namespace voxelray

// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace voxelray {

// Splits [0, count) into at most `threads` contiguous chunks and runs
// `body(chunk_index, begin, end)` on each, in parallel when threads > 1.
// The partition depends only on (count, threads), so any algorithm whose
// per-element work is independent produces identical results for every
// thread count.
void parallel_chunks(std::size_t count, int threads,
                     const std::function<void(int, std::size_t, std::size_t)>& body);

}  // namespace voxelray

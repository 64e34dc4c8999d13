// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace voxelray {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // one line; numbers in reproducible shortest form
};

// Fixed-seed consistency suite over every module: encoder closed forms,
// projection round trips, flip/rotation algebra, ray traversal versus a
// brute-force reference, rotated-overlap Monte Carlo spot checks, occupancy
// and evaluation invariants. Output is byte-identical for any `threads`,
// which the callers use as a determinism check.
std::vector<CheckResult> run_selfcheck(int threads);

}  // namespace voxelray

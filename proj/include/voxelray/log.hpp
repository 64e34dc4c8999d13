// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace voxelray::log {

enum class Level { kQuiet = 0, kError = 1, kWarn = 2, kInfo = 3, kDebug = 4 };

// Active level, parsed once from the VOXELRAY_LOG environment variable
// (quiet|error|warn|info|debug). Defaults to warn.
Level level();

void error(const std::string& message);
void warn(const std::string& message);
// Emits at most once per distinct message text for the process lifetime.
// Used by hot paths that would otherwise repeat one diagnostic per element.
void warn_once(const std::string& message);
void info(const std::string& message);
void debug(const std::string& message);

}  // namespace voxelray::log

// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <set>
#include <string>

namespace voxelray::log {
namespace {

Level parse_level() {
  const char* raw = std::getenv("VOXELRAY_LOG");
  if (raw == nullptr) return Level::kWarn;
  const std::string value(raw);
  if (value == "quiet") return Level::kQuiet;
  if (value == "error") return Level::kError;
  if (value == "warn") return Level::kWarn;
  if (value == "info") return Level::kInfo;
  if (value == "debug") return Level::kDebug;
  return Level::kWarn;
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

void emit(Level at, const char* tag, const std::string& message) {
  if (level() < at) return;
  const std::lock_guard<std::mutex> lock(sink_mutex());
  std::cerr << "voxelray " << tag << ": " << message << '\n';
}

}  // namespace

Level level() {
  static const Level value = parse_level();
  return value;
}

void error(const std::string& message) { emit(Level::kError, "error", message); }
void warn(const std::string& message) { emit(Level::kWarn, "warning", message); }
void info(const std::string& message) { emit(Level::kInfo, "info", message); }
void debug(const std::string& message) { emit(Level::kDebug, "debug", message); }

void warn_once(const std::string& message) {
  static std::mutex seen_mutex;
  static std::set<std::string> seen;
  {
    const std::lock_guard<std::mutex> lock(seen_mutex);
    if (!seen.insert(message).second) return;
  }
  warn(message);
}

}  // namespace voxelray::log

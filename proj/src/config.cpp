// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/config.hpp"

#include "voxelray/encoding.hpp"
#include "voxelray/formats.hpp"
#include "voxelray/voxel_grid.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace voxelray {
namespace {

std::vector<std::string_view> tokenize(std::string_view value) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < value.size()) {
    while (i < value.size() && (value[i] == ' ' || value[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < value.size() && value[i] != ' ' && value[i] != '\t') ++i;
    if (i > start) tokens.push_back(value.substr(start, i - start));
  }
  return tokens;
}

class LineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double to_double(std::string_view token) {
  double value = 0.0;
  const std::from_chars_result result =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc() || result.ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    throw LineError("'" + std::string(token) + "' is not a finite number");
  }
  return value;
}

long long to_integer(std::string_view token) {
  long long value = 0;
  const std::from_chars_result result =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
    throw LineError("'" + std::string(token) + "' is not an integer");
  }
  return value;
}

bool to_bool(std::string_view token) {
  if (token == "true") return true;
  if (token == "false") return false;
  throw LineError("'" + std::string(token) + "' is not 'true' or 'false'");
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;

  using Setter = std::function<void(std::string_view)>;
  const auto scalar = [](double* slot) {
    return [slot](std::string_view value) {
      const auto tokens = tokenize(value);
      if (tokens.size() != 1) throw LineError("expected one number");
      *slot = to_double(tokens[0]);
    };
  };
  const auto integer = [](int* slot) {
    return [slot](std::string_view value) {
      const auto tokens = tokenize(value);
      if (tokens.size() != 1) throw LineError("expected one integer");
      const long long parsed = to_integer(tokens[0]);
      if (parsed < -(1LL << 31) || parsed >= (1LL << 31)) throw LineError("integer out of range");
      *slot = static_cast<int>(parsed);
    };
  };
  const auto boolean = [](bool* slot) {
    return [slot](std::string_view value) {
      const auto tokens = tokenize(value);
      if (tokens.size() != 1) throw LineError("expected 'true' or 'false'");
      *slot = to_bool(tokens[0]);
    };
  };
  const auto vector3 = [](Eigen::Vector3d* slot) {
    return [slot](std::string_view value) {
      const auto tokens = tokenize(value);
      if (tokens.size() != 3) throw LineError("expected three numbers");
      for (int axis = 0; axis < 3; ++axis) (*slot)[axis] = to_double(tokens[axis]);
    };
  };
  const auto vector3i = [](Eigen::Vector3i* slot) {
    return [slot](std::string_view value) {
      const auto tokens = tokenize(value);
      if (tokens.size() != 3) throw LineError("expected three integers");
      for (int axis = 0; axis < 3; ++axis) {
        const long long parsed = to_integer(tokens[axis]);
        if (parsed < 1 || parsed >= (1LL << 31)) throw LineError("dimension out of range");
        (*slot)[axis] = static_cast<int>(parsed);
      }
    };
  };

  const std::map<std::string_view, Setter> setters{
      {"grid_origin", vector3(&config.grid_origin)},
      {"voxel_size", vector3(&config.voxel_size)},
      {"grid_dims", vector3i(&config.grid_dims)},
      {"image_width", integer(&config.image_width)},
      {"image_height", integer(&config.image_height)},
      {"query_encoder_size", integer(&config.query_encoder.size)},
      {"query_encoder_first", scalar(&config.query_encoder.x_first)},
      {"query_encoder_last", scalar(&config.query_encoder.x_last)},
      {"query_encoder_sigma", scalar(&config.query_encoder.sigma)},
      {"orientation_encoder_size", integer(&config.orientation_encoder.size)},
      {"orientation_encoder_first", scalar(&config.orientation_encoder.x_first)},
      {"orientation_encoder_last", scalar(&config.orientation_encoder.x_last)},
      {"orientation_encoder_sigma", scalar(&config.orientation_encoder.sigma)},
      {"rotation_min", scalar(&config.rotation_min)},
      {"rotation_max", scalar(&config.rotation_max)},
      {"flip", boolean(&config.flip)},
      {"sensor_origin", vector3(&config.sensor_origin)},
      {"attention_softmax", boolean(&config.attention_softmax)},
      {"eval_iou_threshold", scalar(&config.eval_iou_threshold)},
      {"anchor_positive_threshold", scalar(&config.anchor_positive_threshold)},
      {"anchor_negative_threshold", scalar(&config.anchor_negative_threshold)},
      {"force_best_anchor", boolean(&config.force_best_anchor)},
      {"seed",
       [&config](std::string_view value) {
         const auto tokens = tokenize(value);
         if (tokens.size() != 1) throw LineError("expected one integer");
         std::uint64_t parsed = 0;
         const std::from_chars_result result = std::from_chars(
             tokens[0].data(), tokens[0].data() + tokens[0].size(), parsed);
         if (result.ec != std::errc() || result.ptr != tokens[0].data() + tokens[0].size()) {
           throw LineError("'" + std::string(tokens[0]) + "' is not an unsigned integer");
         }
         config.seed = parsed;
       }},
  };

  std::set<std::string, std::less<>> seen;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t comment = line.find('#');
    if (comment != std::string_view::npos) line = line.substr(0, comment);

    const bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
    if (!blank) {
      const std::size_t equals = line.find('=');
      if (equals == std::string_view::npos) {
        throw std::runtime_error("config line " + std::to_string(line_number) +
                                 ": expected 'key = value'");
      }
      const auto key_tokens = tokenize(line.substr(0, equals));
      if (key_tokens.size() != 1) {
        throw std::runtime_error("config line " + std::to_string(line_number) +
                                 ": malformed key");
      }
      const std::string_view key = key_tokens[0];
      const auto setter = setters.find(key);
      if (setter == setters.end()) {
        throw std::runtime_error("config line " + std::to_string(line_number) +
                                 ": unknown key '" + std::string(key) + "'");
      }
      if (!seen.insert(std::string(key)).second) {
        throw std::runtime_error("config line " + std::to_string(line_number) +
                                 ": duplicate key '" + std::string(key) + "'");
      }
      try {
        setter->second(line.substr(equals + 1));
      } catch (const LineError& error) {
        throw std::runtime_error("config line " + std::to_string(line_number) + " ('" +
                                 std::string(key) + "'): " + error.what());
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }

  // Cross-field validation, leaning on the value types' own constructors.
  try {
    (void)VoxelGrid(config.grid_origin, config.voxel_size, config.grid_dims);
    (void)GaussianEncoder(config.query_encoder.size, config.query_encoder.x_first,
                          config.query_encoder.x_last, config.query_encoder.sigma);
    (void)GaussianEncoder(config.orientation_encoder.size, config.orientation_encoder.x_first,
                          config.orientation_encoder.x_last, config.orientation_encoder.sigma);
  } catch (const std::invalid_argument& error) {
    throw std::runtime_error(std::string("config: ") + error.what());
  }
  if (config.image_width < 1 || config.image_height < 1) {
    throw std::runtime_error("config: image dimensions must be positive");
  }
  if (!(config.rotation_min <= config.rotation_max)) {
    throw std::runtime_error("config: rotation_min must not exceed rotation_max");
  }
  if (!config.sensor_origin.allFinite()) {
    throw std::runtime_error("config: sensor_origin must be finite");
  }
  if (!(config.eval_iou_threshold > 0.0 && config.eval_iou_threshold <= 1.0)) {
    throw std::runtime_error("config: eval_iou_threshold must lie in (0, 1]");
  }
  if (!(config.anchor_negative_threshold > 0.0 &&
        config.anchor_negative_threshold <= config.anchor_positive_threshold &&
        config.anchor_positive_threshold <= 1.0)) {
    throw std::runtime_error(
        "config: require 0 < anchor_negative_threshold <= anchor_positive_threshold <= 1");
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return parse_run_config(read_text_file(path));
  } catch (const std::runtime_error& error) {
    throw std::runtime_error(path.string() + ": " + error.what());
  }
}

std::string write_run_config(const RunConfig& config) {
  std::string out;
  const auto line = [&out](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  const auto vec3 = [](const Eigen::Vector3d& v) {
    return format_double(v.x()) + ' ' + format_double(v.y()) + ' ' + format_double(v.z());
  };

  line("grid_origin", vec3(config.grid_origin));
  line("voxel_size", vec3(config.voxel_size));
  line("grid_dims", std::to_string(config.grid_dims.x()) + ' ' +
                        std::to_string(config.grid_dims.y()) + ' ' +
                        std::to_string(config.grid_dims.z()));
  line("image_width", std::to_string(config.image_width));
  line("image_height", std::to_string(config.image_height));
  line("query_encoder_size", std::to_string(config.query_encoder.size));
  line("query_encoder_first", format_double(config.query_encoder.x_first));
  line("query_encoder_last", format_double(config.query_encoder.x_last));
  line("query_encoder_sigma", format_double(config.query_encoder.sigma));
  line("orientation_encoder_size", std::to_string(config.orientation_encoder.size));
  line("orientation_encoder_first", format_double(config.orientation_encoder.x_first));
  line("orientation_encoder_last", format_double(config.orientation_encoder.x_last));
  line("orientation_encoder_sigma", format_double(config.orientation_encoder.sigma));
  line("rotation_min", format_double(config.rotation_min));
  line("rotation_max", format_double(config.rotation_max));
  line("flip", config.flip ? "true" : "false");
  line("sensor_origin", vec3(config.sensor_origin));
  line("attention_softmax", config.attention_softmax ? "true" : "false");
  line("eval_iou_threshold", format_double(config.eval_iou_threshold));
  line("anchor_positive_threshold", format_double(config.anchor_positive_threshold));
  line("anchor_negative_threshold", format_double(config.anchor_negative_threshold));
  line("force_best_anchor", config.force_best_anchor ? "true" : "false");
  line("seed", std::to_string(config.seed));
  return out;
}

}  // namespace voxelray

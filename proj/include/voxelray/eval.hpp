// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxelray/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace voxelray {

// Axis-aligned rectangle, min/max corners.
struct Rect2D {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

// Intersection over union of two axis-aligned rectangles. Throws
// std::invalid_argument when either rectangle has a non-positive side.
double iou_axis_aligned_2d(const Rect2D& a, const Rect2D& b);

// Ground-plane corners of a box, counterclockwise.
std::array<Eigen::Vector2d, 4> bev_corners(const Box3D& box);

// Intersection over union of the ground-plane footprints (rotated
// rectangles), via convex polygon clipping. Result in [0, 1].
double iou_bev_rotated(const Box3D& a, const Box3D& b);

// Volumetric intersection over union: footprint intersection times vertical
// extent overlap. Result in [0, 1].
double iou_3d(const Box3D& a, const Box3D& b);

// Axis-aligned footprint after rounding yaw to the nearest multiple of
// pi/2 (length and width swap on odd quarter turns). Used by the anchor
// matcher, which works on unrotated rectangles.
Rect2D nearest_axis_aligned_bev(const Box3D& box);

enum class AnchorAssignmentKind { kNegative, kIgnore, kPositive };

struct AnchorAssignment {
  AnchorAssignmentKind kind = AnchorAssignmentKind::kNegative;
  int target = -1;  // ground-truth index for positives, -1 otherwise
};

// Matches anchors to ground-truth boxes on axis-aligned footprint overlap:
// positive at IoU >= positive_threshold, negative below negative_threshold,
// ignore between. With force_best_anchor, each ground truth additionally
// claims its highest-IoU anchor (ties to the lowest anchor index) as
// positive even below the threshold, provided the overlap is nonzero, so no
// ground truth goes unassigned. Requires 0 < negative_threshold <=
// positive_threshold <= 1. With no ground truths every anchor is negative.
std::vector<AnchorAssignment> assign_anchors(const std::vector<Box3D>& anchors,
                                             const std::vector<Box3D>& ground_truths,
                                             double positive_threshold = 0.6,
                                             double negative_threshold = 0.45,
                                             bool force_best_anchor = true);

enum class Difficulty { kEasy, kModerate, kHard };

// Screen-space visibility gates: minimum image box height (px), maximum
// occlusion state, maximum truncation fraction per difficulty.
bool within_difficulty(double box_height_px, int occlusion, double truncation, Difficulty d);

enum class IouMode { kBev, k3d };

struct EvalConfig {
  double iou_threshold = 0.7;
  IouMode mode = IouMode::k3d;
  int recall_positions = 40;
};

struct Detection {
  Box3D box;
  double score = 0.0;  // finite; any monotone rescaling leaves AP unchanged
  std::string label;
};

struct GroundTruth {
  Box3D box;
  std::string label;
  // Ignored boxes count neither as targets nor as false positives when a
  // detection matches them; used for out-of-difficulty objects.
  bool ignored = false;
};

// Average precision at recall_positions evenly spaced recall anchors
// (1/R, 2/R, ..., 1), as a percentage. Detections are matched greedily in
// score order to the same-label, not-yet-matched ground truth of highest
// IoU at or above the threshold, within their frame. Matches to ignored
// ground truths are dropped from the precision/recall curve. Precision at
// each anchor r is the maximum precision at any operating point with
// recall >= r. Zero when there are no detections or no counted ground
// truths. Deterministic: score ties break by frame order, then input order.
double average_precision(const std::vector<std::vector<Detection>>& detections_per_frame,
                         const std::vector<std::vector<GroundTruth>>& ground_truths_per_frame,
                         const EvalConfig& config = {});

}  // namespace voxelray

// Copyright (c) 2026 The voxelray authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelray/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace voxelray {
namespace {

double rect_area(const Rect2D& r) { return (r.max_x - r.min_x) * (r.max_y - r.min_y); }

void check_rect(const Rect2D& r, const char* who) {
  if (!(r.max_x > r.min_x) || !(r.max_y > r.min_y)) {
    throw std::invalid_argument(std::string(who) + ": rectangle sides must be positive");
  }
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double polygon_area(const std::vector<Eigen::Vector2d>& polygon) {
  if (polygon.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Eigen::Vector2d& p = polygon[i];
    const Eigen::Vector2d& q = polygon[(i + 1) % polygon.size()];
    twice += cross2(p, q);
  }
  return std::abs(twice) * 0.5;
}

// Clips a convex polygon against the half-plane on the left of the directed
// edge a -> b (counterclockwise clip polygon keeps its interior there).
std::vector<Eigen::Vector2d> clip_by_edge(const std::vector<Eigen::Vector2d>& polygon,
                                          const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  std::vector<Eigen::Vector2d> kept;
  kept.reserve(polygon.size() + 1);
  const Eigen::Vector2d edge = b - a;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Eigen::Vector2d& current = polygon[i];
    const Eigen::Vector2d& next = polygon[(i + 1) % polygon.size()];
    const double side_current = cross2(edge, current - a);
    const double side_next = cross2(edge, next - a);
    if (side_current >= 0.0) kept.push_back(current);
    if ((side_current > 0.0 && side_next < 0.0) || (side_current < 0.0 && side_next > 0.0)) {
      const double t = side_current / (side_current - side_next);
      kept.push_back(current + t * (next - current));
    }
  }
  return kept;
}

double footprint_intersection_area(const Box3D& a, const Box3D& b) {
  const std::array<Eigen::Vector2d, 4> ca = bev_corners(a);
  const std::array<Eigen::Vector2d, 4> cb = bev_corners(b);
  std::vector<Eigen::Vector2d> polygon(ca.begin(), ca.end());
  for (int edge = 0; edge < 4 && polygon.size() >= 3; ++edge) {
    polygon = clip_by_edge(polygon, cb[static_cast<std::size_t>(edge)],
                           cb[static_cast<std::size_t>((edge + 1) % 4)]);
  }
  return polygon_area(polygon);
}

struct MatchEvent {
  double score = 0.0;
  bool true_positive = false;
};

}  // namespace

double iou_axis_aligned_2d(const Rect2D& a, const Rect2D& b) {
  check_rect(a, "iou_axis_aligned_2d");
  check_rect(b, "iou_axis_aligned_2d");
  const double w = std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x);
  const double h = std::min(a.max_y, b.max_y) - std::max(a.min_y, b.min_y);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double intersection = w * h;
  return intersection / (rect_area(a) + rect_area(b) - intersection);
}

std::array<Eigen::Vector2d, 4> bev_corners(const Box3D& box) {
  const Eigen::Vector2d center(box.center.x(), box.center.y());
  const Eigen::Vector2d heading(std::cos(box.yaw), std::sin(box.yaw));
  const Eigen::Vector2d lateral(-heading.y(), heading.x());
  const Eigen::Vector2d half_l = 0.5 * box.length * heading;
  const Eigen::Vector2d half_w = 0.5 * box.width * lateral;
  return {center + half_l + half_w, center - half_l + half_w, center - half_l - half_w,
          center + half_l - half_w};
}

double iou_bev_rotated(const Box3D& a, const Box3D& b) {
  const double area_a = a.length * a.width;
  const double area_b = b.length * b.width;
  const double intersection = footprint_intersection_area(a, b);
  const double iou = intersection / (area_a + area_b - intersection);
  return std::clamp(iou, 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const double a_low = a.center.z() - 0.5 * a.height;
  const double a_high = a.center.z() + 0.5 * a.height;
  const double b_low = b.center.z() - 0.5 * b.height;
  const double b_high = b.center.z() + 0.5 * b.height;
  const double overlap = std::min(a_high, b_high) - std::max(a_low, b_low);
  if (overlap <= 0.0) return 0.0;
  const double intersection = footprint_intersection_area(a, b) * overlap;
  const double volume_a = a.length * a.width * a.height;
  const double volume_b = b.length * b.width * b.height;
  const double iou = intersection / (volume_a + volume_b - intersection);
  return std::clamp(iou, 0.0, 1.0);
}

Rect2D nearest_axis_aligned_bev(const Box3D& box) {
  // Quarter turns within pi/4 of the yaw decide whether length or width
  // spans x. remainder() lands in [-pi/2, pi/2] around the nearest multiple
  // of pi, which folds the heading sign away.
  const double residual = std::remainder(box.yaw, kPi);
  const bool swapped = std::abs(residual) > kPi / 4.0;
  const double half_x = 0.5 * (swapped ? box.width : box.length);
  const double half_y = 0.5 * (swapped ? box.length : box.width);
  return Rect2D{box.center.x() - half_x, box.center.y() - half_y, box.center.x() + half_x,
                box.center.y() + half_y};
}

std::vector<AnchorAssignment> assign_anchors(const std::vector<Box3D>& anchors,
                                             const std::vector<Box3D>& ground_truths,
                                             double positive_threshold,
                                             double negative_threshold, bool force_best_anchor) {
  if (!(negative_threshold > 0.0) || !(negative_threshold <= positive_threshold) ||
      !(positive_threshold <= 1.0)) {
    throw std::invalid_argument(
        "assign_anchors: require 0 < negative_threshold <= positive_threshold <= 1");
  }
  std::vector<AnchorAssignment> assignments(anchors.size());
  if (ground_truths.empty()) return assignments;

  std::vector<Rect2D> anchor_rects;
  anchor_rects.reserve(anchors.size());
  for (const Box3D& anchor : anchors) anchor_rects.push_back(nearest_axis_aligned_bev(anchor));
  std::vector<Rect2D> truth_rects;
  truth_rects.reserve(ground_truths.size());
  for (const Box3D& truth : ground_truths) truth_rects.push_back(nearest_axis_aligned_bev(truth));

  std::vector<double> best_for_truth(ground_truths.size(), 0.0);
  std::vector<int> best_anchor_for_truth(ground_truths.size(), -1);

  for (std::size_t a = 0; a < anchors.size(); ++a) {
    double best = 0.0;
    int best_truth = -1;
    for (std::size_t t = 0; t < ground_truths.size(); ++t) {
      const double iou = iou_axis_aligned_2d(anchor_rects[a], truth_rects[t]);
      if (iou > best) {
        best = iou;
        best_truth = static_cast<int>(t);
      }
      if (iou > best_for_truth[t]) {
        best_for_truth[t] = iou;
        best_anchor_for_truth[t] = static_cast<int>(a);
      }
    }
    if (best >= positive_threshold) {
      assignments[a] = {AnchorAssignmentKind::kPositive, best_truth};
    } else if (best >= negative_threshold) {
      assignments[a] = {AnchorAssignmentKind::kIgnore, -1};
    }
  }

  if (force_best_anchor) {
    // Every ground truth with any overlap claims its best anchor, even when
    // that anchor sits below the positive threshold (ties went to the lowest
    // anchor index above). Later ground truths win contested anchors.
    for (std::size_t t = 0; t < ground_truths.size(); ++t) {
      if (best_anchor_for_truth[t] >= 0 && best_for_truth[t] > 0.0) {
        assignments[static_cast<std::size_t>(best_anchor_for_truth[t])] = {
            AnchorAssignmentKind::kPositive, static_cast<int>(t)};
      }
    }
  }
  return assignments;
}

bool within_difficulty(double box_height_px, int occlusion, double truncation, Difficulty d) {
  switch (d) {
    case Difficulty::kEasy:
      return box_height_px >= 40.0 && occlusion <= 0 && truncation <= 0.15;
    case Difficulty::kModerate:
      return box_height_px >= 25.0 && occlusion <= 1 && truncation <= 0.30;
    case Difficulty::kHard:
      return box_height_px >= 25.0 && occlusion <= 2 && truncation <= 0.50;
  }
  return false;
}

double average_precision(const std::vector<std::vector<Detection>>& detections_per_frame,
                         const std::vector<std::vector<GroundTruth>>& ground_truths_per_frame,
                         const EvalConfig& config) {
  if (detections_per_frame.size() != ground_truths_per_frame.size()) {
    throw std::invalid_argument("average_precision: frame count mismatch");
  }
  if (config.recall_positions < 1) {
    throw std::invalid_argument("average_precision: need at least one recall position");
  }
  if (!(config.iou_threshold > 0.0) || !(config.iou_threshold <= 1.0)) {
    throw std::invalid_argument("average_precision: IoU threshold must lie in (0, 1]");
  }

  const auto overlap = [&config](const Box3D& a, const Box3D& b) {
    return config.mode == IouMode::kBev ? iou_bev_rotated(a, b) : iou_3d(a, b);
  };

  std::size_t total_targets = 0;
  for (const std::vector<GroundTruth>& frame : ground_truths_per_frame) {
    for (const GroundTruth& truth : frame) {
      if (!std::isfinite(truth.box.yaw)) {
        throw std::invalid_argument("average_precision: non-finite ground truth");
      }
      if (!truth.ignored) ++total_targets;
    }
  }

  // Greedy matching in global score order. Sorting on (-score, frame, rank)
  // makes ties deterministic and leaves the result invariant under any
  // strictly increasing rescaling of the scores.
  struct Candidate {
    double score;
    std::size_t frame;
    std::size_t rank;
  };
  std::vector<Candidate> order;
  for (std::size_t f = 0; f < detections_per_frame.size(); ++f) {
    for (std::size_t r = 0; r < detections_per_frame[f].size(); ++r) {
      if (!std::isfinite(detections_per_frame[f][r].score)) {
        throw std::invalid_argument("average_precision: non-finite detection score");
      }
      order.push_back({detections_per_frame[f][r].score, f, r});
    }
  }
  std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.rank < b.rank;
  });

  std::vector<std::vector<bool>> taken;
  taken.reserve(ground_truths_per_frame.size());
  for (const std::vector<GroundTruth>& frame : ground_truths_per_frame) {
    taken.emplace_back(frame.size(), false);
  }

  std::vector<MatchEvent> events;
  events.reserve(order.size());
  for (const Candidate& candidate : order) {
    const Detection& detection = detections_per_frame[candidate.frame][candidate.rank];
    const std::vector<GroundTruth>& truths = ground_truths_per_frame[candidate.frame];

    // Prefer the best counted ground truth; fall back to ignored ones so a
    // detection of an out-of-difficulty object is dropped, not penalized.
    int best_counted = -1;
    double best_counted_iou = config.iou_threshold;
    int best_ignored = -1;
    double best_ignored_iou = config.iou_threshold;
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (taken[candidate.frame][t] || truths[t].label != detection.label) continue;
      const double iou = overlap(detection.box, truths[t].box);
      if (truths[t].ignored) {
        if (iou >= best_ignored_iou) {
          best_ignored_iou = iou;
          best_ignored = static_cast<int>(t);
        }
      } else if (iou >= best_counted_iou) {
        best_counted_iou = iou;
        best_counted = static_cast<int>(t);
      }
    }

    if (best_counted >= 0) {
      taken[candidate.frame][static_cast<std::size_t>(best_counted)] = true;
      events.push_back({detection.score, true});
    } else if (best_ignored >= 0) {
      taken[candidate.frame][static_cast<std::size_t>(best_ignored)] = true;
    } else {
      events.push_back({detection.score, false});
    }
  }

  if (total_targets == 0 || events.empty()) return 0.0;

  std::vector<double> recalls;
  std::vector<double> precisions;
  recalls.reserve(events.size());
  precisions.reserve(events.size());
  std::size_t true_positives = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].true_positive) ++true_positives;
    recalls.push_back(static_cast<double>(true_positives) / static_cast<double>(total_targets));
    precisions.push_back(static_cast<double>(true_positives) / static_cast<double>(i + 1));
  }

  // Interpolated precision: at each recall anchor take the maximum precision
  // among operating points at or beyond it.
  const int positions = config.recall_positions;
  double sum = 0.0;
  for (int p = 1; p <= positions; ++p) {
    const double anchor = static_cast<double>(p) / static_cast<double>(positions);
    double best = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (recalls[i] + 1e-12 >= anchor) best = std::max(best, precisions[i]);
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(positions);
}

}  // namespace voxelray

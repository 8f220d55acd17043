#pragma once

// Proposal labeling, five-predicate detection matching, precision-recall and
// average precision with threshold relaxation.

#include "f3d/metrics.hpp"
#include "f3d/scene.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace f3d {

/// True-positive thresholds; nullopt is a wildcard (predicate relaxed).
/// Overlaps must exceed their threshold, errors must stay below theirs.
struct ThresholdTuple {
  std::optional<double> box_iou;
  std::optional<double> shape_iou;
  std::optional<double> rotation;     ///< radians
  std::optional<double> translation;  ///< meters
  std::optional<double> scale;        ///< log2 units

  /// box 0.5, shape 0.25, rotation pi/6, translation 1 m, scale 0.5.
  static ThresholdTuple defaults();
  /// Throws ValidationError unless set values are positive and IoUs lie in (0, 1].
  void validate() const;
  bool operator==(const ThresholdTuple&) const = default;
};

enum class ProposalKind { foreground, background, ignore };

struct ProposalLabel {
  ProposalKind kind = ProposalKind::background;
  /// Ground-truth box for foreground proposals.
  std::optional<std::size_t> gt;
  double max_iou = 0.0;
};

struct ProposalThresholds {
  double foreground = 0.7;  ///< max IoU strictly above
  double background = 0.3;  ///< max IoU strictly below
};

/// Foreground proposals go to the highest-IoU ground truth, ties to the lowest index.
std::vector<ProposalLabel> assign_proposals(std::span<const Box2D> proposals, std::span<const Box2D> gt_boxes,
                                            const ProposalThresholds& thresholds = {});

/// True when every non-wildcard predicate holds. A set box threshold fails
/// when either object lacks a box.
bool satisfies(const ComponentErrors& errors, const ThresholdTuple& thresholds);

struct DetectionImage {
  std::vector<SceneObject> detections;
  std::vector<SceneObject> ground_truth;
};

struct DetectionMatch {
  std::size_t image = 0;
  std::size_t detection = 0;
  double score = 0.0;
  bool true_positive = false;
  std::optional<std::size_t> gt;
};

struct EvalOutcome {
  /// Detections in global rank order (descending score, ties by image then insertion).
  std::vector<DetectionMatch> matches;
  std::vector<double> precision;
  std::vector<double> recall;
  double ap = 0.0;
  std::size_t num_ground_truth = 0;
};

struct EvalOptions {
  double tau = kDefaultTau;
  /// Only match detections to ground truth of the same class.
  bool per_class = false;
};

/// Within each image, detections are taken in descending score and each
/// claims the best unmatched ground truth satisfying all predicates (highest
/// 2D IoU, or smallest translation error when the box predicate is relaxed).
/// Per-image match lists are then merged into one ranked PR curve.
EvalOutcome evaluate_dataset(std::span<const DetectionImage> images, const ThresholdTuple& thresholds,
                             const EvalOptions& options = {});
EvalOutcome evaluate_detections(std::span<const SceneObject> detections, std::span<const SceneObject> ground_truth,
                                const ThresholdTuple& thresholds, const EvalOptions& options = {});

/// Area under the monotone precision envelope (all-point interpolation).
double average_precision(std::span<const double> precision, std::span<const double> recall);

struct ApRow {
  std::string name;
  ThresholdTuple thresholds;
  double ap = 0.0;
};

/// Full tuple, each single-predicate relaxation, box only, box plus each
/// single predicate, and box plus rotation and shape: 12 rows.
std::vector<ApRow> ap_sweep(std::span<const DetectionImage> images, const ThresholdTuple& base,
                            const EvalOptions& options = {});

}  // namespace f3d

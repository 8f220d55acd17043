#pragma once

// Per-object component errors and cross-representation scene metrics.

#include "f3d/renderer.hpp"
#include "f3d/scene.hpp"

#include <optional>
#include <span>
#include <vector>

namespace f3d {

/// Default true-positive thresholds for the five component errors.
struct DefaultThresholds {
  static constexpr double shape_iou = 0.25;
  static constexpr double rotation = 0.52359877559829887;  // pi / 6
  static constexpr double translation = 1.0;               // meters
  static constexpr double scale = 0.5;                     // log2 units, a factor of sqrt(2)
  static constexpr double box_iou = 0.5;
};

struct ComponentErrors {
  double shape_iou = 0.0;
  double rotation = 0.0;     ///< radians
  double translation = 0.0;  ///< meters
  double scale = 0.0;        ///< mean |log2 ratio| over the three axes
  std::optional<double> box_iou;  ///< only when both objects carry a 2D box
};

double translation_error(const Vec3& a, const Vec3& b);
/// (1/3) sum_i |log2 a_i - log2 b_i|.
double scale_error(const Vec3& a, const Vec3& b);

ComponentErrors component_errors(const SceneObject& pred, const SceneObject& gt, double tau = kDefaultTau);

/// Which side of the threshold counts as within: strictly below for errors,
/// strictly above for overlaps.
enum class ThresholdDirection { below, above };

struct SummaryStats {
  double median = 0.0;
  double fraction_within = 0.0;
  double threshold = 0.0;
  ThresholdDirection direction = ThresholdDirection::below;
  std::size_t count = 0;
};

/// Median (lower of the two middle values for even sizes) and the fraction
/// strictly within `threshold`. Throws ValidationError for an empty list.
SummaryStats summarize(std::span<const double> values, double threshold, ThresholdDirection direction);

struct SurfaceError {
  /// Mean distance, or +inf when the prediction is empty.
  double value = 0.0;
  bool empty_prediction = false;
};

enum class SurfaceDistance {
  one_sided,  ///< mean over predicted points of distance to the nearest ground-truth point
  chamfer,    ///< average of both one-sided means
};

SurfaceError visible_surface_error(std::span<const Vec3> pred, std::span<const Vec3> gt,
                                   SurfaceDistance kind = SurfaceDistance::one_sided);

enum class LayoutMode { modal, amodal };

/// Layout depth error of `pred` against the scene's analytic render. Modal
/// compares only pixels where the room is the visible surface; amodal
/// compares all pixels against the room rendered without objects.
SurfaceError layout_depth_error(const DepthMap& pred, const FactoredScene& gt_scene, LayoutMode mode);

}  // namespace f3d

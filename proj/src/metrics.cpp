#include "f3d/metrics.hpp"

#include "f3d/errors.hpp"
#include "f3d/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace f3d {

double translation_error(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

double scale_error(const Vec3& a, const Vec3& b) {
  if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any()) throw ValidationError("scales must be positive");
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) acc += std::abs(std::log2(a[i]) - std::log2(b[i]));
  return acc / 3.0;
}

ComponentErrors component_errors(const SceneObject& pred, const SceneObject& gt, double tau) {
  ComponentErrors e;
  e.shape_iou = voxel_iou(pred.shape, gt.shape, tau);
  e.rotation = rotation_geodesic(pred.pose.rotation(), gt.pose.rotation());
  e.translation = translation_error(pred.pose.translation(), gt.pose.translation());
  e.scale = scale_error(pred.pose.scale(), gt.pose.scale());
  if (pred.box2d && gt.box2d) e.box_iou = box_iou(*pred.box2d, *gt.box2d);
  return e;
}

SummaryStats summarize(std::span<const double> values, double threshold, ThresholdDirection direction) {
  if (values.empty()) throw ValidationError("cannot summarize an empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  SummaryStats s;
  s.median = sorted[(sorted.size() - 1) / 2];
  s.threshold = threshold;
  s.direction = direction;
  s.count = sorted.size();
  const auto within = std::count_if(sorted.begin(), sorted.end(), [&](double v) {
    return direction == ThresholdDirection::below ? v < threshold : v > threshold;
  });
  s.fraction_within = static_cast<double>(within) / static_cast<double>(sorted.size());
  return s;
}

namespace {

double mean_nearest(std::span<const Vec3> from, std::span<const Vec3> to) {
  const NearestNeighborIndex index(to);
  double acc = 0.0;
  for (const Vec3& p : from) acc += index.nearest(p).distance;
  return acc / static_cast<double>(from.size());
}

}  // namespace

SurfaceError visible_surface_error(std::span<const Vec3> pred, std::span<const Vec3> gt, SurfaceDistance kind) {
  if (gt.empty()) throw ValidationError("visible_surface_error needs a non-empty ground-truth cloud");
  if (pred.empty()) return {std::numeric_limits<double>::infinity(), true};
  double value = mean_nearest(pred, gt);
  if (kind == SurfaceDistance::chamfer) value = 0.5 * (value + mean_nearest(gt, pred));
  return {value, false};
}

SurfaceError layout_depth_error(const DepthMap& pred, const FactoredScene& gt_scene, LayoutMode mode) {
  if (!(pred.camera == gt_scene.camera)) throw ValidationError("predicted depth and scene use different cameras");
  if (mode == LayoutMode::amodal) {
    const DepthMap gt = render_depth_analytic(gt_scene, false);
    return visible_surface_error(depth_to_pointcloud(pred), depth_to_pointcloud(gt));
  }
  const AnalyticRender gt = render_analytic(gt_scene, true);
  std::vector<bool> mask(gt.surface.size());
  for (std::size_t px = 0; px < mask.size(); ++px) mask[px] = gt.surface[px] == kLayoutSurface;
  return visible_surface_error(depth_to_pointcloud(pred, mask), depth_to_pointcloud(gt.depth, mask));
}

}  // namespace f3d

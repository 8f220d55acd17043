#include "f3d/compare.hpp"

#include "f3d/metrics.hpp"

#include <algorithm>
#include <limits>

namespace f3d {

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::factored: return "factored";
    case Representation::depth: return "depth";
    case Representation::voxels: return "voxels";
  }
  return "unknown";
}

RepresentationSet oracle_representations(const FactoredScene& gt, const GridSpec& spec) {
  return {gt, render_depth_analytic(gt, true), analytic_scene_voxels(gt, spec)};
}

std::vector<Vec3> object_points(const SceneObject& object, double tau) {
  std::vector<Vec3> pts = voxel_centers(object.shape, tau);
  for (Vec3& p : pts) p = apply_pose(object.pose, p);
  return pts;
}

namespace {

std::vector<double> object_fitness(const FactoredScene& gt, const std::vector<Vec3>& cloud, const IcpConfig& cfg,
                                   double tau) {
  std::vector<double> out;
  out.reserve(gt.objects.size());
  for (const SceneObject& o : gt.objects) {
    const std::vector<Vec3> src = object_points(o, tau);
    if (cloud.empty() || src.empty()) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const Box3 box = posed_bounds(o.pose);
    out.push_back(icp(src, cloud, (box.max - box.min).norm(), cfg).fitness);
  }
  return out;
}

TaskScores score(const FactoredScene& gt, const std::vector<Vec3>& gt_visible, const VoxelGrid& gt_voxels,
                 const std::vector<Vec3>& visible, const VoxelGrid& voxels, const std::vector<Vec3>& objects,
                 const DepthMap& layout, const IcpConfig& cfg, double tau) {
  TaskScores s;
  s.visible_depth = visible_surface_error(visible, gt_visible).value;
  s.scene_iou = voxel_iou(voxels, gt_voxels, tau);
  s.object_fitness = object_fitness(gt, objects, cfg, tau);
  s.modal_layout = layout_depth_error(layout, gt, LayoutMode::modal).value;
  s.amodal_layout = layout_depth_error(layout, gt, LayoutMode::amodal).value;
  return s;
}

}  // namespace

SceneComparison compare_representations(const FactoredScene& gt, const RepresentationSet& pred,
                                        const IcpConfig& cfg, double tau) {
  const GridSpec& spec = pred.voxels.spec();
  const std::vector<Vec3> gt_visible = depth_to_pointcloud(render_depth_analytic(gt, true));
  const VoxelGrid gt_voxels = analytic_scene_voxels(gt, spec);
  SceneComparison out;

  {
    const FactoredScene& f = pred.factored;
    std::vector<Vec3> objects;
    for (const SceneObject& o : f.objects) {
      const auto pts = object_points(o, tau);
      objects.insert(objects.end(), pts.begin(), pts.end());
    }
    const DepthMap layout = f.layout ? disparity_to_depth(*f.layout, f.camera) : DepthMap(f.camera);
    ComposeOptions compose;
    compose.tau = tau;
    out.scores[0] = score(gt, gt_visible, gt_voxels, depth_to_pointcloud(render_depth_voxel(f, tau)),
                          compose_scene_voxels(f, spec, compose), objects, layout, cfg, tau);
  }
  {
    const std::vector<Vec3> cloud = depth_to_pointcloud(pred.depth);
    out.scores[1] = score(gt, gt_visible, gt_voxels, cloud, pointcloud_to_voxels(cloud, spec).grid, cloud,
                          pred.depth, cfg, tau);
  }
  {
    const std::vector<Vec3> centers = voxel_centers(pred.voxels, tau);
    out.scores[2] = score(gt, gt_visible, gt_voxels, centers, pred.voxels, centers,
                          render_scene_grid(pred.voxels, gt.camera, tau), cfg, tau);
  }
  return out;
}

std::vector<std::pair<double, double>> cumulative_curve(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> curve;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    curve.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return curve;
}

}  // namespace f3d

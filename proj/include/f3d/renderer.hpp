#pragma once

// Depth synthesis from factored scenes and conversions between depth maps,
// point clouds and scene voxels. Depth is z-depth in meters; 0 marks pixels
// without a surface.

#include "f3d/scene.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace f3d {

struct DepthMap {
  static constexpr double kEmpty = 0.0;

  Camera camera;
  std::vector<double> depth;

  DepthMap() = default;
  /// All pixels empty.
  explicit DepthMap(const Camera& cam);
  /// Throws ValidationError unless the size matches and values are finite and >= 0.
  DepthMap(const Camera& cam, std::vector<double> values);

  int width() const { return camera.width; }
  int height() const { return camera.height; }
  double at(int col, int row) const { return depth[static_cast<std::size_t>(row) * camera.width + col]; }
  double& at(int col, int row) { return depth[static_cast<std::size_t>(row) * camera.width + col]; }

  bool operator==(const DepthMap&) const = default;
};

/// Per-pixel surface identity of an analytic render.
inline constexpr int kNoSurface = -1;
inline constexpr int kLayoutSurface = -2;

struct AnalyticRender {
  DepthMap depth;
  /// kNoSurface, kLayoutSurface, or the index of the visible object.
  std::vector<int> surface;
};

/// Exact ray casting against the room interior and, optionally, every
/// object's analytic parts. Requires a room; objects must carry parts when
/// `include_objects` is set.
AnalyticRender render_analytic(const FactoredScene& scene, bool include_objects);
DepthMap render_depth_analytic(const FactoredScene& scene, bool include_objects);

/// Z-buffer rasterization of every occupied object voxel as a full posed
/// cube, with the layout (when present) composited behind.
DepthMap render_depth_voxel(const FactoredScene& scene, double tau = kDefaultTau);

/// Rasterizes occupied cells of a camera-frame scene grid as cubes.
DepthMap render_scene_grid(const VoxelGrid& grid, const Camera& camera, double tau = kDefaultTau);

/// Elementwise reciprocal; zeros (empty markers) are preserved. Negative or
/// non-finite entries are rejected.
std::vector<double> reciprocal_map(std::span<const double> values);
Layout depth_to_disparity(const DepthMap& depth);
DepthMap disparity_to_depth(const Layout& disparity, const Camera& camera);

/// One camera-frame point per non-empty pixel.
std::vector<Vec3> depth_to_pointcloud(const DepthMap& d);
/// As above, keeping only pixels where `mask` is true.
std::vector<Vec3> depth_to_pointcloud(const DepthMap& d, const std::vector<bool>& mask);

struct PointVoxelization {
  VoxelGrid grid;
  /// Points outside the grid extent, which are ignored.
  std::size_t ignored_points = 0;
};

/// A cell is occupied iff at least one point falls inside it.
PointVoxelization pointcloud_to_voxels(std::span<const Vec3> points, const GridSpec& spec = GridSpec::scene_default());

}  // namespace f3d

#pragma once

#include "f3d/geometry.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace f3d {

enum class Frame { canonical, scene };

struct GridDims {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  std::size_t count() const { return static_cast<std::size_t>(nx) * ny * nz; }
  bool operator==(const GridDims&) const = default;
};

struct Box3 {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  bool operator==(const Box3& o) const { return min == o.min && max == o.max; }
};

struct CellIndex {
  int i = 0;
  int j = 0;
  int k = 0;
  bool operator==(const CellIndex&) const = default;
};

/// Geometry of a voxel lattice. Canonical grids are exactly 32^3 over
/// [-0.5, 0.5]^3 m; scene grids are camera-frame lattices of 8 cm cells.
class GridSpec {
 public:
  static constexpr int kCanonicalResolution = 32;
  static constexpr double kSceneVoxelSize = 0.08;

  GridSpec(Frame frame, GridDims dims, Box3 extent);

  static GridSpec canonical();
  /// 64x32x64 cells over x in [-2.56, 2.56], y in [-1.28, 1.28], z in [0, 5.12].
  static GridSpec scene_default();
  /// Scene grid of `dims` 8 cm cells whose extent starts at `origin`.
  static GridSpec scene(GridDims dims, const Vec3& origin);

  Frame frame() const { return frame_; }
  const GridDims& dims() const { return dims_; }
  const Box3& extent() const { return extent_; }
  Vec3 voxel_size() const;

  /// Linear index, x fastest.
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims_.ny + j) * dims_.nx + i;
  }
  CellIndex cell(std::size_t linear) const;
  Vec3 cell_center(int i, int j, int k) const;
  /// Cell containing `p` using half-open cells; nullopt outside the extent.
  std::optional<CellIndex> cell_of(const Vec3& p) const;

  bool operator==(const GridSpec& o) const {
    return frame_ == o.frame_ && dims_ == o.dims_ && extent_ == o.extent_;
  }

 private:
  Frame frame_;
  GridDims dims_;
  Box3 extent_;
};

/// Dense occupancy probabilities in [0, 1], x-fastest.
class VoxelGrid {
 public:
  explicit VoxelGrid(GridSpec spec);
  VoxelGrid(GridSpec spec, std::vector<float> occupancy);

  const GridSpec& spec() const { return spec_; }
  const GridDims& dims() const { return spec_.dims(); }
  Frame frame() const { return spec_.frame(); }
  std::span<const float> occupancy() const { return occupancy_; }

  float at(int i, int j, int k) const { return occupancy_[spec_.index(i, j, k)]; }
  float at(std::size_t linear) const { return occupancy_[linear]; }
  /// Throws ValidationError for values outside [0, 1].
  void set(int i, int j, int k, float value);
  void set(std::size_t linear, float value);

  std::size_t count_occupied(double tau = 0.5) const;

  bool operator==(const VoxelGrid& o) const { return spec_ == o.spec_ && occupancy_ == o.occupancy_; }

 private:
  GridSpec spec_;
  std::vector<float> occupancy_;
};

/// Axis-aligned box given by center and positive half extents.
struct Cuboid {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.5);

  Cuboid() = default;
  Cuboid(const Vec3& c, const Vec3& h);
  static Cuboid from_bounds(const Vec3& lo, const Vec3& hi);

  Vec3 min() const { return center - half_extents; }
  Vec3 max() const { return center + half_extents; }
  /// Closed containment.
  bool contains(const Vec3& p) const;

  bool operator==(const Cuboid& o) const { return center == o.center && half_extents == o.half_extents; }
};

inline constexpr double kDefaultTau = 0.5;

/// IoU of the two grids binarized at occupancy >= tau. Two empty grids give 1.
double voxel_iou(const VoxelGrid& a, const VoxelGrid& b, double tau = kDefaultTau);

/// Centers of every cell with occupancy >= tau, in the grid's frame.
std::vector<Vec3> voxel_centers(const VoxelGrid& g, double tau = kDefaultTau);

/// Cells whose center lies inside the union of `shapes` are 1, the rest 0.
VoxelGrid cuboid_voxelize(std::span<const Cuboid> shapes, const GridSpec& spec);

enum class Sampling { trilinear, nearest };

/// Occupancy of a canonical grid at canonical point `p` (edge-clamped); 0 outside [-0.5, 0.5]^3.
double sample_canonical(const VoxelGrid& obj, const Vec3& p, Sampling sampling = Sampling::trilinear);

/// Places a canonical object into a scene grid: each scene cell center is
/// mapped into the canonical frame by the inverse pose, sampled, and marked
/// occupied (1) when the sample is >= tau.
VoxelGrid resample_to_scene(const VoxelGrid& obj, const Pose& pose, const GridSpec& scene_spec,
                            double tau = kDefaultTau, Sampling sampling = Sampling::trilinear);

/// World-space bounding box of a posed canonical box [-0.5, 0.5]^3.
Box3 posed_bounds(const Pose& pose, const Box3& canonical_box = {Vec3::Constant(-0.5), Vec3::Constant(0.5)});

}  // namespace f3d

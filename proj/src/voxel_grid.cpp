#include "f3d/voxel_grid.hpp"

#include "f3d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace f3d {

namespace {

constexpr double kExtentTolerance = 1e-9;
// Inverse-pose round-off must not drop cells that sit exactly on the canonical boundary.
constexpr double kCanonicalSlack = 1e-9;

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("binarization threshold must lie in (0, 1)");
}

}  // namespace

GridSpec::GridSpec(Frame frame, GridDims dims, Box3 extent) : frame_(frame), dims_(dims), extent_(extent) {
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0) throw ValidationError("grid dims must be positive");
  if (!extent.min.allFinite() || !extent.max.allFinite() || (extent.max.array() <= extent.min.array()).any()) {
    throw ValidationError("grid extent is degenerate");
  }
  const Vec3 size = extent.max - extent.min;
  if (frame == Frame::canonical) {
    const int n = kCanonicalResolution;
    if (dims.nx != n || dims.ny != n || dims.nz != n) throw ValidationError("canonical grids are 32^3");
    if (extent.min != Vec3::Constant(-0.5) || extent.max != Vec3::Constant(0.5)) {
      throw ValidationError("canonical grid extent must be [-0.5, 0.5]^3");
    }
  } else {
    const Vec3 expected(dims.nx * kSceneVoxelSize, dims.ny * kSceneVoxelSize, dims.nz * kSceneVoxelSize);
    if ((size - expected).cwiseAbs().maxCoeff() > kExtentTolerance) {
      throw ValidationError("scene grid extent must span dims x 0.08 m");
    }
  }
}

GridSpec GridSpec::canonical() {
  const int n = kCanonicalResolution;
  return {Frame::canonical, {n, n, n}, {Vec3::Constant(-0.5), Vec3::Constant(0.5)}};
}

GridSpec GridSpec::scene_default() { return scene({64, 32, 64}, Vec3(-2.56, -1.28, 0.0)); }

GridSpec GridSpec::scene(GridDims dims, const Vec3& origin) {
  const Vec3 size(dims.nx * kSceneVoxelSize, dims.ny * kSceneVoxelSize, dims.nz * kSceneVoxelSize);
  return {Frame::scene, dims, {origin, origin + size}};
}

Vec3 GridSpec::voxel_size() const {
  const Vec3 size = extent_.max - extent_.min;
  return {size.x() / dims_.nx, size.y() / dims_.ny, size.z() / dims_.nz};
}

CellIndex GridSpec::cell(std::size_t linear) const {
  const auto nx = static_cast<std::size_t>(dims_.nx);
  const auto ny = static_cast<std::size_t>(dims_.ny);
  return {static_cast<int>(linear % nx), static_cast<int>((linear / nx) % ny), static_cast<int>(linear / (nx * ny))};
}

Vec3 GridSpec::cell_center(int i, int j, int k) const {
  const Vec3 s = voxel_size();
  return extent_.min + Vec3((i + 0.5) * s.x(), (j + 0.5) * s.y(), (k + 0.5) * s.z());
}

std::optional<CellIndex> GridSpec::cell_of(const Vec3& p) const {
  if (!p.allFinite()) return std::nullopt;
  const Vec3 s = voxel_size();
  const Vec3 f = (p - extent_.min).cwiseQuotient(s);
  const int i = static_cast<int>(std::floor(f.x()));
  const int j = static_cast<int>(std::floor(f.y()));
  const int k = static_cast<int>(std::floor(f.z()));
  if (f.x() < 0.0 || f.y() < 0.0 || f.z() < 0.0 || i >= dims_.nx || j >= dims_.ny || k >= dims_.nz) {
    return std::nullopt;
  }
  return CellIndex{i, j, k};
}

VoxelGrid::VoxelGrid(GridSpec spec) : spec_(spec), occupancy_(spec.dims().count(), 0.0f) {}

VoxelGrid::VoxelGrid(GridSpec spec, std::vector<float> occupancy) : spec_(spec), occupancy_(std::move(occupancy)) {
  if (occupancy_.size() != spec_.dims().count()) throw ValidationError("occupancy size does not match grid dims");
  for (float v : occupancy_) {
    if (!(v >= 0.0f && v <= 1.0f)) throw ValidationError("occupancy values must lie in [0, 1]");
  }
}

void VoxelGrid::set(std::size_t linear, float value) {
  if (!(value >= 0.0f && value <= 1.0f)) throw ValidationError("occupancy values must lie in [0, 1]");
  occupancy_.at(linear) = value;
}

void VoxelGrid::set(int i, int j, int k, float value) { set(spec_.index(i, j, k), value); }

std::size_t VoxelGrid::count_occupied(double tau) const {
  return static_cast<std::size_t>(
      std::count_if(occupancy_.begin(), occupancy_.end(), [tau](float v) { return v >= tau; }));
}

Cuboid::Cuboid(const Vec3& c, const Vec3& h) : center(c), half_extents(h) {
  if (!c.allFinite() || !h.allFinite() || (h.array() <= 0.0).any()) {
    throw ValidationError("cuboid half extents must be positive and finite");
  }
}

Cuboid Cuboid::from_bounds(const Vec3& lo, const Vec3& hi) { return {(lo + hi) / 2.0, (hi - lo) / 2.0}; }

bool Cuboid::contains(const Vec3& p) const {
  return ((p - center).cwiseAbs().array() <= half_extents.array()).all();
}

double voxel_iou(const VoxelGrid& a, const VoxelGrid& b, double tau) {
  check_tau(tau);
  if (a.dims() != b.dims() || a.frame() != b.frame()) throw ValidationError("voxel_iou: grids differ in dims or frame");
  std::size_t inter = 0, uni = 0;
  const auto oa = a.occupancy();
  const auto ob = b.occupancy();
  for (std::size_t n = 0; n < oa.size(); ++n) {
    const bool x = oa[n] >= tau;
    const bool y = ob[n] >= tau;
    inter += (x && y);
    uni += (x || y);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Vec3> voxel_centers(const VoxelGrid& g, double tau) {
  check_tau(tau);
  std::vector<Vec3> out;
  const auto& d = g.dims();
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i)
        if (g.at(i, j, k) >= tau) out.push_back(g.spec().cell_center(i, j, k));
  return out;
}

VoxelGrid cuboid_voxelize(std::span<const Cuboid> shapes, const GridSpec& spec) {
  VoxelGrid grid(spec);
  const auto& d = spec.dims();
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i) {
        const Vec3 c = spec.cell_center(i, j, k);
        if (std::any_of(shapes.begin(), shapes.end(), [&](const Cuboid& s) { return s.contains(c); })) {
          grid.set(i, j, k, 1.0f);
        }
      }
  return grid;
}

double sample_canonical(const VoxelGrid& obj, const Vec3& p, Sampling sampling) {
  if (obj.frame() != Frame::canonical) throw ValidationError("expected a canonical-frame grid");
  if ((p.cwiseAbs().array() > 0.5 + kCanonicalSlack).any()) return 0.0;
  const auto& spec = obj.spec();
  const Vec3 s = spec.voxel_size();
  const Vec3 f = (p - spec.extent().min).cwiseQuotient(s);
  const int n[3] = {spec.dims().nx, spec.dims().ny, spec.dims().nz};
  if (sampling == Sampling::nearest) {
    int idx[3];
    for (int a = 0; a < 3; ++a) idx[a] = std::clamp(static_cast<int>(std::floor(f[a])), 0, n[a] - 1);
    return obj.at(idx[0], idx[1], idx[2]);
  }
  int lo[3], hi[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    const double c = f[a] - 0.5;
    const double fl = std::floor(c);
    t[a] = c - fl;
    lo[a] = std::clamp(static_cast<int>(fl), 0, n[a] - 1);
    hi[a] = std::clamp(static_cast<int>(fl) + 1, 0, n[a] - 1);
  }
  double acc = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    double w = 1.0;
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      const bool upper = (corner >> a) & 1;
      w *= upper ? t[a] : 1.0 - t[a];
      idx[a] = upper ? hi[a] : lo[a];
    }
    if (w != 0.0) acc += w * obj.at(idx[0], idx[1], idx[2]);
  }
  return acc;
}

Box3 posed_bounds(const Pose& pose, const Box3& canonical_box) {
  Box3 out{Vec3::Constant(std::numeric_limits<double>::infinity()),
           Vec3::Constant(-std::numeric_limits<double>::infinity())};
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 p((corner & 1) ? canonical_box.max.x() : canonical_box.min.x(),
                 (corner & 2) ? canonical_box.max.y() : canonical_box.min.y(),
                 (corner & 4) ? canonical_box.max.z() : canonical_box.min.z());
    const Vec3 w = apply_pose(pose, p);
    out.min = out.min.cwiseMin(w);
    out.max = out.max.cwiseMax(w);
  }
  return out;
}

VoxelGrid resample_to_scene(const VoxelGrid& obj, const Pose& pose, const GridSpec& scene_spec, double tau,
                            Sampling sampling) {
  check_tau(tau);
  if (obj.frame() != Frame::canonical) throw ValidationError("resample_to_scene expects a canonical object grid");
  VoxelGrid out(scene_spec);
  // Only cells whose centers fall in the posed box's bounds can map inside the canonical cube.
  const Box3 bounds = posed_bounds(pose);
  const Vec3 s = scene_spec.voxel_size();
  const Vec3 lo_f = (bounds.min - scene_spec.extent().min).cwiseQuotient(s);
  const Vec3 hi_f = (bounds.max - scene_spec.extent().min).cwiseQuotient(s);
  const int n[3] = {scene_spec.dims().nx, scene_spec.dims().ny, scene_spec.dims().nz};
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::clamp(static_cast<int>(std::floor(lo_f[a])) - 1, 0, n[a]);
    hi[a] = std::clamp(static_cast<int>(std::ceil(hi_f[a])) + 1, 0, n[a]);
  }

  const Mat3 rt = pose.rotation().to_matrix().transpose();
  const Vec3 inv_scale = pose.scale().cwiseInverse();
  for (int k = lo[2]; k < hi[2]; ++k)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int i = lo[0]; i < hi[0]; ++i) {
        const Vec3 local = (rt * (scene_spec.cell_center(i, j, k) - pose.translation())).cwiseProduct(inv_scale);
        if (sample_canonical(obj, local, sampling) >= tau) out.set(i, j, k, 1.0f);
      }
  return out;
}

}  // namespace f3d

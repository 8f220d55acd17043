#include "f3d/renderer.hpp"

#include "f3d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace f3d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Entry parameter of the ray o + s d into [lo, hi], or +inf on a miss. Rays
// starting inside the box report their exit.
double ray_box(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi) {
  double near = -kInf, far = kInf;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] > hi[a]) return kInf;
      continue;
    }
    double t1 = (lo[a] - o[a]) / d[a];
    double t2 = (hi[a] - o[a]) / d[a];
    if (t1 > t2) std::swap(t1, t2);
    near = std::max(near, t1);
    far = std::min(far, t2);
  }
  if (near > far || far <= 0.0) return kInf;
  return near > 0.0 ? near : far;
}

// Camera rays expressed in an object's canonical frame. Pose is affine, so the
// ray parameter (z-depth) is unchanged.
struct LocalRays {
  Vec3 origin;
  std::vector<Vec3> directions;
};

LocalRays local_rays(const Camera& cam, const Pose& pose) {
  const Mat3 rt = pose.rotation().to_matrix().transpose();
  const Vec3 inv = pose.scale().cwiseInverse();
  LocalRays rays;
  rays.origin = (rt * (-pose.translation())).cwiseProduct(inv);
  rays.directions.reserve(static_cast<std::size_t>(cam.width) * cam.height);
  for (int row = 0; row < cam.height; ++row)
    for (int col = 0; col < cam.width; ++col) rays.directions.push_back((rt * cam.ray(col, row)).cwiseProduct(inv));
  return rays;
}

void check_camera(const Camera& cam) { cam.validate(); }

// Rasterizes the box [lo, hi] (canonical coordinates of `pose`) into the z-buffer.
void raster_box(const Camera& cam, const Pose& pose, const LocalRays& rays, const Vec3& lo, const Vec3& hi,
                std::vector<double>& zbuf) {
  double umin = kInf, vmin = kInf, umax = -kInf, vmax = -kInf;
  bool behind = false;
  int in_front = 0;
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 p((corner & 1) ? hi.x() : lo.x(), (corner & 2) ? hi.y() : lo.y(), (corner & 4) ? hi.z() : lo.z());
    const Vec3 w = apply_pose(pose, p);
    if (w.z() <= 1e-9) {
      behind = true;
      continue;
    }
    ++in_front;
    const PixelDepth px = project(cam, w);
    umin = std::min(umin, px.u);
    umax = std::max(umax, px.u);
    vmin = std::min(vmin, px.v);
    vmax = std::max(vmax, px.v);
  }
  if (in_front == 0) return;
  int c0 = 0, c1 = cam.width - 1, r0 = 0, r1 = cam.height - 1;
  if (!behind) {
    c0 = std::max(c0, static_cast<int>(std::floor(umin)));
    c1 = std::min(c1, static_cast<int>(std::ceil(umax)));
    r0 = std::max(r0, static_cast<int>(std::floor(vmin)));
    r1 = std::min(r1, static_cast<int>(std::ceil(vmax)));
  }
  for (int row = r0; row <= r1; ++row)
    for (int col = c0; col <= c1; ++col) {
      const std::size_t px = static_cast<std::size_t>(row) * cam.width + col;
      const double s = ray_box(rays.origin, rays.directions[px], lo, hi);
      if (s < zbuf[px]) zbuf[px] = s;
    }
}

// Occupied cells with at least one empty (or out-of-grid) face neighbor. Interior
// cells can never be the nearest hit.
std::vector<CellIndex> surface_cells(const VoxelGrid& g, double tau) {
  const auto& d = g.dims();
  auto occupied = [&](int i, int j, int k) {
    return i >= 0 && j >= 0 && k >= 0 && i < d.nx && j < d.ny && k < d.nz && g.at(i, j, k) >= tau;
  };
  std::vector<CellIndex> out;
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i) {
        if (!occupied(i, j, k)) continue;
        if (!occupied(i - 1, j, k) || !occupied(i + 1, j, k) || !occupied(i, j - 1, k) || !occupied(i, j + 1, k) ||
            !occupied(i, j, k - 1) || !occupied(i, j, k + 1)) {
          out.push_back({i, j, k});
        }
      }
  return out;
}

void raster_grid(const Camera& cam, const VoxelGrid& grid, const Pose& pose, double tau, std::vector<double>& zbuf) {
  const LocalRays rays = local_rays(cam, pose);
  const Vec3 half = grid.spec().voxel_size() / 2.0;
  for (const CellIndex& c : surface_cells(grid, tau)) {
    const Vec3 center = grid.spec().cell_center(c.i, c.j, c.k);
    raster_box(cam, pose, rays, center - half, center + half, zbuf);
  }
}

DepthMap from_zbuffer(const Camera& cam, std::vector<double> zbuf) {
  for (double& z : zbuf) {
    if (z == kInf) z = DepthMap::kEmpty;
  }
  return DepthMap(cam, std::move(zbuf));
}

}  // namespace

DepthMap::DepthMap(const Camera& cam)
    : camera(cam), depth(static_cast<std::size_t>(cam.width) * cam.height, kEmpty) {
  cam.validate();
}

DepthMap::DepthMap(const Camera& cam, std::vector<double> values) : camera(cam), depth(std::move(values)) {
  cam.validate();
  if (depth.size() != static_cast<std::size_t>(cam.width) * cam.height) {
    throw ValidationError("depth map size does not match the camera");
  }
  for (double v : depth) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("depth values must be finite and non-negative");
  }
}

AnalyticRender render_analytic(const FactoredScene& scene, bool include_objects) {
  const Camera& cam = scene.camera;
  check_camera(cam);
  if (!scene.room) throw ValidationError("analytic rendering needs room geometry");
  const std::size_t n = static_cast<std::size_t>(cam.width) * cam.height;
  std::vector<double> zbuf(n, kInf);
  std::vector<int> surface(n, kNoSurface);

  for (int row = 0; row < cam.height; ++row)
    for (int col = 0; col < cam.width; ++col) {
      if (auto d = room_depth(cam, *scene.room, col, row)) {
        const std::size_t px = static_cast<std::size_t>(row) * cam.width + col;
        zbuf[px] = *d;
        surface[px] = kLayoutSurface;
      }
    }

  if (include_objects) {
    for (std::size_t idx = 0; idx < scene.objects.size(); ++idx) {
      const SceneObject& obj = scene.objects[idx];
      if (obj.parts.empty()) throw ValidationError("analytic rendering needs cuboid parts for every object");
      const LocalRays rays = local_rays(cam, obj.pose);
      for (std::size_t px = 0; px < n; ++px) {
        for (const Cuboid& part : obj.parts) {
          const double s = ray_box(rays.origin, rays.directions[px], part.min(), part.max());
          if (s < zbuf[px]) {
            zbuf[px] = s;
            surface[px] = static_cast<int>(idx);
          }
        }
      }
    }
  }
  return {from_zbuffer(cam, std::move(zbuf)), std::move(surface)};
}

DepthMap render_depth_analytic(const FactoredScene& scene, bool include_objects) {
  return render_analytic(scene, include_objects).depth;
}

DepthMap render_depth_voxel(const FactoredScene& scene, double tau) {
  const Camera& cam = scene.camera;
  check_camera(cam);
  const std::size_t n = static_cast<std::size_t>(cam.width) * cam.height;
  std::vector<double> zbuf(n, kInf);
  if (scene.layout) {
    if (scene.layout->width != cam.width || scene.layout->height != cam.height) {
      throw ValidationError("layout dimensions do not match the camera");
    }
    for (std::size_t px = 0; px < n; ++px) {
      const double disp = scene.layout->disparity[px];
      if (disp > 0.0) zbuf[px] = 1.0 / disp;
    }
  }
  for (const auto& obj : scene.objects) raster_grid(cam, obj.shape, obj.pose, tau, zbuf);
  return from_zbuffer(cam, std::move(zbuf));
}

DepthMap render_scene_grid(const VoxelGrid& grid, const Camera& camera, double tau) {
  check_camera(camera);
  std::vector<double> zbuf(static_cast<std::size_t>(camera.width) * camera.height, kInf);
  raster_grid(camera, grid, Pose(), tau, zbuf);
  return from_zbuffer(camera, std::move(zbuf));
}

std::vector<double> reciprocal_map(std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("depth/disparity values must be finite and non-negative");
    out[i] = v == 0.0 ? 0.0 : 1.0 / v;
  }
  return out;
}

Layout depth_to_disparity(const DepthMap& depth) {
  return {depth.width(), depth.height(), reciprocal_map(depth.depth)};
}

DepthMap disparity_to_depth(const Layout& disparity, const Camera& camera) {
  if (disparity.width != camera.width || disparity.height != camera.height) {
    throw ValidationError("disparity map dimensions do not match the camera");
  }
  return DepthMap(camera, reciprocal_map(disparity.disparity));
}

std::vector<Vec3> depth_to_pointcloud(const DepthMap& d) {
  return depth_to_pointcloud(d, std::vector<bool>(d.depth.size(), true));
}

std::vector<Vec3> depth_to_pointcloud(const DepthMap& d, const std::vector<bool>& mask) {
  if (mask.size() != d.depth.size()) throw ValidationError("mask size does not match the depth map");
  std::vector<Vec3> points;
  for (int row = 0; row < d.height(); ++row)
    for (int col = 0; col < d.width(); ++col) {
      const std::size_t px = static_cast<std::size_t>(row) * d.width() + col;
      const double z = d.depth[px];
      if (z == DepthMap::kEmpty || !mask[px]) continue;
      points.push_back(backproject(d.camera, {static_cast<double>(col), static_cast<double>(row), z}));
    }
  return points;
}

PointVoxelization pointcloud_to_voxels(std::span<const Vec3> points, const GridSpec& spec) {
  PointVoxelization out{VoxelGrid(spec), 0};
  for (const Vec3& p : points) {
    if (auto cell = spec.cell_of(p)) {
      out.grid.set(cell->i, cell->j, cell->k, 1.0f);
    } else {
      ++out.ignored_points;
    }
  }
  return out;
}

}  // namespace f3d

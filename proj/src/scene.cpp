#include "f3d/scene.hpp"

#include "f3d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace f3d {

std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::bed: return "bed";
    case ObjectClass::chair: return "chair";
    case ObjectClass::desk: return "desk";
    case ObjectClass::sofa: return "sofa";
    case ObjectClass::table: return "table";
    case ObjectClass::television: return "television";
  }
  return "unknown";
}

ObjectClass object_class_from_string(std::string_view name) {
  for (ObjectClass c : kObjectClasses) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("unknown object class '" + std::string(name) + "'");
}

double box_iou(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

void validate(const SceneObject& object, const Camera& camera) {
  if (object.shape.frame() != Frame::canonical) throw ValidationError("object shape must be a canonical grid");
  if (object.score && !(*object.score >= 0.0 && *object.score <= 1.0)) {
    throw ValidationError("object score must lie in [0, 1]");
  }
  if (object.box2d) {
    const Box2D& b = *object.box2d;
    if (!(b.xmin < b.xmax && b.ymin < b.ymax)) throw ValidationError("box2d is degenerate");
    if (b.xmin < 0.0 || b.ymin < 0.0 || b.xmax > camera.width || b.ymax > camera.height) {
      throw ValidationError("box2d lies outside the image");
    }
  }
}

void validate(const FactoredScene& scene) {
  scene.camera.validate();
  if (scene.layout) {
    const Layout& l = *scene.layout;
    if (l.width != scene.camera.width || l.height != scene.camera.height) {
      throw ValidationError("layout dimensions do not match the camera");
    }
    if (l.disparity.size() != static_cast<std::size_t>(l.width) * l.height) {
      throw ValidationError("layout pixel count does not match its dimensions");
    }
    for (double d : l.disparity) {
      if (!std::isfinite(d) || d < 0.0) throw ValidationError("layout disparity must be finite and non-negative");
    }
  }
  for (const auto& o : scene.objects) validate(o, scene.camera);
}

namespace {

void check_range(double value, double lo, double hi, const char* name) {
  if (!(value >= lo && value <= hi)) {
    throw ValidationError(std::string("shape parameter '") + name + "' outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
}

Cuboid box(double x0, double y0, double z0, double x1, double y1, double z1) {
  return Cuboid::from_bounds(Vec3(x0, y0, z0), Vec3(x1, y1, z1));
}

// Four legs under a slab whose underside is at y = top.
void add_legs(std::vector<Cuboid>& parts, double top, double leg) {
  for (double sx : {-1.0, 1.0})
    for (double sz : {-1.0, 1.0}) {
      const double x0 = sx < 0 ? -0.5 : 0.5 - leg;
      const double z0 = sz < 0 ? -0.5 : 0.5 - leg;
      parts.push_back(box(x0, top, z0, x0 + leg, 0.5, z0 + leg));
    }
}

}  // namespace

std::vector<Cuboid> parametric_shape(ObjectClass kind, const ShapeParams& p) {
  check_range(p.slab, 0.02, 0.4, "slab");
  check_range(p.leg, 0.02, 0.2, "leg");
  check_range(p.back, 0.02, 0.3, "back");
  std::vector<Cuboid> parts;
  switch (kind) {
    case ObjectClass::desk:
    case ObjectClass::table:
      parts.push_back(box(-0.5, -0.5, -0.5, 0.5, -0.5 + p.slab, 0.5));
      add_legs(parts, -0.5 + p.slab, p.leg);
      break;
    case ObjectClass::chair:
      parts.push_back(box(-0.5, 0.0, -0.5, 0.5, p.slab, 0.5));
      parts.push_back(box(-0.5, -0.5, 0.5 - p.back, 0.5, 0.0, 0.5));
      add_legs(parts, p.slab, p.leg);
      break;
    case ObjectClass::sofa:
      parts.push_back(box(-0.5, 0.0, -0.5, 0.5, 0.5, 0.5));
      parts.push_back(box(-0.5, -0.5, 0.5 - p.back, 0.5, 0.0, 0.5));
      parts.push_back(box(-0.5, -0.1875, -0.5, -0.5 + p.back, 0.0, 0.5 - p.back));
      parts.push_back(box(0.5 - p.back, -0.1875, -0.5, 0.5, 0.0, 0.5 - p.back));
      break;
    case ObjectClass::bed:
      parts.push_back(box(-0.5, 0.125, -0.5, 0.5, 0.5, 0.5));
      parts.push_back(box(-0.5, -0.5, 0.5 - p.back, 0.5, 0.125, 0.5));
      break;
    case ObjectClass::television:
      check_range(p.slab, 0.02, 0.1, "slab");
      parts.push_back(box(-0.5, -0.5, -p.slab / 2.0, 0.5, 0.5, p.slab / 2.0));
      break;
  }
  return parts;
}

namespace {

void add_room_shell(VoxelGrid& grid, const Cuboid& room) {
  const auto& spec = grid.spec();
  const Vec3 half_voxel = spec.voxel_size() / 2.0;
  const Vec3 lo = room.min();
  const Vec3 hi = room.max();
  const auto& d = spec.dims();
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i) {
        const Vec3 c = spec.cell_center(i, j, k);
        bool inside = true, on_face = false;
        for (int a = 0; a < 3; ++a) {
          inside = inside && c[a] >= lo[a] - half_voxel[a] && c[a] <= hi[a] + half_voxel[a];
          on_face = on_face || std::abs(c[a] - lo[a]) <= half_voxel[a] || std::abs(c[a] - hi[a]) <= half_voxel[a];
        }
        if (inside && on_face) grid.set(i, j, k, 1.0f);
      }
}

void add_layout_points(VoxelGrid& grid, const Camera& cam, const Layout& layout) {
  for (int row = 0; row < layout.height; ++row)
    for (int col = 0; col < layout.width; ++col) {
      const double disp = layout.at(col, row);
      if (disp <= 0.0) continue;
      const Vec3 p = backproject(cam, {static_cast<double>(col), static_cast<double>(row), 1.0 / disp});
      if (auto cell = grid.spec().cell_of(p)) grid.set(cell->i, cell->j, cell->k, 1.0f);
    }
}

}  // namespace

VoxelGrid compose_scene_voxels(const FactoredScene& scene, const GridSpec& scene_spec, const ComposeOptions& options) {
  VoxelGrid out(scene_spec);
  std::vector<float> acc(scene_spec.dims().count(), 0.0f);
  for (const auto& obj : scene.objects) {
    const VoxelGrid placed = resample_to_scene(obj.shape, obj.pose, scene_spec, options.tau, options.sampling);
    const auto occ = placed.occupancy();
    for (std::size_t n = 0; n < acc.size(); ++n) acc[n] = std::max(acc[n], occ[n]);
  }
  out = VoxelGrid(scene_spec, std::move(acc));
  if (options.include_layout) {
    if (scene.room) {
      add_room_shell(out, *scene.room);
    } else if (scene.layout) {
      add_layout_points(out, scene.camera, *scene.layout);
    }
  }
  return out;
}

VoxelGrid analytic_scene_voxels(const FactoredScene& scene, const GridSpec& scene_spec) {
  VoxelGrid out(scene_spec);
  const auto& d = scene_spec.dims();
  for (const auto& obj : scene.objects) {
    if (obj.parts.empty()) continue;
    for (std::size_t n = 0; n < d.count(); ++n) {
      if (out.at(n) > 0.0f) continue;
      const CellIndex c = scene_spec.cell(n);
      const Vec3 local = apply_pose(obj.pose, scene_spec.cell_center(c.i, c.j, c.k), PoseDirection::inverse);
      if (std::any_of(obj.parts.begin(), obj.parts.end(), [&](const Cuboid& p) { return p.contains(local); })) {
        out.set(n, 1.0f);
      }
    }
  }
  return out;
}

std::optional<double> room_depth(const Camera& cam, const Cuboid& room, double u, double v) {
  const Vec3 lo = room.min();
  const Vec3 hi = room.max();
  if (!((lo.array() < 0.0).all() && (hi.array() > 0.0).all())) return std::nullopt;
  const Vec3 d = cam.ray(u, v);
  double s = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) s = std::min(s, hi[a] / d[a]);
    if (d[a] < 0.0) s = std::min(s, lo[a] / d[a]);
  }
  return s;
}

Layout room_layout(const Camera& cam, const Cuboid& room) {
  Layout layout{cam.width, cam.height, std::vector<double>(static_cast<std::size_t>(cam.width) * cam.height, 0.0)};
  for (int row = 0; row < cam.height; ++row)
    for (int col = 0; col < cam.width; ++col) {
      if (auto depth = room_depth(cam, room, col, row)) {
        layout.disparity[static_cast<std::size_t>(row) * cam.width + col] = 1.0 / *depth;
      }
    }
  return layout;
}

std::optional<Box2D> projected_box(const Camera& cam, const Pose& pose) {
  Box2D b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 p((corner & 1) ? 0.5 : -0.5, (corner & 2) ? 0.5 : -0.5, (corner & 4) ? 0.5 : -0.5);
    const Vec3 w = apply_pose(pose, p);
    if (!(w.z() > 0.0)) return std::nullopt;
    const PixelDepth px = project(cam, w);
    b.xmin = std::min(b.xmin, px.u);
    b.ymin = std::min(b.ymin, px.v);
    b.xmax = std::max(b.xmax, px.u);
    b.ymax = std::max(b.ymax, px.v);
  }
  b.xmin = std::clamp(b.xmin, 0.0, static_cast<double>(cam.width));
  b.xmax = std::clamp(b.xmax, 0.0, static_cast<double>(cam.width));
  b.ymin = std::clamp(b.ymin, 0.0, static_cast<double>(cam.height));
  b.ymax = std::clamp(b.ymax, 0.0, static_cast<double>(cam.height));
  if (!(b.xmin < b.xmax && b.ymin < b.ymax)) return std::nullopt;
  return b;
}

}  // namespace f3d

#include "f3d/generator.hpp"

#include "f3d/errors.hpp"
#include "f3d/random.hpp"

#include <cmath>
#include <numbers>

namespace f3d {

namespace {

constexpr double kPitch = 1.0 / GridSpec::kCanonicalResolution;
constexpr double kMinForwardDistance = 0.8;
constexpr double kPlacementGap = 0.05;
constexpr double kWallMargin = 0.02;
constexpr double kMinBoxAreaFraction = 0.002;

struct ClassTemplate {
  Range width, height, depth;
  // Shape parameters as whole canonical voxels so the canonical grid is exact.
  int slab_lo, slab_hi, leg_lo, leg_hi, back_lo, back_hi;
};

ClassTemplate template_for(ObjectClass c) {
  switch (c) {
    case ObjectClass::bed: return {{1.4, 1.9}, {0.6, 1.0}, {1.9, 2.1}, 3, 3, 3, 3, 3, 5};
    case ObjectClass::chair: return {{0.45, 0.6}, {0.8, 1.0}, {0.45, 0.6}, 3, 4, 4, 5, 3, 5};
    case ObjectClass::desk: return {{1.0, 1.5}, {0.7, 0.8}, {0.6, 0.8}, 3, 4, 3, 4, 3, 3};
    case ObjectClass::sofa: return {{1.6, 2.1}, {0.7, 0.9}, {0.8, 1.0}, 3, 3, 3, 3, 4, 6};
    case ObjectClass::table: return {{0.8, 1.4}, {0.7, 0.8}, {0.8, 1.2}, 3, 4, 3, 4, 3, 3};
    case ObjectClass::television: return {{0.8, 1.2}, {0.5, 0.7}, {0.6, 0.9}, 2, 2, 3, 3, 3, 3};
  }
  throw ValidationError("unknown object class");
}

void check_range(const Range& r, const char* name) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi)) {
    throw ValidationError(std::string("generator range '") + name + "' is empty");
  }
}

bool boxes_overlap_xz(const Box3& a, const Box3& b) {
  return a.min.x() < b.max.x() + kPlacementGap && b.min.x() < a.max.x() + kPlacementGap &&
         a.min.z() < b.max.z() + kPlacementGap && b.min.z() < a.max.z() + kPlacementGap;
}

bool box_inside(const Box3& inner, const Vec3& lo, const Vec3& hi) {
  constexpr double slack = 1e-9;
  return (inner.min.array() >= lo.array() - slack).all() && (inner.max.array() <= hi.array() + slack).all();
}

}  // namespace

void GeneratorConfig::validate() const {
  if (min_objects < 0 || max_objects < min_objects) throw ValidationError("object count range is empty");
  check_range(side_wall, "side_wall");
  check_range(back_wall, "back_wall");
  check_range(front_wall, "front_wall");
  check_range(camera_height, "camera_height");
  check_range(room_height, "room_height");
  if (side_wall.lo <= 0.0 || back_wall.lo <= 0.0 || front_wall.lo <= kMinForwardDistance || camera_height.lo <= 0.0) {
    throw ValidationError("camera must lie strictly inside the room");
  }
  if (room_height.lo <= camera_height.hi) throw ValidationError("room must be taller than the camera height");
  double total = 0.0;
  for (double w : class_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("class weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("class weights sum to zero");
  if (max_placement_attempts <= 0) throw ValidationError("max_placement_attempts must be positive");
  camera.validate();
}

GeneratedScene generate_scene(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  const double left = rng.uniform(cfg.side_wall.lo, cfg.side_wall.hi);
  const double right = rng.uniform(cfg.side_wall.lo, cfg.side_wall.hi);
  const double back = rng.uniform(cfg.back_wall.lo, cfg.back_wall.hi);
  const double front = rng.uniform(cfg.front_wall.lo, cfg.front_wall.hi);
  const double cam_height = rng.uniform(cfg.camera_height.lo, cfg.camera_height.hi);
  const double room_height = rng.uniform(cfg.room_height.lo, cfg.room_height.hi);
  const Vec3 room_lo(-left, cam_height - room_height, -back);
  const Vec3 room_hi(right, cam_height, front);
  const Cuboid room = Cuboid::from_bounds(room_lo, room_hi);

  GeneratedScene out;
  out.scene.camera = cfg.camera;
  out.scene.room = room;
  out.scene.layout = room_layout(cfg.camera, room);

  // Objects must also fit the default scene grid so scene-voxel comparisons see all of them.
  const GridSpec grid = GridSpec::scene_default();
  const Vec3 allowed_lo = (room_lo + Vec3(kWallMargin, 0.0, kWallMargin)).cwiseMax(grid.extent().min);
  const Vec3 allowed_hi = (room_hi - Vec3(kWallMargin, 0.0, kWallMargin)).cwiseMin(grid.extent().max);
  const double min_box_area = kMinBoxAreaFraction * cfg.camera.width * cfg.camera.height;

  out.requested_objects = rng.uniform_int(cfg.min_objects, cfg.max_objects);
  std::vector<Box3> placed;
  for (int n = 0; n < out.requested_objects; ++n) {
    const auto kind = kObjectClasses[rng.weighted_index(cfg.class_weights)];
    const ClassTemplate tpl = template_for(kind);
    const ShapeParams params{rng.uniform_int(tpl.slab_lo, tpl.slab_hi) * kPitch,
                             rng.uniform_int(tpl.leg_lo, tpl.leg_hi) * kPitch,
                             rng.uniform_int(tpl.back_lo, tpl.back_hi) * kPitch};
    const Vec3 scale(rng.uniform(tpl.width.lo, tpl.width.hi), rng.uniform(tpl.height.lo, tpl.height.hi),
                     rng.uniform(tpl.depth.lo, tpl.depth.hi));
    const auto parts = parametric_shape(kind, params);

    bool success = false;
    for (int attempt = 0; attempt < cfg.max_placement_attempts && !success; ++attempt) {
      const double yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double x = rng.uniform(allowed_lo.x(), allowed_hi.x());
      const double z = rng.uniform(kMinForwardDistance, allowed_hi.z());
      // The base face (canonical y = +0.5) rests on the floor.
      const Pose pose(scale, UnitQuaternion::from_axis_angle(Vec3::UnitY(), yaw),
                      Vec3(x, cam_height - scale.y() / 2.0, z));
      const Box3 bounds = posed_bounds(pose);
      if (!box_inside(bounds, allowed_lo, allowed_hi) || bounds.min.z() < kMinForwardDistance) continue;
      bool overlap = false;
      for (const auto& other : placed) overlap = overlap || boxes_overlap_xz(bounds, other);
      if (overlap) continue;
      const auto box = projected_box(cfg.camera, pose);
      if (!box || box->area() < min_box_area) continue;

      SceneObject obj;
      obj.shape = cuboid_voxelize(parts, GridSpec::canonical());
      obj.pose = pose;
      obj.score = 1.0;
      obj.label = kind;
      obj.box2d = *box;
      obj.parts = parts;
      out.scene.objects.push_back(std::move(obj));
      placed.push_back(bounds);
      success = true;
    }
  }
  out.placement_shortfall = static_cast<int>(out.scene.objects.size()) < out.requested_objects;
  return out;
}

}  // namespace f3d

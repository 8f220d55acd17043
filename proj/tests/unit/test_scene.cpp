#include "f3d/errors.hpp"
#include "f3d/generator.hpp"
#include "f3d/scene.hpp"
#include "support.hpp"

#include "doctest.h"

#include <numbers>

using namespace f3d;
using f3d::test::rng;

namespace {

double box_iou_oracle(const Box2D& a, const Box2D& b) {
  // Pixel-grid sampling would be approximate; area arithmetic on the overlap rectangle instead.
  const double w = std::max(0.0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
  const double h = std::max(0.0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
  const double inter = w * h;
  return inter / ((a.xmax - a.xmin) * (a.ymax - a.ymin) + (b.xmax - b.xmin) * (b.ymax - b.ymin) - inter);
}

double parts_volume(const std::vector<Cuboid>& parts, int n) {
  // Exact union volume by counting a fine lattice aligned with the 1/32 pitch.
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 p(-0.5 + (i + 0.5) / n, -0.5 + (j + 0.5) / n, -0.5 + (k + 0.5) / n);
        count += std::any_of(parts.begin(), parts.end(), [&](const Cuboid& c) { return c.contains(p); });
      }
  return static_cast<double>(count) / (static_cast<double>(n) * n * n);
}

}  // namespace

TEST_CASE("class names round trip") {
  for (ObjectClass c : kObjectClasses) CHECK(object_class_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(object_class_from_string("lamp"), ValidationError);
}

TEST_CASE("2D box IoU") {
  CHECK(box_iou({0, 0, 10, 10}, {0, 0, 10, 10}) == 1.0);
  CHECK(box_iou({0, 0, 10, 10}, {20, 20, 30, 30}) == 0.0);
  CHECK(box_iou({0, 0, 10, 10}, {5, 0, 15, 10}) == doctest::Approx(1.0 / 3.0));
  auto& g = rng(31);
  for (int n = 0; n < 1000; ++n) {
    const double x0 = test::uniform(g, 0, 50), y0 = test::uniform(g, 0, 50);
    const double x1 = test::uniform(g, 0, 50), y1 = test::uniform(g, 0, 50);
    const Box2D a{x0, y0, x0 + test::uniform(g, 1, 30), y0 + test::uniform(g, 1, 30)};
    const Box2D b{x1, y1, x1 + test::uniform(g, 1, 30), y1 + test::uniform(g, 1, 30)};
    CHECK(std::abs(box_iou(a, b) - box_iou_oracle(a, b)) < 1e-12);
  }
}

TEST_CASE("parametric shapes voxelize exactly on the canonical grid") {
  // Parameters on the 1/32 pitch put every part face on a cell boundary.
  const ShapeParams on_grid{2.0 / 32, 2.0 / 32, 3.0 / 32};
  for (ObjectClass c : kObjectClasses) {
    const auto parts = parametric_shape(c, on_grid);
    CHECK_FALSE(parts.empty());
    for (const Cuboid& p : parts) {
      CHECK((p.min().array() >= -0.5 - 1e-12).all());
      CHECK((p.max().array() <= 0.5 + 1e-12).all());
    }
    const VoxelGrid v = cuboid_voxelize(parts, GridSpec::canonical());
    CHECK(static_cast<double>(v.count_occupied()) / 32768.0 == doctest::Approx(parts_volume(parts, 96)));
  }
  CHECK(parametric_shape(ObjectClass::chair).size() == 6);
  CHECK(parametric_shape(ObjectClass::table).size() == 5);
  CHECK_THROWS_AS(parametric_shape(ObjectClass::table, {0.5, 0.06, 0.1}), ValidationError);
  CHECK_THROWS_AS(parametric_shape(ObjectClass::television, {0.2, 0.06, 0.1}), ValidationError);
}

TEST_CASE("object validation") {
  const Camera cam = Camera::test_camera();
  SceneObject o;
  CHECK_NOTHROW(validate(o, cam));
  o.score = 1.5;
  CHECK_THROWS_AS(validate(o, cam), ValidationError);
  o.score = 0.5;
  o.box2d = Box2D{10, 10, 5, 20};
  CHECK_THROWS_AS(validate(o, cam), ValidationError);
  o.box2d = Box2D{10, 10, 70, 20};
  CHECK_THROWS_AS(validate(o, cam), ValidationError);
  o.box2d = Box2D{10, 10, 20, 20};
  CHECK_NOTHROW(validate(o, cam));
}

TEST_CASE("room layout and depth") {
  const Camera cam = Camera::test_camera();
  const Cuboid room = Cuboid::from_bounds({-2, -1.5, -0.5}, {2, 1.1, 4.5});
  // Principal ray hits the front wall.
  CHECK(*room_depth(cam, room, cam.cx, cam.cy) == doctest::Approx(4.5));
  const Layout l = room_layout(cam, room);
  CHECK(l.width == 64);
  for (int v = 0; v < l.height; ++v)
    for (int u = 0; u < l.width; ++u) {
      const double d = 1.0 / l.at(u, v);
      const Vec3 p = cam.ray(u, v) * d;
      // Every layout point lies on the room boundary.
      const Vec3 lo = room.min(), hi = room.max();
      double face = 1e9;
      for (int a = 0; a < 3; ++a) face = std::min({face, std::abs(p[a] - lo[a]), std::abs(p[a] - hi[a])});
      CHECK(face < 1e-9);
      CHECK(room.contains(p - Vec3::Constant(1e-9).cwiseProduct(p.cwiseSign())));
    }
  CHECK_FALSE(room_depth(cam, Cuboid::from_bounds({1, 1, 1}, {2, 2, 2}), 0, 0).has_value());
}

TEST_CASE("projected boxes contain every projected corner") {
  const Camera cam = Camera::default_camera();
  const Pose pose(Vec3(0.8, 0.6, 0.5), UnitQuaternion::from_axis_angle({0, 1, 0}, 0.4), Vec3(0.2, 0.3, 3.0));
  const auto box = projected_box(cam, pose);
  REQUIRE(box.has_value());
  double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner((c & 1) ? 0.5 : -0.5, (c & 2) ? 0.5 : -0.5, (c & 4) ? 0.5 : -0.5);
    const PixelDepth px = project(cam, apply_pose(pose, corner));
    xmin = std::min(xmin, px.u);
    xmax = std::max(xmax, px.u);
    ymin = std::min(ymin, px.v);
    ymax = std::max(ymax, px.v);
  }
  CHECK(box->xmin == doctest::Approx(xmin));
  CHECK(box->xmax == doctest::Approx(xmax));
  CHECK(box->ymin == doctest::Approx(ymin));
  CHECK(box->ymax == doctest::Approx(ymax));
  CHECK_FALSE(projected_box(cam, Pose(Vec3::Ones(), {}, Vec3(0, 0, -3))).has_value());
}

TEST_CASE("generated scenes are deterministic and satisfy placement constraints") {
  GeneratorConfig cfg;
  cfg.camera = Camera::test_camera();
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    cfg.seed = seed;
    const GeneratedScene a = generate_scene(cfg);
    CHECK(a.scene == generate_scene(cfg).scene);
    CHECK_NOTHROW(validate(a.scene));
    REQUIRE(a.scene.room.has_value());
    REQUIRE(a.scene.layout.has_value());
    CHECK(*a.scene.layout == room_layout(cfg.camera, *a.scene.room));
    const auto& objs = a.scene.objects;
    CHECK(static_cast<int>(objs.size()) <= a.requested_objects);
    CHECK(a.placement_shortfall == (static_cast<int>(objs.size()) < a.requested_objects));
    const GridSpec spec = GridSpec::scene_default();
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const SceneObject& o = objs[i];
      const Box3 b = posed_bounds(o.pose);
      CHECK((b.min.array() >= a.scene.room->min().array() - 1e-9).all());
      CHECK((b.max.array() <= a.scene.room->max().array() + 1e-9).all());
      CHECK((b.min.array() >= spec.extent().min.array() - 1e-9).all());
      CHECK((b.max.array() <= spec.extent().max.array() + 1e-9).all());
      // Resting on the floor, rotated about the vertical axis only.
      CHECK(b.max.y() == doctest::Approx(a.scene.room->max().y()));
      CHECK(std::abs(o.pose.rotation().x()) < 1e-12);
      CHECK(std::abs(o.pose.rotation().z()) < 1e-12);
      REQUIRE(o.label.has_value());
      REQUIRE(o.box2d.has_value());
      CHECK(o.box2d == projected_box(cfg.camera, o.pose));
      CHECK(o.shape == cuboid_voxelize(o.parts, GridSpec::canonical()));
      for (std::size_t j = i + 1; j < objs.size(); ++j) {
        const Box3 c = posed_bounds(objs[j].pose);
        const bool apart = b.max.x() < c.min.x() || c.max.x() < b.min.x() || b.max.z() < c.min.z() ||
                           c.max.z() < b.min.z();
        CHECK(apart);
      }
    }
  }
  cfg.min_objects = 5;
  cfg.max_objects = 2;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("composed scene voxels agree with analytic part voxels") {
  GeneratorConfig cfg;
  cfg.camera = Camera::test_camera();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    const FactoredScene s = generate_scene(cfg).scene;
    const VoxelGrid composed = compose_scene_voxels(s);
    const VoxelGrid analytic = analytic_scene_voxels(s);
    CHECK(composed.frame() == Frame::scene);
    CHECK(voxel_iou(composed, analytic) >= 0.9);
    ComposeOptions with_layout;
    with_layout.include_layout = true;
    CHECK(compose_scene_voxels(s, GridSpec::scene_default(), with_layout).count_occupied() > composed.count_occupied());
  }
}

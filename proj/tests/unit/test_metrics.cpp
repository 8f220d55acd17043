#include "f3d/errors.hpp"
#include "f3d/generator.hpp"
#include "f3d/metrics.hpp"
#include "support.hpp"

#include "doctest.h"

#include <numbers>

using namespace f3d;
using f3d::test::rng;

namespace {

double mean_nn_oracle(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  double sum = 0.0;
  for (const Vec3& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : to) best = std::min(best, (p - q).norm());
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

std::vector<Vec3> random_cloud(std::mt19937_64& g, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.push_back(test::random_vec(g, -1, 1));
  return pts;
}

}  // namespace

TEST_CASE("translation and scale errors match closed forms") {
  auto& g = rng(51);
  for (int n = 0; n < 1000; ++n) {
    const Vec3 a = test::random_vec(g, -5, 5), b = test::random_vec(g, -5, 5);
    const double d = std::sqrt((a - b).dot(a - b));
    CHECK(std::abs(translation_error(a, b) - d) < 1e-9);
    const Vec3 c = test::random_vec(g, 0.1, 4), e = test::random_vec(g, 0.1, 4);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += std::abs(std::log(c[k] / e[k])) / std::log(2.0);
    CHECK(std::abs(scale_error(c, e) - s / 3.0) < 1e-9);
  }
  CHECK(scale_error(Vec3(2, 2, 2), Vec3(1, 1, 1)) == doctest::Approx(1.0));
  CHECK(scale_error(Vec3(1, 1, 1), Vec3(1, 1, 1)) == 0.0);
  CHECK_THROWS_AS(scale_error(Vec3(0, 1, 1), Vec3(1, 1, 1)), ValidationError);
}

TEST_CASE("component errors of an object against itself") {
  GeneratorConfig cfg;
  cfg.camera = Camera::test_camera();
  cfg.seed = 3;
  const FactoredScene s = generate_scene(cfg).scene;
  REQUIRE_FALSE(s.objects.empty());
  const ComponentErrors e = component_errors(s.objects[0], s.objects[0]);
  CHECK(e.shape_iou == 1.0);
  CHECK(e.rotation == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(e.translation == 0.0);
  CHECK(e.scale == 0.0);
  REQUIRE(e.box_iou.has_value());
  CHECK(*e.box_iou == 1.0);
  SceneObject no_box = s.objects[0];
  no_box.box2d.reset();
  CHECK_FALSE(component_errors(no_box, s.objects[0]).box_iou.has_value());
}

TEST_CASE("summaries use the lower median and strict thresholds") {
  const std::vector<double> v{4, 1, 3, 2};
  const SummaryStats s = summarize(v, 2.0, ThresholdDirection::below);
  CHECK(s.median == 2.0);
  CHECK(s.fraction_within == 0.25);
  CHECK(s.count == 4);
  CHECK(summarize(v, 3.0, ThresholdDirection::above).fraction_within == 0.25);
  CHECK(summarize(std::vector<double>{5, 1, 3}, 0, ThresholdDirection::below).median == 3.0);
  CHECK_THROWS_AS(summarize(std::vector<double>{}, 1.0, ThresholdDirection::below), ValidationError);
}

TEST_CASE("visible surface error matches all-pairs oracle") {
  auto& g = rng(52);
  for (int n = 0; n < 1000; ++n) {
    const auto pred = random_cloud(g, 1 + static_cast<int>(test::uniform(g, 0, 30)));
    const auto gt = random_cloud(g, 1 + static_cast<int>(test::uniform(g, 0, 30)));
    const SurfaceError e = visible_surface_error(pred, gt);
    CHECK_FALSE(e.empty_prediction);
    CHECK(std::abs(e.value - mean_nn_oracle(pred, gt)) < 1e-9);
    const double chamfer = 0.5 * (mean_nn_oracle(pred, gt) + mean_nn_oracle(gt, pred));
    CHECK(std::abs(visible_surface_error(pred, gt, SurfaceDistance::chamfer).value - chamfer) < 1e-9);
  }
  const auto gt = random_cloud(g, 10);
  CHECK(visible_surface_error(gt, gt).value == 0.0);
  const SurfaceError empty = visible_surface_error(std::vector<Vec3>{}, gt);
  CHECK(empty.empty_prediction);
  CHECK(std::isinf(empty.value));
  CHECK_THROWS_AS(visible_surface_error(gt, std::vector<Vec3>{}), ValidationError);
  // A subset of the ground truth explains it perfectly one-sidedly but not under Chamfer.
  const std::vector<Vec3> subset(gt.begin(), gt.begin() + 3);
  CHECK(visible_surface_error(subset, gt).value == 0.0);
  CHECK(visible_surface_error(subset, gt, SurfaceDistance::chamfer).value > 0.0);
}

TEST_CASE("layout depth error: modal and amodal") {
  GeneratorConfig cfg;
  cfg.camera = Camera::test_camera();
  cfg.min_objects = 3;
  cfg.seed = 9;
  const FactoredScene s = generate_scene(cfg).scene;
  REQUIRE_FALSE(s.objects.empty());
  const DepthMap layout = disparity_to_depth(*s.layout, s.camera);
  CHECK(layout_depth_error(layout, s, LayoutMode::amodal).value < 1e-9);
  CHECK(layout_depth_error(layout, s, LayoutMode::modal).value < 1e-9);
  const DepthMap modal = render_depth_analytic(s, true);
  CHECK(layout_depth_error(modal, s, LayoutMode::modal).value < 1e-9);
  CHECK(layout_depth_error(modal, s, LayoutMode::amodal).value > 0.0);
  CHECK_THROWS_AS(layout_depth_error(DepthMap(Camera::default_camera()), s, LayoutMode::modal), ValidationError);
}

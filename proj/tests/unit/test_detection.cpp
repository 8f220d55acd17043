#include "f3d/detection.hpp"
#include "f3d/errors.hpp"
#include "support.hpp"

#include "doctest.h"

#include <numbers>
#include <numeric>

using namespace f3d;
using f3d::test::rng;

namespace {

std::vector<VoxelGrid> shape_bank() {
  std::vector<VoxelGrid> bank;
  for (ObjectClass c : kObjectClasses) bank.push_back(cuboid_voxelize(parametric_shape(c), GridSpec::canonical()));
  return bank;
}

SceneObject random_object(std::mt19937_64& g, const std::vector<VoxelGrid>& bank) {
  SceneObject o;
  o.shape = bank[static_cast<std::size_t>(test::uniform(g, 0, static_cast<double>(bank.size())))];
  o.pose = Pose(test::random_vec(g, 0.5, 1.5), UnitQuaternion::from_axis_angle({0, 1, 0}, test::uniform(g, -3, 3)),
                test::random_vec(g, -2, 2) + Vec3(0, 0, 4));
  const double x = test::uniform(g, 0, 40), y = test::uniform(g, 0, 30);
  o.box2d = Box2D{x, y, x + test::uniform(g, 5, 20), y + test::uniform(g, 5, 15)};
  o.label = kObjectClasses[static_cast<std::size_t>(test::uniform(g, 0, 6))];
  o.score = std::round(test::uniform(g, 0, 1) * 10) / 10;  // coarse scores force ties
  return o;
}

SceneObject perturbed(std::mt19937_64& g, const SceneObject& gt) {
  SceneObject d = gt;
  const UnitQuaternion dq = UnitQuaternion::from_axis_angle(test::random_vec(g, -1, 1), test::uniform(g, 0, 1.0));
  d.pose = Pose(gt.pose.scale().cwiseProduct(test::random_vec(g, 0.6, 1.6)), dq * gt.pose.rotation(),
                gt.pose.translation() + test::random_vec(g, -0.8, 0.8));
  const Vec3 shift = test::random_vec(g, -6, 6);
  d.box2d = Box2D{gt.box2d->xmin + shift.x(), gt.box2d->ymin + shift.y(), gt.box2d->xmax + shift.x(),
                  gt.box2d->ymax + shift.z()};
  if (d.box2d->xmax <= d.box2d->xmin + 1) d.box2d->xmax = d.box2d->xmin + 1;
  if (d.box2d->ymax <= d.box2d->ymin + 1) d.box2d->ymax = d.box2d->ymin + 1;
  d.score = std::round(test::uniform(g, 0, 1) * 10) / 10;
  return d;
}

bool passes(const ComponentErrors& e, const ThresholdTuple& t) {
  bool ok = true;
  if (t.box_iou) ok = ok && e.box_iou.has_value() && *e.box_iou > *t.box_iou;
  if (t.shape_iou) ok = ok && e.shape_iou > *t.shape_iou;
  if (t.rotation) ok = ok && e.rotation < *t.rotation;
  if (t.translation) ok = ok && e.translation < *t.translation;
  if (t.scale) ok = ok && e.scale < *t.scale;
  return ok;
}

// Straightforward re-derivation of the protocol: greedy per image, then one
// global ranking, then AP as the mean over ground truth of the best precision
// at or beyond each true positive's rank.
double ap_oracle(const std::vector<DetectionImage>& images, const ThresholdTuple& t) {
  struct Ranked {
    double score;
    std::size_t image, det;
    bool tp;
  };
  std::vector<Ranked> all;
  std::size_t n_gt = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& im = images[i];
    n_gt += im.ground_truth.size();
    std::vector<std::size_t> order(im.detections.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t a = 1; a < order.size(); ++a)  // insertion sort keeps ties stable
      for (std::size_t b = a; b > 0 && *im.detections[order[b]].score > *im.detections[order[b - 1]].score; --b)
        std::swap(order[b], order[b - 1]);
    std::vector<bool> used(im.ground_truth.size(), false);
    std::vector<bool> tp(im.detections.size(), false);
    for (std::size_t d : order) {
      int best = -1;
      double best_key = -1e300;
      for (std::size_t k = 0; k < im.ground_truth.size(); ++k) {
        if (used[k]) continue;
        const ComponentErrors e = component_errors(im.detections[d], im.ground_truth[k]);
        if (!passes(e, t)) continue;
        const double key = t.box_iou ? *e.box_iou : -e.translation;
        if (best < 0 || key > best_key) best = static_cast<int>(k), best_key = key;
      }
      if (best >= 0) used[static_cast<std::size_t>(best)] = true, tp[d] = true;
    }
    for (std::size_t d = 0; d < im.detections.size(); ++d) all.push_back({*im.detections[d].score, i, d, tp[d]});
  }
  for (std::size_t a = 1; a < all.size(); ++a)
    for (std::size_t b = a; b > 0 && all[b].score > all[b - 1].score; --b) std::swap(all[b], all[b - 1]);
  if (n_gt == 0) return 0.0;
  std::vector<double> prec(all.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < all.size(); ++k) prec[k] = static_cast<double>(tp += all[k].tp) / (k + 1);
  double ap = 0.0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (!all[k].tp) continue;
    double best = 0.0;
    for (std::size_t j = k; j < all.size(); ++j) best = std::max(best, prec[j]);
    ap += best / static_cast<double>(n_gt);
  }
  return ap;
}

}  // namespace

TEST_CASE("proposal assignment") {
  const std::vector<Box2D> gt{{0, 0, 10, 10}, {20, 20, 30, 30}};
  // Half-overlap: intersection 50, union 150, IoU 1/3 -> ignore band.
  const std::vector<Box2D> props{{0, 0, 10, 10}, {40, 40, 50, 50}, {5, 0, 15, 10}, {20, 20, 30, 28}};
  const auto labels = assign_proposals(props, gt);
  CHECK(labels[0].kind == ProposalKind::foreground);
  CHECK(labels[0].gt == 0u);
  CHECK(labels[0].max_iou == 1.0);
  CHECK(labels[1].kind == ProposalKind::background);
  CHECK(labels[2].kind == ProposalKind::ignore);
  CHECK(labels[2].max_iou == doctest::Approx(1.0 / 3.0));
  CHECK(labels[3].kind == ProposalKind::foreground);
  CHECK(labels[3].gt == 1u);
  // IoU of exactly 0.5 falls in the ignore band.
  const std::vector<Box2D> half{{0, 0, 10, 10}};
  CHECK(assign_proposals(std::vector<Box2D>{{0, 0, 10, 5}}, half)[0].kind == ProposalKind::ignore);
  CHECK(assign_proposals(std::vector<Box2D>{{0, 0, 10, 5}}, half)[0].max_iou == 0.5);
  CHECK(assign_proposals(props, std::vector<Box2D>{})[0].kind == ProposalKind::background);
}

TEST_CASE("threshold tuples") {
  CHECK_NOTHROW(ThresholdTuple::defaults().validate());
  CHECK(*ThresholdTuple::defaults().rotation == doctest::Approx(std::numbers::pi / 6));
  ThresholdTuple t = ThresholdTuple::defaults();
  t.box_iou = 1.5;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t = ThresholdTuple::defaults();
  t.translation = -1;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  ComponentErrors e{0.3, 0.1, 0.5, 0.2, 0.6};
  CHECK(satisfies(e, ThresholdTuple::defaults()));
  e.box_iou = 0.5;  // strict
  CHECK_FALSE(satisfies(e, ThresholdTuple::defaults()));
  e.box_iou.reset();
  CHECK_FALSE(satisfies(e, ThresholdTuple::defaults()));
  CHECK(satisfies(e, ThresholdTuple{std::nullopt, 0.25, 1.0, 1.0, 0.5}));
}

TEST_CASE("average precision by hand") {
  // TP, FP, TP with two ground truths: 0.5 * 1 + 0.5 * 2/3.
  const std::vector<double> p{1.0, 0.5, 2.0 / 3.0}, r{0.5, 0.5, 1.0};
  CHECK(average_precision(p, r) == doctest::Approx(0.5 + 1.0 / 3.0));
  // FP, TP, TP: the envelope carries the final precision 2/3 back over both recall steps.
  const std::vector<double> p2{0.0, 0.5, 2.0 / 3.0}, r2{0.0, 0.5, 1.0};
  CHECK(average_precision(p2, r2) == doctest::Approx(2.0 / 3.0));
  CHECK(average_precision(std::vector<double>{}, std::vector<double>{}) == 0.0);
}

TEST_CASE("perfect detections score AP 1 on every relaxation row") {
  auto& g = rng(71);
  const auto bank = shape_bank();
  std::vector<DetectionImage> images(5);
  for (auto& im : images)
    for (int k = 0; k < 3; ++k) im.ground_truth.push_back(random_object(g, bank));
  for (auto& im : images) im.detections = im.ground_truth;
  for (const ApRow& row : ap_sweep(images, ThresholdTuple::defaults())) CHECK(row.ap == 1.0);
  CHECK(ap_sweep(images, ThresholdTuple::defaults()).size() == 12);
}

TEST_CASE("no ground truth gives AP 0") {
  auto& g = rng(72);
  const auto bank = shape_bank();
  std::vector<DetectionImage> images(1);
  images[0].detections.push_back(random_object(g, bank));
  CHECK(evaluate_dataset(images, ThresholdTuple::defaults()).ap == 0.0);
  images[0].detections[0].score.reset();
  CHECK_THROWS_AS(evaluate_dataset(images, ThresholdTuple::defaults()), ValidationError);
}

TEST_CASE("matching and AP agree with a brute-force re-derivation") {
  auto& g = rng(73);
  const auto bank = shape_bank();
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<DetectionImage> images(1 + static_cast<int>(test::uniform(g, 0, 4)));
    for (auto& im : images) {
      const int n = static_cast<int>(test::uniform(g, 0, 4));
      for (int k = 0; k < n; ++k) im.ground_truth.push_back(random_object(g, bank));
      for (const auto& gt : im.ground_truth)
        for (int c = 0; c < 2; ++c)
          if (test::uniform(g, 0, 1) < 0.7) im.detections.push_back(perturbed(g, gt));
      if (test::uniform(g, 0, 1) < 0.3) im.detections.push_back(random_object(g, bank));
    }
    for (const ApRow& row : ap_sweep(images, ThresholdTuple::defaults()))
      CHECK(std::abs(row.ap - ap_oracle(images, row.thresholds)) < 1e-12);
  }
}

TEST_CASE("greedy matching prefers the highest box IoU") {
  auto& g = rng(74);
  const auto bank = shape_bank();
  SceneObject a = random_object(g, bank), b = a;
  a.box2d = Box2D{0, 0, 10, 10};
  b.box2d = Box2D{1, 0, 11, 10};
  SceneObject det = a;
  det.box2d = Box2D{0.5, 0, 10.5, 10};
  det.score = 0.9;
  std::vector<SceneObject> gts{b, a};
  // Both qualify with equal IoU; the tie goes to the first.
  EvalOutcome o = evaluate_detections(std::span(&det, 1), gts, ThresholdTuple::defaults());
  CHECK(o.matches[0].gt == 0u);
  det.box2d = Box2D{0.2, 0, 10.2, 10};
  o = evaluate_detections(std::span(&det, 1), gts, ThresholdTuple::defaults());
  CHECK(o.matches[0].gt == 1u);
  CHECK(o.recall.back() == 0.5);
}

TEST_CASE("per-class matching") {
  auto& g = rng(75);
  const auto bank = shape_bank();
  SceneObject gt = random_object(g, bank);
  gt.label = ObjectClass::chair;
  SceneObject det = gt;
  det.label = ObjectClass::table;
  CHECK(evaluate_detections(std::span(&det, 1), std::span(&gt, 1), ThresholdTuple::defaults()).ap == 1.0);
  CHECK(evaluate_detections(std::span(&det, 1), std::span(&gt, 1), ThresholdTuple::defaults(), {kDefaultTau, true})
            .ap == 0.0);
}

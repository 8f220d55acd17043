#include "f3d/detection.hpp"

#include "f3d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace f3d {

ThresholdTuple ThresholdTuple::defaults() {
  return {DefaultThresholds::box_iou, DefaultThresholds::shape_iou, DefaultThresholds::rotation,
          DefaultThresholds::translation, DefaultThresholds::scale};
}

void ThresholdTuple::validate() const {
  auto check_iou = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0 && *v <= 1.0)) throw ValidationError(std::string(name) + " threshold must lie in (0, 1]");
  };
  auto check_positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) throw ValidationError(std::string(name) + " threshold must be positive");
  };
  check_iou(box_iou, "box");
  check_iou(shape_iou, "shape");
  check_positive(rotation, "rotation");
  check_positive(translation, "translation");
  check_positive(scale, "scale");
}

std::vector<ProposalLabel> assign_proposals(std::span<const Box2D> proposals, std::span<const Box2D> gt_boxes,
                                            const ProposalThresholds& thresholds) {
  std::vector<ProposalLabel> out;
  out.reserve(proposals.size());
  for (const Box2D& p : proposals) {
    ProposalLabel label;
    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
      const double iou = box_iou(p, gt_boxes[g]);
      if (!best || iou > label.max_iou) {
        best = g;
        label.max_iou = iou;
      }
    }
    if (best && label.max_iou > thresholds.foreground) {
      label.kind = ProposalKind::foreground;
      label.gt = best;
    } else if (label.max_iou < thresholds.background) {
      label.kind = ProposalKind::background;
    } else {
      label.kind = ProposalKind::ignore;
    }
    out.push_back(label);
  }
  return out;
}

bool satisfies(const ComponentErrors& e, const ThresholdTuple& t) {
  if (t.box_iou && !(e.box_iou && *e.box_iou > *t.box_iou)) return false;
  if (t.shape_iou && !(e.shape_iou > *t.shape_iou)) return false;
  if (t.rotation && !(e.rotation < *t.rotation)) return false;
  if (t.translation && !(e.translation < *t.translation)) return false;
  if (t.scale && !(e.scale < *t.scale)) return false;
  return true;
}

namespace {

// Errors restricted to what the tuple or the match preference actually reads.
ComponentErrors needed_errors(const SceneObject& det, const SceneObject& gt, const ThresholdTuple& t, double tau) {
  ComponentErrors e;
  if (t.shape_iou) e.shape_iou = voxel_iou(det.shape, gt.shape, tau);
  if (t.rotation) e.rotation = rotation_geodesic(det.pose.rotation(), gt.pose.rotation());
  e.translation = translation_error(det.pose.translation(), gt.pose.translation());
  if (t.scale) e.scale = scale_error(det.pose.scale(), gt.pose.scale());
  if (det.box2d && gt.box2d) e.box_iou = box_iou(*det.box2d, *gt.box2d);
  return e;
}

std::vector<DetectionMatch> match_image(std::size_t image_index, const DetectionImage& image,
                                        const ThresholdTuple& t, const EvalOptions& options) {
  const auto& dets = image.detections;
  const auto& gts = image.ground_truth;
  for (const auto& d : dets) {
    if (!d.score || !std::isfinite(*d.score)) throw ValidationError("detections must carry a finite score");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return *dets[a].score > *dets[b].score; });

  std::vector<bool> taken(gts.size(), false);
  std::vector<DetectionMatch> out(dets.size());
  for (std::size_t d : order) {
    DetectionMatch m{image_index, d, *dets[d].score, false, std::nullopt};
    double best_key = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      if (options.per_class && dets[d].label != gts[g].label) continue;
      const ComponentErrors e = needed_errors(dets[d], gts[g], t, options.tau);
      if (!satisfies(e, t)) continue;
      // Larger key is better.
      const double key = t.box_iou ? *e.box_iou : -e.translation;
      if (!m.gt || key > best_key) {
        m.gt = g;
        best_key = key;
      }
    }
    if (m.gt) {
      taken[*m.gt] = true;
      m.true_positive = true;
    }
    out[d] = m;
  }
  return out;
}

}  // namespace

double average_precision(std::span<const double> precision, std::span<const double> recall) {
  if (precision.size() != recall.size()) throw ValidationError("precision and recall differ in length");
  std::vector<double> envelope(precision.begin(), precision.end());
  for (std::size_t i = envelope.size(); i-- > 1;) envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - prev_recall) * envelope[i];
    prev_recall = recall[i];
  }
  return ap;
}

EvalOutcome evaluate_dataset(std::span<const DetectionImage> images, const ThresholdTuple& thresholds,
                             const EvalOptions& options) {
  thresholds.validate();
  EvalOutcome out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    auto matches = match_image(i, images[i], thresholds, options);
    out.matches.insert(out.matches.end(), matches.begin(), matches.end());
    out.num_ground_truth += images[i].ground_truth.size();
  }
  std::stable_sort(out.matches.begin(), out.matches.end(),
                   [](const DetectionMatch& a, const DetectionMatch& b) { return a.score > b.score; });
  std::size_t tp = 0;
  for (std::size_t k = 0; k < out.matches.size(); ++k) {
    tp += out.matches[k].true_positive;
    out.precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    out.recall.push_back(out.num_ground_truth == 0 ? 0.0
                                                   : static_cast<double>(tp) / static_cast<double>(out.num_ground_truth));
  }
  out.ap = out.num_ground_truth == 0 ? 0.0 : average_precision(out.precision, out.recall);
  return out;
}

EvalOutcome evaluate_detections(std::span<const SceneObject> detections, std::span<const SceneObject> ground_truth,
                                const ThresholdTuple& thresholds, const EvalOptions& options) {
  const DetectionImage image{{detections.begin(), detections.end()}, {ground_truth.begin(), ground_truth.end()}};
  return evaluate_dataset(std::span(&image, 1), thresholds, options);
}

std::vector<ApRow> ap_sweep(std::span<const DetectionImage> images, const ThresholdTuple& base,
                            const EvalOptions& options) {
  using Field = std::optional<double> ThresholdTuple::*;
  const std::pair<const char*, Field> fields[] = {{"shape", &ThresholdTuple::shape_iou},
                                                  {"rot", &ThresholdTuple::rotation},
                                                  {"trans", &ThresholdTuple::translation},
                                                  {"scale", &ThresholdTuple::scale},
                                                  {"box2d", &ThresholdTuple::box_iou}};
  std::vector<std::pair<std::string, ThresholdTuple>> rows;
  rows.emplace_back("all", base);
  for (const auto& [name, field] : fields) {
    ThresholdTuple t = base;
    t.*field = std::nullopt;
    rows.emplace_back(std::string("all-") + name, t);
  }
  const ThresholdTuple box_only{base.box_iou, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  rows.emplace_back("box2d", box_only);
  for (const auto& [name, field] : fields) {
    if (field == &ThresholdTuple::box_iou) continue;
    ThresholdTuple t = box_only;
    t.*field = base.*field;
    rows.emplace_back(std::string("box2d+") + name, t);
  }
  ThresholdTuple rot_shape = box_only;
  rot_shape.rotation = base.rotation;
  rot_shape.shape_iou = base.shape_iou;
  rows.emplace_back("box2d+rot+shape", rot_shape);
  std::vector<ApRow> out;
  for (auto& [name, t] : rows) out.push_back({name, t, evaluate_dataset(images, t, options).ap});
  return out;
}

}  // namespace f3d

#include "f3d/losses.hpp"

#include "f3d/errors.hpp"
#include "f3d/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace f3d {

namespace {

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ValidationError(std::string(what) + ": prediction and target differ in size");
}

double clamp_prob(double p) { return std::clamp(p, kLogEpsilon, 1.0 - kLogEpsilon); }
bool clamp_active(double p) { return p <= kLogEpsilon || p >= 1.0 - kLogEpsilon; }

std::vector<double> to_doubles(std::span<const float> v) { return {v.begin(), v.end()}; }

}  // namespace

BinDistribution::BinDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  if (p_.size() != static_cast<std::size_t>(kRotationBins)) throw ValidationError("bin distribution needs 24 entries");
  double total = 0.0;
  for (double p : p_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("bin probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("bin probabilities must sum to 1");
}

BinDistribution BinDistribution::uniform() {
  return BinDistribution(std::vector<double>(kRotationBins, 1.0 / kRotationBins));
}

LossValueGrad layout_l1(std::span<const double> pred, std::span<const double> gt) {
  check_same_size(pred.size(), gt.size(), "layout_l1");
  LossValueGrad out{0.0, std::vector<double>(pred.size(), 0.0)};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gt[i];
    out.value += std::abs(d);
    out.grad[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  return out;
}

LossValueGrad layout_l1(const Layout& pred, const Layout& gt) {
  if (pred.width != gt.width || pred.height != gt.height) throw ValidationError("layout_l1: layout dims differ");
  return layout_l1(pred.disparity, gt.disparity);
}

LossValueGrad voxel_bce(std::span<const double> pred, std::span<const double> gt) {
  check_same_size(pred.size(), gt.size(), "voxel_bce");
  if (pred.empty()) throw ValidationError("voxel_bce: empty grids");
  const double n = static_cast<double>(pred.size());
  LossValueGrad out{0.0, std::vector<double>(pred.size(), 0.0)};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double v = gt[i];
    if (v != 0.0 && v != 1.0) throw ValidationError("voxel_bce: ground truth must be binary");
    const double p = clamp_prob(pred[i]);
    out.value -= v * std::log(p) + (1.0 - v) * std::log(1.0 - p);
    if (!clamp_active(pred[i])) out.grad[i] = (-v / p + (1.0 - v) / (1.0 - p)) / n;
  }
  out.value /= n;
  return out;
}

LossValueGrad voxel_bce(const VoxelGrid& pred, const VoxelGrid& gt) {
  if (pred.dims() != gt.dims()) throw ValidationError("voxel_bce: grid dims differ");
  return voxel_bce(to_doubles(pred.occupancy()), to_doubles(gt.occupancy()));
}

LossValueGrad rot_class_nll(std::span<const double> probabilities, int k) {
  if (k < 0 || static_cast<std::size_t>(k) >= probabilities.size()) throw ValidationError("rotation bin out of range");
  LossValueGrad out{0.0, std::vector<double>(probabilities.size(), 0.0)};
  const double raw = probabilities[k];
  const double p = std::max(raw, kLogEpsilon);
  out.value = -std::log(p);
  if (raw > kLogEpsilon) out.grad[k] = -1.0 / p;
  return out;
}

LossValueGrad rot_class_nll(const BinDistribution& dist, int k) {
  if (k < 0 || k >= kRotationBins) throw ValidationError("rotation bin out of range");
  return rot_class_nll(dist.probabilities(), k);
}

LossValueGrad rot_regression(std::span<const double> pred_raw, const UnitQuaternion& gt) {
  if (pred_raw.size() != 4) throw ValidationError("rot_regression expects a 4-vector");
  const Eigen::Vector4d p(pred_raw[0], pred_raw[1], pred_raw[2], pred_raw[3]);
  const double norm = p.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("rot_regression: prediction must be nonzero");
  const Eigen::Vector4d n = p / norm;
  const Eigen::Vector4d g(gt.w(), gt.x(), gt.y(), gt.z());
  const Eigen::Vector4d minus = n - g;
  const Eigen::Vector4d plus = n + g;
  const Eigen::Vector4d e = minus.norm() <= plus.norm() ? minus : plus;
  const double value = e.norm();
  LossValueGrad out{value, std::vector<double>(4, 0.0)};
  if (value > 0.0) {
    // d|e|/dp = (I - n n^T) e / (|e| |p|)
    const Eigen::Vector4d grad = (e - n * n.dot(e)) / (value * norm);
    for (int i = 0; i < 4; ++i) out.grad[i] = grad[i];
  }
  return out;
}

std::pair<LossValueGrad, LossValueGrad> trans_scale_l2(const Vec3& pred_t, const Vec3& gt_t, const Vec3& pred_c,
                                                       const Vec3& gt_c) {
  if ((pred_c.array() <= 0.0).any() || (gt_c.array() <= 0.0).any()) throw ValidationError("scales must be positive");
  LossValueGrad lt{0.0, std::vector<double>(3)};
  LossValueGrad lc{0.0, std::vector<double>(3)};
  for (int i = 0; i < 3; ++i) {
    const double dt = pred_t[i] - gt_t[i];
    lt.value += dt * dt;
    lt.grad[i] = 2.0 * dt;
    const double dc = std::log(pred_c[i]) - std::log(gt_c[i]);
    lc.value += dc * dc;
    lc.grad[i] = 2.0 * dc / pred_c[i];
  }
  return {lt, lc};
}

LossValueGrad foreground_ce(double f, ProposalRole role) {
  if (!std::isfinite(f)) throw ValidationError("foreground probability must be finite");
  const double p = clamp_prob(f);
  const bool active = !clamp_active(f);
  if (role == ProposalRole::foreground) return {-std::log(p), {active ? -1.0 / p : 0.0}};
  return {-std::log(1.0 - p), {active ? 1.0 / (1.0 - p) : 0.0}};
}

LossValueGrad combined_objective(std::span<const ProposalTerms> proposals, const ObjectiveWeights& w) {
  LossValueGrad out;
  auto add = [&](const LossValueGrad& term, double weight) {
    out.value += weight * term.value;
    for (double g : term.grad) out.grad.push_back(weight * g);
  };
  for (const auto& p : proposals) {
    if (p.role == ProposalRole::foreground) {
      if (!p.shape || !p.rotation || !p.translation || !p.scale) {
        throw ValidationError("foreground proposals need shape, rotation, translation and scale terms");
      }
      add(*p.shape, w.shape);
      add(*p.rotation, w.rotation);
      add(*p.translation, w.translation);
      add(*p.scale, w.scale);
    } else if (p.shape || p.rotation || p.translation || p.scale) {
      throw ValidationError("background proposals carry only the foreground term");
    }
    add(p.foreground, w.foreground);
  }
  return out;
}

double finite_diff_check(const LossFunction& loss, std::span<const double> point, double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");
  const LossValueGrad base = loss(point);
  if (base.grad.size() != point.size()) throw ValidationError("gradient size does not match the point");
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = loss(x).value;
    x[i] = orig - step;
    const double down = loss(x).value;
    x[i] = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double analytic = base.grad[i];
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale < 1e-12) continue;
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  }
  return worst;
}

bool GradCheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const GradCheckEntry& e) { return e.passed; });
}

namespace {

UnitQuaternion random_quaternion(Rng& rng) {
  return UnitQuaternion::normalized(rng.normal(), rng.normal(), rng.normal(), rng.normal());
}

// Probability vector bounded away from zero.
std::vector<double> random_distribution(Rng& rng) {
  std::vector<double> p(kRotationBins);
  double total = 0.0;
  for (double& v : p) total += (v = rng.uniform(0.2, 1.0));
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> random_binary(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform() < 0.5 ? 0.0 : 1.0;
  return v;
}

std::vector<double> random_probs(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(0.05, 0.95);
  return v;
}

// Keeps a prediction away from its target so no gradient component is near
// zero, where relative error is ill-conditioned.
double away_from(Rng& rng, double target, double lo, double hi) {
  const double off = rng.uniform(lo, hi);
  return rng.uniform() < 0.5 ? target - off : target + off;
}

double log_away_from(Rng& rng, double target, double lo, double hi) {
  return target * std::exp(away_from(rng, 0.0, lo, hi));
}

Vec3 vec3(std::span<const double> x, std::size_t at) { return {x[at], x[at + 1], x[at + 2]}; }

// Per foreground proposal: voxels, bin probabilities, translation, scale, f.
constexpr std::size_t kVoxels = 8;
constexpr std::size_t kFgParams = kVoxels + kRotationBins + 3 + 3 + 1;

struct CombinedTargets {
  std::vector<std::vector<double>> voxels;
  std::vector<int> bins;
  std::vector<Vec3> t;
  std::vector<Vec3> c;
  int background = 0;
  ObjectiveWeights weights;
};

LossValueGrad combined_at(const CombinedTargets& tg, std::span<const double> x) {
  std::vector<ProposalTerms> terms;
  std::size_t at = 0;
  for (std::size_t p = 0; p < tg.voxels.size(); ++p) {
    ProposalTerms t;
    t.role = ProposalRole::foreground;
    t.shape = voxel_bce(x.subspan(at, kVoxels), tg.voxels[p]);
    t.rotation = rot_class_nll(x.subspan(at + kVoxels, kRotationBins), tg.bins[p]);
    auto [lt, lc] = trans_scale_l2(vec3(x, at + kVoxels + kRotationBins), tg.t[p],
                                   vec3(x, at + kVoxels + kRotationBins + 3), tg.c[p]);
    t.translation = lt;
    t.scale = lc;
    t.foreground = foreground_ce(x[at + kFgParams - 1], ProposalRole::foreground);
    terms.push_back(std::move(t));
    at += kFgParams;
  }
  for (int b = 0; b < tg.background; ++b) {
    ProposalTerms t;
    t.role = ProposalRole::background;
    t.foreground = foreground_ce(x[at++], ProposalRole::background);
    terms.push_back(std::move(t));
  }
  return combined_objective(terms, tg.weights);
}

}  // namespace

GradCheckReport run_gradient_suite(std::uint64_t seed, int points, double tolerance, double step) {
  if (points <= 0) throw ValidationError("gradient suite needs at least one point");
  Rng rng(seed);
  GradCheckReport report{seed, tolerance, step, {}};
  auto run = [&](const std::string& name, const std::function<double()>& one_point) {
    GradCheckEntry e{name, points, 0.0, false};
    for (int i = 0; i < points; ++i) e.max_rel_error = std::max(e.max_rel_error, one_point());
    e.passed = e.max_rel_error < tolerance;
    report.entries.push_back(e);
  };

  run("layout_l1", [&] {
    const auto gt = random_probs(rng, 64);
    std::vector<double> pred(64);
    // Keep every pixel at least 1e-3 away from the tie kink.
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double off = rng.uniform(1e-3, 0.5);
      pred[i] = gt[i] + (rng.uniform() < 0.5 ? -off : off);
    }
    return finite_diff_check([&](std::span<const double> x) { return layout_l1(x, gt); }, pred, step);
  });
  run("voxel_bce", [&] {
    const auto gt = random_binary(rng, 64);
    const auto pred = random_probs(rng, 64);
    return finite_diff_check([&](std::span<const double> x) { return voxel_bce(x, gt); }, pred, step);
  });
  run("rot_class_nll", [&] {
    const int k = rng.uniform_int(0, kRotationBins - 1);
    const auto p = random_distribution(rng);
    return finite_diff_check([&](std::span<const double> x) { return rot_class_nll(x, k); }, p, step);
  });
  run("rot_regression", [&] {
    const UnitQuaternion gt = random_quaternion(rng);
    std::vector<double> pred(4);
    double dot = 0.0;
    double dist = 0.0;
    do {
      const UnitQuaternion dir = random_quaternion(rng);
      const double mag = rng.uniform(0.5, 2.0);
      pred = {dir.w() * mag, dir.x() * mag, dir.y() * mag, dir.z() * mag};
      dot = dir.dot(gt);
      dist = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(dot)));
    } while (std::abs(dot) < 1e-2 || dist < 1e-2);  // avoid the sign switch and the zero kink
    return finite_diff_check([&](std::span<const double> x) { return rot_regression(x, gt); }, pred, step);
  });
  run("trans_l2", [&] {
    const Vec3 gt(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0, 6));
    const std::vector<double> pred{away_from(rng, gt.x(), 0.05, 2), away_from(rng, gt.y(), 0.05, 2),
                                   away_from(rng, gt.z(), 0.05, 2)};
    return finite_diff_check(
        [&](std::span<const double> x) { return trans_scale_l2(vec3(x, 0), gt, Vec3::Ones(), Vec3::Ones()).first; },
        pred, step);
  });
  run("scale_log_l2", [&] {
    const Vec3 gt(rng.uniform(0.2, 3), rng.uniform(0.2, 3), rng.uniform(0.2, 3));
    const std::vector<double> pred{log_away_from(rng, gt.x(), 0.05, 1), log_away_from(rng, gt.y(), 0.05, 1),
                                   log_away_from(rng, gt.z(), 0.05, 1)};
    return finite_diff_check(
        [&](std::span<const double> x) { return trans_scale_l2(Vec3::Zero(), Vec3::Zero(), vec3(x, 0), gt).second; },
        pred, step);
  });
  run("foreground_ce", [&] {
    const ProposalRole role = rng.uniform() < 0.5 ? ProposalRole::foreground : ProposalRole::background;
    const std::vector<double> f{rng.uniform(0.05, 0.95)};
    return finite_diff_check([&](std::span<const double> x) { return foreground_ce(x[0], role); }, f, step);
  });
  run("combined_objective", [&] {
    CombinedTargets tg;
    const int fg = rng.uniform_int(1, 3);
    tg.background = rng.uniform_int(0, 3);
    tg.weights = {rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2),
                  rng.uniform(0.5, 2)};
    std::vector<double> x;
    for (int p = 0; p < fg; ++p) {
      tg.voxels.push_back(random_binary(rng, kVoxels));
      tg.bins.push_back(rng.uniform_int(0, kRotationBins - 1));
      tg.t.emplace_back(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 5));
      tg.c.emplace_back(rng.uniform(0.3, 2), rng.uniform(0.3, 2), rng.uniform(0.3, 2));
      for (double v : random_probs(rng, kVoxels)) x.push_back(v);
      for (double v : random_distribution(rng)) x.push_back(v);
      for (int i = 0; i < 3; ++i) x.push_back(away_from(rng, tg.t.back()[i], 0.05, 2));
      for (int i = 0; i < 3; ++i) x.push_back(log_away_from(rng, tg.c.back()[i], 0.05, 0.7));
      x.push_back(rng.uniform(0.05, 0.95));
    }
    for (int b = 0; b < tg.background; ++b) x.push_back(rng.uniform(0.05, 0.95));
    return finite_diff_check([&](std::span<const double> v) { return combined_at(tg, v); }, x, step);
  });
  return report;
}

}  // namespace f3d

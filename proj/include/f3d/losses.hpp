#pragma once

// Training objectives as pure value-and-gradient kernels, plus a central
// finite-difference harness that checks their analytic gradients.

#include "f3d/geometry.hpp"
#include "f3d/scene.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace f3d {

/// Clamp applied before every logarithm.
inline constexpr double kLogEpsilon = 1e-7;
inline constexpr int kRotationBins = 24;

struct LossValueGrad {
  double value = 0.0;
  /// Gradient with respect to the prediction argument, same layout.
  std::vector<double> grad;
};

/// Probabilities over the rotation bins: non-negative, summing to 1 within 1e-9.
class BinDistribution {
 public:
  explicit BinDistribution(std::vector<double> probabilities);
  static BinDistribution uniform();
  std::span<const double> probabilities() const { return p_; }

 private:
  std::vector<double> p_;
};

/// Sum of absolute differences. Subgradient 0 at exact ties.
LossValueGrad layout_l1(std::span<const double> pred, std::span<const double> gt);
LossValueGrad layout_l1(const Layout& pred, const Layout& gt);

/// -(1/N) sum [v log p + (1 - v) log(1 - p)] with p clamped to [eps, 1 - eps];
/// gradient is zero where the clamp is active. Ground truth must be 0 or 1.
LossValueGrad voxel_bce(std::span<const double> pred, std::span<const double> gt);
LossValueGrad voxel_bce(const VoxelGrid& pred, const VoxelGrid& gt);

/// -log p[k] on raw probabilities, no normalization check.
LossValueGrad rot_class_nll(std::span<const double> probabilities, int k);
LossValueGrad rot_class_nll(const BinDistribution& dist, int k);

/// min(|n - q|, |n + q|) for n = pred_raw / |pred_raw|. Gradient passes
/// through the normalization and is 0 at an exact match.
LossValueGrad rot_regression(std::span<const double> pred_raw, const UnitQuaternion& gt);

/// |t_pred - t_gt|^2 and |ln c_pred - ln c_gt|^2.
std::pair<LossValueGrad, LossValueGrad> trans_scale_l2(const Vec3& pred_t, const Vec3& gt_t, const Vec3& pred_c,
                                                       const Vec3& gt_c);

enum class ProposalRole { foreground, background };

/// -ln f for foreground, -ln(1 - f) for background, f clamped to [eps, 1 - eps].
LossValueGrad foreground_ce(double f, ProposalRole role);

/// Loss terms of one proposal. Background proposals contribute only the
/// foreground term; foreground proposals must carry all five.
struct ProposalTerms {
  ProposalRole role = ProposalRole::foreground;
  std::optional<LossValueGrad> shape;
  std::optional<LossValueGrad> rotation;
  std::optional<LossValueGrad> translation;
  std::optional<LossValueGrad> scale;
  LossValueGrad foreground;
};

struct ObjectiveWeights {
  double shape = 1.0;
  double rotation = 1.0;
  double translation = 1.0;
  double scale = 1.0;
  double foreground = 1.0;
};

/// Weighted sum over proposals. The gradient concatenates, per proposal in
/// order, the weighted shape, rotation, translation, scale and foreground
/// gradients (background proposals: foreground only).
LossValueGrad combined_objective(std::span<const ProposalTerms> proposals, const ObjectiveWeights& weights = {});

using LossFunction = std::function<LossValueGrad(std::span<const double>)>;

/// Largest componentwise relative error |a - n| / max(|a|, |n|) between the
/// analytic gradient a and central differences n with the given step.
/// Components where both are below 1e-12 count as exact.
double finite_diff_check(const LossFunction& loss, std::span<const double> point, double step = 1e-6);

struct GradCheckEntry {
  std::string kernel;
  int points = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradCheckReport {
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double step = 0.0;
  std::vector<GradCheckEntry> entries;
  bool passed() const;
};

/// Runs every kernel at `points` seeded random points away from their kinks.
GradCheckReport run_gradient_suite(std::uint64_t seed, int points = 100, double tolerance = 1e-5,
                                   double step = 1e-6);

}  // namespace f3d

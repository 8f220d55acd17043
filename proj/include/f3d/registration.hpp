#pragma once

// Exact nearest-neighbor search, least-squares rigid fitting and
// point-to-point ICP with size-normalized fitness.

#include "f3d/geometry.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace f3d {

/// Static kd-tree over a copy of the points. Queries are exact; among
/// equidistant points the lowest index wins.
class NearestNeighborIndex {
 public:
  /// Throws ValidationError for an empty point set.
  explicit NearestNeighborIndex(std::span<const Vec3> points);

  struct Hit {
    std::size_t index = 0;
    double distance = 0.0;
  };

  Hit nearest(const Vec3& query) const;
  const std::vector<Vec3>& points() const { return points_; }

 private:
  struct Node {
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    int left = -1;
    int right = -1;
    std::size_t begin = 0;  // leaf range into order_
    std::size_t end = 0;
  };

  int build(std::size_t begin, std::size_t end);
  void search(int node, const Vec3& q, std::size_t& best, double& best_d2) const;

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  /// (*this * o) applies o first.
  RigidTransform operator*(const RigidTransform& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }
  RigidTransform inverse() const { return {rotation.transpose(), -(rotation.transpose() * translation)}; }
};

/// Rotation angle of a rotation matrix, in [0, pi].
double rotation_angle(const Mat3& r);

/// Rigid transform minimizing sum |R src[i] + t - dst[j]|^2 over the pairs
/// (i, j), with reflections excluded. Throws DegenerateAlignment when fewer
/// than three pairs are given or the pairs are collinear or coincident.
RigidTransform kabsch_align(std::span<const Vec3> src, std::span<const Vec3> dst,
                            std::span<const std::pair<std::size_t, std::size_t>> pairs);

struct IcpConfig {
  int max_iterations = 50;
  /// Stop once an iteration improves fitness by less than this fraction.
  double rel_tol = 1e-6;
};

struct IcpResult {
  RigidTransform transform;
  /// Mean squared distance from transformed src to nearest dst, over size_norm^2.
  double fitness = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Fitness at identity followed by each accepted iteration.
  std::vector<double> fitness_history;
};

/// Aligns src onto dst starting from the identity. `size_norm` is the object
/// size used to normalize the fitness, conventionally the diagonal of the
/// ground-truth object's bounding box.
IcpResult icp(std::span<const Vec3> src, std::span<const Vec3> dst, double size_norm, const IcpConfig& config = {});

/// Length of the diagonal of the points' axis-aligned bounding box.
double bounding_box_diagonal(std::span<const Vec3> points);

}  // namespace f3d

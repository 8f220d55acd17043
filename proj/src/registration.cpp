#include "f3d/registration.hpp"

#include "f3d/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace f3d {

namespace {

constexpr std::size_t kLeafSize = 8;

}  // namespace

NearestNeighborIndex::NearestNeighborIndex(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) throw ValidationError("nearest-neighbor index needs at least one point");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  build(0, order_.size());
}

int NearestNeighborIndex::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::size_t n = begin; n < end; ++n) {
    lo = lo.cwiseMin(points_[order_[n]]);
    hi = hi.cwiseMax(points_[order_[n]]);
  }
  int axis;
  (hi - lo).maxCoeff(&axis);
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void NearestNeighborIndex::search(int node_id, const Vec3& q, std::size_t& best, double& best_d2) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t n = node.begin; n < node.end; ++n) {
      const std::size_t idx = order_[n];
      const double d2 = (points_[idx] - q).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[node.axis] - node.split;
  const int first = diff <= 0.0 ? node.left : node.right;
  const int second = diff <= 0.0 ? node.right : node.left;
  search(first, q, best, best_d2);
  // Equality keeps the far side so equidistant lower indices are still found.
  if (diff * diff <= best_d2) search(second, q, best, best_d2);
}

NearestNeighborIndex::Hit NearestNeighborIndex::nearest(const Vec3& query) const {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_d2 = std::numeric_limits<double>::infinity();
  search(0, query, best, best_d2);
  return {best, std::sqrt(best_d2)};
}

double rotation_angle(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

RigidTransform kabsch_align(std::span<const Vec3> src, std::span<const Vec3> dst,
                            std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  if (pairs.size() < 3) throw DegenerateAlignment("rigid alignment needs at least three correspondences");
  Vec3 cs = Vec3::Zero(), cd = Vec3::Zero();
  for (const auto& [i, j] : pairs) {
    cs += src[i];
    cd += dst[j];
  }
  cs /= static_cast<double>(pairs.size());
  cd /= static_cast<double>(pairs.size());
  Mat3 h = Mat3::Zero();
  Mat3 scatter = Mat3::Zero();
  for (const auto& [i, j] : pairs) {
    const Vec3 a = src[i] - cs;
    h += a * (dst[j] - cd).transpose();
    scatter += a * a.transpose();
  }
  // Rank < 2 on the source side leaves the rotation about the line undetermined.
  const Eigen::Vector3d spread = Eigen::JacobiSVD<Mat3>(scatter).singularValues();
  if (!(spread(0) > 0.0) || spread(1) <= 1e-12 * spread(0)) {
    throw DegenerateAlignment("correspondences are collinear or coincident");
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 fix = Mat3::Identity();
  fix(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform out;
  out.rotation = v * fix * u.transpose();
  out.translation = cd - out.rotation * cs;
  return out;
}

namespace {

struct Correspondences {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double mean_sq = 0.0;
};

Correspondences correspond(std::span<const Vec3> src, const RigidTransform& t, const NearestNeighborIndex& index) {
  Correspondences c;
  c.pairs.reserve(src.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto hit = index.nearest(t.apply(src[i]));
    c.pairs.emplace_back(i, hit.index);
    acc += hit.distance * hit.distance;
  }
  c.mean_sq = acc / static_cast<double>(src.size());
  return c;
}

}  // namespace

IcpResult icp(std::span<const Vec3> src, std::span<const Vec3> dst, double size_norm, const IcpConfig& config) {
  if (src.empty() || dst.empty()) throw ValidationError("icp needs non-empty clouds");
  if (!(size_norm > 0.0) || !std::isfinite(size_norm)) throw ValidationError("icp size_norm must be positive");
  if (config.max_iterations < 0 || !(config.rel_tol >= 0.0)) throw ValidationError("invalid icp configuration");

  const NearestNeighborIndex index(dst);
  const double norm2 = size_norm * size_norm;
  IcpResult result;
  Correspondences current = correspond(src, result.transform, index);
  result.fitness = current.mean_sq / norm2;
  result.fitness_history.push_back(result.fitness);

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    if (current.mean_sq == 0.0) {
      result.converged = true;
      break;
    }
    RigidTransform next;
    try {
      next = kabsch_align(src, dst, current.pairs);
    } catch (const DegenerateAlignment&) {
      result.converged = false;
      return result;
    }
    Correspondences updated = correspond(src, next, index);
    const double fitness = updated.mean_sq / norm2;
    if (fitness > result.fitness) {
      // Round-off can only make a converged solution wobble upward.
      result.converged = true;
      break;
    }
    const double improvement = result.fitness - fitness;
    result.transform = next;
    result.fitness = fitness;
    result.fitness_history.push_back(fitness);
    result.iterations = iter + 1;
    current = std::move(updated);
    if (improvement <= config.rel_tol * result.fitness_history[result.fitness_history.size() - 2]) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double bounding_box_diagonal(std::span<const Vec3> points) {
  if (points.empty()) return 0.0;
  Vec3 lo = points.front(), hi = points.front();
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

}  // namespace f3d

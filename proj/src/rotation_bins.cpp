#include "f3d/rotation_bins.hpp"

#include "f3d/errors.hpp"
#include "f3d/random.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace f3d {

namespace {

using Vec4 = Eigen::Vector4d;

Vec4 as_vec(const UnitQuaternion& q) { return {q.w(), q.x(), q.y(), q.z()}; }

double sq_distance(const Vec4& a, const Vec4& b) { return std::min((a - b).squaredNorm(), (a + b).squaredNorm()); }

struct WeightedSamples {
  std::vector<Vec4> points;
  std::vector<double> weights;
};

// Merges exact duplicates (either sign), keeping first-occurrence order.
WeightedSamples merge_duplicates(std::span<const UnitQuaternion> samples) {
  WeightedSamples out;
  for (const auto& q : samples) {
    Vec4 v = as_vec(q);
    // Canonical sign: first nonzero component positive.
    for (int i = 0; i < 4; ++i) {
      if (v[i] != 0.0) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    auto it = std::find(out.points.begin(), out.points.end(), v);
    if (it == out.points.end()) {
      out.points.push_back(v);
      out.weights.push_back(1.0);
    } else {
      out.weights[static_cast<std::size_t>(it - out.points.begin())] += 1.0;
    }
  }
  return out;
}

int nearest(const Vec4& p, const std::vector<Vec4>& centers) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = sq_distance(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

double total_inertia(const WeightedSamples& s, const std::vector<Vec4>& centers, const std::vector<int>& assign) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.points.size(); ++i) acc += s.weights[i] * sq_distance(s.points[i], centers[assign[i]]);
  return acc;
}

}  // namespace

double antipodal_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  return std::sqrt(sq_distance(as_vec(a), as_vec(b)));
}

BinSet cluster_quaternions(std::span<const UnitQuaternion> samples, std::uint64_t seed, const ClusterOptions& options) {
  const int k = options.bins;
  if (k <= 0) throw ValidationError("bin count must be positive");
  if (samples.size() < static_cast<std::size_t>(k)) throw ValidationError("fewer samples than bins");
  if (options.max_iterations < 0) throw ValidationError("max_iterations must be non-negative");

  const WeightedSamples s = merge_duplicates(samples);
  const std::size_t n = s.points.size();
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<Vec4> centers;
  centers.push_back(s.points[rng.weighted_index(s.weights)]);
  std::vector<double> d2(n);
  while (centers.size() < static_cast<std::size_t>(k)) {
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = sq_distance(s.points[i], centers[nearest(s.points[i], centers)]);
      w[i] = s.weights[i] * d2[i];
      total += w[i];
    }
    // Fewer distinct samples than bins: the extra centers repeat existing samples.
    if (!(total > 0.0)) w = s.weights;
    centers.push_back(s.points[rng.weighted_index(w)]);
  }

  std::vector<int> assign(n);
  for (std::size_t i = 0; i < n; ++i) assign[i] = nearest(s.points[i], centers);

  BinSet out;
  out.seed = seed;
  out.inertia_history.push_back(total_inertia(s, centers, assign));

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<Vec4> sums(k, Vec4::Zero());
    std::vector<double> mass(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec4& c = centers[assign[i]];
      const Vec4& p = s.points[i];
      sums[assign[i]] += s.weights[i] * (p.dot(c) >= 0.0 ? p : Vec4(-p));
      mass[assign[i]] += s.weights[i];
    }
    for (int c = 0; c < k; ++c) {
      if (mass[c] > 0.0 && sums[c].norm() > 0.0) {
        centers[c] = sums[c].normalized();
        continue;
      }
      // Empty (or cancelled) cluster: move it onto the worst-fit sample.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = sq_distance(s.points[i], centers[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers[c] = s.points[far];
      assign[far] = c;
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = nearest(s.points[i], centers);
      changed = changed || a != assign[i];
      assign[i] = a;
    }
    out.inertia_history.push_back(total_inertia(s, centers, assign));
    out.iterations = iter + 1;
    if (!changed) break;
  }

  out.inertia = out.inertia_history.back();
  for (const Vec4& c : centers) out.representatives.push_back(UnitQuaternion::normalized(c[0], c[1], c[2], c[3]));
  return out;
}

int assign_bin(const UnitQuaternion& q, const BinSet& bins) {
  if (bins.representatives.empty()) throw ValidationError("empty bin set");
  std::vector<Vec4> centers;
  for (const auto& r : bins.representatives) centers.push_back(as_vec(r));
  return nearest(as_vec(q), centers);
}

double min_inter_bin_angle(const BinSet& bins) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < bins.representatives.size(); ++a)
    for (std::size_t b = a + 1; b < bins.representatives.size(); ++b)
      best = std::min(best, rotation_geodesic(bins.representatives[a], bins.representatives[b]));
  return best;
}

}  // namespace f3d

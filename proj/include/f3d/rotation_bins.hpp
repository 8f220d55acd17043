#pragma once

// Quantization of rotations into K bins by k-means on unit quaternions under
// the sign-folded chordal distance min(|a - b|, |a + b|).

#include "f3d/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace f3d {

inline constexpr int kDefaultBinCount = 24;

/// min(|a - b|, |a + b|).
double antipodal_distance(const UnitQuaternion& a, const UnitQuaternion& b);

struct BinSet {
  std::vector<UnitQuaternion> representatives;
  std::uint64_t seed = 0;
  /// Sum of squared distances from each training sample to its representative.
  double inertia = 0.0;
  /// Inertia after seeding and after each Lloyd iteration.
  std::vector<double> inertia_history;
  int iterations = 0;
};

struct ClusterOptions {
  int bins = kDefaultBinCount;
  int max_iterations = 100;
};

/// k-means++ seeding and Lloyd iterations under the antipodal distance. Each
/// sample is sign-flipped toward its centroid before averaging and centroids
/// are renormalized. A cluster that empties is reseeded at the sample farthest
/// from its representative. Stops when assignments no longer change.
/// Exact duplicate samples (up to sign) are merged into weights, so
/// duplicating the input does not change the representatives.
BinSet cluster_quaternions(std::span<const UnitQuaternion> samples, std::uint64_t seed,
                           const ClusterOptions& options = {});

/// Nearest representative; ties go to the lowest index.
int assign_bin(const UnitQuaternion& q, const BinSet& bins);

/// Smallest geodesic angle between two representatives.
double min_inter_bin_angle(const BinSet& bins);

}  // namespace f3d

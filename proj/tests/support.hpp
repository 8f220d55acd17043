#pragma once

// Test-only helpers. Oracles here deliberately avoid the library code they check.

#include "f3d/geometry.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace f3d::test {

inline std::mt19937_64& rng(std::uint64_t seed = 0) {
  static std::mt19937_64 gen;
  if (seed) gen.seed(seed);
  return gen;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline UnitQuaternion random_quaternion(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  return UnitQuaternion::normalized(n(g), n(g), n(g), n(g));
}

inline Vec3 random_vec(std::mt19937_64& g, double lo, double hi) {
  return {uniform(g, lo, hi), uniform(g, lo, hi), uniform(g, lo, hi)};
}

/// Rotation matrix written out from the quaternion components.
inline Mat3 matrix_oracle(double w, double x, double y, double z) {
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),  //
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),   //
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Magnitude of log(R_a^T R_b): atan2 of the skew part's norm against the trace.
inline double geodesic_oracle(const Mat3& a, const Mat3& b) {
  const Mat3 r = a.transpose() * b;
  const Vec3 skew(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(skew.norm() / 2.0, (r.trace() - 1.0) / 2.0);
}

/// Rodrigues' formula.
inline Mat3 rodrigues(Vec3 axis, double angle) {
  axis.normalize();
  Mat3 k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Mat3::Identity() + std::sin(angle) * k + (1 - std::cos(angle)) * k * k;
}

/// Regular grid of roughly `spacing` on each face of an axis-aligned box centered at the origin.
inline std::vector<Vec3> box_surface(const Vec3& size, double spacing) {
  std::vector<Vec3> pts;
  for (int axis = 0; axis < 3; ++axis)
    for (int side : {-1, 1}) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      const int nu = std::max(1, static_cast<int>(std::lround(size[u] / spacing)));
      const int nv = std::max(1, static_cast<int>(std::lround(size[v] / spacing)));
      for (int a = 0; a < nu; ++a)
        for (int b = 0; b < nv; ++b) {
          Vec3 p;
          p[axis] = side * size[axis] / 2;
          p[u] = (-0.5 + (a + 0.5) / nu) * size[u];
          p[v] = (-0.5 + (b + 0.5) / nv) * size[v];
          pts.push_back(p);
        }
    }
  return pts;
}

/// Area-uniform random points on the same box surface. Sampling independently
/// of the regular grid avoids the lattice-aligned local minima that identical
/// samplings create for point-to-point ICP.
inline std::vector<Vec3> random_box_surface(std::mt19937_64& g, const Vec3& size, int n) {
  const double areas[3] = {size.y() * size.z(), size.x() * size.z(), size.x() * size.y()};
  const double total = areas[0] + areas[1] + areas[2];
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    const double a = uniform(g, 0, total);
    const int axis = a < areas[0] ? 0 : (a < areas[0] + areas[1] ? 1 : 2);
    Vec3 p = random_vec(g, -0.5, 0.5).cwiseProduct(size);
    p[axis] = (uniform(g, 0, 1) < 0.5 ? -0.5 : 0.5) * size[axis];
    pts.push_back(p);
  }
  return pts;
}

}  // namespace f3d::test

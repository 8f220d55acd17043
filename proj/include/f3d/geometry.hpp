#pragma once

// Quaternions, poses and the pinhole camera shared by every module.
//
// Coordinate convention (all modules): the camera sits at the origin looking
// down +z, x points right and y points down (right-handed). Pixel (u, v) is
// column u, row v, with pixel centers at integer coordinates.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include <array>

namespace f3d {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion stored scalar-first (w, x, y, z). q and -q are the same rotation.
class UnitQuaternion {
 public:
  /// Tolerance on |q| - 1 accepted by the checked constructor.
  static constexpr double kNormTolerance = 1e-6;

  UnitQuaternion() = default;

  /// Rejects non-finite input and norms deviating more than kNormTolerance from
  /// one. Input already unit to 1e-12 is stored verbatim, otherwise renormalized.
  UnitQuaternion(double w, double x, double y, double z);

  /// Normalizes any nonzero finite 4-vector.
  static UnitQuaternion normalized(double w, double x, double y, double z);
  static UnitQuaternion identity() { return {}; }
  /// Rotation of `angle` radians about `axis` (need not be unit length).
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);
  /// Nearest unit quaternion for a proper rotation matrix.
  static UnitQuaternion from_matrix(const Mat3& r);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  std::array<double, 4> coeffs() const { return {w_, x_, y_, z_}; }

  double dot(const UnitQuaternion& o) const { return w_ * o.w_ + x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }
  UnitQuaternion operator-() const;
  /// Hamilton product: (*this * o) applies o first.
  UnitQuaternion operator*(const UnitQuaternion& o) const;
  UnitQuaternion conjugate() const;

  Mat3 to_matrix() const;
  /// Sandwich product q v q*.
  Vec3 rotate(const Vec3& v) const;

  bool operator==(const UnitQuaternion&) const = default;

 private:
  struct Unchecked {};
  UnitQuaternion(Unchecked, double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

Mat3 quat_to_matrix(const UnitQuaternion& q);

/// Angle of the relative rotation, in [0, pi]: 2 acos(|<a, b>|).
double rotation_geodesic(const UnitQuaternion& a, const UnitQuaternion& b);

/// Anisotropic scale c, then rotation q, then translation t.
class Pose {
 public:
  Pose() = default;
  /// Rejects non-finite components and non-positive scales.
  Pose(const Vec3& scale, const UnitQuaternion& rotation, const Vec3& translation);

  const Vec3& scale() const { return scale_; }
  const UnitQuaternion& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  bool operator==(const Pose& o) const {
    return scale_ == o.scale_ && rotation_ == o.rotation_ && translation_ == o.translation_;
  }

 private:
  Vec3 scale_ = Vec3::Ones();
  UnitQuaternion rotation_;
  Vec3 translation_ = Vec3::Zero();
};

enum class PoseDirection { forward, inverse };

/// forward: R diag(c) p + t. inverse: diag(1/c) R^T (p - t).
Vec3 apply_pose(const Pose& pose, const Vec3& point, PoseDirection direction = PoseDirection::forward);

struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

struct Camera {
  double fx = 519.0;
  double fy = 519.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  /// Throws ValidationError unless fx, fy > 0 and the principal point lies in the image.
  void validate() const;

  /// 640x480 indoor-sensor intrinsics.
  static Camera default_camera() { return {}; }
  /// Same field of view at 1/`factor` of the resolution.
  Camera downsampled(int factor) const;
  /// 64x48 rendering camera used by tests.
  static Camera test_camera() { return default_camera().downsampled(10); }

  /// Unnormalized ray direction through pixel (u, v) with z component 1, so the
  /// ray parameter equals z-depth.
  Vec3 ray(double u, double v) const { return {(u - cx) / fx, (v - cy) / fy, 1.0}; }

  bool operator==(const Camera&) const = default;
};

Vec3 backproject(const Camera& cam, const PixelDepth& px);
PixelDepth project(const Camera& cam, const Vec3& point);

}  // namespace f3d

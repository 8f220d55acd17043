#include "f3d/geometry.hpp"

#include "f3d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace f3d {

namespace {

bool all_finite(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  if (!all_finite({w, x, y, z})) throw ValidationError("quaternion has non-finite component");
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (std::abs(n - 1.0) > kNormTolerance) {
    throw ValidationError("quaternion is not unit length (norm " + std::to_string(n) + ")");
  }
  // Already-normalized input is stored verbatim so serialized values round-trip exactly.
  if (std::abs(n - 1.0) <= 1e-12) {
    w_ = w;
    x_ = x;
    y_ = y;
    z_ = z;
    return;
  }
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
}

UnitQuaternion UnitQuaternion::normalized(double w, double x, double y, double z) {
  if (!all_finite({w, x, y, z})) throw ValidationError("quaternion has non-finite component");
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n == 0.0) throw ValidationError("cannot normalize zero quaternion");
  return {Unchecked{}, w / n, x / n, y / n, z / n};
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(angle)) throw ValidationError("invalid axis-angle rotation");
  const Vec3 a = axis / n;
  const double s = std::sin(angle / 2.0);
  return normalized(std::cos(angle / 2.0), a.x() * s, a.y() * s, a.z() * s);
}

UnitQuaternion UnitQuaternion::from_matrix(const Mat3& r) {
  // Shepperd's method: pivot on the largest of the four squared components.
  const double trace = r.trace();
  const std::array<double, 4> diag{trace, r(0, 0), r(1, 1), r(2, 2)};
  const auto pivot = std::max_element(diag.begin(), diag.end()) - diag.begin();
  double w, x, y, z;
  switch (pivot) {
    case 0: {
      const double s = 2.0 * std::sqrt(1.0 + trace);
      w = 0.25 * s;
      x = (r(2, 1) - r(1, 2)) / s;
      y = (r(0, 2) - r(2, 0)) / s;
      z = (r(1, 0) - r(0, 1)) / s;
      break;
    }
    case 1: {
      const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
      w = (r(2, 1) - r(1, 2)) / s;
      x = 0.25 * s;
      y = (r(0, 1) + r(1, 0)) / s;
      z = (r(0, 2) + r(2, 0)) / s;
      break;
    }
    case 2: {
      const double s = 2.0 * std::sqrt(1.0 - r(0, 0) + r(1, 1) - r(2, 2));
      w = (r(0, 2) - r(2, 0)) / s;
      x = (r(0, 1) + r(1, 0)) / s;
      y = 0.25 * s;
      z = (r(1, 2) + r(2, 1)) / s;
      break;
    }
    default: {
      const double s = 2.0 * std::sqrt(1.0 - r(0, 0) - r(1, 1) + r(2, 2));
      w = (r(1, 0) - r(0, 1)) / s;
      x = (r(0, 2) + r(2, 0)) / s;
      y = (r(1, 2) + r(2, 1)) / s;
      z = 0.25 * s;
      break;
    }
  }
  return normalized(w, x, y, z);
}

UnitQuaternion UnitQuaternion::operator-() const { return {Unchecked{}, -w_, -x_, -y_, -z_}; }

UnitQuaternion UnitQuaternion::conjugate() const { return {Unchecked{}, w_, -x_, -y_, -z_}; }

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& o) const {
  return normalized(w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
                    w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
                    w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
                    w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_);
}

Mat3 UnitQuaternion::to_matrix() const {
  const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  Mat3 r;
  r << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
       2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
       2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return r;
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
  const Vec3 u(x_, y_, z_);
  const Vec3 t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

Mat3 quat_to_matrix(const UnitQuaternion& q) { return q.to_matrix(); }

double rotation_geodesic(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double d = std::clamp(std::abs(a.dot(b)), 0.0, 1.0);
  return 2.0 * std::acos(d);
}

Pose::Pose(const Vec3& scale, const UnitQuaternion& rotation, const Vec3& translation)
    : scale_(scale), rotation_(rotation), translation_(translation) {
  if (!scale.allFinite() || !translation.allFinite()) throw ValidationError("pose has non-finite component");
  if ((scale.array() <= 0.0).any()) throw ValidationError("pose scale must be strictly positive");
}

Vec3 apply_pose(const Pose& pose, const Vec3& point, PoseDirection direction) {
  const Mat3 r = pose.rotation().to_matrix();
  if (direction == PoseDirection::forward) {
    return r * pose.scale().cwiseProduct(point) + pose.translation();
  }
  return (r.transpose() * (point - pose.translation())).cwiseQuotient(pose.scale());
}

void Camera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw ValidationError("camera focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) throw ValidationError("camera image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw ValidationError("camera principal point outside image");
  }
}

Camera Camera::downsampled(int factor) const {
  if (factor <= 0) throw ValidationError("downsampling factor must be positive");
  Camera c{fx / factor, fy / factor, cx / factor, cy / factor, width / factor, height / factor};
  c.validate();
  return c;
}

Vec3 backproject(const Camera& cam, const PixelDepth& px) {
  if (!(px.depth > 0.0) || !std::isfinite(px.depth)) throw ValidationError("backprojection needs positive depth");
  return {(px.u - cam.cx) * px.depth / cam.fx, (px.v - cam.cy) * px.depth / cam.fy, px.depth};
}

PixelDepth project(const Camera& cam, const Vec3& point) {
  if (!(point.z() > 0.0) || !std::isfinite(point.z())) throw ValidationError("projection needs positive z");
  return {cam.fx * point.x() / point.z() + cam.cx, cam.fy * point.y() / point.z() + cam.cy, point.z()};
}

}  // namespace f3d

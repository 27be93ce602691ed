#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "graspkit/errors.hpp"

// Foundational pose and frame types shared by every stage. All lengths are
// meters and all angles radians unless a name says otherwise; degrees only
// appear at CLI boundaries.

namespace graspkit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kPi = 3.14159265358979323846;
constexpr double kOrthonormalTol = 1e-9;

// Unit-norm direction. Construction normalizes; a near-zero input throws.
class UnitVec3 {
 public:
  explicit UnitVec3(const Vec3& v) {
    const double n = v.norm();
    if (n < 1e-12) throw DegenerateNormal("cannot normalize near-zero vector");
    d_ = v / n;
  }
  static UnitVec3 from_unit_unchecked(const Vec3& v) { return UnitVec3(v, 0); }

  const Vec3& vec() const { return d_; }
  double x() const { return d_.x(); }
  double y() const { return d_.y(); }
  double z() const { return d_.z(); }
  double dot(const Vec3& o) const { return d_.dot(o); }

 private:
  UnitVec3(const Vec3& v, int) : d_(v) {}
  Vec3 d_;
};

// Proper rotation. Validated on construction: R^T R = I and det = +1
// within kOrthonormalTol.
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& m);

  // Builds a right-handed frame from two non-parallel directions: x is kept,
  // y is Gram-Schmidt projected, z completes the triad.
  static Rotation3 from_xy(const Vec3& x_axis, const Vec3& y_hint);
  static Rotation3 identity() { return Rotation3(); }
  static Rotation3 about_z(double angle);
  static Rotation3 about_x(double angle);
  static Rotation3 about_y(double angle);

  const Mat3& matrix() const { return m_; }
  Rotation3 transposed() const { return Rotation3(m_.transpose()); }
  Vec3 operator*(const Vec3& p) const { return m_ * p; }
  Vec3 col(int i) const { return m_.col(i); }

 private:
  Mat3 m_;
};

// 7-DoF similarity: rotation, translation, isotropic positive scale.
// Applies as scale * (R * p) + t.
struct SimilarityPose {
  Rotation3 rotation;
  Vec3 translation{0, 0, 0};
  double scale{1.0};

  static SimilarityPose identity() { return SimilarityPose{}; }
};

// Rigid frame: origin plus axes expressed in the robot base frame
// (columns of `axes` are the frame's x/y/z directions).
struct Frame {
  Vec3 origin{0, 0, 0};
  Rotation3 axes;

  // base -> frame-local coordinates.
  Vec3 to_local(const Vec3& p_base) const {
    return axes.matrix().transpose() * (p_base - origin);
  }
  // frame-local -> base coordinates.
  Vec3 to_base(const Vec3& p_local) const {
    return axes.matrix() * p_local + origin;
  }
};

// Pinhole intrinsics, pixels.
struct CameraIntrinsics {
  double fx{525.0}, fy{525.0};
  double cx{320.0}, cy{240.0};
  int width{640}, height{480};

  void validate() const;
};

Vec3 apply_similarity(const SimilarityPose& pose, const Vec3& p);
SimilarityPose invert_similarity(const SimilarityPose& pose);
SimilarityPose compose_similarity(const SimilarityPose& outer,
                                  const SimilarityPose& inner);

// Horizontal component of n: (z_hat x n) x z_hat == n - (n.z) z_hat.
// Not renormalized; vertical input yields the zero vector.
Vec3 horizontal_projection(const UnitVec3& n);

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace graspkit

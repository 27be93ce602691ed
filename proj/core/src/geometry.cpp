#include "graspkit/geometry.hpp"

#include <cmath>

namespace graspkit {

Rotation3::Rotation3(const Mat3& m) : m_(m) {
  const Mat3 gram = m.transpose() * m;
  if (!gram.isApprox(Mat3::Identity(), kOrthonormalTol) ||
      std::abs(m.determinant() - 1.0) > 1e-6) {
    throw InvalidParams("matrix is not a proper rotation");
  }
}

Rotation3 Rotation3::from_xy(const Vec3& x_axis, const Vec3& y_hint) {
  const double nx = x_axis.norm();
  if (nx < 1e-12) throw DegenerateNormal("from_xy: zero x axis");
  const Vec3 x = x_axis / nx;
  Vec3 y = y_hint - y_hint.dot(x) * x;
  const double ny = y.norm();
  if (ny < 1e-12) throw DegenerateNormal("from_xy: y hint parallel to x");
  y /= ny;
  const Vec3 z = x.cross(y);
  Mat3 m;
  m.col(0) = x;
  m.col(1) = y;
  m.col(2) = z;
  return Rotation3(m);
}

Rotation3 Rotation3::about_z(double angle) {
  return Rotation3(Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix());
}
Rotation3 Rotation3::about_x(double angle) {
  return Rotation3(Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix());
}
Rotation3 Rotation3::about_y(double angle) {
  return Rotation3(Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix());
}

void CameraIntrinsics::validate() const {
  if (fx <= 0 || fy <= 0) throw InvalidParams("intrinsics: focal length must be positive");
  if (width <= 0 || height <= 0) throw InvalidParams("intrinsics: resolution must be positive");
  if (cx < 0 || cx >= width || cy < 0 || cy >= height) {
    throw InvalidParams("intrinsics: principal point outside image");
  }
}

Vec3 apply_similarity(const SimilarityPose& pose, const Vec3& p) {
  return pose.scale * (pose.rotation * p) + pose.translation;
}

SimilarityPose invert_similarity(const SimilarityPose& pose) {
  if (pose.scale <= 1e-12) throw DegenerateScale("similarity scale too small to invert");
  SimilarityPose inv;
  inv.scale = 1.0 / pose.scale;
  inv.rotation = pose.rotation.transposed();
  inv.translation = -inv.scale * (inv.rotation * pose.translation);
  return inv;
}

SimilarityPose compose_similarity(const SimilarityPose& outer,
                                  const SimilarityPose& inner) {
  // outer(inner(p)) = so*Ro*(si*Ri*p + ti) + to
  SimilarityPose out;
  out.scale = outer.scale * inner.scale;
  out.rotation = Rotation3(outer.rotation.matrix() * inner.rotation.matrix());
  out.translation =
      outer.scale * (outer.rotation * inner.translation) + outer.translation;
  return out;
}

Vec3 horizontal_projection(const UnitVec3& n) {
  const Vec3 z = Vec3::UnitZ();
  return (z.cross(n.vec())).cross(z);
}

}  // namespace graspkit

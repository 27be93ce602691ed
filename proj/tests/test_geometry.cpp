#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "graspkit/geometry.hpp"

using namespace graspkit;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace

TEST_CASE("apply_similarity matches the printed composition order") {
  SUBCASE("identity pose") {
    const SimilarityPose id = SimilarityPose::identity();
    CHECK(apply_similarity(id, Vec3(1, 2, 3)).isApprox(Vec3(1, 2, 3), 1e-15));
  }
  SUBCASE("scale then translate") {
    SimilarityPose pose;
    pose.scale = 2.0;
    pose.translation = Vec3(0, 0, 1);
    CHECK(apply_similarity(pose, Vec3(1, 1, 1)).isApprox(Vec3(2, 2, 3), 1e-12));
  }
  SUBCASE("rotation about z") {
    SimilarityPose pose;
    pose.rotation = Rotation3::about_z(deg_to_rad(90.0));
    const Vec3 out = apply_similarity(pose, Vec3(1, 0, 0));
    CHECK((out - Vec3(0, 1, 0)).norm() < 1e-12);
  }
}

TEST_CASE("invert_similarity") {
  SUBCASE("identity inverts to identity") {
    const SimilarityPose inv = invert_similarity(SimilarityPose::identity());
    CHECK(inv.scale == doctest::Approx(1.0));
    CHECK(inv.translation.norm() < 1e-15);
    CHECK(inv.rotation.matrix().isApprox(Mat3::Identity(), 1e-15));
  }
  SUBCASE("roundtrip law") {
    SimilarityPose pose;
    pose.scale = 2.0;
    pose.translation = Vec3(0, 0, 1);
    const Vec3 p(1, 1, 1);
    const Vec3 back = apply_similarity(invert_similarity(pose), apply_similarity(pose, p));
    CHECK((back - p).norm() < 1e-9);
  }
  SUBCASE("inverse scale is reciprocal") {
    SimilarityPose pose;
    pose.scale = 0.5;
    pose.rotation = Rotation3::about_x(deg_to_rad(30.0));
    pose.translation = Vec3(1, 0, 0);
    CHECK(invert_similarity(pose).scale == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("degenerate scale rejected") {
    SimilarityPose pose;
    pose.scale = 1e-13;
    CHECK_THROWS_AS(invert_similarity(pose), DegenerateScale);
  }
  SUBCASE("roundtrip law over random poses") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> us(0.1, 5.0);
    std::uniform_real_distribution<double> ut(-2.0, 2.0);
    std::uniform_real_distribution<double> ua(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
      SimilarityPose pose;
      pose.scale = us(rng);
      pose.rotation = Rotation3(Eigen::AngleAxisd(ua(rng), random_unit(rng)).toRotationMatrix());
      pose.translation = Vec3(ut(rng), ut(rng), ut(rng));
      const Vec3 p(ut(rng), ut(rng), ut(rng));
      const Vec3 back = apply_similarity(invert_similarity(pose), apply_similarity(pose, p));
      REQUIRE((back - p).norm() < 1e-9);
    }
  }
}

TEST_CASE("horizontal_projection equals the triple product form") {
  SUBCASE("horizontal normal is unchanged") {
    const Vec3 out = horizontal_projection(UnitVec3(Vec3(-1, 0, 0)));
    CHECK((out - Vec3(-1, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("vertical normal projects to zero") {
    CHECK(horizontal_projection(UnitVec3(Vec3(0, 0, -1))).norm() < 1e-12);
  }
  SUBCASE("45 degree normal keeps its horizontal part") {
    const double s = std::sqrt(2.0) / 2.0;
    const Vec3 out = horizontal_projection(UnitVec3(Vec3(-s, 0, -s)));
    CHECK((out - Vec3(-s, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("identity n - (n.z)z over random unit vectors") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
      const Vec3 n = random_unit(rng);
      const Vec3 lhs = horizontal_projection(UnitVec3::from_unit_unchecked(n));
      const Vec3 rhs = n - n.z() * Vec3::UnitZ();
      REQUIRE((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

TEST_CASE("Rotation3 invariants") {
  SUBCASE("from_xy gives orthonormal right-handed frames") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
      const Vec3 x = random_unit(rng);
      Vec3 y = random_unit(rng);
      if (std::abs(x.dot(y)) > 0.99) continue;
      const Rotation3 r = Rotation3::from_xy(x, y);
      const Mat3 m = r.matrix();
      REQUIRE((m.transpose() * m - Mat3::Identity()).norm() < 1e-9);
      REQUIRE(m.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("non-orthonormal matrix rejected") {
    Mat3 bad = Mat3::Identity();
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS((void)Rotation3(bad), InvalidParams);
  }
  SUBCASE("reflection rejected") {
    Mat3 refl = Mat3::Identity();
    refl(2, 2) = -1.0;
    CHECK_THROWS_AS((void)Rotation3(refl), InvalidParams);
  }
}

TEST_CASE("UnitVec3 normalizes and rejects zero") {
  CHECK(UnitVec3(Vec3(0, 0, 10)).vec().isApprox(Vec3(0, 0, 1), 1e-12));
  CHECK_THROWS_AS(UnitVec3(Vec3(0, 0, 0)), DegenerateNormal);
}

TEST_CASE("Frame local/base roundtrip") {
  Frame f;
  f.origin = Vec3(1, 2, 3);
  f.axes = Rotation3::about_z(0.5);
  const Vec3 p(0.3, -0.7, 0.2);
  CHECK((f.to_base(f.to_local(p)) - p).norm() < 1e-12);
}

TEST_CASE("CameraIntrinsics validation") {
  CameraIntrinsics intr;
  CHECK_NOTHROW(intr.validate());
  intr.fx = -1;
  CHECK_THROWS_AS(intr.validate(), InvalidParams);
  intr = CameraIntrinsics{};
  intr.cx = 640;
  CHECK_THROWS_AS(intr.validate(), InvalidParams);
}

TEST_CASE("compose_similarity matches sequential application") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    SimilarityPose a, b;
    a.scale = 0.3 + std::abs(u(rng));
    b.scale = 0.3 + std::abs(u(rng));
    a.rotation = Rotation3(Eigen::AngleAxisd(u(rng) * 3, random_unit(rng)).toRotationMatrix());
    b.rotation = Rotation3(Eigen::AngleAxisd(u(rng) * 3, random_unit(rng)).toRotationMatrix());
    a.translation = Vec3(u(rng), u(rng), u(rng));
    b.translation = Vec3(u(rng), u(rng), u(rng));
    const Vec3 p(u(rng), u(rng), u(rng));
    const Vec3 lhs = apply_similarity(compose_similarity(a, b), p);
    const Vec3 rhs = apply_similarity(a, apply_similarity(b, p));
    REQUIRE((lhs - rhs).norm() < 1e-9);
  }
}

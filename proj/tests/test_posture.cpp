#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "graspkit/kdtree.hpp"
#include "graspkit/mesh_io.hpp"
#include "graspkit/posture.hpp"

using namespace graspkit;

TEST_CASE("make_reference produces fully labeled canonical meshes") {
  for (Category c : {Category::Cup, Category::Bottle, Category::Bowl}) {
    const LabeledCanonicalMesh ref = make_reference(c);
    REQUIRE(ref.mesh.has_postures());
    std::set<PostureLabel> labels(ref.mesh.postures.begin(), ref.mesh.postures.end());
    CHECK(labels.size() == 3);  // MW, T, and NG regions all present
    // Canonical frame: bbox diagonal 1, centered near the origin.
    const Aabb box = bounding_box(ref.mesh);
    CHECK(box.diagonal() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(box.lo.norm() < 1.0);
  }
}

TEST_CASE("cup reference labels follow the region scheme") {
  const LabeledCanonicalMesh ref = make_reference(Category::Cup);
  const Aabb box = bounding_box(ref.mesh);
  int rim_tripod = 0, rim_total = 0;
  for (std::size_t i = 0; i < ref.mesh.vertices.size(); ++i) {
    const Vec3& v = ref.mesh.vertices[i];
    const double r = std::hypot(v.x(), v.y());
    if (v.z() > box.hi.z() - 0.02 && r < 0.4) {
      ++rim_total;
      if (ref.mesh.postures[i] == PostureLabel::Tripod) ++rim_tripod;
    }
  }
  REQUIRE(rim_total > 50);
  CHECK(rim_tripod > rim_total / 2);  // rim band is tripod
}

TEST_CASE("transfer_postures") {
  const LabeledCanonicalMesh ref = make_reference(Category::Cup);

  SUBCASE("self-transfer reproduces the labels exactly") {
    TriMesh target = ref.mesh;
    target.postures.clear();
    transfer_postures(target, ref, 5);
    REQUIRE(target.postures.size() == ref.mesh.postures.size());
    for (std::size_t i = 0; i < target.postures.size(); ++i) {
      REQUIRE(target.postures[i] == ref.mesh.postures[i]);
    }
  }

  SUBCASE("scaled self-transfer with k=1 honors the pre-image correspondence") {
    // Exact form of the oracle: wherever the scaled vertex's nearest
    // reference vertex is its own pre-image, the label must carry over.
    const KdTree3 tree(ref.mesh.vertices);
    TriMesh target = ref.mesh;
    target.postures.clear();
    for (Vec3& v : target.vertices) v *= 1.1;
    transfer_postures(target, ref, 1);
    std::size_t preimage_nn = 0;
    for (std::size_t i = 0; i < target.vertices.size(); ++i) {
      if (tree.nearest(target.vertices[i]).first == i) {
        ++preimage_nn;
        REQUIRE(target.postures[i] == ref.mesh.postures[i]);
      }
    }
    CHECK(preimage_nn > 100);  // the conditioned set must not be vacuous
  }

  SUBCASE("small-scale self-transfer agrees on >=95% of labels") {
    // Displacement below the wall thickness keeps pre-images nearest; 1.1x
    // would slide thin-wall vertices past the opposite sheet.
    const struct {
      Category category;
      double scale;
    } cases[] = {{Category::Bottle, 1.05}, {Category::Cup, 1.02}};
    for (const auto& c : cases) {
      const LabeledCanonicalMesh r = make_reference(c.category);
      TriMesh target = r.mesh;
      target.postures.clear();
      for (Vec3& v : target.vertices) v *= c.scale;
      transfer_postures(target, r, 1);
      std::size_t matches = 0;
      for (std::size_t i = 0; i < target.postures.size(); ++i) {
        if (target.postures[i] == r.mesh.postures[i]) ++matches;
      }
      CHECK(static_cast<double>(matches) >=
            0.95 * static_cast<double>(target.postures.size()));
    }
  }

  SUBCASE("constant reference labels everything identically") {
    LabeledCanonicalMesh all_ng = ref;
    std::fill(all_ng.mesh.postures.begin(), all_ng.mesh.postures.end(),
              PostureLabel::NonGraspable);
    TriMesh target = ref.mesh;
    target.postures.clear();
    transfer_postures(target, all_ng, 5);
    CHECK(std::all_of(target.postures.begin(), target.postures.end(),
                      [](PostureLabel l) { return l == PostureLabel::NonGraspable; }));
  }

  SUBCASE("vertex order permutation does not change labels") {
    TriMesh target = ref.mesh;
    target.postures.clear();
    std::vector<std::uint32_t> perm(target.vertices.size());
    for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::mt19937_64 rng(5);
    std::shuffle(perm.begin(), perm.end(), rng);
    TriMesh shuffled;
    shuffled.vertices.resize(target.vertices.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      shuffled.vertices[perm[i]] = target.vertices[i];
    }
    transfer_postures(target, ref, 5);
    transfer_postures(shuffled, ref, 5);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      REQUIRE(shuffled.postures[perm[i]] == target.postures[i]);
    }
  }

  SUBCASE("every output vertex carries a label from the closed set") {
    TriMesh target = ref.mesh;
    for (Vec3& v : target.vertices) v *= 0.93;
    transfer_postures(target, ref, 5);
    for (PostureLabel l : target.postures) {
      REQUIRE((l == PostureLabel::NonGraspable || l == PostureLabel::MediumWrap ||
               l == PostureLabel::Tripod));
    }
  }

  SUBCASE("un-canonicalized target rejected as frame mismatch") {
    TriMesh target = ref.mesh;
    for (Vec3& v : target.vertices) v += Vec3(5.0, 0, 0);
    CHECK_THROWS_AS(transfer_postures(target, ref, 5), FrameMismatch);
  }

  SUBCASE("k must be positive") {
    TriMesh target = ref.mesh;
    CHECK_THROWS_AS(transfer_postures(target, ref, 0), InvalidParams);
  }
}

TEST_CASE("labeled reference io") {
  const auto dir = std::filesystem::temp_directory_path() / "graspkit_posture_io";
  std::filesystem::create_directories(dir);

  SUBCASE("save/load roundtrip keeps labels") {
    const LabeledCanonicalMesh ref = make_reference(Category::Bowl);
    save_labeled_reference(ref, dir / "bowl_reference.ply");
    const LabeledCanonicalMesh back = load_labeled_reference(dir / "bowl_reference.ply");
    CHECK(back.category == Category::Bowl);
    REQUIRE(back.mesh.postures.size() == ref.mesh.postures.size());
    for (std::size_t i = 0; i < back.mesh.postures.size(); ++i) {
      REQUIRE(back.mesh.postures[i] == ref.mesh.postures[i]);
    }
  }

  SUBCASE("file without labels raises MissingLabels") {
    TriMesh plain = make_reference(Category::Cup).mesh;
    plain.postures.clear();
    save_ply(plain, dir / "unlabeled.ply");
    CHECK_THROWS_AS((void)load_labeled_reference(dir / "unlabeled.ply"), MissingLabels);
  }

  SUBCASE("repo-shipped cup reference loads with all three labels") {
    const auto path = std::filesystem::path(GRASPKIT_ASSET_DIR) / "cup_reference.ply";
    REQUIRE(std::filesystem::exists(path));
    const LabeledCanonicalMesh ref = load_labeled_reference(path);
    CHECK(ref.category == Category::Cup);
    std::set<PostureLabel> labels(ref.mesh.postures.begin(), ref.mesh.postures.end());
    CHECK(labels.size() == 3);
  }
}

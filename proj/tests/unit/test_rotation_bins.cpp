#include "f3d/errors.hpp"
#include "f3d/rotation_bins.hpp"
#include "support.hpp"

#include "doctest.h"

#include <map>
#include <numbers>
#include <set>

using namespace f3d;
using f3d::test::rng;

namespace {

// The 24 proper rotations of the cube, one quaternion each.
std::vector<UnitQuaternion> cube_group() {
  std::vector<UnitQuaternion> out;
  const double h = 0.5, s = std::sqrt(0.5);
  out.push_back(UnitQuaternion::normalized(1, 0, 0, 0));
  out.push_back(UnitQuaternion::normalized(0, 1, 0, 0));
  out.push_back(UnitQuaternion::normalized(0, 0, 1, 0));
  out.push_back(UnitQuaternion::normalized(0, 0, 0, 1));
  for (double b : {-h, h})
    for (double c : {-h, h})
      for (double d : {-h, h}) out.push_back(UnitQuaternion::normalized(h, b, c, d));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (double sj : {-s, s}) {
        std::array<double, 4> q{0, 0, 0, 0};
        q[i] = s;
        q[j] = sj;
        out.push_back(UnitQuaternion::normalized(q[0], q[1], q[2], q[3]));
      }
  return out;
}

UnitQuaternion jitter(std::mt19937_64& g, const UnitQuaternion& q, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  const UnitQuaternion r = UnitQuaternion::normalized(q.w() + n(g), q.x() + n(g), q.y() + n(g), q.z() + n(g));
  return test::uniform(g, 0, 1) < 0.5 ? r : -r;  // either sign
}

}  // namespace

TEST_CASE("antipodal distance") {
  auto& g = rng(91);
  for (int n = 0; n < 200; ++n) {
    const UnitQuaternion a = test::random_quaternion(g), b = test::random_quaternion(g);
    CHECK(antipodal_distance(a, b) == antipodal_distance(b, a));
    CHECK(antipodal_distance(a, -b) == antipodal_distance(a, b));
    CHECK(antipodal_distance(a, -a) == 0.0);
    CHECK(antipodal_distance(a, b) <= std::sqrt(2.0) + 1e-12);
    // Chordal distance is 2 sin(theta / 4) of the geodesic angle.
    CHECK(antipodal_distance(a, b) == doctest::Approx(2 * std::sin(rotation_geodesic(a, b) / 4)).epsilon(1e-9));
  }
}

TEST_CASE("cube group is 24 distinct rotations") {
  const auto group = cube_group();
  REQUIRE(group.size() == 24);
  BinSet bins;
  bins.representatives = group;
  CHECK(min_inter_bin_angle(bins) == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("24-mode mixture is recovered exactly") {
  const auto modes = cube_group();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto& g = rng(100 + seed);
    std::vector<UnitQuaternion> samples;
    std::vector<int> labels;
    for (int m = 0; m < 24; ++m)
      for (int k = 0; k < 50; ++k) {
        samples.push_back(jitter(g, modes[m], 0.01));
        labels.push_back(m);
      }
    const BinSet bins = cluster_quaternions(samples, seed);
    REQUIRE(bins.representatives.size() == 24);
    std::map<int, int> mode_to_bin;
    std::set<int> used;
    bool consistent = true;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const int b = assign_bin(samples[i], bins);
      const auto [it, inserted] = mode_to_bin.emplace(labels[i], b);
      if (inserted) used.insert(b);
      consistent = consistent && it->second == b;
    }
    CHECK(consistent);
    CHECK(used.size() == 24);
    for (std::size_t i = 1; i < bins.inertia_history.size(); ++i)
      CHECK(bins.inertia_history[i] <= bins.inertia_history[i - 1] + 1e-12);
  }
}

TEST_CASE("assignment ignores quaternion sign") {
  auto& g = rng(92);
  std::vector<UnitQuaternion> train;
  for (int i = 0; i < 500; ++i) train.push_back(test::random_quaternion(g));
  const BinSet bins = cluster_quaternions(train, 4);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const UnitQuaternion q = test::random_quaternion(g);
    violations += assign_bin(q, bins) != assign_bin(-q, bins);
  }
  CHECK(violations == 0);
}

TEST_CASE("clustering is seeded, sign-invariant and duplicate-invariant") {
  auto& g = rng(93);
  std::vector<UnitQuaternion> train;
  for (int i = 0; i < 300; ++i) train.push_back(test::random_quaternion(g));
  const BinSet a = cluster_quaternions(train, 9);
  CHECK(cluster_quaternions(train, 9).representatives == a.representatives);

  std::vector<UnitQuaternion> flipped;
  for (const auto& q : train) flipped.push_back(-q);
  const BinSet f = cluster_quaternions(flipped, 9);
  for (std::size_t k = 0; k < 24; ++k) CHECK(antipodal_distance(f.representatives[k], a.representatives[k]) < 1e-12);

  std::vector<UnitQuaternion> doubled = train;
  doubled.insert(doubled.end(), train.begin(), train.end());
  const BinSet d = cluster_quaternions(doubled, 9);
  CHECK(d.representatives == a.representatives);
  CHECK(d.inertia == doctest::Approx(2 * a.inertia));

  CHECK_THROWS_AS(cluster_quaternions(std::vector<UnitQuaternion>(train.begin(), train.begin() + 10), 1),
                  ValidationError);
  CHECK_THROWS_AS(assign_bin(UnitQuaternion(), BinSet{}), ValidationError);
}

#include "f3d/errors.hpp"
#include "f3d/voxel_grid.hpp"
#include "support.hpp"

#include "doctest.h"

#include <numbers>

using namespace f3d;
using f3d::test::rng;

namespace {

VoxelGrid random_grid(std::mt19937_64& g, const GridSpec& spec, double density) {
  VoxelGrid v(spec);
  for (std::size_t i = 0; i < spec.dims().count(); ++i)
    v.set(i, test::uniform(g, 0, 1) < density ? static_cast<float>(test::uniform(g, 0.5, 1)) : 0.0f);
  return v;
}

double iou_oracle(const VoxelGrid& a, const VoxelGrid& b) {
  int inter = 0, uni = 0;
  const auto& d = a.dims();
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i) {
        const bool x = a.at(i, j, k) >= 0.5, y = b.at(i, j, k) >= 0.5;
        inter += x && y;
        uni += x || y;
      }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

}  // namespace

TEST_CASE("grid specs") {
  const GridSpec c = GridSpec::canonical();
  CHECK(c.dims() == GridDims{32, 32, 32});
  CHECK(c.voxel_size().isApprox(Vec3::Constant(1.0 / 32)));
  const GridSpec s = GridSpec::scene_default();
  CHECK(s.dims() == GridDims{64, 32, 64});
  CHECK(s.extent().min.isApprox(Vec3(-2.56, -1.28, 0)));
  CHECK(s.extent().max.isApprox(Vec3(2.56, 1.28, 5.12)));
  CHECK(s.voxel_size().isApprox(Vec3::Constant(0.08)));
  CHECK_THROWS_AS(GridSpec(Frame::canonical, {16, 16, 16}, c.extent()), ValidationError);
  CHECK_THROWS_AS(GridSpec(Frame::scene, {0, 1, 1}, s.extent()), ValidationError);

  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{64}, std::size_t{5000}, s.dims().count() - 1}) {
    const CellIndex idx = s.cell(n);
    CHECK(s.index(idx.i, idx.j, idx.k) == n);
    CHECK(s.cell_of(s.cell_center(idx.i, idx.j, idx.k)) == idx);
  }
  CHECK(s.index(1, 0, 0) == 1);
  CHECK(s.index(0, 1, 0) == 64);
  // Half-open cells: the lower face belongs to the cell, the upper extent is outside.
  CHECK(c.cell_of(Vec3(-0.5, -0.5, -0.5)) == CellIndex{0, 0, 0});
  CHECK_FALSE(c.cell_of(Vec3(0.5, 0.0, 0.0)).has_value());
  CHECK(c.cell_of(Vec3(0.0, 0.0, 0.0)) == CellIndex{16, 16, 16});
}

TEST_CASE("occupancy values are validated") {
  VoxelGrid v(GridSpec::canonical());
  CHECK_THROWS_AS(v.set(0, 0, 0, 1.5f), ValidationError);
  CHECK_THROWS_AS(v.set(0, 0, 0, -0.1f), ValidationError);
  CHECK_THROWS_AS(v.set(0, 0, 0, std::nanf("")), ValidationError);
  v.set(0, 0, 0, 0.5f);
  CHECK(v.count_occupied() == 1);
  CHECK(v.count_occupied(0.6) == 0);
  CHECK_THROWS_AS(VoxelGrid(GridSpec::canonical(), std::vector<float>(10)), ValidationError);
}

TEST_CASE("voxel IoU matches brute force") {
  auto& g = rng(21);
  const GridSpec spec = GridSpec::scene({4, 3, 5}, Vec3::Zero());
  for (int n = 0; n < 1000; ++n) {
    const double density = test::uniform(g, 0, 1);
    const VoxelGrid a = random_grid(g, spec, density), b = random_grid(g, spec, density);
    CHECK(std::abs(voxel_iou(a, b) - iou_oracle(a, b)) < 1e-12);
    CHECK(voxel_iou(a, b) == voxel_iou(b, a));
    CHECK(voxel_iou(a, a) == 1.0);
  }
  const VoxelGrid empty(spec);
  CHECK(voxel_iou(empty, empty) == 1.0);
  VoxelGrid one(spec);
  one.set(0, 0, 0, 1.0f);
  CHECK(voxel_iou(one, empty) == 0.0);
  CHECK_THROWS_AS(voxel_iou(one, VoxelGrid(GridSpec::scene({4, 3, 6}, Vec3::Zero()))), ValidationError);
}

TEST_CASE("cuboid voxelization is center-inside") {
  const Cuboid full;
  CHECK(cuboid_voxelize(std::span(&full, 1), GridSpec::canonical()).count_occupied() == 32768);
  const Cuboid half = Cuboid::from_bounds({-0.5, -0.5, -0.5}, {0.0, 0.5, 0.5});
  CHECK(cuboid_voxelize(std::span(&half, 1), GridSpec::canonical()).count_occupied() == 16384);
  const Cuboid slab = Cuboid::from_bounds({-0.5, 0.0, -0.5}, {0.5, 0.125, 0.5});
  CHECK(cuboid_voxelize(std::span(&slab, 1), GridSpec::canonical()).count_occupied() == 32 * 32 * 4);
  CHECK_THROWS_AS(Cuboid({0, 0, 0}, {0.1, 0.0, 0.1}), ValidationError);
}

TEST_CASE("canonical sampling") {
  auto& g = rng(22);
  const VoxelGrid v = random_grid(g, GridSpec::canonical(), 0.5);
  const GridSpec& s = v.spec();
  for (int n = 0; n < 200; ++n) {
    const int i = static_cast<int>(test::uniform(g, 0, 32)), j = static_cast<int>(test::uniform(g, 0, 32)),
              k = static_cast<int>(test::uniform(g, 0, 32));
    const Vec3 c = s.cell_center(i, j, k);
    CHECK(sample_canonical(v, c, Sampling::nearest) == v.at(i, j, k));
    CHECK(sample_canonical(v, c, Sampling::trilinear) == doctest::Approx(v.at(i, j, k)).epsilon(1e-12));
  }
  CHECK(sample_canonical(v, {0.6, 0, 0}) == 0.0);
  // Trilinear interpolation between two adjacent centers is the average.
  const Vec3 mid = (s.cell_center(10, 11, 12) + s.cell_center(11, 11, 12)) / 2;
  CHECK(sample_canonical(v, mid) == doctest::Approx((v.at(10, 11, 12) + v.at(11, 11, 12)) / 2.0).epsilon(1e-6));
}

TEST_CASE("resampling a full cube into the scene grid") {
  VoxelGrid full(GridSpec::canonical(), std::vector<float>(32768, 1.0f));
  // 0.8 m cube aligned with scene cells covers exactly 10^3 cell centers.
  const Pose pose(Vec3::Constant(0.8), {}, Vec3(0.0, 0.0, 2.4));
  const VoxelGrid s = resample_to_scene(full, pose, GridSpec::scene_default());
  CHECK(s.count_occupied() == 1000);
  const VoxelGrid empty = resample_to_scene(VoxelGrid(GridSpec::canonical()), pose, GridSpec::scene_default());
  CHECK(empty.count_occupied() == 0);
  // A quarter turn about y maps the aligned cube onto itself.
  const Pose turned(Vec3::Constant(0.8), UnitQuaternion::from_axis_angle({0, 1, 0}, std::numbers::pi / 2),
                    Vec3(0.0, 0.0, 2.4));
  CHECK(voxel_iou(resample_to_scene(full, turned, GridSpec::scene_default()), s) == 1.0);
  CHECK_THROWS_AS(resample_to_scene(s, pose, GridSpec::scene_default()), ValidationError);
}

TEST_CASE("posed bounds") {
  const Pose pose(Vec3(2, 1, 1), UnitQuaternion::from_axis_angle({0, 1, 0}, std::numbers::pi / 2), Vec3(1, 0, 3));
  const Box3 b = posed_bounds(pose);
  CHECK(b.min.isApprox(Vec3(0.5, -0.5, 2.0)));
  CHECK(b.max.isApprox(Vec3(1.5, 0.5, 4.0)));
}

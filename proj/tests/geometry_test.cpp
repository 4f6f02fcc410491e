// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "tampmilp/geometry.hpp"

using namespace tamp;

namespace {

void expect_vec(const Vec3& a, const Vec3& b, double tol = 1e-12) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

const Aabb kWorkspace{{0.5, 0.5, 0.5}, {1.0, 1.0, 1.0}};

}  // namespace

TEST(Inflate, AddsMoverWidth) {
  const Aabb owner{{0.3, 0.4, 0.5}, {0.2, 0.2, 0.2}};
  const Aabb g = inflate(owner, {0.1, 0.1, 0.1});
  expect_vec(g.width, {0.3, 0.3, 0.3});
  expect_vec(g.center, owner.center);
}

TEST(Inflate, ZeroMoverIsIdentity) {
  const Aabb owner{{0.3, 0.4, 0.5}, {0.2, 0.1, 0.05}};
  const Aabb g = inflate(owner, {0, 0, 0});
  expect_vec(g.width, owner.width);
  expect_vec(g.center, owner.center);
}

TEST(Inflate, PointOwner) {
  const Aabb g = inflate({{0.1, 0.1, 0.1}, {0, 0, 0}}, {0.1, 0.2, 0.3});
  expect_vec(g.width, {0.1, 0.2, 0.3});
}

TEST(Contains, ClosedBoxSemantics) {
  const Region r{Aabb::from_bounds({0, 0, 0}, {1, 1, 1}), Frame::absolute(), {Axis::X, -1}};
  EXPECT_TRUE(contains(r, {0.5, 0.5, 0.5}));
  EXPECT_FALSE(contains(r, {1.0, 1.0, 1.5}));
  EXPECT_TRUE(contains(r, {1.0, 0.2, 0.0}));  // on the face planes
}

TEST(MakeRegions, FlatWorkspaceGivesFourRegions) {
  const Aabb ws{{0.5, 0.5, 0.0}, {1.0, 1.0, 0.0}};
  const RegionSet set = make_regions({{0.5, 0.5, 0.0}, {0.2, 0.2, 0.0}}, ws, {0.1, 0.1, 0.0});
  ASSERT_EQ(set.regions.size(), 4u);
  const std::vector<Face> order = {{Axis::X, -1}, {Axis::X, 1}, {Axis::Y, -1}, {Axis::Y, 1}};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(set.regions[k].face, order[k]);
  // The -x region spans from the workspace bound to the inflated face.
  EXPECT_NEAR(set.regions[0].box.lo().x, 0.0, 1e-12);
  EXPECT_NEAR(set.regions[0].box.hi().x, 0.35, 1e-12);
  EXPECT_NEAR(set.regions[0].box.lo().y, 0.0, 1e-12);
  EXPECT_NEAR(set.regions[0].box.hi().y, 1.0, 1e-12);
}

TEST(MakeRegions, InteriorObstacleGivesSixOrderedRegions) {
  const RegionSet set = make_regions({{0.5, 0.5, 0.5}, {0.2, 0.2, 0.2}}, kWorkspace, {0.1, 0.1, 0.1});
  ASSERT_EQ(set.regions.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(set.regions[k].face.ordinal(), static_cast<int>(k));
}

TEST(MakeRegions, FlushFaceIsDropped) {
  // Inflated -x face sits on the workspace bound.
  const RegionSet set = make_regions({{0.1, 0.5, 0.5}, {0.1, 0.2, 0.2}}, kWorkspace, {0.1, 0.1, 0.1});
  ASSERT_EQ(set.regions.size(), 5u);
  EXPECT_EQ(set.find({Axis::X, -1}), nullptr);
  EXPECT_NE(set.find({Axis::X, 1}), nullptr);
}

TEST(MakeRegions, CoveringOwnerHasNoFreeRegion) {
  EXPECT_THROW(make_regions({{0.5, 0.5, 0.5}, {1.2, 1.2, 1.2}}, kWorkspace, {0, 0, 0}),
               GeometryError);
  EXPECT_THROW(make_regions({{0.5, 0.5, 0.5}, {0.1, 0.1, 0.1}}, kWorkspace, {-0.1, 0, 0}),
               GeometryError);
}

class RegionProperties : public ::testing::TestWithParam<int> {};

TEST_P(RegionProperties, CoverageExclusionOverlap) {
  std::mt19937_64 rng(91 + GetParam());
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Aabb owner{{0.2 + 0.6 * U(rng), 0.2 + 0.6 * U(rng), 0.2 + 0.6 * U(rng)},
                   {0.3 * U(rng), 0.3 * U(rng), 0.3 * U(rng)}};
  const Vec3 mover{0.2 * U(rng), 0.2 * U(rng), 0.2 * U(rng)};
  const RegionSet set = make_regions(owner, kWorkspace, mover);
  const Aabb g = inflate(owner, mover);

  int outside = 0;
  for (int s = 0; s < 100000; ++s) {
    const Vec3 p{U(rng), U(rng), U(rng)};
    if (g.interior_contains(p)) continue;
    ++outside;
    ASSERT_TRUE(set.any_contains(p)) << p.x << " " << p.y << " " << p.z;
  }
  EXPECT_GT(outside, 1000);

  const Vec3 glo = g.lo(), ghi = g.hi();
  for (int s = 0; s < 10000; ++s) {
    Vec3 p;
    for (std::size_t a = 0; a < 3; ++a) {
      p[a] = glo[a] + (ghi[a] - glo[a]) * (1e-9 + (1 - 2e-9) * U(rng));
    }
    if (!g.interior_contains(p)) continue;
    ASSERT_FALSE(set.any_contains(p));
  }

  for (const Region& a : set.regions) {
    for (const Region& b : set.regions) {
      if (a.face.axis == b.face.axis) continue;
      for (std::size_t ax = 0; ax < 3; ++ax) {
        const double lo = std::max(a.box.lo()[ax], b.box.lo()[ax]);
        const double hi = std::min(a.box.hi()[ax], b.box.hi()[ax]);
        EXPECT_GT(hi - lo, 0.0) << a.face.label() << " " << b.face.label();
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Random, RegionProperties, ::testing::Range(0, 5));

TEST(RegionSet, ShareRegionNeedsOneCommonBox) {
  const RegionSet set = make_regions({{0.5, 0.5, 0.5}, {0.2, 0.2, 0.2}}, kWorkspace, {0, 0, 0});
  // Both on the -x side: shared.
  EXPECT_TRUE(set.share_region({0.1, 0.5, 0.5}, {0.3, 0.1, 0.9}));
  // Opposite sides along x at mid height: no common region.
  EXPECT_FALSE(set.share_region({0.1, 0.5, 0.5}, {0.9, 0.5, 0.5}));
  // Corner point lies in both -x and -y regions.
  EXPECT_TRUE(set.share_region({0.1, 0.1, 0.5}, {0.5, 0.1, 0.5}));
}

TEST(RelativeFrame, SpansAllDisplacements) {
  const Aabb ws = Aabb::from_bounds({0, 0, 0}, {1, 2, 3});
  const Vec3 p0{0.25, 0.5, 1.0};
  const Aabb f = relative_frame(ws, p0);
  // mover - (owner - p0) with mover, owner in ws.
  expect_vec(f.lo(), {0 - (1 - 0.25), 0 - (2 - 0.5), 0 - (3 - 1.0)});
  expect_vec(f.hi(), {1 - (0 - 0.25), 2 - (0 - 0.5), 3 - (0 - 1.0)});
}

TEST(Aabb, InteriorOverlap) {
  const Aabb a = Aabb::from_bounds({0, 0, 0}, {1, 1, 1});
  EXPECT_FALSE(interiors_overlap(a, Aabb::from_bounds({1, 0, 0}, {2, 1, 1})));  // touching
  EXPECT_TRUE(interiors_overlap(a, Aabb::from_bounds({0.9, 0.9, 0.9}, {2, 2, 2})));
}

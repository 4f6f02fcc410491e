// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include "tampmilp/geometry.hpp"

namespace tamp {

bool Aabb::contains(const Vec3& p, double tol) const {
  const Vec3 l = lo();
  const Vec3 h = hi();
  for (Axis a : kAxes) {
    if (p[a] < l[a] - tol || p[a] > h[a] + tol) return false;
  }
  return true;
}

bool Aabb::interior_contains(const Vec3& p) const {
  const Vec3 l = lo();
  const Vec3 h = hi();
  for (Axis a : kAxes) {
    if (!(p[a] > l[a] && p[a] < h[a])) return false;
  }
  return true;
}

Aabb inflate(const Aabb& owner, const Vec3& mover_width) {
  return {owner.center, owner.width + mover_width};
}

bool interiors_overlap(const Aabb& a, const Aabb& b) {
  const Vec3 al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
  for (Axis ax : kAxes) {
    if (!(al[ax] < bh[ax] && bl[ax] < ah[ax])) return false;
  }
  return true;
}

std::string Face::label() const {
  static constexpr const char* kNames[] = {"-x", "+x", "-y", "+y", "-z", "+z"};
  return kNames[ordinal()];
}

bool contains(const Region& region, const Vec3& point, double tol) {
  return region.box.contains(point, tol);
}

const Region* RegionSet::find(Face face) const {
  for (const Region& r : regions) {
    if (r.face == face) return &r;
  }
  return nullptr;
}

int RegionSet::first_containing(const Vec3& point, double tol) const {
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (contains(regions[r], point, tol)) return static_cast<int>(r);
  }
  return -1;
}

bool RegionSet::share_region(const Vec3& a, const Vec3& b, double tol) const {
  for (const Region& r : regions) {
    if (contains(r, a, tol) && contains(r, b, tol)) return true;
  }
  return false;
}

RegionSet make_regions(const Aabb& owner, const Aabb& frame_box, const Vec3& mover_width,
                       Frame frame) {
  for (Axis a : kAxes) {
    if (owner.width[a] < 0.0 || mover_width[a] < 0.0 || frame_box.width[a] < 0.0) {
      throw GeometryError("negative width");
    }
  }
  const Aabb grown = inflate(owner, mover_width);
  const Vec3 glo = grown.lo(), ghi = grown.hi();
  const Vec3 flo = frame_box.lo(), fhi = frame_box.hi();
  for (Axis a : kAxes) {
    if (ghi[a] < flo[a] || glo[a] > fhi[a]) {
      throw GeometryError("inflated owner does not intersect the workspace");
    }
  }

  RegionSet set;
  for (Axis a : kAxes) {
    for (int sign : {-1, +1}) {
      Vec3 lo = flo;
      Vec3 hi = fhi;
      if (sign < 0) {
        hi[a] = glo[a];
      } else {
        lo[a] = ghi[a];
      }
      if (!(hi[a] - lo[a] > 0.0)) continue;
      set.regions.push_back({Aabb::from_bounds(lo, hi), frame, Face{a, sign}});
    }
  }
  if (set.regions.empty()) throw GeometryError("no free region");
  return set;
}

Aabb relative_frame(const Aabb& workspace, const Vec3& owner_initial) {
  // owner displacement ranges over [lo - p0, hi - p0]
  const Vec3 lo = workspace.lo() - (workspace.hi() - owner_initial);
  const Vec3 hi = workspace.hi() - (workspace.lo() - owner_initial);
  return Aabb::from_bounds(lo, hi);
}

}  // namespace tamp

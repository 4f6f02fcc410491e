// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tamp {

/// Axis label used for faces and per-axis loops.
enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAxes = {Axis::X, Axis::Y, Axis::Z};

/// A 3-vector of meters (positions, widths) or meters per second (velocities).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double& operator[](Axis a) { return a == Axis::X ? x : (a == Axis::Y ? y : z); }
  double operator[](Axis a) const { return a == Axis::X ? x : (a == Axis::Y ? y : z); }
  double& operator[](std::size_t a) { return (*this)[static_cast<Axis>(a)]; }
  double operator[](std::size_t a) const { return (*this)[static_cast<Axis>(a)]; }

  friend Vec3 operator+(Vec3 a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  double norm1() const { return std::abs(x) + std::abs(y) + std::abs(z); }
  double norm_inf() const { return std::max({std::abs(x), std::abs(y), std::abs(z)}); }
};

/// Elementwise product.
inline Vec3 hadamard(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

/// Axis-aligned box given by center and full width per axis.
struct Aabb {
  Vec3 center;
  Vec3 width;

  Vec3 lo() const { return center - 0.5 * width; }
  Vec3 hi() const { return center + 0.5 * width; }

  static Aabb from_bounds(const Vec3& lo, const Vec3& hi) {
    return {0.5 * (lo + hi), hi - lo};
  }

  /// Closed-set membership with an optional slack.
  bool contains(const Vec3& p, double tol = 0.0) const;
  /// True when `p` lies strictly inside on every axis.
  bool interior_contains(const Vec3& p) const;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration-space growth: a mover whose center stays outside the result
/// cannot overlap the owner's interior.
Aabb inflate(const Aabb& owner, const Vec3& mover_width);

/// True when the open interiors of the two boxes overlap.
bool interiors_overlap(const Aabb& a, const Aabb& b);

struct Face {
  Axis axis = Axis::X;
  int sign = -1;  // -1 or +1

  friend bool operator==(const Face&, const Face&) = default;
  /// Position in the fixed (-x,+x,-y,+y,-z,+z) order.
  int ordinal() const { return 2 * static_cast<int>(axis) + (sign > 0 ? 1 : 0); }
  std::string label() const;
};

/// Coordinate frame a region is expressed in. Delivery-relative regions are
/// built around a delivery's initial position and tested against
/// `mover - (delivery - delivery_initial)`.
struct Frame {
  enum class Kind { Absolute, DeliveryRelative };
  Kind kind = Kind::Absolute;
  int delivery = -1;

  static Frame absolute() { return {}; }
  static Frame relative_to(int delivery) { return {Kind::DeliveryRelative, delivery}; }
  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Region {
  Aabb box;
  Frame frame;
  Face face;
};

bool contains(const Region& region, const Vec3& point, double tol = 0.0);

struct BodyRef {
  enum class Kind { EndEffector, Delivery, Obstacle };
  Kind kind = Kind::Obstacle;
  int index = -1;
  friend bool operator==(const BodyRef&, const BodyRef&) = default;
};

/// Collision-free regions around one owner body for one mover body.
struct RegionSet {
  BodyRef owner;
  BodyRef mover;
  std::vector<Region> regions;

  const Region* find(Face face) const;
  /// Index of the region containing `point`, or -1.
  int first_containing(const Vec3& point, double tol = 0.0) const;
  bool any_contains(const Vec3& point, double tol = 0.0) const {
    return first_containing(point, tol) >= 0;
  }
  /// True when some region holds both points (the shared-region rule).
  bool share_region(const Vec3& a, const Vec3& b, double tol = 0.0) const;
};

/// Builds one region per face of the inflated owner, each spanning from the
/// face plane to the frame bound along the face axis and the full frame on the
/// other axes. Faces whose outward slab is empty are dropped.
RegionSet make_regions(const Aabb& owner, const Aabb& frame_box, const Vec3& mover_width,
                       Frame frame = Frame::absolute());

/// Bounds of `mover - (owner - owner_initial)` when both bodies range over
/// `workspace`: the frame used for delivery-relative regions.
Aabb relative_frame(const Aabb& workspace, const Vec3& owner_initial);

}  // namespace tamp

// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tampmilp/geometry.hpp"

namespace tamp {

struct EndEffector {
  Vec3 width;      // m
  Vec3 initial;    // m
  Vec3 max_speed;  // m/s, per axis
  Vec3 margin;     // m, approach offset added on top of the contact offset
};

struct Delivery {
  Vec3 width;    // m
  Vec3 initial;  // m
  Vec3 target;   // m
};

/// Bodies are axis-aligned boxes; the workspace bounds their centers.
struct Scenario {
  std::string name;
  Aabb workspace;
  std::vector<EndEffector> end_effectors;
  std::vector<Delivery> deliveries;
  std::vector<Aabb> obstacles;
};

enum class Variant { Baseline, Hard, HardSoft };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

/// How the penalized delivery-side regions of the soft variant are chosen.
enum class RestrictedPolicy {
  /// Bottom face plus both faces of the horizontal axis along which the
  /// end-effector travels less to reach the farthest target.
  LesserHorizontalAxis,
};

struct Params {
  double dt = 0.5;   // s
  int steps = 15;    // number of time steps; positions exist for 0..steps
  double alpha = 1.0;
  Variant variant = Variant::Baseline;
  RestrictedPolicy restricted_policy = RestrictedPolicy::LesserHorizontalAxis;
};

/// Input that cannot describe a solvable instance. The message names the
/// offending body.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ScenarioError on non-finite values, negative widths, bodies outside
/// the workspace, or initial/target placements that collide.
void validate(const Scenario& s);
void validate(const Params& p);

/// "tamp-scenario/1" documents. Field names carry units (`_m`, `_mps`, `_s`).
Scenario scenario_from_json(const std::string& text);
/// Optional `params` object of a scenario document.
std::optional<Params> params_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s, const std::optional<Params>& params = {});

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace tamp

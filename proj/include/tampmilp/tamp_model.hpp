// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tampmilp/geometry.hpp"
#include "tampmilp/milp.hpp"
#include "tampmilp/scenario.hpp"

namespace tamp {

using Vec3Var = std::array<milp::VarId, 3>;

/// Region indicators of one (mover, owner) pair: z[r][t] is 1 when the mover
/// is inside region r of `set` at step t.
struct RegionVars {
  RegionSet set;
  std::vector<std::vector<milp::VarId>> z;

  bool empty() const { return set.regions.empty(); }
};

/// Where every decision variable of a built model lives.
struct VariableLayout {
  int steps = 0;

  std::vector<std::vector<Vec3Var>> p_ee;   // [i][t], t = 0..steps
  std::vector<std::vector<Vec3Var>> v_ee;   // [i][t], t = 0..steps-1
  std::vector<std::vector<Vec3Var>> u_ee;   // [i][t], t = 0..steps-1
  std::vector<std::vector<Vec3Var>> p_dlv;  // [j][t]

  // Action states [i][j][t]. Grasp is binary; the rest are derived.
  std::vector<std::vector<std::vector<milp::VarId>>> grasp, pick, place, carry;

  std::vector<std::vector<milp::VarId>> done;  // [j][t], at target and released
  std::vector<milp::VarId> complete;           // [t], all deliveries done from t on

  std::vector<std::vector<RegionVars>> ee_obs;   // [i][k]
  std::vector<std::vector<RegionVars>> ee_dlv;   // [i][j], delivery-relative
  std::vector<std::vector<RegionVars>> dlv_obs;  // [j][k]
  std::vector<std::vector<RegionVars>> dlv_dlv;  // [j1][j2], empty when j1 == j2

  /// Penalized region indices into ee_dlv[i][j].set, per [i][j] (soft variant).
  std::vector<std::vector<std::vector<int>>> restricted;

  std::unordered_map<std::string, milp::VarId> by_name;

  /// Variable with the given structured name, if any.
  std::optional<milp::VarId> find(const milp::VarTag& tag) const;
};

struct BuildReport {
  Variant variant = Variant::Baseline;
  std::size_t binaries = 0;
  std::size_t unit_interval = 0;
  std::size_t continuous = 0;
  std::size_t constraints = 0;
  std::map<std::string, std::size_t> constraints_by_tag;
  /// Binaries that the hard variants relax: the delivery-side region
  /// indicators, N_dlv (N_obs + N_dlv - 1) N_rg (N_stp + 1) with all regions
  /// present.
  std::size_t relaxable_binaries = 0;
};

struct BuiltModel {
  milp::MilpModel model;
  VariableLayout layout;
  BuildReport report;
};

/// Builds the pick-and-place MILP for `params.variant`. Throws ScenarioError
/// if the scenario is invalid or a start/target position lies outside every
/// free region of some body pair.
BuiltModel build(const Scenario& scenario, const Params& params);

/// Distance weight of step t: (1+alpha)^(t/N - 1) / ((N+1)^2 sum_i |vmax_i|_1).
double weight_w(int t, const Params& params, const Scenario& scenario);

/// Penalized delivery-side regions for each (end-effector, delivery); the
/// choice does not depend on t.
std::vector<std::vector<std::vector<int>>> select_restricted_regions(const Scenario& scenario,
                                                                     const Params& params);

/// Horizontal axis the default policy restricts for end-effector i: the one
/// with the smaller travel toward the farthest delivery target; ties go to y.
Axis lesser_horizontal_axis(const Scenario& scenario, int i);

/// Contact offset of delivery j under end-effector i while carried.
Vec3 contact_offset(const Scenario& scenario, int i, int j);
/// Approach offset used at the pick and place steps.
Vec3 approach_offset(const Scenario& scenario, int i, int j);

/// Region sets the builder uses, exposed for the verifier and tests.
RegionSet ee_obstacle_regions(const Scenario& s, int i, int k);
RegionSet ee_delivery_regions(const Scenario& s, int i, int j);
RegionSet delivery_obstacle_regions(const Scenario& s, int j, int k);
RegionSet delivery_delivery_regions(const Scenario& s, int j1, int j2);

}  // namespace tamp

// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "tampmilp/solver.hpp"
#include "tampmilp/tamp_model.hpp"

namespace tamp {
namespace {

Scenario desk(int deliveries) {
  Scenario s;
  s.name = "desk";
  s.workspace = {{0.45, 0.25, 0.16}, {0.9, 0.5, 0.28}};
  s.end_effectors.push_back({{0.04, 0.04, 0.04}, {0.12, 0.25, 0.18}, {0.4, 0.2, 0.2}, {0, 0, 0.02}});
  s.obstacles.push_back({{0.45, 0.25, 0.095}, {0.08, 0.30, 0.07}});
  s.deliveries.push_back({{0.06, 0.06, 0.06}, {0.10, 0.22, 0.03}, {0.80, 0.30, 0.03}});
  if (deliveries > 1) {
    s.deliveries.push_back({{0.06, 0.06, 0.06}, {0.14, 0.34, 0.03}, {0.76, 0.18, 0.03}});
  }
  return s;
}

Params params(int steps, Variant v) {
  Params p;
  p.steps = steps;
  p.variant = v;
  return p;
}

solver::SolveOptions task_first() {
  solver::SolveOptions o;
  o.branching = solver::Branching::LowestIndex;
  return o;
}

TEST(Build, HardVariantDropsDeliveryRegionBinaries) {
  const Scenario s = desk(2);
  const BuiltModel base = build(s, params(30, Variant::Baseline));
  const BuiltModel hard = build(s, params(30, Variant::Hard));
  EXPECT_EQ(base.report.relaxable_binaries, 744u);
  EXPECT_EQ(base.report.binaries - hard.report.binaries, 744u);
  EXPECT_EQ(hard.report.unit_interval - base.report.unit_interval >= 744u, true);

  // Count by enumerating the layout.
  std::size_t z = 0;
  for (const auto& row : base.layout.dlv_obs) {
    for (const RegionVars& rv : row) z += rv.z.size() * (rv.z.empty() ? 0 : rv.z[0].size());
  }
  for (const auto& row : base.layout.dlv_dlv) {
    for (const RegionVars& rv : row) z += rv.z.size() * (rv.z.empty() ? 0 : rv.z[0].size());
  }
  EXPECT_EQ(z, 744u);
}

TEST(Build, OneDoneChainPerDelivery) {
  for (int n : {1, 2}) {
    const BuiltModel b = build(desk(n), params(9, Variant::Baseline));
    EXPECT_EQ(b.report.constraints_by_tag.at("done_final"), static_cast<std::size_t>(n));
    EXPECT_EQ(b.report.constraints_by_tag.at("done_monotone"), static_cast<std::size_t>(n * 9));
  }
}

TEST(Build, VariableKindsFollowVariant) {
  const Scenario s = desk(2);
  for (Variant v : {Variant::Baseline, Variant::Hard, Variant::HardSoft}) {
    const BuiltModel b = build(s, params(5, v));
    const auto kind = [&](milp::VarId id) { return b.model.var(id).kind; };
    EXPECT_EQ(kind(b.layout.grasp[0][1][3]), milp::VarKind::Binary);
    EXPECT_EQ(kind(b.layout.pick[0][1][3]), milp::VarKind::UnitInterval);
    EXPECT_EQ(kind(b.layout.place[0][1][3]), milp::VarKind::UnitInterval);
    EXPECT_EQ(kind(b.layout.carry[0][1][3]), milp::VarKind::UnitInterval);
    EXPECT_EQ(kind(b.layout.done[1][3]), milp::VarKind::Binary);
    EXPECT_EQ(kind(b.layout.complete[3]), milp::VarKind::UnitInterval);
    EXPECT_EQ(kind(b.layout.ee_obs[0][0].z[2][3]), milp::VarKind::Binary);
    EXPECT_EQ(kind(b.layout.ee_dlv[0][1].z[2][3]), milp::VarKind::Binary);
    const auto relaxed = v == Variant::Baseline ? milp::VarKind::Binary : milp::VarKind::UnitInterval;
    EXPECT_EQ(kind(b.layout.dlv_obs[1][0].z[2][3]), relaxed);
    EXPECT_EQ(kind(b.layout.dlv_dlv[0][1].z[2][3]), relaxed);
    EXPECT_TRUE(b.layout.dlv_dlv[1][1].empty());
  }
}

TEST(Build, LayoutIsCompleteAndResolvable) {
  const BuiltModel b = build(desk(2), params(6, Variant::HardSoft));
  const VariableLayout& L = b.layout;
  std::set<std::uint32_t> seen;
  auto take = [&](milp::VarId id) {
    ASSERT_TRUE(id.valid());
    ASSERT_LT(id.index, b.model.num_vars());
    EXPECT_TRUE(seen.insert(id.index).second) << b.model.var(id).tag.str();
    const auto found = L.find(b.model.var(id).tag);
    ASSERT_TRUE(found.has_value());
    EXPECT_EQ(found->index, id.index);
  };
  for (int i = 0; i < 1; ++i) {
    ASSERT_EQ(L.p_ee[i].size(), 7u);
    ASSERT_EQ(L.v_ee[i].size(), 6u);
    for (const Vec3Var& p : L.p_ee[i]) for (milp::VarId v : p) take(v);
    for (const Vec3Var& p : L.v_ee[i]) for (milp::VarId v : p) take(v);
    for (const Vec3Var& p : L.u_ee[i]) for (milp::VarId v : p) take(v);
    for (int j = 0; j < 2; ++j) {
      for (int t = 0; t <= 6; ++t) {
        take(L.grasp[i][j][t]);
        take(L.pick[i][j][t]);
        take(L.place[i][j][t]);
        take(L.carry[i][j][t]);
      }
    }
  }
  for (int j = 0; j < 2; ++j) {
    for (const Vec3Var& p : L.p_dlv[j]) for (milp::VarId v : p) take(v);
    for (milp::VarId v : L.done[j]) take(v);
  }
  for (milp::VarId v : L.complete) take(v);
  for (const auto* group : {&L.ee_obs, &L.ee_dlv, &L.dlv_obs, &L.dlv_dlv}) {
    for (const auto& row : *group) {
      for (const RegionVars& rv : row) {
        for (const auto& zr : rv.z) {
          ASSERT_EQ(zr.size(), 7u);
          for (milp::VarId v : zr) take(v);
        }
      }
    }
  }
  EXPECT_EQ(L.by_name.size(), b.model.num_vars());

  // Every constraint and the objective only reference existing variables.
  for (const milp::Constraint& c : b.model.constraints()) {
    for (const milp::Term& t : c.expr.terms()) EXPECT_LT(t.var.index, b.model.num_vars());
  }
  for (const milp::Term& t : b.model.objective().terms()) {
    EXPECT_LT(t.var.index, b.model.num_vars());
  }
  const std::set<std::string> expected = {
      "ee_dynamics", "speed_abs", "pick", "place", "carry", "grasp_per_delivery",
      "grasp_per_effector", "carry_offset", "pick_offset", "place_offset", "delivery_motion",
      "at_target", "done_not_grasped", "release_at_target", "done_monotone", "done_final",
      "completion", "ee_obs_region", "ee_dlv_region", "dlv_obs_region", "dlv_dlv_region",
      "ee_obs_shared", "ee_dlv_shared", "dlv_obs_follow", "dlv_dlv_follow"};
  for (const auto& [tag, n] : b.report.constraints_by_tag) {
    EXPECT_TRUE(expected.count(tag)) << tag;
    EXPECT_GT(n, 0u);
  }
  EXPECT_EQ(b.report.constraints_by_tag.count("dlv_obs_shared"), 0u);
}

TEST(Build, BaselineHasSharedRowsForDeliveries) {
  const BuiltModel b = build(desk(2), params(4, Variant::Baseline));
  EXPECT_GT(b.report.constraints_by_tag.at("dlv_obs_shared"), 0u);
  EXPECT_GT(b.report.constraints_by_tag.at("dlv_dlv_shared"), 0u);
  EXPECT_EQ(b.report.constraints_by_tag.count("dlv_obs_follow"), 0u);
}

TEST(Build, StartAndInitialGraspAreFixed) {
  const Scenario s = desk(1);
  const BuiltModel b = build(s, params(4, Variant::Hard));
  for (std::size_t a = 0; a < 3; ++a) {
    const milp::VarSpec& p = b.model.var(b.layout.p_ee[0][0][a]);
    EXPECT_EQ(p.lb, s.end_effectors[0].initial[a]);
    EXPECT_EQ(p.ub, p.lb);
    const milp::VarSpec& d = b.model.var(b.layout.p_dlv[0][0][a]);
    EXPECT_EQ(d.lb, s.deliveries[0].initial[a]);
    EXPECT_EQ(d.ub, d.lb);
    const milp::VarSpec& v = b.model.var(b.layout.v_ee[0][2][a]);
    EXPECT_EQ(v.ub, s.end_effectors[0].max_speed[a]);
    EXPECT_EQ(v.lb, -s.end_effectors[0].max_speed[a]);
  }
  EXPECT_EQ(b.model.var(b.layout.grasp[0][0][0]).ub, 0.0);
}

TEST(Build, DeliveriesAlreadyAtTargetGiveZeroTime) {
  Scenario s = desk(2);
  for (Delivery& d : s.deliveries) d.target = d.initial;
  for (Variant v : {Variant::Baseline, Variant::Hard, Variant::HardSoft}) {
    const BuiltModel b = build(s, params(4, v));
    const auto [sol, stats] = solver::branch_and_bound(b.model, task_first());
    ASSERT_EQ(sol.status, solver::SolveStatus::Optimal);
    EXPECT_NEAR(sol.objective, 0.0, 1e-9);
    for (const auto& per_j : b.layout.grasp[0]) {
      for (milp::VarId g : per_j) EXPECT_NEAR(sol.values[g.index], 0.0, 1e-9);
    }
    for (milp::VarId c : b.layout.complete) EXPECT_NEAR(sol.values[c.index], 1.0, 1e-9);
  }
}

TEST(Build, TargetInsideObstacleIsRejected) {
  Scenario s = desk(1);
  s.deliveries[0].target = {0.45, 0.25, 0.08};
  try {
    build(s, params(5, Variant::Baseline));
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("delivery 0"), std::string::npos) << e.what();
  }
}

TEST(Build, EffectorStartingInsideInflatedObstacleIsRejected) {
  Scenario s = desk(1);
  // Clear of the obstacle box itself but inside its inflation by the
  // end-effector's half width.
  s.end_effectors[0].initial = {0.45, 0.25, 0.145};
  try {
    build(s, params(5, Variant::Baseline));
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("infeasible scenario"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("end-effector 0"), std::string::npos) << e.what();
  }
}

TEST(Weight, MatchesWorkedValues) {
  Scenario s = desk(1);
  Params p = params(30, Variant::Baseline);
  EXPECT_NEAR(weight_w(0, p, s), 0.5 / (961 * 0.8), 1e-15);
  EXPECT_NEAR(weight_w(0, p, s), 6.504e-4, 5e-8);
  EXPECT_NEAR(weight_w(30, p, s), 1.3007e-3, 5e-8);
}

TEST(Weight, GeometricAndIncreasing) {
  Scenario s = desk(1);
  for (double alpha : {0.1, 1.0, 3.0}) {
    for (int n : {1, 7, 30}) {
      Params p = params(n, Variant::Baseline);
      p.alpha = alpha;
      for (int t = 0; t < n; ++t) {
        const double a = weight_w(t, p, s), b = weight_w(t + 1, p, s);
        EXPECT_GT(a, 0.0);
        EXPECT_GT(b, a);
        EXPECT_NEAR(b / a, std::pow(1.0 + alpha, 1.0 / n), 1e-12);
      }
    }
  }
}

TEST(Weight, ZeroSpeedIsAnError) {
  Scenario s = desk(1);
  s.end_effectors[0].max_speed = {};
  EXPECT_THROW(weight_w(0, params(5, Variant::Baseline), s), ScenarioError);
}

TEST(Weight, DistanceTermStaysBelowOneStep) {
  // Worst case: every effector at full speed on every axis at every step.
  Scenario s = desk(1);
  for (int n : {1, 8, 30}) {
    Params p = params(n, Variant::Baseline);
    double worst = 0.0;
    for (int t = 0; t < n; ++t) worst += weight_w(t, p, s) * s.end_effectors[0].max_speed.norm1();
    EXPECT_LT(worst, 1.0 / (n + 1));
  }
}

std::vector<Face> faces_of(const Scenario& s, const std::vector<int>& idx) {
  const RegionSet set = ee_delivery_regions(s, 0, 0);
  std::vector<Face> out;
  for (int r : idx) out.push_back(set.regions[r].face);
  return out;
}

TEST(Restricted, MostlyAlongXRestrictsY) {
  const Scenario s = desk(1);
  EXPECT_EQ(lesser_horizontal_axis(s, 0), Axis::Y);
  const auto r = select_restricted_regions(s, params(5, Variant::HardSoft));
  const std::vector<Face> want = {{Axis::Z, -1}, {Axis::Y, -1}, {Axis::Y, 1}};
  EXPECT_EQ(faces_of(s, r[0][0]), want);
}

TEST(Restricted, MostlyAlongYRestrictsX) {
  Scenario s = desk(1);
  s.workspace = {{0.45, 0.45, 0.16}, {0.9, 0.9, 0.28}};
  s.obstacles.clear();
  s.end_effectors[0].initial = {0.45, 0.1, 0.18};
  s.deliveries[0] = {{0.06, 0.06, 0.06}, {0.4, 0.2, 0.03}, {0.5, 0.8, 0.03}};
  EXPECT_EQ(lesser_horizontal_axis(s, 0), Axis::X);
  const auto r = select_restricted_regions(s, params(5, Variant::HardSoft));
  const std::vector<Face> want = {{Axis::Z, -1}, {Axis::X, -1}, {Axis::X, 1}};
  EXPECT_EQ(faces_of(s, r[0][0]), want);
}

TEST(Restricted, TieGoesToY) {
  Scenario s = desk(1);
  s.workspace = {{0.45, 0.45, 0.16}, {0.9, 0.9, 0.28}};
  s.obstacles.clear();
  s.end_effectors[0].initial = {0.2, 0.2, 0.18};
  s.deliveries[0] = {{0.06, 0.06, 0.06}, {0.4, 0.4, 0.03}, {0.6, 0.6, 0.03}};
  EXPECT_EQ(lesser_horizontal_axis(s, 0), Axis::Y);
}

TEST(Restricted, FarthestTargetDecides) {
  Scenario s = desk(2);
  s.workspace = {{0.45, 0.45, 0.16}, {0.9, 0.9, 0.28}};
  s.obstacles.clear();
  s.end_effectors[0].initial = {0.1, 0.1, 0.18};
  // Near target lies along x, far target along y.
  s.deliveries[0] = {{0.06, 0.06, 0.06}, {0.3, 0.5, 0.03}, {0.3, 0.12, 0.03}};
  s.deliveries[1] = {{0.06, 0.06, 0.06}, {0.5, 0.3, 0.03}, {0.15, 0.8, 0.03}};
  EXPECT_EQ(lesser_horizontal_axis(s, 0), Axis::X);
}

TEST(Restricted, FlatScenarioKeepsOnlyHorizontalFaces) {
  Scenario s;
  s.workspace = {{0.45, 0.25, 0.05}, {0.9, 0.5, 0.0}};
  s.end_effectors.push_back({{0.04, 0.04, 0.04}, {0.1, 0.25, 0.05}, {0.4, 0.2, 0.2}, {}});
  s.deliveries.push_back({{0.06, 0.06, 0.06}, {0.3, 0.25, 0.05}, {0.8, 0.25, 0.05}});
  const auto r = select_restricted_regions(s, params(5, Variant::HardSoft));
  const std::vector<Face> want = {{Axis::Y, -1}, {Axis::Y, 1}};
  EXPECT_EQ(faces_of(s, r[0][0]), want);
}

TEST(Objective, RoutePenaltyOnlyInSoftVariant) {
  const Scenario s = desk(1);
  const BuiltModel hard = build(s, params(5, Variant::Hard));
  const BuiltModel soft = build(s, params(5, Variant::HardSoft));
  for (int r : soft.layout.restricted[0][0]) {
    for (milp::VarId z : soft.layout.ee_dlv[0][0].z[r]) {
      EXPECT_EQ(soft.model.objective().coefficient(z), 1.0);
    }
    for (milp::VarId z : hard.layout.ee_dlv[0][0].z[r]) {
      EXPECT_EQ(hard.model.objective().coefficient(z), 0.0);
    }
  }
  EXPECT_TRUE(hard.layout.restricted[0][0].empty());
}

// Substituting a solved hard assignment into the baseline model: the
// delivery-side indicators come from the follow rule while carried and from
// plain geometry while resting.
TEST(Reformulation, HardSolutionSatisfiesBaseline) {
  const Scenario s = desk(1);
  const int n = 8;
  const BuiltModel hard = build(s, params(n, Variant::Hard));
  const BuiltModel base = build(s, params(n, Variant::Baseline));
  const auto [sol, stats] = solver::branch_and_bound(hard.model, task_first());
  ASSERT_EQ(sol.status, solver::SolveStatus::Optimal);

  std::vector<double> x(base.model.num_vars(), 0.0);
  for (std::size_t v = 0; v < base.model.num_vars(); ++v) {
    if (auto h = hard.layout.find(base.model.vars()[v].tag)) x[v] = sol.values[h->index];
  }
  for (int t = 0; t <= n; ++t) {
    if (sol.values[hard.layout.carry[0][0][t].index] > 0.5) continue;
    Vec3 p;
    for (std::size_t a = 0; a < 3; ++a) p[a] = sol.values[hard.layout.p_dlv[0][t][a].index];
    const RegionVars& rv = base.layout.dlv_obs[0][0];
    for (std::size_t r = 0; r < rv.z.size(); ++r) {
      x[rv.z[r][t].index] = contains(rv.set.regions[r], p, 1e-9) ? 1.0 : 0.0;
    }
  }
  milp::evaluate_logic(base.model, x);
  EXPECT_LE(base.model.max_violation(x), 1e-6);
  EXPECT_LE(base.model.max_integrality_violation(x), 1e-6);
  EXPECT_NEAR(base.model.objective().evaluate(x), sol.objective, 1e-6);
}

// The hard variants tie a carried delivery to its end-effector's region.
// Under a low shelf the delivery fits beneath it while the hand must stay
// beside it; baseline uses that pass, the hard model has to go over the top.
TEST(Reformulation, HardIsARestrictionUnderALowShelf) {
  Scenario s = desk(1);
  s.deliveries[0] = {{0.06, 0.06, 0.06},
                     {0.11245820661319891, 0.0674180948967305, 0.03},
                     {0.8498704367801042, 0.2913075688259541, 0.03}};
  Params p;
  p.steps = 10;
  double obj[2], jt[2];
  for (Variant v : {Variant::Baseline, Variant::Hard}) {
    p.variant = v;
    const BuiltModel built = build(s, p);
    const auto [sol, st] = solver::branch_and_bound(built.model, task_first());
    ASSERT_EQ(sol.status, solver::SolveStatus::Optimal);
    const int k = v == Variant::Hard;
    obj[k] = sol.objective;
    double c = 0.0;
    for (milp::VarId x : built.layout.complete) c += sol.values[x.index];
    jt[k] = 1.0 - c / (p.steps + 1);
  }
  EXPECT_NEAR(jt[0], jt[1], 1e-9);
  EXPECT_GT(obj[1], obj[0] + 1e-3);
}

}  // namespace
}  // namespace tamp

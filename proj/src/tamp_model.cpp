// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include "tampmilp/tamp_model.hpp"

#include <cmath>

namespace tamp {

using milp::LinExpr;
using milp::Literal;
using milp::MilpModel;
using milp::Sense;
using milp::VarId;
using milp::VarTag;

std::optional<VarId> VariableLayout::find(const VarTag& tag) const {
  auto it = by_name.find(tag.str());
  if (it == by_name.end()) return std::nullopt;
  return it->second;
}

Vec3 contact_offset(const Scenario& s, int i, int j) {
  const Vec3 w = s.end_effectors[i].width + s.deliveries[j].width;
  return {0.0, 0.0, 0.5 * w.z};
}

Vec3 approach_offset(const Scenario& s, int i, int j) {
  return contact_offset(s, i, j) + s.end_effectors[i].margin;
}

RegionSet ee_obstacle_regions(const Scenario& s, int i, int k) {
  RegionSet set = make_regions(s.obstacles[k], s.workspace, s.end_effectors[i].width);
  set.owner = {BodyRef::Kind::Obstacle, k};
  set.mover = {BodyRef::Kind::EndEffector, i};
  return set;
}

RegionSet ee_delivery_regions(const Scenario& s, int i, int j) {
  const Delivery& d = s.deliveries[j];
  RegionSet set = make_regions({d.initial, d.width}, relative_frame(s.workspace, d.initial),
                               s.end_effectors[i].width, Frame::relative_to(j));
  set.owner = {BodyRef::Kind::Delivery, j};
  set.mover = {BodyRef::Kind::EndEffector, i};
  return set;
}

RegionSet delivery_obstacle_regions(const Scenario& s, int j, int k) {
  RegionSet set = make_regions(s.obstacles[k], s.workspace, s.deliveries[j].width);
  set.owner = {BodyRef::Kind::Obstacle, k};
  set.mover = {BodyRef::Kind::Delivery, j};
  return set;
}

RegionSet delivery_delivery_regions(const Scenario& s, int j1, int j2) {
  const Delivery& d = s.deliveries[j2];
  RegionSet set = make_regions({d.initial, d.width}, relative_frame(s.workspace, d.initial),
                               s.deliveries[j1].width, Frame::relative_to(j2));
  set.owner = {BodyRef::Kind::Delivery, j2};
  set.mover = {BodyRef::Kind::Delivery, j1};
  return set;
}

double weight_w(int t, const Params& params, const Scenario& scenario) {
  double vsum = 0.0;
  for (const EndEffector& e : scenario.end_effectors) vsum += e.max_speed.norm1();
  if (!(vsum > 0.0)) throw ScenarioError("speed bounds sum to zero");
  const double n = params.steps;
  return std::pow(1.0 + params.alpha, t / n - 1.0) / ((n + 1.0) * (n + 1.0) * vsum);
}

Axis lesser_horizontal_axis(const Scenario& s, int i) {
  const Vec3 p0 = s.end_effectors[i].initial;
  double best = -1.0;
  Vec3 far = p0;
  for (const Delivery& d : s.deliveries) {
    const Vec3 diff = d.target - p0;
    const double dist = std::sqrt(diff.x * diff.x + diff.y * diff.y + diff.z * diff.z);
    if (dist > best) {
      best = dist;
      far = d.target;
    }
  }
  const double dx = std::abs(far.x - p0.x);
  const double dy = std::abs(far.y - p0.y);
  return dx < dy ? Axis::X : Axis::Y;
}

std::vector<std::vector<std::vector<int>>> select_restricted_regions(const Scenario& s,
                                                                     const Params&) {
  std::vector<std::vector<std::vector<int>>> out(s.end_effectors.size());
  for (std::size_t i = 0; i < s.end_effectors.size(); ++i) {
    const Axis a = lesser_horizontal_axis(s, static_cast<int>(i));
    for (std::size_t j = 0; j < s.deliveries.size(); ++j) {
      const RegionSet set = ee_delivery_regions(s, static_cast<int>(i), static_cast<int>(j));
      std::vector<int> idx;
      for (Face f : {Face{Axis::Z, -1}, Face{a, -1}, Face{a, 1}}) {
        for (std::size_t r = 0; r < set.regions.size(); ++r) {
          if (set.regions[r].face == f) idx.push_back(static_cast<int>(r));
        }
      }
      out[i].push_back(std::move(idx));
    }
  }
  return out;
}

namespace {

class Builder {
 public:
  Builder(const Scenario& s, const Params& p) : s_(s), p_(p), n_(p.steps) {
    n_ee_ = static_cast<int>(s.end_effectors.size());
    n_dlv_ = static_cast<int>(s.deliveries.size());
    n_obs_ = static_cast<int>(s.obstacles.size());
    hard_ = p.variant != Variant::Baseline;
  }

  BuiltModel run() {
    make_region_sets();
    check_start_and_goal();
    add_kinematics();
    add_actions();
    add_delivery_dynamics();
    add_completion();
    add_regions();
    add_objective();
    return finish();
  }

 private:
  static VarTag tag(const char* sym, std::vector<int> idx) { return {sym, std::move(idx)}; }

  Vec3Var vec_var(const char* sym, std::vector<int> idx, const Vec3& lo, const Vec3& hi) {
    Vec3Var out;
    idx.push_back(0);
    for (std::size_t a = 0; a < 3; ++a) {
      idx.back() = static_cast<int>(a);
      out[a] = m_.add_continuous(lo[a], hi[a], tag(sym, idx));
    }
    return out;
  }

  static LinExpr axis(const Vec3Var& v, std::size_t a) { return LinExpr(v[a]); }

  // -M (1 - theta) <= e <= M (1 - theta) with the tightest M for e.
  void switch_rows(const LinExpr& e, VarId theta, const std::string& t) {
    const double big = milp::tightest_big_m(m_, e);
    m_.add_constraint(LinExpr(e).add(big, theta), Sense::Le, big, t);
    m_.add_constraint(LinExpr(e).add(-big, theta), Sense::Ge, -big, t);
  }

  // e inside region box when z = 1; the row collapses to e's own range when
  // z = 0. Rows implied by that range are omitted.
  void region_rows(const std::array<LinExpr, 3>& e, const Aabb& box, VarId z, const std::string& t) {
    const Vec3 rlo = box.lo(), rhi = box.hi();
    for (std::size_t a = 0; a < 3; ++a) {
      const milp::Interval range = m_.bounds(e[a]);
      const double up = range.hi - rhi[a];
      if (up > 1e-9) m_.add_constraint(LinExpr(e[a]).add(up, z), Sense::Le, range.hi, t);
      const double down = rlo[a] - range.lo;
      if (down > 1e-9) m_.add_constraint(LinExpr(e[a]).add(-down, z), Sense::Ge, range.lo, t);
    }
  }

  void make_region_sets() {
    L_.steps = n_;
    L_.ee_obs.resize(n_ee_);
    L_.ee_dlv.resize(n_ee_);
    for (int i = 0; i < n_ee_; ++i) {
      for (int k = 0; k < n_obs_; ++k) L_.ee_obs[i].push_back({ee_obstacle_regions(s_, i, k), {}});
      for (int j = 0; j < n_dlv_; ++j) L_.ee_dlv[i].push_back({ee_delivery_regions(s_, i, j), {}});
    }
    L_.dlv_obs.resize(n_dlv_);
    L_.dlv_dlv.resize(n_dlv_);
    for (int j = 0; j < n_dlv_; ++j) {
      for (int k = 0; k < n_obs_; ++k) L_.dlv_obs[j].push_back({delivery_obstacle_regions(s_, j, k), {}});
      for (int j2 = 0; j2 < n_dlv_; ++j2) {
        if (j2 == j) L_.dlv_dlv[j].push_back({});
        else L_.dlv_dlv[j].push_back({delivery_delivery_regions(s_, j, j2), {}});
      }
    }
  }

  void check_start_and_goal() {
    auto require = [](const RegionSet& set, const Vec3& q, const std::string& what) {
      if (!set.any_contains(q, 1e-9)) throw ScenarioError("infeasible scenario: " + what);
    };
    for (int i = 0; i < n_ee_; ++i) {
      const Vec3 p = s_.end_effectors[i].initial;
      const std::string who = "end-effector " + std::to_string(i);
      for (int k = 0; k < n_obs_; ++k) {
        require(L_.ee_obs[i][k].set, p, who + " starts inside obstacle " + std::to_string(k));
      }
      for (int j = 0; j < n_dlv_; ++j) {
        require(L_.ee_dlv[i][j].set, p, who + " starts inside delivery " + std::to_string(j));
      }
    }
    for (int j = 0; j < n_dlv_; ++j) {
      const Delivery& d = s_.deliveries[j];
      const std::string who = "delivery " + std::to_string(j);
      for (int k = 0; k < n_obs_; ++k) {
        require(L_.dlv_obs[j][k].set, d.initial, who + " starts inside obstacle " + std::to_string(k));
        require(L_.dlv_obs[j][k].set, d.target, who + " target is inside obstacle " + std::to_string(k));
      }
      for (int j2 = 0; j2 < n_dlv_; ++j2) {
        if (j2 == j) continue;
        const Delivery& o = s_.deliveries[j2];
        require(L_.dlv_dlv[j][j2].set, d.initial,
                who + " starts overlapping delivery " + std::to_string(j2));
        require(L_.dlv_dlv[j][j2].set, d.target - o.target + o.initial,
                who + " target overlaps the target of delivery " + std::to_string(j2));
      }
    }
  }

  void add_kinematics() {
    const Vec3 lo = s_.workspace.lo(), hi = s_.workspace.hi();
    L_.p_ee.resize(n_ee_);
    L_.v_ee.resize(n_ee_);
    L_.u_ee.resize(n_ee_);
    for (int i = 0; i < n_ee_; ++i) {
      const EndEffector& e = s_.end_effectors[i];
      for (int t = 0; t <= n_; ++t) L_.p_ee[i].push_back(vec_var("p_ee", {i, t}, lo, hi));
      for (int t = 0; t < n_; ++t) {
        L_.v_ee[i].push_back(vec_var("v_ee", {i, t}, -1.0 * e.max_speed, e.max_speed));
        L_.u_ee[i].push_back(vec_var("u_ee", {i, t}, {}, e.max_speed));
      }
      for (std::size_t a = 0; a < 3; ++a) m_.fix(L_.p_ee[i][0][a], e.initial[a]);
      for (int t = 0; t < n_; ++t) {
        for (std::size_t a = 0; a < 3; ++a) {
          const LinExpr dyn = axis(L_.p_ee[i][t + 1], a) - axis(L_.p_ee[i][t], a) -
                              p_.dt * axis(L_.v_ee[i][t], a);
          m_.add_constraint(dyn, Sense::Eq, 0.0, "ee_dynamics");
          m_.add_constraint(axis(L_.v_ee[i][t], a) - axis(L_.u_ee[i][t], a), Sense::Le, 0.0,
                            "speed_abs");
          m_.add_constraint(axis(L_.v_ee[i][t], a) + axis(L_.u_ee[i][t], a), Sense::Ge, 0.0,
                            "speed_abs");
        }
      }
    }
    L_.p_dlv.resize(n_dlv_);
    for (int j = 0; j < n_dlv_; ++j) {
      for (int t = 0; t <= n_; ++t) L_.p_dlv[j].push_back(vec_var("p_dlv", {j, t}, lo, hi));
      for (std::size_t a = 0; a < 3; ++a) m_.fix(L_.p_dlv[j][0][a], s_.deliveries[j].initial[a]);
    }
  }

  void add_actions() {
    auto grid = [&] {
      return std::vector<std::vector<std::vector<VarId>>>(n_ee_, std::vector<std::vector<VarId>>(n_dlv_));
    };
    L_.grasp = grid();
    L_.pick = grid();
    L_.place = grid();
    L_.carry = grid();
    for (int i = 0; i < n_ee_; ++i) {
      for (int j = 0; j < n_dlv_; ++j) {
        auto& g = L_.grasp[i][j];
        for (int t = 0; t <= n_; ++t) g.push_back(m_.add_binary(tag("grasp", {i, j, t})));
        m_.fix(g[0], 0.0);  // deliveries rest at the start
        for (int t = 0; t <= n_; ++t) {
          // Pick: first grasped step. Place: first released step.
          const VarId pk = m_.add_unit(tag("pick", {i, j, t}));
          const VarId pl = m_.add_unit(tag("place", {i, j, t}));
          if (t == 0) {
            const std::vector<Literal> ops = {Literal(g[0])};
            milp::constrain_and(m_, pk, ops, "pick");
            m_.fix(pl, 0.0);
          } else {
            const std::vector<Literal> pk_ops = {Literal(g[t]), !g[t - 1]};
            milp::constrain_and(m_, pk, pk_ops, "pick");
            const std::vector<Literal> pl_ops = {!g[t], Literal(g[t - 1])};
            milp::constrain_and(m_, pl, pl_ops, "place");
          }
          const VarId cr = m_.add_unit(tag("carry", {i, j, t}));
          m_.add_constraint(LinExpr(cr) - LinExpr(g[t]) + LinExpr(pk), Sense::Eq, 0.0, "carry");
          L_.pick[i][j].push_back(pk);
          L_.place[i][j].push_back(pl);
          L_.carry[i][j].push_back(cr);
        }
      }
    }
    for (int t = 0; t <= n_; ++t) {
      for (int j = 0; j < n_dlv_; ++j) {
        LinExpr sum;
        for (int i = 0; i < n_ee_; ++i) sum.add(1.0, L_.grasp[i][j][t]);
        m_.add_constraint(sum, Sense::Le, 1.0, "grasp_per_delivery");
      }
      for (int i = 0; i < n_ee_; ++i) {
        LinExpr sum;
        for (int j = 0; j < n_dlv_; ++j) sum.add(1.0, L_.grasp[i][j][t]);
        m_.add_constraint(sum, Sense::Le, 1.0, "grasp_per_effector");
      }
    }
  }

  void add_delivery_dynamics() {
    for (int i = 0; i < n_ee_; ++i) {
      for (int j = 0; j < n_dlv_; ++j) {
        const Vec3 on = contact_offset(s_, i, j);
        const Vec3 off = approach_offset(s_, i, j);
        for (int t = 0; t <= n_; ++t) {
          for (std::size_t a = 0; a < 3; ++a) {
            const LinExpr rel = axis(L_.p_dlv[j][t], a) - axis(L_.p_ee[i][t], a);
            switch_rows(LinExpr(rel).add_constant(on[a]), L_.carry[i][j][t], "carry_offset");
            switch_rows(LinExpr(rel).add_constant(off[a]), L_.pick[i][j][t], "pick_offset");
            switch_rows(LinExpr(rel).add_constant(off[a]), L_.place[i][j][t], "place_offset");
          }
        }
      }
    }
    for (int j = 0; j < n_dlv_; ++j) {
      for (int t = 0; t < n_; ++t) {
        for (std::size_t a = 0; a < 3; ++a) {
          const LinExpr step = axis(L_.p_dlv[j][t + 1], a) - axis(L_.p_dlv[j][t], a);
          const double big = milp::tightest_big_m(m_, step);
          LinExpr up(step), down(step);
          for (int i = 0; i < n_ee_; ++i) {
            up.add(-big, L_.grasp[i][j][t]);
            down.add(big, L_.grasp[i][j][t]);
          }
          m_.add_constraint(up, Sense::Le, 0.0, "delivery_motion");
          m_.add_constraint(down, Sense::Ge, 0.0, "delivery_motion");
        }
      }
    }
  }

  void add_completion() {
    L_.done.resize(n_dlv_);
    for (int j = 0; j < n_dlv_; ++j) {
      auto& psi = L_.done[j];
      for (int t = 0; t <= n_; ++t) psi.push_back(m_.add_binary(tag("done", {j, t})));
      for (int t = 0; t <= n_; ++t) {
        for (std::size_t a = 0; a < 3; ++a) {
          switch_rows(axis(L_.p_dlv[j][t], a).add_constant(-s_.deliveries[j].target[a]), psi[t],
                      "at_target");
        }
        LinExpr released(psi[t]);
        for (int i = 0; i < n_ee_; ++i) released.add(1.0, L_.grasp[i][j][t]);
        m_.add_constraint(released, Sense::Le, 1.0, "done_not_grasped");
      }
      for (int t = 0; t < n_; ++t) {
        LinExpr e = LinExpr(psi[t + 1]) - LinExpr(psi[t]);
        for (int i = 0; i < n_ee_; ++i) {
          e.add(-1.0, L_.grasp[i][j][t]);
          e.add(1.0, L_.grasp[i][j][t + 1]);
        }
        m_.add_constraint(e, Sense::Ge, 0.0, "release_at_target");
        m_.add_constraint(LinExpr(psi[t]) - LinExpr(psi[t + 1]), Sense::Le, 0.0, "done_monotone");
      }
      m_.add_constraint(LinExpr(psi[n_]), Sense::Eq, 1.0, "done_final");
    }
    for (int t = 0; t <= n_; ++t) {
      const VarId c = m_.add_unit(tag("complete", {t}));
      std::vector<Literal> ops;
      for (int tau = t; tau <= n_; ++tau) {
        for (int j = 0; j < n_dlv_; ++j) ops.emplace_back(L_.done[j][tau]);
      }
      milp::constrain_and(m_, c, ops, "completion");
      L_.complete.push_back(c);
    }
  }

  void indicators(RegionVars& rv, const char* sym, std::vector<int> idx, bool binary) {
    rv.z.resize(rv.set.regions.size());
    idx.push_back(0);
    idx.push_back(0);
    for (std::size_t r = 0; r < rv.set.regions.size(); ++r) {
      idx[idx.size() - 2] = rv.set.regions[r].face.ordinal();
      for (int t = 0; t <= n_; ++t) {
        idx.back() = t;
        rv.z[r].push_back(binary ? m_.add_binary(tag(sym, idx)) : m_.add_unit(tag(sym, idx)));
      }
    }
  }

  // Some region holds the mover at both t and t+1.
  void shared_rows(const RegionVars& rv, const char* sym, std::vector<int> idx, const std::string& t_) {
    idx.push_back(0);
    idx.push_back(0);
    for (int t = 0; t < n_; ++t) {
      LinExpr any;
      for (std::size_t r = 0; r < rv.z.size(); ++r) {
        idx[idx.size() - 2] = rv.set.regions[r].face.ordinal();
        idx.back() = t;
        const VarId both = milp::encode_and(m_, {Literal(rv.z[r][t]), Literal(rv.z[r][t + 1])},
                                            t_, tag(sym, idx));
        any.add(1.0, both);
      }
      m_.add_constraint(any, Sense::Ge, 1.0, t_);
    }
  }

  // Hard variants: a delivery-side indicator follows the carrying
  // end-effector's indicator on the same face.
  void follow_rows(RegionVars& rv, const std::vector<const RegionVars*>& ee_sets, int j,
                   const char* sym, std::vector<int> idx, const std::string& t_) {
    idx.push_back(0);
    idx.push_back(0);
    idx.push_back(0);
    for (std::size_t r = 0; r < rv.z.size(); ++r) {
      const Face face = rv.set.regions[r].face;
      for (int t = 0; t <= n_; ++t) {
        std::vector<Literal> ops;
        for (int i = 0; i < n_ee_; ++i) {
          const RegionVars& e = *ee_sets[i];
          for (std::size_t q = 0; q < e.z.size(); ++q) {
            if (!(e.set.regions[q].face == face)) continue;
            idx[idx.size() - 3] = i;
            idx[idx.size() - 2] = face.ordinal();
            idx.back() = t;
            ops.emplace_back(milp::encode_and(
                m_, {Literal(e.z[q][t]), Literal(L_.carry[i][j][t])}, t_, tag(sym, idx)));
          }
        }
        if (ops.empty()) {
          m_.fix(rv.z[r][t], 0.0);
          continue;
        }
        milp::constrain_or(m_, rv.z[r][t], ops, t_);
      }
    }
  }

  void add_regions() {
    for (int i = 0; i < n_ee_; ++i) {
      for (int k = 0; k < n_obs_; ++k) indicators(L_.ee_obs[i][k], "z_ee_obs", {i, k}, true);
      for (int j = 0; j < n_dlv_; ++j) indicators(L_.ee_dlv[i][j], "z_ee_dlv", {i, j}, true);
    }
    for (int j = 0; j < n_dlv_; ++j) {
      for (int k = 0; k < n_obs_; ++k) indicators(L_.dlv_obs[j][k], "z_dlv_obs", {j, k}, !hard_);
      for (int j2 = 0; j2 < n_dlv_; ++j2) {
        if (j2 != j) indicators(L_.dlv_dlv[j][j2], "z_dlv_dlv", {j, j2}, !hard_);
      }
    }

    auto pos = [](const Vec3Var& v) {
      return std::array<LinExpr, 3>{LinExpr(v[0]), LinExpr(v[1]), LinExpr(v[2])};
    };
    // mover - (owner - owner_initial)
    auto rel = [](const Vec3Var& mover, const Vec3Var& owner, const Vec3& owner0) {
      std::array<LinExpr, 3> e;
      for (std::size_t a = 0; a < 3; ++a) {
        e[a] = LinExpr(mover[a]) - LinExpr(owner[a]);
        e[a].add_constant(owner0[a]);
      }
      return e;
    };

    for (int t = 0; t <= n_; ++t) {
      for (int i = 0; i < n_ee_; ++i) {
        for (int k = 0; k < n_obs_; ++k) {
          const RegionVars& rv = L_.ee_obs[i][k];
          for (std::size_t r = 0; r < rv.z.size(); ++r) {
            region_rows(pos(L_.p_ee[i][t]), rv.set.regions[r].box, rv.z[r][t], "ee_obs_region");
          }
        }
        for (int j = 0; j < n_dlv_; ++j) {
          const RegionVars& rv = L_.ee_dlv[i][j];
          const auto e = rel(L_.p_ee[i][t], L_.p_dlv[j][t], s_.deliveries[j].initial);
          for (std::size_t r = 0; r < rv.z.size(); ++r) {
            region_rows(e, rv.set.regions[r].box, rv.z[r][t], "ee_dlv_region");
          }
        }
      }
      for (int j = 0; j < n_dlv_; ++j) {
        for (int k = 0; k < n_obs_; ++k) {
          const RegionVars& rv = L_.dlv_obs[j][k];
          for (std::size_t r = 0; r < rv.z.size(); ++r) {
            region_rows(pos(L_.p_dlv[j][t]), rv.set.regions[r].box, rv.z[r][t], "dlv_obs_region");
          }
        }
        for (int j2 = 0; j2 < n_dlv_; ++j2) {
          if (j2 == j) continue;
          const RegionVars& rv = L_.dlv_dlv[j][j2];
          const auto e = rel(L_.p_dlv[j][t], L_.p_dlv[j2][t], s_.deliveries[j2].initial);
          for (std::size_t r = 0; r < rv.z.size(); ++r) {
            region_rows(e, rv.set.regions[r].box, rv.z[r][t], "dlv_dlv_region");
          }
        }
      }
    }

    for (int i = 0; i < n_ee_; ++i) {
      for (int k = 0; k < n_obs_; ++k) shared_rows(L_.ee_obs[i][k], "both_ee_obs", {i, k}, "ee_obs_shared");
      for (int j = 0; j < n_dlv_; ++j) shared_rows(L_.ee_dlv[i][j], "both_ee_dlv", {i, j}, "ee_dlv_shared");
    }
    if (!hard_) {
      for (int j = 0; j < n_dlv_; ++j) {
        for (int k = 0; k < n_obs_; ++k) {
          shared_rows(L_.dlv_obs[j][k], "both_dlv_obs", {j, k}, "dlv_obs_shared");
        }
        for (int j2 = 0; j2 < n_dlv_; ++j2) {
          if (j2 != j) shared_rows(L_.dlv_dlv[j][j2], "both_dlv_dlv", {j, j2}, "dlv_dlv_shared");
        }
      }
      return;
    }
    for (int j = 0; j < n_dlv_; ++j) {
      for (int k = 0; k < n_obs_; ++k) {
        std::vector<const RegionVars*> ee;
        for (int i = 0; i < n_ee_; ++i) ee.push_back(&L_.ee_obs[i][k]);
        follow_rows(L_.dlv_obs[j][k], ee, j, "follow_dlv_obs", {j, k}, "dlv_obs_follow");
      }
      for (int j2 = 0; j2 < n_dlv_; ++j2) {
        if (j2 == j) continue;
        std::vector<const RegionVars*> ee;
        for (int i = 0; i < n_ee_; ++i) ee.push_back(&L_.ee_dlv[i][j2]);
        follow_rows(L_.dlv_dlv[j][j2], ee, j, "follow_dlv_dlv", {j, j2}, "dlv_dlv_follow");
      }
    }
  }

  void add_objective() {
    LinExpr obj;
    const double per_step = 1.0 / (n_ + 1.0);
    obj.add_constant(1.0);  // (1/(N+1)) sum_t (1 - C_t)
    for (VarId c : L_.complete) obj.add(-per_step, c);
    for (int t = 0; t < n_; ++t) {
      const double w = weight_w(t, p_, s_);
      for (int i = 0; i < n_ee_; ++i) {
        for (std::size_t a = 0; a < 3; ++a) obj.add(w, L_.u_ee[i][t][a]);
      }
    }
    if (p_.variant == Variant::HardSoft) {
      L_.restricted = select_restricted_regions(s_, p_);
      for (int i = 0; i < n_ee_; ++i) {
        for (int j = 0; j < n_dlv_; ++j) {
          for (int r : L_.restricted[i][j]) {
            for (int t = 0; t <= n_; ++t) obj.add(1.0, L_.ee_dlv[i][j].z[r][t]);
          }
        }
      }
    } else {
      L_.restricted.assign(n_ee_, std::vector<std::vector<int>>(n_dlv_));
    }
    m_.set_objective(std::move(obj));
  }

  BuiltModel finish() {
    BuiltModel out;
    for (std::size_t v = 0; v < m_.num_vars(); ++v) {
      L_.by_name.emplace(m_.vars()[v].tag.str(), VarId{static_cast<std::uint32_t>(v)});
    }
    BuildReport& rep = out.report;
    rep.variant = p_.variant;
    rep.binaries = m_.count(milp::VarKind::Binary);
    rep.unit_interval = m_.count(milp::VarKind::UnitInterval);
    rep.continuous = m_.count(milp::VarKind::Continuous);
    rep.constraints = m_.num_constraints();
    for (const milp::Constraint& c : m_.constraints()) ++rep.constraints_by_tag[c.tag];
    std::size_t regions = 0;
    for (int j = 0; j < n_dlv_; ++j) {
      for (const RegionVars& rv : L_.dlv_obs[j]) regions += rv.set.regions.size();
      for (const RegionVars& rv : L_.dlv_dlv[j]) regions += rv.set.regions.size();
    }
    rep.relaxable_binaries = regions * static_cast<std::size_t>(n_ + 1);
    out.model = std::move(m_);
    out.layout = std::move(L_);
    return out;
  }

  const Scenario& s_;
  const Params& p_;
  int n_;
  int n_ee_ = 0, n_dlv_ = 0, n_obs_ = 0;
  bool hard_ = false;
  MilpModel m_;
  VariableLayout L_;
};

}  // namespace

BuiltModel build(const Scenario& scenario, const Params& params) {
  validate(scenario);
  validate(params);
  try {
    return Builder(scenario, params).run();
  } catch (const GeometryError& e) {
    throw ScenarioError(std::string("infeasible scenario: ") + e.what());
  }
}

}  // namespace tamp

// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include "tampmilp/plan.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace tamp {

using nlohmann::json;

namespace {

const char* kAxis[3] = {"x", "y", "z"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Vec3 read(const std::vector<double>& x, const Vec3Var& v) {
  return {x[v[0].index], x[v[1].index], x[v[2].index]};
}

std::string action_label(const StepAction& a) {
  if (a.kind == Action::Move) return "move";
  return to_string(a.kind) + ":" + std::to_string(a.delivery);
}

StepAction parse_label(const std::string& s) {
  const auto colon = s.find(':');
  StepAction a;
  a.kind = parse_action(s.substr(0, colon));
  if (a.kind == Action::Move) {
    if (colon != std::string::npos) throw PlanError("move takes no delivery: '" + s + "'");
    return a;
  }
  if (colon == std::string::npos) throw PlanError("action '" + s + "' needs a delivery index");
  try {
    a.delivery = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw PlanError("bad delivery index in action '" + s + "'");
  }
  return a;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw PlanError("expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Collects the first failure of one check family.
class Family {
 public:
  explicit Family(std::string name) { result_.family = std::move(name); }

  void fail(const std::string& where) {
    if (result_.pass) {
      result_.pass = false;
      result_.first_offender = where;
    }
  }
  bool failed() const { return !result_.pass; }
  CheckResult done() { return std::move(result_); }

 private:
  CheckResult result_;
};

}  // namespace

std::string to_string(Action a) {
  switch (a) {
    case Action::Move: return "move";
    case Action::Pick: return "pick";
    case Action::Carry: return "carry";
    case Action::Place: return "place";
  }
  return "?";
}

Action parse_action(const std::string& s) {
  if (s == "move") return Action::Move;
  if (s == "pick") return Action::Pick;
  if (s == "carry") return Action::Carry;
  if (s == "place") return Action::Place;
  throw PlanError("unknown action '" + s + "'");
}

int Plan::grasped(int i, int t) const {
  const StepAction& a = actions[i][t];
  return a.kind == Action::Pick || a.kind == Action::Carry ? a.delivery : -1;
}

Plan extract_plan(const solver::Solution& solution, const VariableLayout& layout,
                  const Scenario& scenario, const Params& params) {
  if (!solution.has_values()) throw PlanError("solution has no values");
  const std::vector<double>& x = solution.values;
  const int n = layout.steps;
  const int n_ee = static_cast<int>(layout.p_ee.size());
  const int n_dlv = static_cast<int>(layout.p_dlv.size());

  Plan plan;
  plan.steps = n;
  plan.dt = params.dt;
  plan.variant = params.variant;
  plan.ee_positions.resize(n_ee);
  plan.ee_velocities.resize(n_ee);
  plan.actions.assign(n_ee, std::vector<StepAction>(n + 1));
  for (int i = 0; i < n_ee; ++i) {
    for (int t = 0; t <= n; ++t) plan.ee_positions[i].push_back(read(x, layout.p_ee[i][t]));
    for (int t = 0; t < n; ++t) plan.ee_velocities[i].push_back(read(x, layout.v_ee[i][t]));
    for (int t = 0; t <= n; ++t) {
      std::vector<StepAction> flags;
      for (int j = 0; j < n_dlv; ++j) {
        if (x[layout.pick[i][j][t].index] >= 0.5) flags.push_back({Action::Pick, j});
        if (x[layout.carry[i][j][t].index] >= 0.5) flags.push_back({Action::Carry, j});
        if (x[layout.place[i][j][t].index] >= 0.5) flags.push_back({Action::Place, j});
      }
      if (flags.size() > 1) {
        throw PlanError("conflicting action flags for end-effector " + std::to_string(i) +
                        " at t=" + std::to_string(t));
      }
      if (!flags.empty()) plan.actions[i][t] = flags.front();
    }
  }
  plan.dlv_positions.resize(n_dlv);
  for (int j = 0; j < n_dlv; ++j) {
    for (int t = 0; t <= n; ++t) plan.dlv_positions[j].push_back(read(x, layout.p_dlv[j][t]));
  }

  for (int t = 0; t <= n; ++t) {
    const double c = x[layout.complete[t].index];
    plan.j_time += (1.0 - c) / (n + 1.0);
    if (plan.completion_step < 0 && c >= 0.5) plan.completion_step = t;
  }
  for (int t = 0; t < n; ++t) {
    const double w = weight_w(t, params, scenario);
    for (int i = 0; i < n_ee; ++i) {
      for (milp::VarId u : layout.u_ee[i][t]) plan.j_dist += w * x[u.index];
    }
  }
  for (int i = 0; i < static_cast<int>(layout.restricted.size()); ++i) {
    for (int j = 0; j < static_cast<int>(layout.restricted[i].size()); ++j) {
      for (int r : layout.restricted[i][j]) {
        for (milp::VarId z : layout.ee_dlv[i][j].z[r]) plan.j_route += x[z.index];
      }
    }
  }
  return plan;
}

bool VerifyReport::pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const CheckResult& VerifyReport::family(const std::string& name) const {
  for (const CheckResult& c : checks) {
    if (c.family == name) return c;
  }
  throw std::out_of_range("no check family '" + name + "'");
}

VerifyReport verify_plan(const Plan& plan, const Scenario& s, const Params& params,
                         const Tolerances& tol) {
  const int n = plan.steps;
  const int n_ee = static_cast<int>(s.end_effectors.size());
  const int n_dlv = static_cast<int>(s.deliveries.size());
  const int n_obs = static_cast<int>(s.obstacles.size());
  VerifyReport report;

  Family shape("shape");
  if (n != params.steps || std::abs(plan.dt - params.dt) > 1e-12) {
    shape.fail("plan has " + std::to_string(n) + " steps of " + fmt(plan.dt) + " s, expected " +
               std::to_string(params.steps) + " of " + fmt(params.dt) + " s");
  } else if (n < 1 || static_cast<int>(plan.ee_positions.size()) != n_ee ||
             static_cast<int>(plan.dlv_positions.size()) != n_dlv ||
             static_cast<int>(plan.actions.size()) != n_ee ||
             static_cast<int>(plan.ee_velocities.size()) != n_ee) {
    shape.fail("body counts differ from the scenario");
  } else {
    for (int i = 0; i < n_ee; ++i) {
      if (static_cast<int>(plan.ee_positions[i].size()) != n + 1 ||
          static_cast<int>(plan.ee_velocities[i].size()) != n ||
          static_cast<int>(plan.actions[i].size()) != n + 1) {
        shape.fail("end-effector " + std::to_string(i) + " has the wrong number of steps");
      }
      for (const StepAction& a : plan.actions[i]) {
        if ((a.kind == Action::Move) != (a.delivery < 0) || a.delivery >= n_dlv) {
          shape.fail("end-effector " + std::to_string(i) + " has a malformed action");
          break;
        }
      }
    }
    for (int j = 0; j < n_dlv; ++j) {
      if (static_cast<int>(plan.dlv_positions[j].size()) != n + 1) {
        shape.fail("delivery " + std::to_string(j) + " has the wrong number of steps");
      }
    }
  }
  if (shape.failed()) {
    report.checks.push_back(shape.done());
    return report;
  }
  report.checks.push_back(shape.done());

  const double dt = params.dt;
  const auto& P = plan.ee_positions;
  const auto& V = plan.ee_velocities;
  const auto& D = plan.dlv_positions;
  const auto at = [](int t, const std::string& rest) { return "t=" + std::to_string(t) + " " + rest; };

  Family dynamics("dynamics");
  for (int i = 0; i < n_ee && !dynamics.failed(); ++i) {
    if ((P[i][0] - s.end_effectors[i].initial).norm_inf() > tol.dynamics) {
      dynamics.fail(at(0, "end-effector " + std::to_string(i) + " does not start at its initial position"));
    }
    for (int t = 0; t < n && !dynamics.failed(); ++t) {
      for (std::size_t a = 0; a < 3; ++a) {
        const double r = P[i][t + 1][a] - P[i][t][a] - V[i][t][a] * dt;
        if (std::abs(r) > tol.dynamics) {
          dynamics.fail(at(t, "end-effector " + std::to_string(i) + " axis " + kAxis[a] +
                                  " residual " + fmt(r)));
          break;
        }
      }
    }
  }
  report.checks.push_back(dynamics.done());

  Family bounds("bounds");
  for (int i = 0; i < n_ee && !bounds.failed(); ++i) {
    const Vec3 vmax = s.end_effectors[i].max_speed;
    for (int t = 0; t < n && !bounds.failed(); ++t) {
      for (std::size_t a = 0; a < 3; ++a) {
        if (std::abs(V[i][t][a]) > vmax[a] + tol.speed) {
          bounds.fail(at(t, "end-effector " + std::to_string(i) + " speed on " + kAxis[a] + " is " +
                                fmt(V[i][t][a])));
          break;
        }
      }
    }
    for (int t = 0; t <= n && !bounds.failed(); ++t) {
      if (!s.workspace.contains(P[i][t], tol.region)) {
        bounds.fail(at(t, "end-effector " + std::to_string(i) + " leaves the workspace"));
      }
    }
  }
  for (int j = 0; j < n_dlv && !bounds.failed(); ++j) {
    for (int t = 0; t <= n && !bounds.failed(); ++t) {
      if (!s.workspace.contains(D[j][t], tol.region)) {
        bounds.fail(at(t, "delivery " + std::to_string(j) + " leaves the workspace"));
      }
    }
  }
  report.checks.push_back(bounds.done());

  Family grasp("grasp");
  for (int t = 0; t <= n && !grasp.failed(); ++t) {
    std::vector<int> holder(n_dlv, -1);
    for (int i = 0; i < n_ee; ++i) {
      const StepAction& a = plan.actions[i][t];
      const int g = plan.grasped(i, t);
      const int before = t > 0 ? plan.grasped(i, t - 1) : -1;
      std::string bad;
      if (a.kind == Action::Pick && (t == 0 || before == a.delivery)) bad = "picks a held delivery";
      if (a.kind == Action::Carry && before != a.delivery) bad = "carries without picking";
      if (a.kind == Action::Place && before != a.delivery) bad = "places an unheld delivery";
      if (a.kind != Action::Carry && a.kind != Action::Place && before >= 0) {
        bad = "releases delivery " + std::to_string(before) + " without placing";
      }
      if (!bad.empty()) {
        grasp.fail(at(t, "end-effector " + std::to_string(i) + " " + bad));
        break;
      }
      if (g < 0) continue;
      if (holder[g] >= 0) {
        grasp.fail(at(t, "delivery " + std::to_string(g) + " held by end-effectors " +
                             std::to_string(holder[g]) + " and " + std::to_string(i)));
        break;
      }
      holder[g] = i;
    }
  }
  report.checks.push_back(grasp.done());

  Family motion("delivery-motion");
  for (int j = 0; j < n_dlv && !motion.failed(); ++j) {
    if ((D[j][0] - s.deliveries[j].initial).norm_inf() > tol.offset) {
      motion.fail(at(0, "delivery " + std::to_string(j) + " does not start at its initial position"));
    }
    for (int t = 0; t < n && !motion.failed(); ++t) {
      bool held = false;
      for (int i = 0; i < n_ee; ++i) held = held || plan.grasped(i, t) == j;
      const double moved = (D[j][t + 1] - D[j][t]).norm_inf();
      if (!held && moved > tol.offset) {
        motion.fail(at(t, "delivery " + std::to_string(j) + " moves by " + fmt(moved) +
                              " while resting"));
      }
    }
  }
  for (int i = 0; i < n_ee && !motion.failed(); ++i) {
    for (int t = 0; t <= n && !motion.failed(); ++t) {
      const StepAction& a = plan.actions[i][t];
      if (a.kind == Action::Move) continue;
      const Vec3 off = a.kind == Action::Carry ? contact_offset(s, i, a.delivery)
                                               : approach_offset(s, i, a.delivery);
      const double err = (D[a.delivery][t] - (P[i][t] - off)).norm_inf();
      if (err > tol.offset) {
        motion.fail(at(t, "delivery " + std::to_string(a.delivery) + " is " + fmt(err) +
                              " off its " + to_string(a.kind) + " offset"));
      }
    }
  }
  report.checks.push_back(motion.done());

  Family completion("completion");
  for (int j = 0; j < n_dlv && !completion.failed(); ++j) {
    const double err = (D[j][n] - s.deliveries[j].target).norm_inf();
    if (err > tol.target) {
      completion.fail(at(n, "delivery " + std::to_string(j) + " is " + fmt(err) + " from its target"));
    }
    for (int i = 0; i < n_ee; ++i) {
      if (plan.grasped(i, n) == j) {
        completion.fail(at(n, "delivery " + std::to_string(j) + " is still held"));
      }
    }
  }
  report.checks.push_back(completion.done());

  Family collision("collision");
  auto pairwise = [&](const RegionSet& set, auto&& point, const std::string& who) {
    for (int t = 0; t < n && !collision.failed(); ++t) {
      if (!set.share_region(point(t), point(t + 1), tol.region)) {
        collision.fail(at(t, who + " has no shared free region with step " + std::to_string(t + 1)));
      }
    }
  };
  auto rel = [&](const Vec3& mover, int owner, int t) {
    return mover - (D[owner][t] - s.deliveries[owner].initial);
  };
  for (int i = 0; i < n_ee; ++i) {
    const std::string ee = "end-effector " + std::to_string(i);
    for (int k = 0; k < n_obs; ++k) {
      pairwise(ee_obstacle_regions(s, i, k), [&](int t) { return P[i][t]; },
               ee + " vs obstacle " + std::to_string(k));
    }
    for (int j = 0; j < n_dlv; ++j) {
      pairwise(ee_delivery_regions(s, i, j), [&](int t) { return rel(P[i][t], j, t); },
               ee + " vs delivery " + std::to_string(j));
    }
  }
  for (int j = 0; j < n_dlv; ++j) {
    const std::string dlv = "delivery " + std::to_string(j);
    for (int k = 0; k < n_obs; ++k) {
      pairwise(delivery_obstacle_regions(s, j, k), [&](int t) { return D[j][t]; },
               dlv + " vs obstacle " + std::to_string(k));
    }
    for (int j2 = 0; j2 < n_dlv; ++j2) {
      if (j2 == j) continue;
      pairwise(delivery_delivery_regions(s, j, j2), [&](int t) { return rel(D[j][t], j2, t); },
               dlv + " vs delivery " + std::to_string(j2));
    }
  }
  report.checks.push_back(collision.done());
  return report;
}

std::string plan_to_json(const Plan& plan) {
  json j;
  j["schema"] = "tamp-plan/1";
  j["variant"] = to_string(plan.variant);
  j["steps"] = plan.steps;
  j["dt_s"] = plan.dt;
  j["objective"] = plan.objective();
  j["j_time"] = plan.j_time;
  j["j_dist"] = plan.j_dist;
  j["j_route"] = plan.j_route;
  j["completion_step"] = plan.completion_step;
  j["end_effectors"] = json::array();
  for (std::size_t i = 0; i < plan.ee_positions.size(); ++i) {
    json e;
    e["positions_m"] = json::array();
    for (const Vec3& p : plan.ee_positions[i]) e["positions_m"].push_back(vec_json(p));
    e["velocities_mps"] = json::array();
    for (const Vec3& v : plan.ee_velocities[i]) e["velocities_mps"].push_back(vec_json(v));
    e["actions"] = json::array();
    for (const StepAction& a : plan.actions[i]) e["actions"].push_back(action_label(a));
    j["end_effectors"].push_back(std::move(e));
  }
  j["deliveries"] = json::array();
  for (const auto& traj : plan.dlv_positions) {
    json d;
    d["positions_m"] = json::array();
    for (const Vec3& p : traj) d["positions_m"].push_back(vec_json(p));
    j["deliveries"].push_back(std::move(d));
  }
  return j.dump(2) + "\n";
}

Plan plan_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PlanError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != "tamp-plan/1") {
    throw PlanError("unsupported plan schema (expected tamp-plan/1)");
  }
  Plan plan;
  try {
    plan.variant = parse_variant(j.at("variant").get<std::string>());
    plan.steps = j.at("steps").get<int>();
    plan.dt = j.at("dt_s").get<double>();
    plan.j_time = j.value("j_time", 0.0);
    plan.j_dist = j.value("j_dist", 0.0);
    plan.j_route = j.value("j_route", 0.0);
    plan.completion_step = j.value("completion_step", -1);
    for (const json& e : j.at("end_effectors")) {
      std::vector<Vec3> pos, vel;
      std::vector<StepAction> acts;
      for (const json& p : e.at("positions_m")) pos.push_back(vec_from(p));
      for (const json& v : e.at("velocities_mps")) vel.push_back(vec_from(v));
      for (const json& a : e.at("actions")) acts.push_back(parse_label(a.get<std::string>()));
      plan.ee_positions.push_back(std::move(pos));
      plan.ee_velocities.push_back(std::move(vel));
      plan.actions.push_back(std::move(acts));
    }
    for (const json& d : j.at("deliveries")) {
      std::vector<Vec3> pos;
      for (const json& p : d.at("positions_m")) pos.push_back(vec_from(p));
      plan.dlv_positions.push_back(std::move(pos));
    }
  } catch (const json::exception& e) {
    throw PlanError(std::string("bad plan: ") + e.what());
  } catch (const ScenarioError& e) {
    throw PlanError(std::string("bad plan: ") + e.what());
  }
  return plan;
}

std::string plan_trace_csv(const Plan& plan) {
  std::ostringstream os;
  os.precision(17);
  os << "t,i,x,y,z,action\n";
  for (int t = 0; t <= plan.steps; ++t) {
    for (std::size_t i = 0; i < plan.ee_positions.size(); ++i) {
      const Vec3& p = plan.ee_positions[i][t];
      os << t << ',' << i << ',' << p.x << ',' << p.y << ',' << p.z << ','
         << action_label(plan.actions[i][t]) << '\n';
    }
  }
  return os.str();
}

std::string report_to_json(const VerifyReport& report) {
  json j;
  j["pass"] = report.pass();
  j["checks"] = json::array();
  for (const CheckResult& c : report.checks) {
    json e{{"family", c.family}, {"pass", c.pass}};
    if (!c.pass) e["first_offender"] = c.first_offender;
    j["checks"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace tamp

// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tampmilp/geometry.hpp"
#include "tampmilp/scenario.hpp"
#include "tampmilp/solver.hpp"
#include "tampmilp/tamp_model.hpp"

namespace tamp {

enum class Action { Move, Pick, Carry, Place };

std::string to_string(Action a);
Action parse_action(const std::string& s);

struct StepAction {
  Action kind = Action::Move;
  int delivery = -1;  // -1 for Move

  friend bool operator==(const StepAction&, const StepAction&) = default;
};

/// Trajectories and actions of a solved instance. Positions and actions
/// cover t = 0..steps, velocities t = 0..steps-1.
struct Plan {
  int steps = 0;
  double dt = 0.0;
  Variant variant = Variant::Baseline;

  std::vector<std::vector<Vec3>> ee_positions;   // [i][t]
  std::vector<std::vector<Vec3>> ee_velocities;  // [i][t]
  std::vector<std::vector<Vec3>> dlv_positions;  // [j][t]
  std::vector<std::vector<StepAction>> actions;  // [i][t]

  double j_time = 0.0;
  double j_dist = 0.0;
  double j_route = 0.0;
  /// First step from which every delivery stays done; -1 if never.
  int completion_step = -1;

  double objective() const { return j_time + j_dist + j_route; }
  /// Delivery held by end-effector i at step t (Pick or Carry), or -1.
  int grasped(int i, int t) const;
};

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a solution through the layout. Action flags are thresholded at 0.5;
/// the objective terms are recomputed from the completion, speed and
/// restricted-region values. Throws PlanError without values or when one
/// end-effector gets two grasp-type flags at a step.
Plan extract_plan(const solver::Solution& solution, const VariableLayout& layout,
                  const Scenario& scenario, const Params& params);

struct Tolerances {
  double dynamics = 1e-6;  // m
  double speed = 1e-6;     // m/s
  double offset = 1e-6;    // m, contact and approach offsets, stationarity
  double target = 1e-6;    // m
  double region = 1e-6;    // m, slack on closed region membership
};

struct CheckResult {
  std::string family;
  bool pass = true;
  std::string first_offender;  // empty when passing
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool pass() const;
  const CheckResult& family(const std::string& name) const;
};

/// Checks a plan against the scenario using only its own geometry:
///   dynamics         p[t+1] = p[t] + v[t] dt
///   bounds           |v| within the speed bound, positions in the workspace
///   grasp            one delivery per end-effector and vice versa, and a
///                    well-formed Pick, Carry..., Place sequence
///   delivery-motion  resting deliveries stay put; carried and approached
///                    deliveries sit at their contact or approach offsets
///   completion       every delivery at its target and released at the end
///   collision        each consecutive pair of positions of every mover and
///                    owner shares one closed collision-free region
VerifyReport verify_plan(const Plan& plan, const Scenario& scenario, const Params& params,
                         const Tolerances& tol = {});

/// "tamp-plan/1" document.
std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& text);

/// One row per end-effector and step: t,i,x,y,z,action.
std::string plan_trace_csv(const Plan& plan);

std::string report_to_json(const VerifyReport& report);

}  // namespace tamp

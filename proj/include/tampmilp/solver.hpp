// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tampmilp/lp.hpp"
#include "tampmilp/milp.hpp"

namespace tamp::solver {

// ---------------------------------------------------------------------------
// Presolve

struct PresolveStats {
  std::size_t binaries_before = 0;
  std::size_t binaries_after = 0;
  std::size_t vars_fixed = 0;
  std::size_t rows_removed = 0;
  std::size_t bounds_tightened = 0;
  std::size_t coefficients_tightened = 0;
  int passes = 0;
};

/// Reduced model plus the mapping back to the original variables.
struct PresolveResult {
  bool infeasible = false;
  milp::MilpModel reduced;
  std::vector<int> original_of;   // reduced index -> original index
  std::vector<int> reduced_of;    // original index -> reduced index or -1
  std::vector<double> fixed;      // original index -> value when reduced_of < 0
  PresolveStats stats;

  /// Full assignment of the original variables.
  std::vector<double> expand(std::span<const double> reduced_values) const;
};

/// Iterates to a fixed point: singleton rows become bounds (equalities fix
/// the variable), activity-based bound tightening (covers two-term chains
/// and binary fixing when one value is infeasible by bounds), big-M
/// coefficient tightening on binaries in one-sided rows, redundant and empty
/// row removal, and column fixing for variables left in no row. Fixed
/// variables are substituted out.
PresolveResult presolve(const milp::MilpModel& model);

// ---------------------------------------------------------------------------
// LP relaxation

/// Relaxation of a model: binaries relaxed to [0,1].
lp::LpProblem to_lp(const milp::MilpModel& model);

struct LpResult {
  lp::LpStatus status = lp::LpStatus::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
};

LpResult solve_lp(const milp::MilpModel& model);

// ---------------------------------------------------------------------------
// Branch and bound

enum class Branching { MostFractional, LowestIndex };
enum class NodeSelection { BestBound, DepthFirst };

struct SolveOptions {
  double mip_gap = 1e-6;          // relative
  double time_limit_s = 3600.0;
  long node_limit = -1;           // deterministic alternative to the time limit
  Branching branching = Branching::MostFractional;
  NodeSelection node_selection = NodeSelection::BestBound;
  bool deterministic = true;      // forces one worker
  int workers = 1;
  bool presolve = true;
  bool record_trace = false;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Timeout };

std::string to_string(SolveStatus status);
std::string to_string(Branching b);
std::string to_string(NodeSelection s);
Branching parse_branching(const std::string& s);
NodeSelection parse_node_selection(const std::string& s);

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;   // original model variables; empty without incumbent
  double objective = milp::kInf;

  bool has_values() const { return !values.empty(); }
};

/// Global bound / incumbent sample taken whenever either changes.
struct GapSample {
  long nodes = 0;
  double time_s = 0.0;
  double lower_bound = 0.0;
  double incumbent = milp::kInf;
};

struct SolveStats {
  long nodes = 0;               // nodes whose relaxation was solved
  long lp_solves = 0;           // relaxations (CRPs) solved
  long simplex_iterations = 0;
  std::size_t binaries = 0;
  std::size_t presolved_binaries = 0;
  double wall_time_s = 0.0;
  double gap = milp::kInf;
  double lower_bound = -milp::kInf;
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<GapSample> trace;  // filled when SolveOptions::record_trace
  std::vector<long> node_order;  // branching variable per explored node (trace only)
};

/// Relative gap between an incumbent and a lower bound.
double relative_gap(double incumbent, double lower_bound);

std::pair<Solution, SolveStats> branch_and_bound(const milp::MilpModel& model,
                                                 const SolveOptions& options = {});

/// {nodes, lp_solves, presolved_binaries, wall_time_s, gap, status} as JSON.
std::string stats_json(const SolveStats& stats);

}  // namespace tamp::solver

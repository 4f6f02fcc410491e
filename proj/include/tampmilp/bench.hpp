// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tampmilp/plan.hpp"
#include "tampmilp/scenario.hpp"
#include "tampmilp/solver.hpp"

namespace tamp::bench {

/// Table-top layout used for every benchmark scenario: one end-effector
/// parked above the pick area, a shelf-like obstacle between the pick and
/// place areas, and two placement slabs for delivery centers.
struct DeskPreset {
  Aabb workspace;
  EndEffector end_effector;
  std::vector<Aabb> obstacles;
  Vec3 delivery_width;
  Aabb initial_slab;  // delivery initial centers
  Aabb target_slab;   // delivery target centers
  double dt = 0.5;
  double alpha = 1.0;
};

DeskPreset desk_preset();

struct BenchConfig {
  std::uint64_t seed = 1;
  int instances = 20;
  int deliveries = 1;
  int steps = 0;                  // 0: 15 per delivery
  std::vector<int> steps_sweep;   // sensitivity mode when non-empty
  std::vector<Variant> variants = {Variant::Baseline, Variant::Hard, Variant::HardSoft};
  solver::SolveOptions solve = default_solve_options();
  int workers = 1;                // instances solved concurrently
  DeskPreset preset = desk_preset();

  int effective_steps() const { return steps > 0 ? steps : 15 * deliveries; }
  /// Branching on the lowest index first: the builder lays out grasp and
  /// completion binaries ahead of the region indicators.
  static solver::SolveOptions default_solve_options();
};

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void validate(const BenchConfig& config);

/// Deterministic scenario stream for `config.seed`. Centers are drawn
/// uniformly in the preset slabs and rejected when they touch an obstacle or
/// sit too close to another delivery: two initials (or two targets) must be
/// apart, along x or y, by their combined half widths plus one step of
/// end-effector travel. Throws BenchError after 10^4 consecutive rejections.
std::vector<Scenario> sample_scenarios(const BenchConfig& config);

struct BenchRecord {
  int scenario = 0;
  int steps = 0;
  Variant variant = Variant::Baseline;
  solver::SolveStatus status = solver::SolveStatus::Infeasible;
  double objective = 0.0;
  double j_time = 0.0;
  double j_dist = 0.0;
  double j_route = 0.0;
  int completion_step = -1;
  long nodes = 0;
  long lp_solves = 0;
  long simplex_iterations = 0;
  std::size_t binaries = 0;
  std::size_t presolved_binaries = 0;
  double gap = 0.0;
  double wall_time_s = 0.0;
  bool verified = false;
  std::string verify_failure;  // first failing family, if any

  bool solved() const;
};

struct Percentiles {
  double mean = 0.0;
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
};

/// Linear-interpolation percentiles; all zero for an empty sample.
Percentiles percentiles(std::vector<double> sample);

struct VariantSummary {
  int steps = 0;
  Variant variant = Variant::Baseline;
  int records = 0;
  int solved = 0;
  int verified = 0;
  Percentiles wall_time_s, nodes, lp_solves, presolved_binaries, j_time;
};

/// Pairwise comparison of two variants over scenarios both solved to
/// optimality at the same step count.
struct Comparison {
  Variant a = Variant::Baseline;
  Variant b = Variant::Hard;
  int pairs = 0;
  int equal_j_time = 0;             // J_time(b) == J_time(a) exactly
  int within_one_step = 0;          // J_time(b) - J_time(a) <= 1/(N+1)
  double max_objective_diff = 0.0;  // |objective(b) - objective(a)|
  double median_lp_solves_a = 0.0;
  double median_lp_solves_b = 0.0;
  double median_binary_ratio = 0.0;  // presolved binaries b / a
};

struct BenchResult {
  std::vector<BenchRecord> records;  // ordered by (steps, scenario, variant)
  std::vector<VariantSummary> summary;
  std::vector<Comparison> comparisons;
};

using Progress = std::function<void(const BenchRecord&)>;

/// Solves every scenario with every variant (and every step count of the
/// sweep). Timeouts and failures are recorded and the run continues.
BenchResult run_benchmark(const BenchConfig& config, const Progress& progress = {});

/// Solves one scenario with one variant and verifies the plan.
BenchRecord run_one(const Scenario& scenario, const Params& params,
                    const solver::SolveOptions& options, std::optional<Plan>* plan = nullptr);

std::vector<VariantSummary> summarize(const std::vector<BenchRecord>& records);
Comparison compare(const std::vector<BenchRecord>& records, Variant a, Variant b);

/// Fixed header; wall time is left out so reruns compare byte for byte.
std::string records_csv(const std::vector<BenchRecord>& records);
std::string summary_json(const BenchResult& result, const BenchConfig& config);

BenchConfig config_from_json(const std::string& text);
std::string config_to_json(const BenchConfig& config);

}  // namespace tamp::bench

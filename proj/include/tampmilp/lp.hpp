// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace tamp::lp {

/// Sparse LP in range form: minimize cost.x + offset subject to
/// row_lo <= A x <= row_hi and lb <= x <= ub.
struct LpProblem {
  std::vector<double> cost;
  std::vector<double> lb;
  std::vector<double> ub;
  double offset = 0.0;

  std::vector<double> row_lo;
  std::vector<double> row_hi;

  // Column-major copy of A.
  std::vector<int> col_start;
  std::vector<int> col_row;
  std::vector<double> col_val;
  // Row-major copy of A.
  std::vector<int> row_start;
  std::vector<int> row_col;
  std::vector<double> row_val;

  int num_cols() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(row_lo.size()); }

  struct Entry {
    int row;
    int col;
    double value;
  };
  /// Builds both matrix copies from (row, col, value) entries; duplicates add.
  void set_matrix(int rows, std::vector<Entry> entries);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status);

/// Basis snapshot used to warm-start a later solve.
struct Basis {
  std::vector<int> head;              // basic variable per basis position
  std::vector<std::uint8_t> status;   // per variable (structurals then logicals)
};

/// Bounded dual simplex over an explicit dense basis inverse.
///
/// Every variable, structural or logical, carries finite bounds: infinite
/// structural bounds are replaced by a large artificial box and infinite row
/// sides by the row's activity range. With all variables boxed, the slack
/// basis is always dual feasible after placing each nonbasic variable at the
/// bound its cost prefers, so no primal phase is needed and bound changes
/// made by branching keep the current basis dual feasible.
class DualSimplex {
 public:
  static constexpr double kArtificialBound = 1e7;

  explicit DualSimplex(const LpProblem& problem);

  /// Overrides a structural variable's bounds (must stay within the problem's).
  void set_bounds(int col, double lb, double ub);
  /// Restores every structural bound to the problem's.
  void reset_bounds();

  void reset_to_slack_basis();
  /// Installs a basis; falls back to the slack basis if it is singular.
  /// Returns false on fallback.
  bool load_basis(const Basis& basis);
  Basis basis() const;

  LpStatus solve(long iteration_limit = -1);

  /// Structural values after `solve`.
  std::vector<double> values() const;
  double objective() const;
  long iterations() const { return iterations_; }
  long total_iterations() const { return total_iterations_; }

 private:
  enum : std::uint8_t { kBasic = 0, kLower = 1, kUpper = 2 };

  bool refactor();
  void recompute_primal();
  void recompute_dual();
  void restore_dual_feasibility();
  int choose_leaving() const;
  void compute_pivot_row(int r);
  void compute_column(int q);
  void pivot(int r, int q);
  double row_norm2(int p) const;

  const LpProblem& lp_;
  int n_ = 0;
  int m_ = 0;
  std::vector<double> lb_, ub_;        // n + m
  std::vector<double> root_lb_, root_ub_;
  std::vector<bool> artificial_;       // structural bound replaced by kArtificialBound
  std::vector<double> cost_;           // n + m
  std::vector<double> x_;              // n + m
  std::vector<double> d_;              // reduced costs
  std::vector<std::uint8_t> status_;   // n + m
  std::vector<int> head_;              // m
  std::vector<int> pos_;               // n + m, -1 if nonbasic
  std::vector<double> binv_;           // m x m, row p = basis position p
  std::vector<double> weight_;         // dual steepest-edge weights
  std::vector<double> alpha_;          // pivot row, n + m
  std::vector<double> column_;         // entering column, m
  bool primal_dirty_ = true;
  long iterations_ = 0;
  long total_iterations_ = 0;
  long since_refactor_ = 0;
};

/// One-shot solve from the slack basis.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  long iterations = 0;
};
LpSolution solve(const LpProblem& problem);

}  // namespace tamp::lp

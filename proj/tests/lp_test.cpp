// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include "tampmilp/lp.hpp"

#include "oracle_lp.hpp"
#include "tampmilp/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <functional>
#include <optional>
#include <random>

namespace tamp::lp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DenseLp {
  std::vector<double> cost, lb, ub;
  std::vector<std::vector<double>> rows;
  std::vector<double> lo, hi;

  LpProblem build() const {
    LpProblem p;
    p.cost = cost;
    p.lb = lb;
    p.ub = ub;
    p.row_lo = lo;
    p.row_hi = hi;
    std::vector<LpProblem::Entry> entries;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      for (int j = 0; j < static_cast<int>(cost.size()); ++j) {
        if (rows[i][j] != 0.0) entries.push_back({i, j, rows[i][j]});
      }
    }
    p.set_matrix(static_cast<int>(rows.size()), entries);
    return p;
  }
};

// Oracle: enumerate every vertex of a bounded LP with n <= 3 by intersecting
// n active hyperplanes and keep the best feasible one.
std::optional<double> vertex_oracle(const DenseLp& lp) {
  const int n = static_cast<int>(lp.cost.size());
  std::vector<std::pair<std::vector<double>, double>> planes;
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.push_back({e, lp.lb[j]});
    planes.push_back({e, lp.ub[j]});
  }
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (std::isfinite(lp.lo[i])) planes.push_back({lp.rows[i], lp.lo[i]});
    if (std::isfinite(lp.hi[i])) planes.push_back({lp.rows[i], lp.hi[i]});
  }
  std::optional<double> best;
  const int k = static_cast<int>(planes.size());
  std::vector<int> pick(n);
  auto solve_and_check = [&]() {
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) a[r][c] = planes[pick[r]].first[c];
      a[r][n] = planes[pick[r]].second;
    }
    for (int c = 0; c < n; ++c) {
      int piv = -1;
      for (int r = c; r < n; ++r) {
        if (std::abs(a[r][c]) > 1e-10 && (piv < 0 || std::abs(a[r][c]) > std::abs(a[piv][c]))) piv = r;
      }
      if (piv < 0) return;
      std::swap(a[c], a[piv]);
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = a[r][c] / a[c][c];
        for (int cc = c; cc <= n; ++cc) a[r][cc] -= f * a[c][cc];
      }
    }
    std::vector<double> x(n);
    for (int c = 0; c < n; ++c) x[c] = a[c][n] / a[c][c];
    for (int j = 0; j < n; ++j) {
      if (x[j] < lp.lb[j] - 1e-9 || x[j] > lp.ub[j] + 1e-9) return;
    }
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
      double act = 0.0;
      for (int j = 0; j < n; ++j) act += lp.rows[i][j] * x[j];
      if (act < lp.lo[i] - 1e-9 || act > lp.hi[i] + 1e-9) return;
    }
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += lp.cost[j] * x[j];
    if (!best || obj < *best) best = obj;
  };
  std::function<void(int, int)> rec = [&](int depth, int start) {
    if (depth == n) {
      solve_and_check();
      return;
    }
    for (int s = start; s < k; ++s) {
      pick[depth] = s;
      rec(depth + 1, s + 1);
    }
  };
  rec(0, 0);
  return best;
}

TEST(LpTest, SingleLowerBoundRow) {
  DenseLp lp{{1.0}, {0.0}, {1.0}, {{1.0}}, {0.3}, {kInf}};
  const LpSolution sol = solve(lp.build());
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.x[0], 0.3, 1e-9);
}

TEST(LpTest, FacetOptimum) {
  DenseLp lp{{-1.0, -1.0}, {0.0, 0.0}, {1.0, 1.0}, {{1.0, 1.0}}, {-kInf}, {1.0}};
  const LpSolution sol = solve(lp.build());
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective, -1.0, 1e-9);
  EXPECT_NEAR(sol.x[0] + sol.x[1], 1.0, 1e-9);
}

TEST(LpTest, ContradictoryRowsAreInfeasible) {
  DenseLp lp{{0.0}, {-10.0}, {10.0}, {{1.0}, {1.0}}, {2.0, -kInf}, {kInf, 1.0}};
  EXPECT_EQ(solve(lp.build()).status, LpStatus::Infeasible);
}

TEST(LpTest, UnboundedDirectionDetected) {
  DenseLp lp{{-1.0}, {0.0}, {kInf}, {{1.0}}, {0.0}, {kInf}};
  EXPECT_EQ(solve(lp.build()).status, LpStatus::Unbounded);
}

TEST(LpTest, EqualityRowsAndObjectiveOffset) {
  DenseLp lp{{2.0, 3.0}, {0.0, 0.0}, {10.0, 10.0}, {{1.0, 1.0}, {1.0, -1.0}}, {4.0, 1.0}, {4.0, 1.0}};
  LpProblem p = lp.build();
  p.offset = 5.0;
  const LpSolution sol = solve(p);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.x[0], 2.5, 1e-9);
  EXPECT_NEAR(sol.x[1], 1.5, 1e-9);
  EXPECT_NEAR(sol.objective, 5.0 + 5.0 + 4.5, 1e-9);
}

TEST(LpTest, MatchesVertexEnumerationOnRandomBoxedLps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_int_distribution<int> dim(1, 3), nrows(1, 5), kind(0, 3);
  int feasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    DenseLp lp;
    const int n = dim(rng);
    for (int j = 0; j < n; ++j) {
      const double a = coef(rng), b = coef(rng);
      lp.cost.push_back(coef(rng));
      lp.lb.push_back(std::min(a, b));
      lp.ub.push_back(std::max(a, b));
    }
    const int m = nrows(rng);
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(n);
      for (double& v : row) v = std::round(coef(rng) * 2.0) / 2.0;
      lp.rows.push_back(row);
      const double c = coef(rng), w = std::abs(coef(rng));
      switch (kind(rng)) {
        case 0: lp.lo.push_back(c); lp.hi.push_back(kInf); break;
        case 1: lp.lo.push_back(-kInf); lp.hi.push_back(c); break;
        case 2: lp.lo.push_back(c); lp.hi.push_back(c + w); break;
        default: lp.lo.push_back(c); lp.hi.push_back(c); break;
      }
    }
    const auto expected = vertex_oracle(lp);
    const LpSolution sol = solve(lp.build());
    if (!expected) {
      EXPECT_EQ(sol.status, LpStatus::Infeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(sol.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(sol.objective, *expected, 1e-7) << "trial " << trial;
  }
  EXPECT_GT(feasible, 100);
}

TEST(LpTest, WarmStartAfterBoundChangeMatchesColdSolve) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 12, m = 8;
  DenseLp lp;
  for (int j = 0; j < n; ++j) {
    lp.cost.push_back(u(rng) - 0.7);
    lp.lb.push_back(0.0);
    lp.ub.push_back(1.0);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(n);
    for (double& v : row) v = u(rng) < 0.5 ? std::round(u(rng) * 4.0) : 0.0;
    lp.rows.push_back(row);
    lp.lo.push_back(-kInf);
    lp.hi.push_back(3.0);
  }
  const LpProblem p = lp.build();
  DualSimplex warm(p);
  ASSERT_EQ(warm.solve(), LpStatus::Optimal);
  for (int j = 0; j < n; j += 2) {
    warm.set_bounds(j, 0.0, 0.0);
    ASSERT_EQ(warm.solve(), LpStatus::Optimal);
    DenseLp cold_lp = lp;
    for (int k = 0; k <= j; k += 2) cold_lp.ub[k] = 0.0;
    const LpSolution cold = solve(cold_lp.build());
    ASSERT_EQ(cold.status, LpStatus::Optimal);
    EXPECT_NEAR(warm.objective(), cold.objective, 1e-9);
  }
  // reload a saved basis into a fresh engine
  const Basis saved = warm.basis();
  DualSimplex other(p);
  for (int j = 0; j < n; j += 2) other.set_bounds(j, 0.0, 0.0);
  EXPECT_TRUE(other.load_basis(saved));
  ASSERT_EQ(other.solve(), LpStatus::Optimal);
  EXPECT_EQ(other.iterations(), 0);
  EXPECT_NEAR(other.objective(), warm.objective(), 1e-9);
}

}  // namespace
}  // namespace tamp::lp

// Dives that fix 0-1 variables one at a time, warm-starting from the previous
// basis each step; statuses and optima must agree with the tableau oracle.
TEST(LpTest, WarmStartedDivesMatchTableauOracle) {
  using tamp::milp::LinExpr;
  using tamp::milp::Sense;
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int disagreements = 0, steps = 0;
  for (int trial = 0; trial < 200; ++trial) {
    tamp::milp::MilpModel m;
    const int nb = 6, nc = 3;
    std::vector<double> x0;
    for (int j = 0; j < nb; ++j) {
      m.add_binary({"b", {j}});
      x0.push_back(U(rng) > 0 ? 1.0 : 0.0);
    }
    for (int j = 0; j < nc; ++j) {
      m.add_continuous(-2.0, 2.0, {"c", {j}});
      x0.push_back(U(rng));
    }
    for (int i = 0; i < 6; ++i) {
      LinExpr e;
      for (int j = 0; j < nb + nc; ++j) {
        if (U(rng) > 0.3) e.add(std::round(6.0 * U(rng)) / 2.0, {uint32_t(j)});
      }
      e.normalize();
      if (e.empty()) continue;
      const double act = e.evaluate(x0);
      if (i % 3 == 0) m.add_constraint(e, Sense::Eq, act, "eq");
      else m.add_constraint(e, Sense::Le, act + 0.3 * std::abs(U(rng)), "le");
    }
    LinExpr obj;
    for (int j = 0; j < nb + nc; ++j) obj.add(U(rng), {uint32_t(j)});
    m.set_objective(obj);

    const auto problem = tamp::solver::to_lp(m);
    tamp::lp::DualSimplex engine(problem);
    std::vector<double> lb(nb + nc), ub(nb + nc);
    for (int j = 0; j < nb + nc; ++j) {
      lb[j] = m.vars()[j].lb;
      ub[j] = m.vars()[j].ub;
    }
    for (int j = 0; j < nb; ++j) {
      const double v = U(rng) > 0 ? 1.0 : 0.0;
      lb[j] = ub[j] = v;
      engine.set_bounds(j, v, v);
      const auto st = engine.solve();
      const auto ref = oracle::solve(m, lb, ub);
      ++steps;
      if (ref.feasible != (st == tamp::lp::LpStatus::Optimal)) {
        ++disagreements;
        break;
      }
      if (!ref.feasible) break;
      EXPECT_NEAR(engine.objective(), ref.objective, 1e-7 * (1.0 + std::abs(ref.objective)));
    }
  }
  EXPECT_EQ(disagreements, 0) << "over " << steps << " warm solves";
}

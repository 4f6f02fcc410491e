// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracle_lp.hpp"
#include "tampmilp/milp.hpp"

using namespace tamp::milp;

TEST(LinExpr, MergesTermsOnSameVariable) {
  LinExpr e;
  e.add(1.0, VarId{0}).add(2.0, VarId{0});
  ASSERT_EQ(e.terms().size(), 1u);
  EXPECT_EQ(e.terms()[0].coef, 3.0);
  e.add(-3.0, VarId{0});
  e.normalize();
  EXPECT_TRUE(e.empty());
}

TEST(LinExpr, RejectsNonFiniteCoefficient) {
  LinExpr e;
  EXPECT_THROW(e.add(kInf, VarId{0}), ModelError);
}

TEST(Model, ConstantMovesToRhs) {
  MilpModel m;
  auto x = m.add_continuous(0, 1, {"x", {}});
  m.add_constraint(LinExpr({{2.0, x}}, 1.5), Sense::Le, 2.0, "t");
  EXPECT_EQ(m.constraints()[0].rhs, 0.5);
  EXPECT_EQ(m.constraints()[0].expr.constant(), 0.0);
}

TEST(Model, RejectsBadBounds) {
  MilpModel m;
  EXPECT_THROW(m.add_continuous(1, 0, {"x", {}}), ModelError);
  EXPECT_THROW(m.add_var(VarKind::UnitInterval, 0, 2, {"u", {}}), ModelError);
}

namespace {

// Range of phi over the feasible set with operands fixed, via the tableau LP.
std::pair<double, double> phi_range(MilpModel m, VarId phi, const std::vector<VarId>& ops,
                                    const std::vector<double>& vals) {
  for (std::size_t k = 0; k < ops.size(); ++k) m.fix(ops[k], vals[k]);
  m.set_objective(LinExpr(phi));
  auto lo = oracle::solve(m);
  m.set_objective(-1.0 * LinExpr(phi));
  auto hi = oracle::solve(m);
  EXPECT_TRUE(lo.feasible && hi.feasible);
  return {lo.objective, -hi.objective};
}

}  // namespace

TEST(LogicEncoding, NotIsExactForBinaryAndFractional) {
  for (double v : {0.0, 1.0, 0.3}) {
    MilpModel m;
    auto a = m.add_binary({"a", {}});
    auto phi = encode_not(m, a);
    EXPECT_EQ(m.var(phi).kind, VarKind::UnitInterval);
    auto [lo, hi] = phi_range(m, phi, {a}, {v});
    EXPECT_NEAR(lo, 1.0 - v, 1e-9);
    EXPECT_NEAR(hi, 1.0 - v, 1e-9);
  }
}

TEST(LogicEncoding, AndOrExhaustiveUpToFourOperands) {
  for (int n = 1; n <= 4; ++n) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      for (bool is_and : {true, false}) {
        MilpModel m;
        std::vector<VarId> ops;
        std::vector<Literal> lits;
        std::vector<double> vals;
        for (int k = 0; k < n; ++k) {
          ops.push_back(m.add_binary({"op", {k}}));
          lits.emplace_back(ops.back());
          vals.push_back((mask >> k) & 1);
        }
        const VarId phi = is_and ? encode_and(m, lits) : encode_or(m, lits);
        bool expect = is_and;
        for (double v : vals) expect = is_and ? (expect && v > 0.5) : (expect || v > 0.5);
        auto [lo, hi] = phi_range(m, phi, ops, vals);
        EXPECT_NEAR(lo, expect ? 1.0 : 0.0, 1e-9) << n << " " << mask << " " << is_and;
        EXPECT_NEAR(hi, expect ? 1.0 : 0.0, 1e-9) << n << " " << mask << " " << is_and;
      }
    }
  }
}

TEST(LogicEncoding, NegatedLiteralsAndRecordedDefinitions) {
  MilpModel m;
  auto a = m.add_binary({"a", {}});
  auto b = m.add_binary({"b", {}});
  auto phi = encode_and(m, {Literal(a), !b});
  auto psi = encode_or(m, {!a, Literal(b)});
  ASSERT_EQ(m.logic_defs().size(), 2u);
  for (int mask = 0; mask < 4; ++mask) {
    std::vector<double> v(m.num_vars(), 0.0);
    v[a.index] = mask & 1;
    v[b.index] = (mask >> 1) & 1;
    evaluate_logic(m, v);
    EXPECT_EQ(v[phi.index], (v[a.index] == 1 && v[b.index] == 0) ? 1.0 : 0.0);
    EXPECT_EQ(v[psi.index], (v[a.index] == 0 || v[b.index] == 1) ? 1.0 : 0.0);
    EXPECT_LE(m.max_violation(v), 1e-12);
  }
}

TEST(LogicEncoding, ConstrainOnExistingResult) {
  MilpModel m;
  auto a = m.add_binary({"a", {}});
  auto b = m.add_binary({"b", {}});
  auto r = m.add_binary({"r", {}});
  const std::vector<Literal> ops = {Literal(a), Literal(b)};
  constrain_or(m, r, ops, "or");
  for (int mask = 0; mask < 4; ++mask) {
    auto [lo, hi] = phi_range(m, r, {a, b}, {double(mask & 1), double(mask >> 1)});
    EXPECT_EQ(lo, mask ? 1.0 : 0.0);
    EXPECT_EQ(hi, mask ? 1.0 : 0.0);
  }
}

TEST(BigM, Examples) {
  MilpModel m;
  auto x = m.add_continuous(-2, 3, {"x", {}});
  EXPECT_DOUBLE_EQ(tightest_big_m(m, LinExpr(x)), 3.0);

  MilpModel m2;
  auto p = m2.add_unit({"x", {}});
  auto q = m2.add_unit({"y", {}});
  EXPECT_DOUBLE_EQ(tightest_big_m(m2, LinExpr(p) - LinExpr(q)), 1.0);

  MilpModel m3;
  auto u = m3.add_continuous(-1, 1, {"x", {}});
  auto w = m3.add_continuous(0, 4, {"y", {}});
  const LinExpr e{{2.0, u}, {1.0, w}};
  double corners = 0.0;
  for (double cu : {-1.0, 1.0}) {
    for (double cw : {0.0, 4.0}) corners = std::max(corners, std::abs(2 * cu + cw));
  }
  EXPECT_DOUBLE_EQ(tightest_big_m(m3, e), corners);
  EXPECT_DOUBLE_EQ(corners, 6.0);
}

TEST(BigM, UnboundedVariableIsAnError) {
  MilpModel m;
  auto x = m.add_continuous(0, kInf, {"x", {}});
  EXPECT_THROW(tightest_big_m(m, LinExpr(x)), ModelError);
}

TEST(BigM, ValidAtEveryCornerOfRandomBoxes) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    MilpModel m;
    LinExpr e;
    const int n = 1 + trial % 5;
    for (int k = 0; k < n; ++k) {
      double a = U(rng), b = U(rng);
      auto v = m.add_continuous(std::min(a, b), std::max(a, b), {"x", {k}});
      e.add(U(rng), v);
    }
    e.add_constant(U(rng));
    const double M = tightest_big_m(m, e);
    bool attained = false;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<double> x(n);
      for (int k = 0; k < n; ++k) x[k] = (mask >> k) & 1 ? m.vars()[k].ub : m.vars()[k].lb;
      const double val = e.evaluate(x);
      // expr <= M (1 - theta) with theta = 0, and the mirrored side.
      EXPECT_LE(val, M + 1e-12);
      EXPECT_GE(val, -M - 1e-12);
      attained |= std::abs(std::abs(val) - M) < 1e-9;
    }
    EXPECT_TRUE(attained) << "M is not tight";
  }
}

TEST(Model, DumpIsStable) {
  auto build = [] {
    MilpModel m;
    auto a = m.add_binary({"gsp", {0, 1}});
    auto x = m.add_continuous(-1, 1, {"p", {0, 0, 1}});
    m.add_constraint(LinExpr{{1.0, x}, {-2.0, a}}, Sense::Le, 0.0, "carry_on");
    m.set_objective(LinExpr(x));
    return m;
  };
  std::ostringstream a, b;
  build().dump(a);
  build().dump(b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("gsp(0,1)"), std::string::npos);
  EXPECT_NE(a.str().find("carry_on"), std::string::npos);
}

TEST(Model, ViolationMeasures) {
  MilpModel m;
  auto a = m.add_binary({"a", {}});
  auto x = m.add_continuous(0, 2, {"x", {}});
  m.add_constraint(LinExpr(x) - LinExpr(a), Sense::Le, 1.0, "c");
  std::vector<double> v = {0.4, 1.9};
  EXPECT_NEAR(m.max_violation(v), 0.5, 1e-12);
  EXPECT_NEAR(m.max_integrality_violation(v), 0.4, 1e-12);
}

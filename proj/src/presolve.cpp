// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "tampmilp/solver.hpp"

namespace tamp::solver {
namespace {

using milp::kInf;

constexpr double kFeasTol = 1e-9;
constexpr double kIntTol = 1e-6;
constexpr int kMaxPasses = 100;

bool significant(double old_bound, double new_bound) {
  return std::abs(new_bound - old_bound) > 1e-7 * std::max(1.0, std::abs(old_bound));
}

struct Row {
  std::vector<std::pair<int, double>> terms;
  double lo = -kInf;
  double hi = kInf;
  std::string tag;
  bool active = true;
};

// Activity range of a row split into finite part and count of infinite
// contributions, so the residual for one term can be formed in O(1).
struct Activity {
  double min_fin = 0.0;
  double max_fin = 0.0;
  int min_inf = 0;
  int max_inf = 0;
};

class Presolver {
 public:
  explicit Presolver(const milp::MilpModel& model) : model_(model) {
    const auto& vars = model.vars();
    n_ = static_cast<int>(vars.size());
    lb_.resize(n_);
    ub_.resize(n_);
    integral_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = vars[j].lb;
      ub_[j] = vars[j].ub;
      integral_[j] = vars[j].integral();
    }
    cols_.resize(n_);
    for (const milp::Constraint& c : model.constraints()) {
      Row r;
      r.tag = c.tag;
      for (const milp::Term& t : c.expr.terms()) {
        if (t.coef != 0.0) r.terms.emplace_back(static_cast<int>(t.var.index), t.coef);
      }
      if (c.sense != milp::Sense::Ge) r.hi = c.rhs;
      if (c.sense != milp::Sense::Le) r.lo = c.rhs;
      const int i = static_cast<int>(rows_.size());
      for (const auto& [j, a] : r.terms) cols_[j].push_back(i);
      rows_.push_back(std::move(r));
    }
  }

  PresolveResult run() {
    PresolveResult out;
    out.stats.binaries_before = model_.count(milp::VarKind::Binary);
    for (int j = 0; j < n_; ++j) {
      if (lb_[j] > ub_[j] + kFeasTol) return infeasible(out);
    }

    bool changed = true;
    while (changed && passes_ < kMaxPasses) {
      changed = false;
      ++passes_;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!rows_[i].active) continue;
        const int r = process_row(rows_[i]);
        if (r < 0) return infeasible(out);
        if (r > 0) changed = true;
      }
      if (fix_empty_columns()) changed = true;
    }
    return build(out);
  }

 private:
  bool fixed(int j) const { return lb_[j] == ub_[j]; }

  Activity activity(const Row& row) const {
    Activity a;
    for (const auto& [j, c] : row.terms) {
      const double lo = c > 0 ? lb_[j] : ub_[j];
      const double hi = c > 0 ? ub_[j] : lb_[j];
      if (std::isinf(lo)) ++a.min_inf; else a.min_fin += c * lo;
      if (std::isinf(hi)) ++a.max_inf; else a.max_fin += c * hi;
    }
    return a;
  }

  // Returns -1 on infeasibility, 1 if anything changed, 0 otherwise.
  int process_row(Row& row) {
    Activity a = activity(row);
    const double min_act = a.min_inf ? -kInf : a.min_fin;
    const double max_act = a.max_inf ? kInf : a.max_fin;
    const double scale = 1.0 + std::max(std::abs(row.lo == -kInf ? 0.0 : row.lo),
                                        std::abs(row.hi == kInf ? 0.0 : row.hi));
    if (min_act > row.hi + kFeasTol * scale || max_act < row.lo - kFeasTol * scale) return -1;
    if (min_act >= row.lo - kFeasTol * scale && max_act <= row.hi + kFeasTol * scale) {
      row.active = false;
      ++rows_removed_;
      return 1;
    }

    int changed = 0;
    for (const auto& [j, c] : row.terms) {
      if (fixed(j)) continue;
      const double lo_j = c > 0 ? lb_[j] : ub_[j];
      const double hi_j = c > 0 ? ub_[j] : lb_[j];
      // Residual activity of the other terms.
      double rest_min = -kInf;
      if (a.min_inf == 0) {
        rest_min = a.min_fin - c * lo_j;
      } else if (a.min_inf == 1 && std::isinf(lo_j)) {
        rest_min = a.min_fin;
      }
      double rest_max = kInf;
      if (a.max_inf == 0) {
        rest_max = a.max_fin - c * hi_j;
      } else if (a.max_inf == 1 && std::isinf(hi_j)) {
        rest_max = a.max_fin;
      }

      double new_lb = lb_[j];
      double new_ub = ub_[j];
      if (row.hi < kInf && rest_min > -kInf) {
        const double bound = (row.hi - rest_min) / c;
        if (c > 0) new_ub = std::min(new_ub, bound);
        else new_lb = std::max(new_lb, bound);
      }
      if (row.lo > -kInf && rest_max < kInf) {
        const double bound = (row.lo - rest_max) / c;
        if (c > 0) new_lb = std::max(new_lb, bound);
        else new_ub = std::min(new_ub, bound);
      }
      const int r = update_bounds(j, new_lb, new_ub);
      if (r < 0) return -1;
      if (r > 0) {
        changed = 1;
        a = activity(row);
      }
    }
    if (tighten_coefficients(row)) changed = 1;
    return changed;
  }

  // Shrinks the coefficient of a binary in a one-sided row down to what the
  // other terms can reach, keeping both integer cases intact:
  //   a.x + c z <= b with max(a.x) < b  ->  c -= d, b -= d  (c > 0)
  //   a.x + c z <= b with max(a.x) < b - c  ->  c += d      (c < 0)
  // where d is the slack. Ge rows are handled through negation.
  bool tighten_coefficients(Row& row) {
    const bool le = row.hi < kInf && row.lo == -kInf;
    const bool ge = row.lo > -kInf && row.hi == kInf;
    if (!le && !ge) return false;
    const double s = le ? 1.0 : -1.0;
    bool changed = false;
    for (auto& [j, coef] : row.terms) {
      if (!integral_[j] || lb_[j] != 0.0 || ub_[j] != 1.0) continue;
      // Max of s * (other terms).
      double rest = 0.0;
      bool finite = true;
      for (const auto& [k, ck] : row.terms) {
        if (k == j) continue;
        const double v = s * ck > 0 ? ub_[k] : lb_[k];
        if (std::isinf(v)) {
          finite = false;
          break;
        }
        rest += s * ck * v;
      }
      if (!finite) continue;
      const double b = s * (le ? row.hi : row.lo);
      const double c = s * coef;
      const double scale = 1.0 + std::abs(b) + std::abs(c);
      if (c > 0) {
        const double d = b - rest;
        if (d <= 1e-7 * scale || d >= c) continue;
        coef = s * (c - d);
        if (le) row.hi = s * (b - d);
        else row.lo = s * (b - d);
      } else if (c < 0) {
        const double d = b - c - rest;
        if (d <= 1e-7 * scale || d >= -c) continue;
        coef = s * (c + d);
      } else {
        continue;
      }
      ++coefs_tightened_;
      changed = true;
    }
    return changed;
  }

  int update_bounds(int j, double new_lb, double new_ub) {
    if (integral_[j]) {
      new_lb = std::ceil(new_lb - kIntTol);
      new_ub = std::floor(new_ub + kIntTol);
    }
    bool changed = false;
    if (new_lb > lb_[j] && significant(lb_[j], new_lb)) {
      lb_[j] = new_lb;
      changed = true;
    }
    if (new_ub < ub_[j] && significant(ub_[j], new_ub)) {
      ub_[j] = new_ub;
      changed = true;
    }
    if (!changed) return 0;
    const double tol = kFeasTol * (1.0 + std::abs(lb_[j]));
    if (lb_[j] > ub_[j] + std::max(tol, 1e-7)) return -1;
    if (lb_[j] > ub_[j]) {
      const double mid = 0.5 * (lb_[j] + ub_[j]);
      lb_[j] = ub_[j] = mid;
    } else if (ub_[j] - lb_[j] <= 1e-9 * (1.0 + std::abs(lb_[j]))) {
      ub_[j] = lb_[j];
    }
    ++tightened_;
    return 1;
  }

  // A variable left in no active row is set to the bound its cost prefers.
  bool fix_empty_columns() {
    if (objective_.empty()) {
      objective_.assign(n_, 0.0);
      for (const milp::Term& t : model_.objective().terms()) objective_[t.var.index] += t.coef;
    }
    bool changed = false;
    for (int j = 0; j < n_; ++j) {
      if (fixed(j)) continue;
      const bool empty = std::none_of(cols_[j].begin(), cols_[j].end(),
                                      [&](int i) { return rows_[i].active; });
      if (!empty) continue;
      const double c = objective_[j];
      double v;
      if (c > 0) v = lb_[j];
      else if (c < 0) v = ub_[j];
      else v = std::isfinite(lb_[j]) ? lb_[j] : (std::isfinite(ub_[j]) ? ub_[j] : 0.0);
      if (!std::isfinite(v)) continue;  // unbounded direction; leave for the LP to report
      lb_[j] = ub_[j] = v;
      changed = true;
    }
    return changed;
  }

  PresolveResult& infeasible(PresolveResult& out) {
    out.infeasible = true;
    out.stats.passes = passes_;
    return out;
  }

  PresolveResult& build(PresolveResult& out) {
    const auto& vars = model_.vars();
    out.reduced_of.assign(n_, -1);
    out.fixed.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (fixed(j)) {
        out.fixed[j] = lb_[j];
        ++out.stats.vars_fixed;
        continue;
      }
      out.reduced_of[j] = static_cast<int>(out.original_of.size());
      out.original_of.push_back(j);
      out.reduced.add_var(vars[j].kind, lb_[j], ub_[j], vars[j].tag);
      if (vars[j].kind == milp::VarKind::Binary) ++out.stats.binaries_after;
    }
    auto id = [&](int j) { return milp::VarId{static_cast<std::uint32_t>(out.reduced_of[j])}; };

    for (const Row& row : rows_) {
      if (!row.active) continue;
      milp::LinExpr expr;
      double shift = 0.0;
      for (const auto& [j, c] : row.terms) {
        if (out.reduced_of[j] < 0) shift += c * out.fixed[j];
        else expr.add(c, id(j));
      }
      if (expr.empty()) {
        const double scale = 1.0 + std::abs(shift);
        if (shift < row.lo - 1e-7 * scale || shift > row.hi + 1e-7 * scale) return infeasible(out);
        ++rows_removed_;
        continue;
      }
      const double lo = row.lo - shift;
      const double hi = row.hi - shift;
      if (lo == hi) {
        out.reduced.add_constraint(expr, milp::Sense::Eq, lo, row.tag);
      } else {
        if (hi < kInf) out.reduced.add_constraint(expr, milp::Sense::Le, hi, row.tag);
        if (lo > -kInf) out.reduced.add_constraint(expr, milp::Sense::Ge, lo, row.tag);
      }
    }

    milp::LinExpr obj;
    obj.add_constant(model_.objective().constant());
    for (const milp::Term& t : model_.objective().terms()) {
      const int j = static_cast<int>(t.var.index);
      if (out.reduced_of[j] < 0) obj.add_constant(t.coef * out.fixed[j]);
      else obj.add(t.coef, id(j));
    }
    out.reduced.set_objective(std::move(obj));

    out.stats.rows_removed = rows_removed_;
    out.stats.bounds_tightened = tightened_;
    out.stats.coefficients_tightened = coefs_tightened_;
    out.stats.passes = passes_;
    return out;
  }

  const milp::MilpModel& model_;
  int n_ = 0;
  std::vector<double> lb_, ub_;
  std::vector<bool> integral_;
  std::vector<Row> rows_;
  std::vector<std::vector<int>> cols_;
  std::vector<double> objective_;
  std::size_t rows_removed_ = 0;
  std::size_t tightened_ = 0;
  std::size_t coefs_tightened_ = 0;
  int passes_ = 0;
};

}  // namespace

std::vector<double> PresolveResult::expand(std::span<const double> reduced_values) const {
  std::vector<double> full(reduced_of.size());
  for (std::size_t j = 0; j < full.size(); ++j) {
    full[j] = reduced_of[j] < 0 ? fixed[j] : reduced_values[reduced_of[j]];
  }
  return full;
}

PresolveResult presolve(const milp::MilpModel& model) { return Presolver(model).run(); }

}  // namespace tamp::solver

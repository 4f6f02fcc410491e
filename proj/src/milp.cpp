// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include "tampmilp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace tamp::milp {

std::string VarTag::str() const {
  std::string out = symbol;
  if (!indices.empty()) {
    out += '(';
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (k) out += ',';
      out += std::to_string(indices[k]);
    }
    out += ')';
  }
  return out;
}

LinExpr::LinExpr(std::initializer_list<Term> terms, double constant) : constant_(constant) {
  for (const Term& t : terms) add(t.coef, t.var);
}

LinExpr& LinExpr::add(double coef, VarId var) {
  if (!std::isfinite(coef)) throw ModelError("non-finite coefficient");
  for (Term& t : terms_) {
    if (t.var == var) {
      t.coef += coef;
      return *this;
    }
  }
  terms_.push_back({coef, var});
  return *this;
}

LinExpr& LinExpr::add(const LinExpr& other, double scale) {
  for (const Term& t : other.terms_) add(scale * t.coef, t.var);
  constant_ += scale * other.constant_;
  return *this;
}

double LinExpr::coefficient(VarId var) const {
  for (const Term& t : terms_) {
    if (t.var == var) return t.coef;
  }
  return 0.0;
}

void LinExpr::normalize() {
  std::erase_if(terms_, [](const Term& t) { return t.coef == 0.0; });
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
}

double LinExpr::evaluate(std::span<const double> values) const {
  double s = constant_;
  for (const Term& t : terms_) s += t.coef * values[t.var.index];
  return s;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a.add(b); }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a.add(b, -1.0); }
LinExpr operator*(double s, LinExpr e) {
  LinExpr out;
  out.add(e, s);
  return out;
}

VarId MilpModel::add_var(VarKind kind, double lb, double ub, VarTag tag) {
  if (std::isnan(lb) || std::isnan(ub) || lb > ub) {
    throw ModelError("invalid bounds for " + tag.str());
  }
  if (kind != VarKind::Continuous && (lb < 0.0 || ub > 1.0)) {
    throw ModelError("0-1 variable with bounds outside [0,1]: " + tag.str());
  }
  vars_.push_back({kind, lb, ub, std::move(tag)});
  return VarId{static_cast<std::uint32_t>(vars_.size() - 1)};
}

void MilpModel::check(VarId v) const {
  if (!v.valid() || v.index >= vars_.size()) throw ModelError("unknown variable");
}

void MilpModel::add_constraint(LinExpr expr, Sense sense, double rhs, std::string tag) {
  if (!std::isfinite(rhs)) throw ModelError("non-finite rhs in " + tag);
  for (const Term& t : expr.terms()) check(t.var);
  rhs -= expr.constant();
  expr.add_constant(-expr.constant());
  expr.normalize();
  constraints_.push_back({std::move(expr), sense, rhs, std::move(tag)});
}

void MilpModel::set_objective(LinExpr objective) {
  for (const Term& t : objective.terms()) check(t.var);
  objective.normalize();
  objective_ = std::move(objective);
}

void MilpModel::fix(VarId v, double value) { set_bounds(v, value, value); }

void MilpModel::set_bounds(VarId v, double lb, double ub) {
  check(v);
  if (lb > ub) throw ModelError("empty bounds for " + vars_[v.index].tag.str());
  vars_[v.index].lb = lb;
  vars_[v.index].ub = ub;
}

std::size_t MilpModel::count(VarKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(vars_.begin(), vars_.end(), [&](const VarSpec& s) { return s.kind == kind; }));
}

Interval MilpModel::bounds(const LinExpr& expr) const {
  Interval iv{expr.constant(), expr.constant()};
  for (const Term& t : expr.terms()) {
    if (t.coef == 0.0) continue;
    const VarSpec& s = var(t.var);
    if (t.coef > 0) {
      iv.lo += t.coef * s.lb;
      iv.hi += t.coef * s.ub;
    } else {
      iv.lo += t.coef * s.ub;
      iv.hi += t.coef * s.lb;
    }
  }
  return iv;
}

double MilpModel::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max({worst, vars_[j].lb - values[j], values[j] - vars_[j].ub});
  }
  for (const Constraint& c : constraints_) {
    const double act = c.expr.evaluate(values);
    switch (c.sense) {
      case Sense::Le: worst = std::max(worst, act - c.rhs); break;
      case Sense::Ge: worst = std::max(worst, c.rhs - act); break;
      case Sense::Eq: worst = std::max(worst, std::abs(act - c.rhs)); break;
    }
  }
  return worst;
}

double MilpModel::max_integrality_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    if (vars_[j].kind == VarKind::Binary) {
      worst = std::max(worst, std::abs(values[j] - std::round(values[j])));
    }
  }
  return worst;
}

namespace {

std::string num(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

LinExpr literal_expr(const Literal& lit) {
  LinExpr e;
  if (lit.negated) {
    e.add(-1.0, lit.var);
    e.add_constant(1.0);
  } else {
    e.add(1.0, lit.var);
  }
  return e;
}

VarTag default_name(const MilpModel& model, const char* prefix) {
  return {prefix, {static_cast<int>(model.num_vars())}};
}

}  // namespace

void MilpModel::dump(std::ostream& os) const {
  os << "variables " << vars_.size() << "\n";
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const VarSpec& s = vars_[j];
    os << "  x" << j << ' ' << to_string(s.kind) << " [" << num(s.lb) << ", " << num(s.ub) << "] "
       << s.tag.str() << "\n";
  }
  os << "constraints " << constraints_.size() << "\n";
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const Constraint& c = constraints_[i];
    os << "  c" << i << ' ' << c.tag << ':';
    for (const Term& t : c.expr.terms()) os << ' ' << num(t.coef) << " x" << t.var.index;
    os << ' ' << to_string(c.sense) << ' ' << num(c.rhs) << "\n";
  }
  os << "objective:";
  for (const Term& t : objective_.terms()) os << ' ' << num(t.coef) << " x" << t.var.index;
  os << " + " << num(objective_.constant()) << "\n";
}

std::string to_string(VarKind kind) {
  switch (kind) {
    case VarKind::Binary: return "binary";
    case VarKind::UnitInterval: return "unit";
    case VarKind::Continuous: return "continuous";
  }
  return "?";
}

std::string to_string(Sense sense) {
  switch (sense) {
    case Sense::Le: return "<=";
    case Sense::Ge: return ">=";
    case Sense::Eq: return "=";
  }
  return "?";
}

VarId encode_not(MilpModel& model, VarId operand, const std::string& tag) {
  const VarId phi = model.add_unit(default_name(model, "not"));
  model.add_constraint(LinExpr{{1.0, phi}, {1.0, operand}}, Sense::Eq, 1.0, tag);
  model.add_logic_def({LogicOp::Not, phi, {Literal(operand)}});
  return phi;
}

void constrain_and(MilpModel& model, VarId result, std::span<const Literal> operands,
                   const std::string& tag) {
  if (operands.empty()) throw ModelError("AND needs at least one operand");
  LinExpr lower{{1.0, result}};
  for (const Literal& lit : operands) {
    model.add_constraint(LinExpr(result) - literal_expr(lit), Sense::Le, 0.0, tag);
    lower.add(literal_expr(lit), -1.0);
  }
  const double n = static_cast<double>(operands.size());
  model.add_constraint(std::move(lower), Sense::Ge, 1.0 - n, tag);
  model.add_logic_def({LogicOp::And, result, {operands.begin(), operands.end()}});
}

void constrain_or(MilpModel& model, VarId result, std::span<const Literal> operands,
                  const std::string& tag) {
  if (operands.empty()) throw ModelError("OR needs at least one operand");
  LinExpr upper{{1.0, result}};
  for (const Literal& lit : operands) {
    model.add_constraint(LinExpr(result) - literal_expr(lit), Sense::Ge, 0.0, tag);
    upper.add(literal_expr(lit), -1.0);
  }
  model.add_constraint(std::move(upper), Sense::Le, 0.0, tag);
  model.add_logic_def({LogicOp::Or, result, {operands.begin(), operands.end()}});
}

VarId encode_and(MilpModel& model, std::span<const Literal> operands, const std::string& tag,
                 VarTag name) {
  if (name.symbol.empty()) name = default_name(model, "and");
  const VarId phi = model.add_unit(std::move(name));
  constrain_and(model, phi, operands, tag);
  return phi;
}

VarId encode_or(MilpModel& model, std::span<const Literal> operands, const std::string& tag,
                VarTag name) {
  if (name.symbol.empty()) name = default_name(model, "or");
  const VarId phi = model.add_unit(std::move(name));
  constrain_or(model, phi, operands, tag);
  return phi;
}

double tightest_big_m(const MilpModel& model, const LinExpr& expr) {
  for (const Term& t : expr.terms()) {
    const VarSpec& s = model.var(t.var);
    if (t.coef != 0.0 && (!std::isfinite(s.lb) || !std::isfinite(s.ub))) {
      throw ModelError("big-M over unbounded variable " + s.tag.str());
    }
  }
  const Interval iv = model.bounds(expr);
  return std::max(std::abs(iv.lo), std::abs(iv.hi));
}

void evaluate_logic(const MilpModel& model, std::span<double> values) {
  for (const LogicDef& d : model.logic_defs()) {
    double v = 0.0;
    switch (d.op) {
      case LogicOp::Not: v = 1.0 - d.operands.front().value(values); break;
      case LogicOp::And:
        v = 1.0;
        for (const Literal& l : d.operands) v = std::min(v, l.value(values));
        break;
      case LogicOp::Or:
        v = 0.0;
        for (const Literal& l : d.operands) v = std::max(v, l.value(values));
        break;
    }
    values[d.result.index] = v;
  }
}

}  // namespace tamp::milp

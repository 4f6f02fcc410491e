// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tamp::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index into the variable table of the model that issued it.
struct VarId {
  std::uint32_t index = std::numeric_limits<std::uint32_t>::max();

  bool valid() const { return index != std::numeric_limits<std::uint32_t>::max(); }
  friend bool operator==(VarId, VarId) = default;
  friend auto operator<=>(VarId, VarId) = default;
};

enum class VarKind { Binary, UnitInterval, Continuous };

/// Structured name: symbol plus integer indices, e.g. {"z_ee_obs", {i, k, r, t}}.
struct VarTag {
  std::string symbol;
  std::vector<int> indices;

  std::string str() const;
};

struct VarSpec {
  VarKind kind = VarKind::Continuous;
  double lb = 0.0;
  double ub = 0.0;
  VarTag tag;

  bool integral() const { return kind == VarKind::Binary; }
};

struct Term {
  double coef = 0.0;
  VarId var;
};

/// Sum of coefficient * variable plus a constant. Terms on the same variable
/// are merged on insertion.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(VarId v) { add(1.0, v); }  // NOLINT(google-explicit-constructor)
  LinExpr(std::initializer_list<Term> terms, double constant = 0.0);

  LinExpr& add(double coef, VarId var);
  LinExpr& add(const LinExpr& other, double scale = 1.0);
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool empty() const { return terms_.empty(); }
  double coefficient(VarId var) const;

  /// Drops zero coefficients and sorts by variable index.
  void normalize();

  double evaluate(std::span<const double> values) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr e);

enum class Sense { Le, Ge, Eq };

struct Constraint {
  LinExpr expr;  // constant folded into rhs when added to a model
  Sense sense = Sense::Le;
  double rhs = 0.0;
  std::string tag;
};

/// A possibly negated 0-1 operand for the logic encodings.
struct Literal {
  VarId var;
  bool negated = false;

  Literal(VarId v, bool neg = false) : var(v), negated(neg) {}  // NOLINT
  double value(std::span<const double> values) const {
    return negated ? 1.0 - values[var.index] : values[var.index];
  }
};

inline Literal operator!(VarId v) { return {v, true}; }

enum class LogicOp { Not, And, Or };

/// Record of a logic auxiliary: `result = op(operands)`.
struct LogicDef {
  LogicOp op = LogicOp::And;
  VarId result;
  std::vector<Literal> operands;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Minimization MILP: variable table, constraint list, linear objective.
class MilpModel {
 public:
  VarId add_var(VarKind kind, double lb, double ub, VarTag tag);
  VarId add_binary(VarTag tag) { return add_var(VarKind::Binary, 0.0, 1.0, std::move(tag)); }
  VarId add_unit(VarTag tag) { return add_var(VarKind::UnitInterval, 0.0, 1.0, std::move(tag)); }
  VarId add_continuous(double lb, double ub, VarTag tag) {
    return add_var(VarKind::Continuous, lb, ub, std::move(tag));
  }

  /// Adds `expr sense rhs`; the expression constant moves to the right side.
  void add_constraint(LinExpr expr, Sense sense, double rhs, std::string tag);
  void set_objective(LinExpr objective);
  void add_logic_def(LogicDef def) { logic_.push_back(std::move(def)); }

  /// Narrows a variable's bounds to a single value.
  void fix(VarId v, double value);
  void set_bounds(VarId v, double lb, double ub);

  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  const VarSpec& var(VarId v) const { return vars_.at(v.index); }
  const std::vector<VarSpec>& vars() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinExpr& objective() const { return objective_; }
  const std::vector<LogicDef>& logic_defs() const { return logic_; }
  std::size_t count(VarKind kind) const;

  /// Range of `expr` over the variable bound box.
  Interval bounds(const LinExpr& expr) const;

  /// Largest constraint violation of `values` (bounds included).
  double max_violation(std::span<const double> values) const;
  /// Largest distance of a binary variable from {0, 1}.
  double max_integrality_violation(std::span<const double> values) const;

  /// Human-readable listing with stable ordering.
  void dump(std::ostream& os) const;

 private:
  void check(VarId v) const;

  std::vector<VarSpec> vars_;
  std::vector<Constraint> constraints_;
  LinExpr objective_;
  std::vector<LogicDef> logic_;
};

// Logic encodings over 0-1 operands. Results are fresh unit-interval
// variables; only the caller's binaries are ever branched on.

/// phi = 1 - operand.
VarId encode_not(MilpModel& model, VarId operand, const std::string& tag = "not");
/// phi <= operand_n for all n, phi >= sum(operand_n) - N + 1.
VarId encode_and(MilpModel& model, std::span<const Literal> operands,
                 const std::string& tag = "and", VarTag name = {});
/// phi >= operand_n for all n, phi <= sum(operand_n).
VarId encode_or(MilpModel& model, std::span<const Literal> operands,
                const std::string& tag = "or", VarTag name = {});

/// Same encodings applied to an existing result variable.
void constrain_and(MilpModel& model, VarId result, std::span<const Literal> operands,
                   const std::string& tag);
void constrain_or(MilpModel& model, VarId result, std::span<const Literal> operands,
                  const std::string& tag);

inline VarId encode_and(MilpModel& model, std::initializer_list<Literal> ops,
                        const std::string& tag = "and", VarTag name = {}) {
  return encode_and(model, std::span<const Literal>(ops.begin(), ops.size()), tag,
                    std::move(name));
}
inline VarId encode_or(MilpModel& model, std::initializer_list<Literal> ops,
                       const std::string& tag = "or", VarTag name = {}) {
  return encode_or(model, std::span<const Literal>(ops.begin(), ops.size()), tag,
                   std::move(name));
}

/// Smallest M with |expr| <= M over the bound box of its variables. Throws
/// ModelError if a variable in `expr` is unbounded.
double tightest_big_m(const MilpModel& model, const LinExpr& expr);

/// Evaluates the logic definitions in creation order, overwriting results.
void evaluate_logic(const MilpModel& model, std::span<double> values);

std::string to_string(VarKind kind);
std::string to_string(Sense sense);

}  // namespace tamp::milp

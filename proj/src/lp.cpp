// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include "tampmilp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tamp::lp {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-11;
constexpr long kRefactorEvery = 200;

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

void LpProblem::set_matrix(int rows, std::vector<Entry> entries) {
  const int cols = num_cols();
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  // merge duplicates, drop zeros
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (const Entry& e : entries) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const Entry& e) { return e.value == 0.0; });

  col_start.assign(cols + 1, 0);
  row_start.assign(rows + 1, 0);
  for (const Entry& e : merged) {
    ++col_start[e.col + 1];
    ++row_start[e.row + 1];
  }
  std::partial_sum(col_start.begin(), col_start.end(), col_start.begin());
  std::partial_sum(row_start.begin(), row_start.end(), row_start.begin());
  col_row.resize(merged.size());
  col_val.resize(merged.size());
  row_col.resize(merged.size());
  row_val.resize(merged.size());
  std::vector<int> cfill(col_start.begin(), col_start.end() - 1);
  std::vector<int> rfill(row_start.begin(), row_start.end() - 1);
  for (const Entry& e : merged) {
    col_row[cfill[e.col]] = e.row;
    col_val[cfill[e.col]++] = e.value;
    row_col[rfill[e.row]] = e.col;
    row_val[rfill[e.row]++] = e.value;
  }
}

DualSimplex::DualSimplex(const LpProblem& problem)
    : lp_(problem), n_(problem.num_cols()), m_(problem.num_rows()) {
  const int total = n_ + m_;
  lb_.resize(total);
  ub_.resize(total);
  cost_.assign(total, 0.0);
  artificial_.assign(n_, false);
  for (int j = 0; j < n_; ++j) {
    lb_[j] = problem.lb[j];
    ub_[j] = problem.ub[j];
    if (!std::isfinite(lb_[j])) {
      lb_[j] = -kArtificialBound;
      artificial_[j] = true;
    }
    if (!std::isfinite(ub_[j])) {
      ub_[j] = kArtificialBound;
      artificial_[j] = true;
    }
    cost_[j] = problem.cost[j];
  }
  root_lb_.assign(lb_.begin(), lb_.begin() + n_);
  root_ub_.assign(ub_.begin(), ub_.begin() + n_);
  for (int i = 0; i < m_; ++i) {
    double lo = 0.0, hi = 0.0;
    for (int k = problem.row_start[i]; k < problem.row_start[i + 1]; ++k) {
      const int j = problem.row_col[k];
      const double a = problem.row_val[k];
      lo += a > 0 ? a * lb_[j] : a * ub_[j];
      hi += a > 0 ? a * ub_[j] : a * lb_[j];
    }
    lb_[n_ + i] = std::isfinite(problem.row_lo[i]) ? problem.row_lo[i] : lo;
    ub_[n_ + i] = std::isfinite(problem.row_hi[i]) ? problem.row_hi[i] : hi;
  }
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  status_.assign(total, kLower);
  pos_.assign(total, -1);
  head_.assign(m_, -1);
  alpha_.assign(total, 0.0);
  column_.assign(m_, 0.0);
  reset_to_slack_basis();
}

void DualSimplex::set_bounds(int col, double lb, double ub) {
  lb_[col] = std::isfinite(lb) ? lb : -kArtificialBound;
  ub_[col] = std::isfinite(ub) ? ub : kArtificialBound;
  if (status_[col] == kLower) x_[col] = lb_[col];
  if (status_[col] == kUpper) x_[col] = ub_[col];
  primal_dirty_ = true;
}

void DualSimplex::reset_bounds() {
  for (int j = 0; j < n_; ++j) {
    if (lb_[j] != root_lb_[j] || ub_[j] != root_ub_[j]) set_bounds(j, root_lb_[j], root_ub_[j]);
  }
}

void DualSimplex::reset_to_slack_basis() {
  for (int j = 0; j < n_; ++j) {
    pos_[j] = -1;
    status_[j] = cost_[j] >= 0.0 ? kLower : kUpper;
    x_[j] = status_[j] == kLower ? lb_[j] : ub_[j];
    d_[j] = cost_[j];
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  weight_.assign(m_, 1.0);
  for (int p = 0; p < m_; ++p) {
    head_[p] = n_ + p;
    pos_[n_ + p] = p;
    status_[n_ + p] = kBasic;
    d_[n_ + p] = 0.0;
    binv_[static_cast<std::size_t>(p) * m_ + p] = -1.0;
  }
  since_refactor_ = 0;
  primal_dirty_ = true;
}

Basis DualSimplex::basis() const { return {head_, status_}; }

bool DualSimplex::load_basis(const Basis& basis) {
  if (basis.head.size() != head_.size() || basis.status.size() != status_.size()) {
    reset_to_slack_basis();
    return false;
  }
  head_ = basis.head;
  status_ = basis.status;
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int p = 0; p < m_; ++p) pos_[head_[p]] = p;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kLower) x_[j] = lb_[j];
    if (status_[j] == kUpper) x_[j] = ub_[j];
  }
  if (!refactor()) {
    reset_to_slack_basis();
    return false;
  }
  recompute_dual();
  restore_dual_feasibility();
  primal_dirty_ = true;
  return true;
}

bool DualSimplex::refactor() {
  // Basis columns are structural columns S plus -e_i for the rows covered by
  // basic logicals; only the structural block on the uncovered rows needs a
  // dense inverse.
  std::vector<int> struct_pos;
  std::vector<char> covered(m_, 0);
  for (int p = 0; p < m_; ++p) {
    if (head_[p] < n_) {
      struct_pos.push_back(p);
    } else {
      covered[head_[p] - n_] = 1;
    }
  }
  const int k = static_cast<int>(struct_pos.size());
  std::vector<int> free_rows;
  std::vector<int> row_slot(m_, -1);
  for (int i = 0; i < m_; ++i) {
    if (!covered[i]) {
      row_slot[i] = static_cast<int>(free_rows.size());
      free_rows.push_back(i);
    }
  }
  if (static_cast<int>(free_rows.size()) != k) return false;

  // Gauss-Jordan on [S1 | I], S1[a][b] = A[free_rows[a], head[struct_pos[b]]].
  std::vector<double> mat(static_cast<std::size_t>(k) * k, 0.0);
  std::vector<double> inv(static_cast<std::size_t>(k) * k, 0.0);
  for (int b = 0; b < k; ++b) {
    const int j = head_[struct_pos[b]];
    for (int e = lp_.col_start[j]; e < lp_.col_start[j + 1]; ++e) {
      const int a = row_slot[lp_.col_row[e]];
      if (a >= 0) mat[static_cast<std::size_t>(a) * k + b] = lp_.col_val[e];
    }
  }
  for (int a = 0; a < k; ++a) inv[static_cast<std::size_t>(a) * k + a] = 1.0;
  std::vector<int> col_of_row(k);  // pivot bookkeeping: row a pivoted on column b
  std::vector<char> used(k, 0);
  for (int b = 0; b < k; ++b) {
    int best = -1;
    double best_abs = kSingularTol;
    for (int a = 0; a < k; ++a) {
      if (used[a]) continue;
      const double v = std::abs(mat[static_cast<std::size_t>(a) * k + b]);
      if (v > best_abs) {
        best_abs = v;
        best = a;
      }
    }
    if (best < 0) return false;
    used[best] = 1;
    col_of_row[best] = b;
    double* prow = &mat[static_cast<std::size_t>(best) * k];
    double* pinv = &inv[static_cast<std::size_t>(best) * k];
    const double piv = prow[b];
    for (int c = 0; c < k; ++c) {
      prow[c] /= piv;
      pinv[c] /= piv;
    }
    for (int a = 0; a < k; ++a) {
      if (a == best) continue;
      double* row = &mat[static_cast<std::size_t>(a) * k];
      const double f = row[b];
      if (f == 0.0) continue;
      double* irow = &inv[static_cast<std::size_t>(a) * k];
      for (int c = 0; c < k; ++c) {
        row[c] -= f * prow[c];
        irow[c] -= f * pinv[c];
      }
    }
  }
  // After elimination row a of `inv` holds row col_of_row[a] of S1^{-1}.
  std::fill(binv_.begin(), binv_.end(), 0.0);
  for (int a = 0; a < k; ++a) {
    const int b = col_of_row[a];
    double* out = &binv_[static_cast<std::size_t>(struct_pos[b]) * m_];
    const double* src = &inv[static_cast<std::size_t>(a) * k];
    for (int c = 0; c < k; ++c) out[free_rows[c]] = src[c];
  }
  for (int p = 0; p < m_; ++p) {
    if (head_[p] < n_) continue;
    const int i = head_[p] - n_;
    double* out = &binv_[static_cast<std::size_t>(p) * m_];
    for (int e = lp_.row_start[i]; e < lp_.row_start[i + 1]; ++e) {
      const int q = pos_[lp_.row_col[e]];
      if (q < 0) continue;
      const double v = lp_.row_val[e];
      const double* src = &binv_[static_cast<std::size_t>(q) * m_];
      for (int c : free_rows) out[c] += v * src[c];
    }
    out[i] -= 1.0;
  }
  for (int p = 0; p < m_; ++p) weight_[p] = std::max(row_norm2(p), 1e-12);
  since_refactor_ = 0;
  return true;
}

double DualSimplex::row_norm2(int p) const {
  const double* row = &binv_[static_cast<std::size_t>(p) * m_];
  double s = 0.0;
  for (int i = 0; i < m_; ++i) s += row[i] * row[i];
  return s;
}

void DualSimplex::recompute_primal() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == kBasic || x_[j] == 0.0) continue;
    for (int e = lp_.col_start[j]; e < lp_.col_start[j + 1]; ++e) {
      rhs[lp_.col_row[e]] -= lp_.col_val[e] * x_[j];
    }
  }
  for (int i = 0; i < m_; ++i) {
    if (status_[n_ + i] != kBasic) rhs[i] += x_[n_ + i];
  }
  std::vector<int> nz;
  for (int i = 0; i < m_; ++i) {
    if (rhs[i] != 0.0) nz.push_back(i);
  }
  for (int p = 0; p < m_; ++p) {
    const double* row = &binv_[static_cast<std::size_t>(p) * m_];
    double s = 0.0;
    for (int i : nz) s += row[i] * rhs[i];
    x_[head_[p]] = s;
  }
  primal_dirty_ = false;
}

void DualSimplex::recompute_dual() {
  std::vector<double> y(m_, 0.0);
  for (int p = 0; p < m_; ++p) {
    const double c = cost_[head_[p]];
    if (c == 0.0) continue;
    const double* row = &binv_[static_cast<std::size_t>(p) * m_];
    for (int i = 0; i < m_; ++i) y[i] += c * row[i];
  }
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == kBasic) {
      d_[j] = 0.0;
      continue;
    }
    double s = cost_[j];
    for (int e = lp_.col_start[j]; e < lp_.col_start[j + 1]; ++e) {
      s -= y[lp_.col_row[e]] * lp_.col_val[e];
    }
    d_[j] = s;
  }
  for (int i = 0; i < m_; ++i) d_[n_ + i] = status_[n_ + i] == kBasic ? 0.0 : y[i];
}

void DualSimplex::restore_dual_feasibility() {
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kLower && d_[j] < -kDualTol) {
      status_[j] = kUpper;
      x_[j] = ub_[j];
      primal_dirty_ = true;
    } else if (status_[j] == kUpper && d_[j] > kDualTol) {
      status_[j] = kLower;
      x_[j] = lb_[j];
      primal_dirty_ = true;
    }
  }
}

int DualSimplex::choose_leaving() const {
  int best = -1;
  double best_score = 0.0;
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    double infeas = 0.0;
    if (x_[j] < lb_[j] - kPrimalTol) {
      infeas = lb_[j] - x_[j];
    } else if (x_[j] > ub_[j] + kPrimalTol) {
      infeas = x_[j] - ub_[j];
    } else {
      continue;
    }
    const double score = infeas * infeas / weight_[p];
    if (score > best_score) {
      best_score = score;
      best = p;
    }
  }
  return best;
}

void DualSimplex::compute_pivot_row(int r) {
  const double* rho = &binv_[static_cast<std::size_t>(r) * m_];
  std::fill(alpha_.begin(), alpha_.begin() + n_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const double v = rho[i];
    alpha_[n_ + i] = -v;
    if (v == 0.0) continue;
    for (int e = lp_.row_start[i]; e < lp_.row_start[i + 1]; ++e) {
      alpha_[lp_.row_col[e]] += v * lp_.row_val[e];
    }
  }
}

void DualSimplex::compute_column(int q) {
  if (q < n_) {
    const int begin = lp_.col_start[q], end = lp_.col_start[q + 1];
    for (int p = 0; p < m_; ++p) {
      const double* row = &binv_[static_cast<std::size_t>(p) * m_];
      double s = 0.0;
      for (int e = begin; e < end; ++e) s += row[lp_.col_row[e]] * lp_.col_val[e];
      column_[p] = s;
    }
  } else {
    const int i = q - n_;
    for (int p = 0; p < m_; ++p) column_[p] = -binv_[static_cast<std::size_t>(p) * m_ + i];
  }
}

void DualSimplex::pivot(int r, int q) {
  double* prow = &binv_[static_cast<std::size_t>(r) * m_];
  std::vector<int> nz;
  for (int i = 0; i < m_; ++i) {
    if (prow[i] != 0.0) nz.push_back(i);
  }
  const double piv = column_[r];
  const double beta_r = weight_[r];
  for (int p = 0; p < m_; ++p) {
    const double c = column_[p];
    if (p == r || c == 0.0) continue;
    double* row = &binv_[static_cast<std::size_t>(p) * m_];
    const double f = c / piv;
    double dot = 0.0;
    for (int i : nz) dot += row[i] * prow[i];
    for (int i : nz) row[i] -= f * prow[i];
    weight_[p] = std::max(weight_[p] - 2.0 * f * dot + f * f * beta_r, 1e-12);
  }
  for (int i : nz) prow[i] /= piv;
  weight_[r] = std::max(beta_r / (piv * piv), 1e-12);

  const int leaving = head_[r];
  pos_[leaving] = -1;
  head_[r] = q;
  pos_[q] = r;
  status_[q] = kBasic;
}

LpStatus DualSimplex::solve(long iteration_limit) {
  iterations_ = 0;
  if (iteration_limit < 0) iteration_limit = 50L * (n_ + m_) + 1000;
  if (primal_dirty_) recompute_primal();
  bool fresh = since_refactor_ == 0;
  bool synced = false;
  auto resync = [&](bool refac) {
    if (refac && !refactor()) reset_to_slack_basis();
    recompute_dual();
    restore_dual_feasibility();
    recompute_primal();
    fresh = fresh || refac;
    synced = true;
  };
  struct Candidate {
    int j;
    double ratio;
    double abs_alpha;
  };
  std::vector<Candidate> cands;
  std::vector<int> flips;
  std::vector<double> delta_rhs(m_, 0.0);

  while (true) {
    if (since_refactor_ >= kRefactorEvery) resync(true);
    const int r = choose_leaving();
    if (r < 0) {
      if (!synced) {
        // confirm with recomputed primal and dual values
        resync(false);
        continue;
      }
      for (int j = 0; j < n_; ++j) {
        if (artificial_[j] && std::abs(x_[j]) >= kArtificialBound * (1.0 - 1e-9)) {
          return LpStatus::Unbounded;
        }
      }
      return LpStatus::Optimal;
    }
    if (iterations_ >= iteration_limit) return LpStatus::IterationLimit;

    const int leave = head_[r];
    const bool below = x_[leave] < lb_[leave];
    const double s = below ? 1.0 : -1.0;
    double slope = below ? lb_[leave] - x_[leave] : x_[leave] - ub_[leave];

    compute_pivot_row(r);
    cands.clear();
    double max_alpha = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic || lb_[j] == ub_[j]) continue;
      max_alpha = std::max(max_alpha, std::abs(alpha_[j]));
    }
    const double piv_tol = kPivotTol * std::max(1.0, max_alpha);
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic || lb_[j] == ub_[j]) continue;
      const double a = alpha_[j];
      if (std::abs(a) <= piv_tol) continue;
      const bool lower = status_[j] == kLower;
      if ((lower && s * a < 0.0) || (!lower && s * a > 0.0)) {
        const double dj = lower ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
        cands.push_back({j, dj / std::abs(a), std::abs(a)});
      }
    }
    if (cands.empty()) {
      if (!fresh) {
        resync(true);
        continue;
      }
      return LpStatus::Infeasible;
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.ratio != b.ratio ? a.ratio < b.ratio : a.j < b.j;
    });

    // Bound-flipping ratio test: pass breakpoints while the dual slope stays
    // positive, then pick the entering variable among the near-tied rest.
    std::size_t k = 0;
    flips.clear();
    while (k < cands.size()) {
      const Candidate& c = cands[k];
      const double range = ub_[c.j] - lb_[c.j];
      const double next = slope - c.abs_alpha * range;
      if (next > kPrimalTol) {
        if (k + 1 == cands.size()) break;
        flips.push_back(c.j);
        slope = next;
        ++k;
      } else {
        break;
      }
    }
    if (k + 1 == cands.size() &&
        slope - cands[k].abs_alpha * (ub_[cands[k].j] - lb_[cands[k].j]) > kPrimalTol) {
      // all breakpoints pass: the dual ray is unbounded
      if (!fresh) {
        resync(true);
        continue;
      }
      return LpStatus::Infeasible;
    }
    double harris = std::numeric_limits<double>::infinity();
    for (std::size_t l = k; l < cands.size(); ++l) {
      const int j = cands[l].j;
      const double dj = status_[j] == kLower ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
      harris = std::min(harris, (dj + kDualTol) / cands[l].abs_alpha);
    }
    std::size_t pick = k;
    for (std::size_t l = k; l < cands.size() && cands[l].ratio <= harris; ++l) {
      if (cands[l].abs_alpha > cands[pick].abs_alpha) pick = l;
    }
    const int q = cands[pick].j;
    const double t = cands[pick].ratio;

    compute_column(q);
    const double piv = column_[r];
    if (std::abs(piv - alpha_[q]) > 1e-7 * (1.0 + std::abs(alpha_[q])) || std::abs(piv) < kSingularTol) {
      if (!fresh) {
        resync(true);
        continue;
      }
      if (std::abs(piv) < kSingularTol) return LpStatus::IterationLimit;
    }

    // flips
    if (!flips.empty()) {
      std::fill(delta_rhs.begin(), delta_rhs.end(), 0.0);
      for (int j : flips) {
        const double old = x_[j];
        const bool to_upper = status_[j] == kLower;
        x_[j] = to_upper ? ub_[j] : lb_[j];
        status_[j] = to_upper ? kUpper : kLower;
        const double dx = x_[j] - old;
        if (j < n_) {
          for (int e = lp_.col_start[j]; e < lp_.col_start[j + 1]; ++e) {
            delta_rhs[lp_.col_row[e]] -= lp_.col_val[e] * dx;
          }
        } else {
          delta_rhs[j - n_] += dx;
        }
      }
      std::vector<int> nz;
      for (int i = 0; i < m_; ++i) {
        if (delta_rhs[i] != 0.0) nz.push_back(i);
      }
      for (int p = 0; p < m_; ++p) {
        const double* row = &binv_[static_cast<std::size_t>(p) * m_];
        double sum = 0.0;
        for (int i : nz) sum += row[i] * delta_rhs[i];
        x_[head_[p]] += sum;
      }
    }

    // primal step
    const double target = below ? lb_[leave] : ub_[leave];
    const double step = (x_[leave] - target) / piv;
    for (int p = 0; p < m_; ++p) {
      if (column_[p] != 0.0) x_[head_[p]] -= step * column_[p];
    }
    x_[q] += step;
    x_[leave] = target;

    // dual step
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic) continue;
      d_[j] += t * s * alpha_[j];
      // Harris ties leave tiny wrong-signed reduced costs behind
      if (status_[j] == kLower && d_[j] < 0.0 && d_[j] > -1e-7) d_[j] = 0.0;
      if (status_[j] == kUpper && d_[j] > 0.0 && d_[j] < 1e-7) d_[j] = 0.0;
    }
    d_[q] = 0.0;
    d_[leave] = t * s;

    pivot(r, q);
    status_[leave] = below ? kLower : kUpper;
    ++iterations_;
    ++total_iterations_;
    ++since_refactor_;
    fresh = false;
    synced = false;
  }
}

std::vector<double> DualSimplex::values() const { return {x_.begin(), x_.begin() + n_}; }

double DualSimplex::objective() const {
  double s = lp_.offset;
  for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
  return s;
}

LpSolution solve(const LpProblem& problem) {
  DualSimplex engine(problem);
  LpSolution out;
  out.status = engine.solve();
  out.x = engine.values();
  out.objective = engine.objective();
  out.iterations = engine.iterations();
  return out;
}

}  // namespace tamp::lp

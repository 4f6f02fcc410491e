// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "tampmilp/solver.hpp"

namespace tamp::solver {

using milp::kInf;

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
  }
  return "unknown";
}

std::string to_string(Branching b) {
  return b == Branching::MostFractional ? "most_fractional" : "lowest_index";
}

std::string to_string(NodeSelection s) {
  return s == NodeSelection::BestBound ? "best_bound" : "depth_first";
}

Branching parse_branching(const std::string& s) {
  if (s == "most_fractional") return Branching::MostFractional;
  if (s == "lowest_index") return Branching::LowestIndex;
  throw std::invalid_argument("unknown branching rule: " + s);
}

NodeSelection parse_node_selection(const std::string& s) {
  if (s == "best_bound") return NodeSelection::BestBound;
  if (s == "depth_first") return NodeSelection::DepthFirst;
  throw std::invalid_argument("unknown node selection: " + s);
}

double relative_gap(double incumbent, double lower_bound) {
  if (!std::isfinite(incumbent)) return kInf;
  if (lower_bound >= incumbent) return 0.0;
  if (!std::isfinite(lower_bound)) return kInf;
  return (incumbent - lower_bound) / std::max(std::abs(incumbent), 1e-10);
}

lp::LpProblem to_lp(const milp::MilpModel& model) {
  lp::LpProblem p;
  const auto& vars = model.vars();
  const std::size_t n = vars.size();
  p.cost.assign(n, 0.0);
  p.lb.resize(n);
  p.ub.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    p.lb[j] = vars[j].lb;
    p.ub[j] = vars[j].ub;
  }
  for (const milp::Term& t : model.objective().terms()) p.cost[t.var.index] += t.coef;
  p.offset = model.objective().constant();

  std::vector<lp::LpProblem::Entry> entries;
  int row = 0;
  for (const milp::Constraint& c : model.constraints()) {
    for (const milp::Term& t : c.expr.terms()) {
      entries.push_back({row, static_cast<int>(t.var.index), t.coef});
    }
    p.row_lo.push_back(c.sense == milp::Sense::Le ? -kInf : c.rhs);
    p.row_hi.push_back(c.sense == milp::Sense::Ge ? kInf : c.rhs);
    ++row;
  }
  p.set_matrix(row, std::move(entries));
  return p;
}

LpResult solve_lp(const milp::MilpModel& model) {
  const lp::LpProblem p = to_lp(model);
  const lp::LpSolution s = lp::solve(p);
  return {s.status, s.x, s.objective};
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kIntTol = 1e-6;
constexpr double kCheckTol = 1e-7;

struct BoundChange {
  int col;
  double lb;
  double ub;
};

// Bound changes along the path from the root, shared between siblings.
struct PathLink {
  BoundChange change;
  std::shared_ptr<const PathLink> parent;
};

struct Node {
  double bound = -kInf;
  long id = 0;
  int depth = 0;
  std::shared_ptr<const PathLink> path;
  std::shared_ptr<const lp::Basis> basis;
};

struct NodeOrder {
  NodeSelection mode;
  // priority_queue pops the largest element; "less" means lower priority.
  bool operator()(const Node& a, const Node& b) const {
    if (mode == NodeSelection::BestBound) {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id < b.id;  // ties: newest first
    }
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id < b.id;
  }
};

class Search {
 public:
  Search(const milp::MilpModel& original, const PresolveResult* pre,
         const milp::MilpModel& model, const SolveOptions& options, Clock::time_point start)
      : original_(original),
        pre_(pre),
        model_(model),
        options_(options),
        start_(start),
        problem_(to_lp(model)),
        open_(NodeOrder{options.node_selection}) {
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
      if (model.vars()[j].kind == milp::VarKind::Binary) binaries_.push_back(static_cast<int>(j));
    }
  }

  void run(int workers, SolveStats& stats, Solution& sol) {
    Node root;
    push(std::move(root));
    record_sample();

    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back([this] { worker(); });
      for (auto& t : pool) t.join();
    }

    stats.nodes = nodes_;
    stats.lp_solves = lp_solves_;
    stats.simplex_iterations = iterations_;
    double lower = incumbent_obj_;
    if (!open_.empty() || limit_hit_) lower = std::min(lower, global_lower_locked());
    if (!std::isfinite(incumbent_obj_) && open_.empty() && !limit_hit_) lower = kInf;
    stats.lower_bound = lower;
    stats.gap = relative_gap(incumbent_obj_, lower);
    stats.trace = std::move(trace_);
    stats.node_order = std::move(node_order_);

    if (has_incumbent_) {
      sol.values = pre_ ? pre_->expand(incumbent_) : incumbent_;
      sol.objective = incumbent_obj_;
    }
    if (error_) {
      throw std::runtime_error("relaxation failed to converge at a node");
    }
    if (time_hit_) {
      sol.status = SolveStatus::Timeout;
    } else if (limit_hit_) {
      sol.status = has_incumbent_ ? SolveStatus::Feasible : SolveStatus::Timeout;
    } else {
      sol.status = has_incumbent_ ? SolveStatus::Optimal : SolveStatus::Infeasible;
    }
    stats.status = sol.status;
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  // Minimum bound over open and in-process nodes. Caller holds the lock.
  double global_lower_locked() const {
    double lb = kInf;
    if (!open_bounds_.empty()) lb = *open_bounds_.begin();
    if (!active_bounds_.empty()) lb = std::min(lb, *active_bounds_.begin());
    return lb;
  }

  void push(Node node) {
    node.id = next_id_++;
    open_bounds_.insert(node.bound);
    open_.push(std::move(node));
  }

  Node pop() {
    Node node = open_.top();
    open_.pop();
    open_bounds_.erase(open_bounds_.find(node.bound));
    return node;
  }

  bool prunable(double bound) const {
    if (!std::isfinite(incumbent_obj_)) return false;
    if (bound >= incumbent_obj_ - 1e-9) return true;
    return incumbent_obj_ - bound <= options_.mip_gap * std::max(std::abs(incumbent_obj_), 1e-10);
  }

  void record_sample() {
    if (!options_.record_trace) return;
    const double lb = std::min(global_lower_locked(), incumbent_obj_);
    if (!trace_.empty() && trace_.back().lower_bound == lb &&
        trace_.back().incumbent == incumbent_obj_) {
      return;
    }
    trace_.push_back({nodes_, elapsed(), lb, incumbent_obj_});
  }

  void worker() {
    lp::DualSimplex engine(problem_);
    const lp::Basis* loaded = nullptr;
    std::unique_lock lock(mutex_);
    for (;;) {
      cv_.wait(lock, [&] { return stop_ || !open_.empty() || busy_ == 0; });
      if (stop_ || (open_.empty() && busy_ == 0)) break;

      // Search termination on the gap of the best open bound.
      if (options_.node_selection == NodeSelection::BestBound && std::isfinite(incumbent_obj_)) {
        const double lb = global_lower_locked();
        if (relative_gap(incumbent_obj_, lb) <= options_.mip_gap) {
          while (!open_.empty()) pop();
          if (busy_ == 0) break;
          continue;
        }
      }
      if (options_.node_limit >= 0 && nodes_ >= options_.node_limit) {
        limit_hit_ = true;
        stop_ = true;
        break;
      }
      if (elapsed() > options_.time_limit_s) {
        limit_hit_ = time_hit_ = true;
        stop_ = true;
        break;
      }

      Node node = pop();
      if (prunable(node.bound)) continue;

      ++busy_;
      auto active = active_bounds_.insert(node.bound);
      ++nodes_;
      lock.unlock();

      std::vector<Node> children;
      std::vector<double> candidate;
      double candidate_obj = kInf;  // finite when `candidate` holds a solution
      long branch_var = -1;
      const bool ok = expand(engine, loaded, node, children, candidate, candidate_obj, branch_var);

      lock.lock();
      ++lp_solves_;
      iterations_ += last_iterations_;
      active_bounds_.erase(active);
      --busy_;
      if (!ok) {
        error_ = true;
        stop_ = true;
        cv_.notify_all();
        break;
      }
      if (options_.record_trace) node_order_.push_back(branch_var);
      if (candidate_obj < incumbent_obj_) {
        has_incumbent_ = true;
        incumbent_obj_ = candidate_obj;
        incumbent_ = std::move(candidate);
      }
      for (Node& c : children) {
        if (prunable(c.bound)) continue;
        push(std::move(c));
      }
      record_sample();
      cv_.notify_all();
    }
    stop_ = true;
    cv_.notify_all();
  }

  // Solves the node relaxation and either produces an incumbent candidate or
  // children. Runs without the lock; only reads the incumbent value.
  bool expand(lp::DualSimplex& engine, const lp::Basis*& loaded, const Node& node,
              std::vector<Node>& children, std::vector<double>& candidate,
              double& candidate_obj, long& branch_var) {
    engine.reset_bounds();
    std::vector<const BoundChange*> changes;
    for (const PathLink* p = node.path.get(); p; p = p->parent.get()) changes.push_back(&p->change);
    for (auto it = changes.rbegin(); it != changes.rend(); ++it) {
      engine.set_bounds((*it)->col, (*it)->lb, (*it)->ub);
    }
    if (node.basis && node.basis.get() != loaded) engine.load_basis(*node.basis);

    lp::LpStatus st = engine.solve();
    long iters = engine.iterations();
    if (st == lp::LpStatus::IterationLimit) {
      engine.reset_to_slack_basis();
      st = engine.solve(20 * (problem_.num_cols() + problem_.num_rows()) * 50L + 100000);
      iters += engine.iterations();
    }
    last_iterations_ = iters;
    loaded = nullptr;
    if (st == lp::LpStatus::IterationLimit) return false;
    if (st == lp::LpStatus::Infeasible) return true;
    if (st == lp::LpStatus::Unbounded) {
      throw std::runtime_error("relaxation unbounded; the model needs finite variable bounds");
    }

    const double obj = engine.objective();
    double inc;
    {
      std::lock_guard g(mutex_);
      inc = incumbent_obj_;
    }
    if (std::isfinite(inc) &&
        (obj >= inc - 1e-9 ||
         inc - obj <= options_.mip_gap * std::max(std::abs(inc), 1e-10))) {
      return true;
    }

    std::vector<double> x = engine.values();
    int pick = -1;
    double best = -1.0;
    for (int j : binaries_) {
      const double f = x[j] - std::floor(x[j]);
      const double dist = std::min(f, 1.0 - f);
      if (dist <= kIntTol) continue;
      if (options_.branching == Branching::LowestIndex) {
        pick = j;
        break;
      }
      if (dist > best + 1e-12) {
        best = dist;
        pick = j;
      }
    }

    if (pick < 0) {
      for (int j : binaries_) x[j] = std::round(x[j]);
      const std::vector<double> full = pre_ ? pre_->expand(x) : x;
      if (original_.max_violation(full) <= kCheckTol) {
        candidate = std::move(x);
        candidate_obj = original_.objective().evaluate(full);
      } else {
        // Rounding broke a row: keep the unrounded relaxation value instead.
        candidate = engine.values();
        const std::vector<double> raw = pre_ ? pre_->expand(candidate) : candidate;
        if (original_.max_violation(raw) <= kCheckTol) {
          candidate_obj = original_.objective().evaluate(raw);
        }

      }
      return true;
    }

    branch_var = pre_ ? pre_->original_of[pick] : pick;
    auto basis = std::make_shared<const lp::Basis>(engine.basis());
    loaded = basis.get();
    const double v = x[pick];
    Node down, up;
    down.bound = up.bound = std::max(obj, node.bound);
    down.depth = up.depth = node.depth + 1;
    down.basis = up.basis = basis;
    down.path = std::make_shared<const PathLink>(PathLink{{pick, 0.0, 0.0}, node.path});
    up.path = std::make_shared<const PathLink>(PathLink{{pick, 1.0, 1.0}, node.path});
    // The child on the rounding side is pushed last so it is popped first.
    if (v >= 0.5) {
      children.push_back(std::move(down));
      children.push_back(std::move(up));
    } else {
      children.push_back(std::move(up));
      children.push_back(std::move(down));
    }
    return true;
  }

  const milp::MilpModel& original_;
  const PresolveResult* pre_;
  const milp::MilpModel& model_;
  const SolveOptions& options_;
  Clock::time_point start_;
  lp::LpProblem problem_;
  std::vector<int> binaries_;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  std::multiset<double> open_bounds_;
  std::multiset<double> active_bounds_;
  int busy_ = 0;
  bool stop_ = false;
  bool limit_hit_ = false;
  bool time_hit_ = false;
  bool error_ = false;
  long next_id_ = 0;
  long nodes_ = 0;
  long lp_solves_ = 0;
  long iterations_ = 0;
  static thread_local long last_iterations_;
  double incumbent_obj_ = kInf;
  bool has_incumbent_ = false;
  std::vector<double> incumbent_;
  std::vector<GapSample> trace_;
  std::vector<long> node_order_;
};

thread_local long Search::last_iterations_ = 0;

}  // namespace

std::pair<Solution, SolveStats> branch_and_bound(const milp::MilpModel& model,
                                                 const SolveOptions& options) {
  const auto start = Clock::now();
  Solution sol;
  SolveStats stats;
  stats.binaries = model.count(milp::VarKind::Binary);

  std::unique_ptr<PresolveResult> pre;
  const milp::MilpModel* work = &model;
  if (options.presolve) {
    pre = std::make_unique<PresolveResult>(presolve(model));
    stats.presolved_binaries = pre->stats.binaries_after;
    if (pre->infeasible) {
      stats.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
      stats.status = sol.status = SolveStatus::Infeasible;
      stats.lower_bound = kInf;
      return {sol, stats};
    }
    work = &pre->reduced;
  } else {
    stats.presolved_binaries = stats.binaries;
  }

  const int workers = options.deterministic ? 1 : std::max(1, options.workers);
  Search search(model, pre.get(), *work, options, start);
  search.run(workers, stats, sol);
  stats.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return {sol, stats};
}

std::string stats_json(const SolveStats& stats) {
  nlohmann::json j;
  j["nodes"] = stats.nodes;
  j["lp_solves"] = stats.lp_solves;
  j["presolved_binaries"] = stats.presolved_binaries;
  j["wall_time_s"] = stats.wall_time_s;
  if (std::isfinite(stats.gap)) j["gap"] = stats.gap;
  else j["gap"] = nullptr;
  j["status"] = to_string(stats.status);
  return j.dump();
}

}  // namespace tamp::solver

// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include "tampmilp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace tamp::bench {

using nlohmann::json;

namespace {

constexpr int kMaxRejections = 10000;

// Portable uniform [0, 1): the top 53 bits of the engine output.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec3 draw(std::mt19937_64& rng, const Aabb& slab) {
  const Vec3 lo = slab.lo();
  Vec3 p;
  for (std::size_t a = 0; a < 3; ++a) p[a] = lo[a] + unit(rng) * slab.width[a];
  return p;
}

bool apart(const Vec3& a, const Vec3& b, const Vec3& width, const Vec3& reach) {
  for (std::size_t k = 0; k < 2; ++k) {
    if (std::abs(a[k] - b[k]) >= width[k] + reach[k]) return true;
  }
  return false;
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json percentiles_json(const Percentiles& p) {
  return {{"mean", p.mean}, {"median", p.median}, {"p25", p.p25}, {"p75", p.p75}};
}

json solve_json(const solver::SolveOptions& o) {
  return {{"mip_gap", o.mip_gap},
          {"time_limit_s", o.time_limit_s},
          {"node_limit", o.node_limit},
          {"branching", solver::to_string(o.branching)},
          {"node_selection", solver::to_string(o.node_selection)},
          {"deterministic", o.deterministic},
          {"workers", o.workers},
          {"presolve", o.presolve}};
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw BenchError(std::string("config field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw BenchError(std::string("unknown ") + where + " field '" + key + "'");
    }
  }
}

}  // namespace

DeskPreset desk_preset() {
  DeskPreset p;
  p.workspace = {{0.45, 0.25, 0.16}, {0.9, 0.5, 0.28}};
  p.end_effector = {{0.04, 0.04, 0.04}, {0.12, 0.25, 0.18}, {0.4, 0.2, 0.2}, {0.0, 0.0, 0.02}};
  // Shelf between the areas, high enough that the carrying hand fits under it
  // too: a carried delivery and its end-effector can then always share a
  // free region, which the hard variants assume.
  p.obstacles = {{{0.45, 0.25, 0.155}, {0.08, 0.30, 0.07}}};
  p.delivery_width = {0.06, 0.06, 0.06};
  p.initial_slab = Aabb::from_bounds({0.05, 0.06, 0.03}, {0.17, 0.44, 0.03});
  p.target_slab = Aabb::from_bounds({0.73, 0.06, 0.03}, {0.85, 0.44, 0.03});
  return p;
}

solver::SolveOptions BenchConfig::default_solve_options() {
  solver::SolveOptions o;
  o.branching = solver::Branching::LowestIndex;
  o.time_limit_s = 600.0;
  return o;
}

void validate(const BenchConfig& c) {
  if (c.instances < 1) throw BenchError("instance count must be at least 1");
  if (c.deliveries < 1) throw BenchError("delivery count must be at least 1");
  if (c.steps < 0) throw BenchError("step count must be positive");
  for (int n : c.steps_sweep) {
    if (n < 1) throw BenchError("sweep step counts must be positive");
  }
  if (c.variants.empty()) throw BenchError("at least one variant is required");
  if (c.workers < 1) throw BenchError("worker count must be at least 1");
  if (!(c.solve.mip_gap >= 0.0)) throw BenchError("mip gap must be non-negative");
  if (!(c.solve.time_limit_s > 0.0)) throw BenchError("time limit must be positive");
}

std::vector<Scenario> sample_scenarios(const BenchConfig& config) {
  validate(config);
  const DeskPreset& p = config.preset;
  std::mt19937_64 rng(config.seed);
  const Vec3 w = p.delivery_width;
  const Vec3 reach = p.dt * p.end_effector.max_speed;

  std::vector<Scenario> out;
  for (int n = 0; n < config.instances; ++n) {
    Scenario s;
    s.name = "desk-" + std::to_string(config.seed) + "-" + std::to_string(n);
    s.workspace = p.workspace;
    s.end_effectors = {p.end_effector};
    s.obstacles = p.obstacles;
    auto place = [&](const Aabb& slab, auto&& taken) {
      for (int tries = 0; tries < kMaxRejections; ++tries) {
        const Vec3 c = draw(rng, slab);
        bool ok = true;
        for (const Aabb& o : p.obstacles) ok = ok && !interiors_overlap({c, w}, o);
        for (const Vec3& q : taken()) ok = ok && apart(c, q, w, reach);
        ok = ok && !interiors_overlap({c, w}, {p.end_effector.initial, p.end_effector.width});
        if (ok) return c;
      }
      throw BenchError("placement area too constrained");
    };
    for (int j = 0; j < config.deliveries; ++j) {
      Delivery d;
      d.width = w;
      d.initial = place(p.initial_slab, [&] {
        std::vector<Vec3> v;
        for (const Delivery& e : s.deliveries) v.push_back(e.initial);
        return v;
      });
      d.target = place(p.target_slab, [&] {
        std::vector<Vec3> v;
        for (const Delivery& e : s.deliveries) v.push_back(e.target);
        return v;
      });
      s.deliveries.push_back(d);
    }
    out.push_back(std::move(s));
  }
  return out;
}

bool BenchRecord::solved() const {
  return status == solver::SolveStatus::Optimal || status == solver::SolveStatus::Feasible;
}

Percentiles percentiles(std::vector<double> v) {
  Percentiles p;
  if (v.empty()) return p;
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  p.mean = sum / static_cast<double>(v.size());
  auto q = [&](double f) {
    const double pos = f * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  p.median = q(0.5);
  p.p25 = q(0.25);
  p.p75 = q(0.75);
  return p;
}

BenchRecord run_one(const Scenario& scenario, const Params& params,
                    const solver::SolveOptions& options, std::optional<Plan>* plan_out) {
  BenchRecord r;
  r.steps = params.steps;
  r.variant = params.variant;
  BuiltModel built;
  try {
    built = build(scenario, params);
  } catch (const ScenarioError& e) {
    r.status = solver::SolveStatus::Infeasible;
    r.verify_failure = e.what();
    return r;
  }
  r.binaries = built.report.binaries;
  const auto [sol, stats] = solver::branch_and_bound(built.model, options);
  r.status = sol.status;
  r.objective = sol.objective;
  r.nodes = stats.nodes;
  r.lp_solves = stats.lp_solves;
  r.simplex_iterations = stats.simplex_iterations;
  r.presolved_binaries = stats.presolved_binaries;
  r.gap = stats.gap;
  r.wall_time_s = stats.wall_time_s;
  if (!sol.has_values()) return r;
  try {
    Plan plan = extract_plan(sol, built.layout, scenario, params);
    r.j_time = plan.j_time;
    r.j_dist = plan.j_dist;
    r.j_route = plan.j_route;
    r.completion_step = plan.completion_step;
    const VerifyReport report = verify_plan(plan, scenario, params);
    r.verified = report.pass();
    for (const CheckResult& c : report.checks) {
      if (!c.pass) {
        r.verify_failure = c.family + ": " + c.first_offender;
        break;
      }
    }
    if (plan_out) *plan_out = std::move(plan);
  } catch (const PlanError& e) {
    r.verified = false;
    r.verify_failure = e.what();
  }
  return r;
}

BenchResult run_benchmark(const BenchConfig& config, const Progress& progress) {
  validate(config);
  const std::vector<Scenario> scenarios = sample_scenarios(config);
  std::vector<int> steps = config.steps_sweep;
  if (steps.empty()) steps = {config.effective_steps()};

  struct Task {
    int steps, scenario;
    Variant variant;
  };
  std::vector<Task> tasks;
  for (int n : steps) {
    for (int s = 0; s < static_cast<int>(scenarios.size()); ++s) {
      for (Variant v : config.variants) tasks.push_back({n, s, v});
    }
  }

  BenchResult result;
  result.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto work = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& t = tasks[k];
      Params p;
      p.dt = config.preset.dt;
      p.alpha = config.preset.alpha;
      p.steps = t.steps;
      p.variant = t.variant;
      BenchRecord r = run_one(scenarios[t.scenario], p, config.solve);
      r.scenario = t.scenario;
      std::lock_guard<std::mutex> lock(mu);
      result.records[k] = r;
      if (progress) progress(result.records[k]);
    }
  };
  const int workers = std::min<int>(config.workers, static_cast<int>(tasks.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  result.summary = summarize(result.records);
  const auto has = [&](Variant v) {
    return std::find(config.variants.begin(), config.variants.end(), v) != config.variants.end();
  };
  if (has(Variant::Baseline) && has(Variant::Hard)) {
    result.comparisons.push_back(compare(result.records, Variant::Baseline, Variant::Hard));
  }
  if (has(Variant::Hard) && has(Variant::HardSoft)) {
    result.comparisons.push_back(compare(result.records, Variant::Hard, Variant::HardSoft));
  }
  return result;
}

std::vector<VariantSummary> summarize(const std::vector<BenchRecord>& records) {
  std::map<std::pair<int, int>, std::vector<const BenchRecord*>> groups;
  for (const BenchRecord& r : records) {
    groups[{r.steps, static_cast<int>(r.variant)}].push_back(&r);
  }
  std::vector<VariantSummary> out;
  for (const auto& [key, rs] : groups) {
    VariantSummary s;
    s.steps = key.first;
    s.variant = static_cast<Variant>(key.second);
    std::vector<double> time, nodes, lps, bins, jt;
    for (const BenchRecord* r : rs) {
      ++s.records;
      if (r->verified) ++s.verified;
      if (!r->solved()) continue;
      ++s.solved;
      time.push_back(r->wall_time_s);
      nodes.push_back(static_cast<double>(r->nodes));
      lps.push_back(static_cast<double>(r->lp_solves));
      bins.push_back(static_cast<double>(r->presolved_binaries));
      jt.push_back(r->j_time);
    }
    s.wall_time_s = percentiles(time);
    s.nodes = percentiles(nodes);
    s.lp_solves = percentiles(lps);
    s.presolved_binaries = percentiles(bins);
    s.j_time = percentiles(jt);
    out.push_back(s);
  }
  return out;
}

Comparison compare(const std::vector<BenchRecord>& records, Variant a, Variant b) {
  Comparison c;
  c.a = a;
  c.b = b;
  std::map<std::pair<int, int>, const BenchRecord*> first;
  for (const BenchRecord& r : records) {
    if (r.variant == a && r.status == solver::SolveStatus::Optimal) first[{r.steps, r.scenario}] = &r;
  }
  std::vector<double> lps_a, lps_b, ratio;
  for (const BenchRecord& r : records) {
    if (r.variant != b || r.status != solver::SolveStatus::Optimal) continue;
    const auto it = first.find({r.steps, r.scenario});
    if (it == first.end()) continue;
    const BenchRecord& ra = *it->second;
    ++c.pairs;
    if (r.completion_step == ra.completion_step) ++c.equal_j_time;
    if (r.completion_step - ra.completion_step <= 1) ++c.within_one_step;
    c.max_objective_diff = std::max(c.max_objective_diff, std::abs(r.objective - ra.objective));
    lps_a.push_back(static_cast<double>(ra.lp_solves));
    lps_b.push_back(static_cast<double>(r.lp_solves));
    if (ra.presolved_binaries > 0) {
      ratio.push_back(static_cast<double>(r.presolved_binaries) /
                      static_cast<double>(ra.presolved_binaries));
    }
  }
  c.median_lp_solves_a = percentiles(lps_a).median;
  c.median_lp_solves_b = percentiles(lps_b).median;
  c.median_binary_ratio = percentiles(ratio).median;
  return c;
}

std::string records_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << "scenario,steps,variant,status,objective,j_time,j_dist,j_route,completion_step,nodes,"
        "lp_solves,simplex_iterations,binaries,presolved_binaries,gap,verified\n";
  for (const BenchRecord& r : records) {
    os << r.scenario << ',' << r.steps << ',' << to_string(r.variant) << ','
       << solver::to_string(r.status) << ',' << num(r.objective) << ',' << num(r.j_time) << ','
       << num(r.j_dist) << ',' << num(r.j_route) << ',' << r.completion_step << ',' << r.nodes
       << ',' << r.lp_solves << ',' << r.simplex_iterations << ',' << r.binaries << ','
       << r.presolved_binaries << ',' << num(r.gap) << ',' << (r.verified ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string summary_json(const BenchResult& result, const BenchConfig& config) {
  json j;
  j["config"] = json::parse(config_to_json(config));
  j["variants"] = json::array();
  for (const VariantSummary& s : result.summary) {
    j["variants"].push_back({{"steps", s.steps},
                             {"variant", to_string(s.variant)},
                             {"records", s.records},
                             {"solved", s.solved},
                             {"verified", s.verified},
                             {"wall_time_s", percentiles_json(s.wall_time_s)},
                             {"nodes", percentiles_json(s.nodes)},
                             {"lp_solves", percentiles_json(s.lp_solves)},
                             {"presolved_binaries", percentiles_json(s.presolved_binaries)},
                             {"j_time", percentiles_json(s.j_time)}});
  }
  j["comparisons"] = json::array();
  for (const Comparison& c : result.comparisons) {
    j["comparisons"].push_back({{"a", to_string(c.a)},
                                {"b", to_string(c.b)},
                                {"pairs", c.pairs},
                                {"equal_j_time", c.equal_j_time},
                                {"within_one_step", c.within_one_step},
                                {"max_objective_diff", c.max_objective_diff},
                                {"median_lp_solves_a", c.median_lp_solves_a},
                                {"median_lp_solves_b", c.median_lp_solves_b},
                                {"median_binary_ratio", c.median_binary_ratio}});
  }
  std::vector<std::string> failures;
  for (const BenchRecord& r : result.records) {
    if (r.solved() && !r.verified) {
      failures.push_back("scenario " + std::to_string(r.scenario) + " " + to_string(r.variant) +
                         ": " + r.verify_failure);
    }
  }
  j["verify_failures"] = failures;
  return j.dump(2) + "\n";
}

BenchConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw BenchError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw BenchError("config must be a JSON object");
  reject_unknown(j, {"seed", "instances", "deliveries", "steps", "steps_sweep", "variants", "solver",
                     "workers"},
                 "config");
  BenchConfig c;
  c.seed = field<std::uint64_t>(j, "seed", c.seed);
  c.instances = field<int>(j, "instances", c.instances);
  c.deliveries = field<int>(j, "deliveries", c.deliveries);
  c.steps = field<int>(j, "steps", c.steps);
  c.steps_sweep = field<std::vector<int>>(j, "steps_sweep", {});
  c.workers = field<int>(j, "workers", c.workers);
  if (j.contains("variants")) {
    c.variants.clear();
    for (const std::string& v : field<std::vector<std::string>>(j, "variants", {})) {
      try {
        c.variants.push_back(parse_variant(v));
      } catch (const ScenarioError& e) {
        throw BenchError(e.what());
      }
    }
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (!s.is_object()) throw BenchError("config field 'solver' must be an object");
    reject_unknown(s, {"mip_gap", "time_limit_s", "node_limit", "branching", "node_selection",
                       "deterministic", "workers", "presolve"},
                   "solver");
    solver::SolveOptions& o = c.solve;
    o.mip_gap = field<double>(s, "mip_gap", o.mip_gap);
    o.time_limit_s = field<double>(s, "time_limit_s", o.time_limit_s);
    o.node_limit = field<long>(s, "node_limit", o.node_limit);
    o.deterministic = field<bool>(s, "deterministic", o.deterministic);
    o.workers = field<int>(s, "workers", o.workers);
    o.presolve = field<bool>(s, "presolve", o.presolve);
    try {
      if (s.contains("branching")) o.branching = solver::parse_branching(field<std::string>(s, "branching", ""));
      if (s.contains("node_selection")) {
        o.node_selection = solver::parse_node_selection(field<std::string>(s, "node_selection", ""));
      }
    } catch (const std::invalid_argument& e) {
      throw BenchError(e.what());
    }
  }
  validate(c);
  return c;
}

std::string config_to_json(const BenchConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["instances"] = c.instances;
  j["deliveries"] = c.deliveries;
  j["steps"] = c.effective_steps();
  j["steps_sweep"] = c.steps_sweep;
  j["variants"] = json::array();
  for (Variant v : c.variants) j["variants"].push_back(to_string(v));
  j["solver"] = solve_json(c.solve);
  j["workers"] = c.workers;
  return j.dump(2) + "\n";
}

}  // namespace tamp::bench

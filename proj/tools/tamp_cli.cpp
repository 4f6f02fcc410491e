// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0
//
// tamp: plan, verify, bench and inspect pick-and-place MILPs.
//
// Exit codes: 0 success (plans verified), 1 verification failed,
// 2 infeasible, 3 time or node limit without a plan, 4 input error.
// Settings come from built-in defaults, then the input file, then flags.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tampmilp/bench.hpp"
#include "tampmilp/plan.hpp"
#include "tampmilp/scenario.hpp"
#include "tampmilp/solver.hpp"
#include "tampmilp/tamp_model.hpp"

namespace {

using nlohmann::json;
using namespace tamp;

enum Exit { kOk = 0, kVerifyFailed = 1, kInfeasible = 2, kTimeout = 3, kInputError = 4 };

// Raised for bad command-line values that CLI11 cannot check itself.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  std::optional<double> time_limit, mip_gap;
  std::optional<long> node_limit;
  std::optional<std::string> branching, node_selection;
  int workers = 1;
  bool no_presolve = false;
  CLI::Option* workers_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--time-limit", time_limit, "Wall-clock limit per solve in seconds");
    app->add_option("--node-limit", node_limit, "Node limit per solve (deterministic)");
    app->add_option("--mip-gap", mip_gap, "Relative optimality gap");
    app->add_option("--branching", branching, "most_fractional or lowest_index");
    app->add_option("--node-selection", node_selection, "best_bound or depth_first");
    app->add_flag("--no-presolve", no_presolve, "Skip presolve");
  }

  void apply(solver::SolveOptions& o) const {
    if (time_limit) o.time_limit_s = *time_limit;
    if (node_limit) o.node_limit = *node_limit;
    if (mip_gap) o.mip_gap = *mip_gap;
    try {
      if (branching) o.branching = solver::parse_branching(*branching);
      if (node_selection) o.node_selection = solver::parse_node_selection(*node_selection);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    if (no_presolve) o.presolve = false;
  }
};

struct ParamFlags {
  std::optional<std::string> variant;
  std::optional<int> steps;
  std::optional<double> dt, alpha;

  void add(CLI::App* app) {
    app->add_option("--variant", variant, "baseline, hard or hard_soft");
    app->add_option("--steps", steps, "Number of time steps");
    app->add_option("--dt", dt, "Step length in seconds");
    app->add_option("--alpha", alpha, "Distance weight growth over the horizon");
  }

  Params resolve(const std::string& scenario_text) const {
    Params p = params_from_json(scenario_text).value_or(Params{});
    if (variant) p.variant = parse_variant(*variant);
    if (steps) p.steps = *steps;
    if (dt) p.dt = *dt;
    if (alpha) p.alpha = *alpha;
    validate(p);
    return p;
  }
};

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

int exit_for(const ScenarioError& e) {
  const std::string msg = e.what();
  return msg.rfind("infeasible scenario", 0) == 0 ? kInfeasible : kInputError;
}

int run_plan(const std::string& scenario_path, const ParamFlags& pf, const SolverFlags& sf,
             const std::string& out, const std::string& trace) {
  const std::string text = read_file(scenario_path);
  const Scenario scenario = scenario_from_json(text);
  const Params params = pf.resolve(text);
  solver::SolveOptions options;
  options.branching = solver::Branching::LowestIndex;
  sf.apply(options);
  options.workers = sf.workers;
  options.deterministic = sf.workers <= 1;

  std::optional<Plan> plan;
  const bench::BenchRecord r = bench::run_one(scenario, params, options, &plan);
  if (!plan && r.status == solver::SolveStatus::Infeasible && r.binaries == 0) {
    // run_one reports build failures through verify_failure.
    std::cerr << "error: " << r.verify_failure << "\n";
    return r.verify_failure.rfind("infeasible scenario", 0) == 0 ? kInfeasible : kInputError;
  }

  json stats = {{"scenario", scenario.name},
                {"variant", to_string(params.variant)},
                {"steps", params.steps},
                {"status", solver::to_string(r.status)},
                {"verified", r.verified},
                {"nodes", r.nodes},
                {"lp_solves", r.lp_solves},
                {"simplex_iterations", r.simplex_iterations},
                {"binaries", r.binaries},
                {"presolved_binaries", r.presolved_binaries},
                {"wall_time_s", r.wall_time_s}};
  if (plan) {
    stats["objective"] = r.objective;
    stats["j_time"] = r.j_time;
    stats["j_dist"] = r.j_dist;
    stats["j_route"] = r.j_route;
    stats["completion_step"] = r.completion_step;
    if (!out.empty()) write_file(out, plan_to_json(*plan));
    if (!trace.empty()) write_file(trace, plan_trace_csv(*plan));
  }
  std::cout << stats.dump(2) << "\n";

  switch (r.status) {
    case solver::SolveStatus::Infeasible:
      std::cerr << "error: the model has no feasible plan within " << params.steps << " steps\n";
      return kInfeasible;
    case solver::SolveStatus::Timeout:
      std::cerr << "error: limit reached before a plan was found\n";
      return kTimeout;
    default:
      break;
  }
  if (!r.verified) {
    std::cerr << "error: plan failed verification: " << r.verify_failure << "\n";
    return kVerifyFailed;
  }
  return kOk;
}

int run_verify(const std::string& plan_path, const std::string& scenario_path,
               const std::string& report_path) {
  const Plan plan = plan_from_json(read_file(plan_path));
  const Scenario scenario = scenario_from_json(read_file(scenario_path));
  Params params;
  params.steps = plan.steps;
  params.dt = plan.dt;
  params.variant = plan.variant;
  const VerifyReport report = verify_plan(plan, scenario, params);
  write_or_print(report_path, report_to_json(report));
  if (!report.pass()) {
    for (const CheckResult& c : report.checks) {
      if (!c.pass) std::cerr << "FAIL " << c.family << ": " << c.first_offender << "\n";
    }
    return kVerifyFailed;
  }
  return kOk;
}

struct BenchFlags {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> instances, deliveries, steps;
  std::vector<int> sweep;
  std::vector<std::string> variants;
  bool quiet = false;
};

int run_bench(const BenchFlags& bf, const SolverFlags& sf) {
  bench::BenchConfig c;
  if (!bf.config.empty()) c = bench::config_from_json(read_file(bf.config));
  if (bf.seed) c.seed = *bf.seed;
  if (bf.instances) c.instances = *bf.instances;
  if (bf.deliveries) c.deliveries = *bf.deliveries;
  if (bf.steps) c.steps = *bf.steps;
  if (!bf.sweep.empty()) c.steps_sweep = bf.sweep;
  if (!bf.variants.empty()) {
    c.variants.clear();
    for (const std::string& v : bf.variants) c.variants.push_back(parse_variant(v));
  }
  sf.apply(c.solve);
  if (sf.workers_opt->count() > 0) {
    c.workers = sf.workers;
  } else if (const char* env = std::getenv("TAMP_WORKERS");
             env && (bf.config.empty() || !json::parse(read_file(bf.config)).contains("workers"))) {
    try {
      c.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw InputError(std::string("TAMP_WORKERS is not a number: ") + env);
    }
  }
  bench::validate(c);

  const bench::BenchResult result = bench::run_benchmark(c, [&](const bench::BenchRecord& r) {
    if (bf.quiet) return;
    std::cerr << "scenario " << r.scenario << " N=" << r.steps << " " << to_string(r.variant)
              << ": " << solver::to_string(r.status) << (r.verified ? " verified" : "") << " "
              << r.lp_solves << " LPs " << r.wall_time_s << " s\n";
  });
  const std::filesystem::path dir(bf.out_dir);
  std::filesystem::create_directories(dir);
  write_file((dir / "records.csv").string(), bench::records_csv(result.records));
  write_file((dir / "summary.json").string(), bench::summary_json(result, c));

  for (const bench::BenchRecord& r : result.records) {
    if (r.solved() && !r.verified) {
      std::cerr << "error: scenario " << r.scenario << " " << to_string(r.variant)
                << " failed verification: " << r.verify_failure << "\n";
      return kVerifyFailed;
    }
  }
  return kOk;
}

int run_inspect(const std::string& scenario_path, const ParamFlags& pf, const std::string& dump,
                bool presolve) {
  const std::string text = read_file(scenario_path);
  const Scenario scenario = scenario_from_json(text);
  const Params params = pf.resolve(text);
  const BuiltModel built = build(scenario, params);
  const BuildReport& r = built.report;
  json out = {{"variant", to_string(r.variant)},
              {"steps", params.steps},
              {"binaries", r.binaries},
              {"unit_interval", r.unit_interval},
              {"continuous", r.continuous},
              {"constraints", r.constraints},
              {"relaxable_binaries", r.relaxable_binaries},
              {"constraints_by_tag", r.constraints_by_tag}};
  if (presolve) {
    const solver::PresolveResult pre = solver::presolve(built.model);
    out["presolve"] = {{"infeasible", pre.infeasible},
                       {"binaries_before", pre.stats.binaries_before},
                       {"binaries_after", pre.stats.binaries_after},
                       {"vars_fixed", pre.stats.vars_fixed},
                       {"rows_removed", pre.stats.rows_removed},
                       {"bounds_tightened", pre.stats.bounds_tightened},
                       {"coefficients_tightened", pre.stats.coefficients_tightened}};
  }
  std::cout << out.dump(2) << "\n";
  if (!dump.empty()) {
    std::ostringstream os;
    built.model.dump(os);
    write_or_print(dump, os.str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pick-and-place planning as a mixed-integer linear program"};
  app.require_subcommand(1);

  SolverFlags solver_flags;
  ParamFlags param_flags;
  std::string scenario, out, trace, plan_path, report_path, dump;
  bool presolve_stats = false;
  BenchFlags bench_flags;

  CLI::App* plan = app.add_subcommand("plan", "Build, solve, extract and verify one scenario");
  plan->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  plan->add_option("--out", out, "Write the plan JSON here");
  plan->add_option("--trace", trace, "Write a t,i,x,y,z,action CSV trace here");
  param_flags.add(plan);
  solver_flags.add(plan);
  plan->add_option("--workers", solver_flags.workers, "Solver threads; more than 1 gives up determinism")
      ->envname("TAMP_WORKERS")
      ->check(CLI::PositiveNumber);

  CLI::App* verify = app.add_subcommand("verify", "Check a plan against its scenario");
  verify->add_option("--plan", plan_path, "Plan JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--report", report_path, "Write the report JSON here (default stdout)");

  CLI::App* bench = app.add_subcommand("bench", "Sample desk scenarios and compare variants");
  bench->add_option("--config", bench_flags.config, "Bench config JSON")->check(CLI::ExistingFile);
  bench->add_option("--out-dir", bench_flags.out_dir, "Directory for records.csv and summary.json");
  bench->add_option("--seed", bench_flags.seed, "Scenario stream seed");
  bench->add_option("--instances", bench_flags.instances, "Number of scenarios");
  bench->add_option("--deliveries", bench_flags.deliveries, "Deliveries per scenario");
  bench->add_option("--steps", bench_flags.steps, "Time steps (default 15 per delivery)");
  bench->add_option("--sweep", bench_flags.sweep, "Step counts for a sensitivity sweep");
  bench->add_option("--variants", bench_flags.variants, "Variants to run");
  bench->add_flag("--quiet", bench_flags.quiet, "No per-record progress on stderr");
  solver_flags.add(bench);
  solver_flags.workers_opt =
      bench->add_option("--workers", solver_flags.workers,
                        "Scenarios solved concurrently (default: config file, then TAMP_WORKERS, "
                        "then 1)")
          ->check(CLI::PositiveNumber);

  CLI::App* inspect = app.add_subcommand("inspect", "Print model sizes per constraint family");
  inspect->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  param_flags.add(inspect);
  inspect->add_option("--dump", dump, "Write the full model listing here ('-' for stdout)");
  inspect->add_flag("--presolve", presolve_stats, "Also report presolve reductions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*plan) return run_plan(scenario, param_flags, solver_flags, out, trace);
    if (*verify) return run_verify(plan_path, scenario, report_path);
    if (*bench) return run_bench(bench_flags, solver_flags);
    if (*inspect) return run_inspect(scenario, param_flags, dump, presolve_stats);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const PlanError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const bench::BenchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

// Command-line front end: failure-detector sweeps, one-shot allocations,
// allocator benchmarks, and self-healing scenario replays. Outputs are
// computed fully in memory and written in one shot, so a failing run never
// leaves a partial file behind.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "selfheal/errors.hpp"
#include "selfheal/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw selfheal::ConfigError("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw selfheal::ConfigError("failed writing output file '" + path + "'");
}

struct CommonArgs {
  std::string scenario_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::optional<double> time_budget;
};

int run_fd_sweep(const CommonArgs& args, const std::string& kind) {
  const selfheal::Scenario sc = selfheal::load_scenario(args.scenario_path, args.seed);
  std::string csv;
  if (kind == "threshold") {
    if (!sc.threshold_sweep)
      throw selfheal::ConfigError("scenario has no 'threshold_sweep' section");
    csv = selfheal::threshold_sweep_table(
              selfheal::sweep_threshold(*sc.threshold_sweep, args.jobs))
              .to_string();
  } else if (kind == "interval") {
    if (!sc.interval_sweep)
      throw selfheal::ConfigError("scenario has no 'interval_sweep' section");
    csv = selfheal::interval_sweep_table(
              selfheal::sweep_interval(*sc.interval_sweep, args.jobs))
              .to_string();
  } else if (kind == "window") {
    if (!sc.window_sweep)
      throw selfheal::ConfigError("scenario has no 'window_sweep' section");
    csv = selfheal::window_sweep_table(
              selfheal::sweep_window(*sc.window_sweep, args.jobs))
              .to_string();
  } else {
    throw selfheal::ConfigError("unknown sweep kind '" + kind + "'");
  }
  write_file(args.out_path, csv);
  return kExitOk;
}

int run_allocate(const std::string& recipe_path, const std::string& network_path,
                 const std::string& solver, const std::string& out_path,
                 std::optional<double> time_budget) {
  std::ifstream rin(recipe_path);
  if (!rin) throw selfheal::ConfigError("cannot open recipe file '" + recipe_path + "'");
  std::ifstream nin(network_path);
  if (!nin) throw selfheal::ConfigError("cannot open network file '" + network_path + "'");
  nlohmann::json jr, jn;
  try {
    jr = nlohmann::json::parse(rin);
    jn = nlohmann::json::parse(nin);
  } catch (const nlohmann::json::parse_error& e) {
    throw selfheal::ConfigError(std::string("graph file parse error: ") + e.what());
  }
  const selfheal::RecipeGraph recipe = selfheal::RecipeGraph::from_json(jr);
  const selfheal::NetworkGraph net = selfheal::NetworkGraph::from_json(jn);

  selfheal::SolveBudget budget;
  budget.max_seconds = time_budget;

  selfheal::SolverOutcome outcome;
  if (solver == "exact")
    outcome = selfheal::solve_exact(recipe, net, budget);
  else if (solver == "heuristic")
    outcome = selfheal::solve_heuristic(recipe, net);
  else if (solver == "brute")
    outcome = selfheal::solve_brute_force(recipe, net);
  else
    throw selfheal::ConfigError("unknown solver '" + solver + "'");

  nlohmann::ordered_json j = outcome.to_json(recipe, net);
  if (outcome.status == selfheal::SolveStatus::infeasible) {
    auto issues = nlohmann::ordered_json::array();
    for (const auto& task : recipe.tasks) {
      bool placeable = false;
      for (const auto& node : net.nodes)
        if (task.resources <= node.resources) {
          placeable = true;
          break;
        }
      if (!placeable)
        issues.push_back({{"kind", "resources"},
                          {"detail", "no node can host task '" + task.id + "'"}});
    }
    if (issues.empty())
      issues.push_back({{"kind", "joint"},
                        {"detail", "no assignment satisfies capacity and "
                                   "connectivity together"}});
    j["feasibility"] = std::move(issues);
  }
  write_file(out_path, j.dump(2) + "\n");

  if (outcome.status == selfheal::SolveStatus::infeasible) {
    std::cerr << "infeasible instance\n";
    return kExitInfeasible;
  }
  if (outcome.status == selfheal::SolveStatus::resource_limit) {
    std::cerr << "solver budget exhausted\n";
    return kExitBudget;
  }
  return kExitOk;
}

int run_bench(const CommonArgs& args) {
  const selfheal::Scenario sc = selfheal::load_scenario(args.scenario_path, args.seed);
  if (!sc.bench) throw selfheal::ConfigError("scenario has no 'bench' section");
  selfheal::BenchConfig cfg = *sc.bench;
  if (args.time_budget) cfg.budget.max_seconds = args.time_budget;
  const std::string csv =
      selfheal::bench_table(selfheal::bench_allocation(cfg, args.jobs)).to_string();
  write_file(args.out_path, csv);
  return kExitOk;
}

int run_simulate(const CommonArgs& args) {
  const selfheal::Scenario sc = selfheal::load_scenario(args.scenario_path, args.seed);
  if (!sc.selfheal) throw selfheal::ConfigError("scenario has no 'selfheal' section");
  selfheal::SelfHealConfig cfg = sc.selfheal->cfg;
  if (args.time_budget) cfg.solver_budget.max_seconds = args.time_budget;
  const selfheal::SelfHealReport report = selfheal::run_selfheal(sc.selfheal->kb, cfg);
  write_file(args.out_path, report.log_as_ndjson());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-healing IoT choreography toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string sweep_kind;
  std::string recipe_path, network_path, out_path;
  std::string solver = "exact";

  CLI::App* fd = app.add_subcommand("fd-sweep", "Failure-detector parameter sweeps");
  fd->add_option("--kind", sweep_kind, "threshold|interval|window")->required();
  fd->add_option("--scenario", common.scenario_path, "scenario file")->required();
  fd->add_option("--out", common.out_path, "output CSV path")->required();
  fd->add_option("--seed", common.seed, "override the scenario seed");
  fd->add_option("--jobs", common.jobs, "worker threads (default 1)");

  CLI::App* alloc = app.add_subcommand("allocate", "One-shot task placement");
  alloc->add_option("--recipe", recipe_path, "recipe graph JSON")->required();
  alloc->add_option("--network", network_path, "network graph JSON")->required();
  alloc->add_option("--solver", solver, "exact|heuristic|brute");
  alloc->add_option("--out", out_path, "output JSON path")->required();
  alloc->add_option("--time-budget", common.time_budget, "exact-solver budget, seconds");

  CLI::App* bench = app.add_subcommand("bench", "Allocator benchmark grid");
  bench->add_option("--scenario", common.scenario_path, "scenario file")->required();
  bench->add_option("--out", common.out_path, "output CSV path")->required();
  bench->add_option("--seed", common.seed, "override the scenario seed");
  bench->add_option("--jobs", common.jobs, "worker threads (default 1)");
  bench->add_option("--time-budget", common.time_budget, "per-instance exact budget, seconds");

  CLI::App* sim = app.add_subcommand("simulate", "Self-healing scenario replay");
  sim->add_option("--scenario", common.scenario_path, "scenario file")->required();
  sim->add_option("--out", common.out_path, "output log path (ndjson)")->required();
  sim->add_option("--seed", common.seed, "override the scenario seed");
  sim->add_option("--time-budget", common.time_budget, "healing solver budget, seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (fd->parsed()) return run_fd_sweep(common, sweep_kind);
    if (alloc->parsed())
      return run_allocate(recipe_path, network_path, solver, out_path,
                          common.time_budget);
    if (bench->parsed()) return run_bench(common);
    if (sim->parsed()) return run_simulate(common);
  } catch (const selfheal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}

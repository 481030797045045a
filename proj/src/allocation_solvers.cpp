#include "selfheal/allocation_solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>

#include "selfheal/errors.hpp"

namespace selfheal {

namespace {

double wall_now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double cpu_now() {
  timespec ts{};
  if (clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts) != 0) return 0.0;
  return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

struct Instance {
  const RecipeGraph& recipe;
  const NetworkGraph& net;
  PathCostTable costs;
  std::size_t tasks;
  std::size_t nodes;
  // device_cost[t * nodes + n] = compute_energy_n * computation_size_t / power_n
  std::vector<double> device_cost;
  // allowed[t * nodes + n]: mask permits the pair and the node has the
  // resources for the task in isolation.
  std::vector<char> allowed;
  // Recipe edges grouped by their larger endpoint: when the search assigns
  // task t, exactly the edges in edges_closed_at[t] become fully routed.
  std::vector<std::vector<std::size_t>> edges_closed_at;

  Instance(const RecipeGraph& r, const NetworkGraph& g, const CompatibilityMask& mask)
      : recipe(r),
        net(g),
        costs(shortest_path_energy(g)),
        tasks(r.tasks.size()),
        nodes(g.nodes.size()) {
    device_cost.resize(tasks * nodes, 0.0);
    allowed.resize(tasks * nodes, 0);
    for (std::size_t t = 0; t < tasks; ++t) {
      for (std::size_t n = 0; n < nodes; ++n) {
        const auto& task = r.tasks[t];
        const auto& node = g.nodes[n];
        device_cost[t * nodes + n] =
            node.compute_energy * task.computation_size / node.processing_power;
        allowed[t * nodes + n] =
            (mask.allowed(t, n) && task.resources <= node.resources) ? 1 : 0;
      }
    }
    edges_closed_at.resize(tasks);
    for (std::size_t e = 0; e < r.edges.size(); ++e) {
      const auto& [a, b] = r.edges[e];
      edges_closed_at[std::max(a, b)].push_back(e);
    }
  }

  bool task_has_candidate(std::size_t t) const {
    for (std::size_t n = 0; n < nodes; ++n)
      if (allowed[t * nodes + n]) return true;
    return false;
  }
};

// Allowed node ids per task, ascending by key[t * nodes + n] with node id as
// tiebreak. Scanning a row for the first node with enough headroom yields the
// cheapest capacity-feasible candidate without touching the rest of the row.
std::vector<std::vector<std::size_t>> sorted_candidates(const Instance& inst,
                                                        const std::vector<double>& key) {
  std::vector<std::vector<std::size_t>> cand(inst.tasks);
  for (std::size_t t = 0; t < inst.tasks; ++t) {
    auto& row = cand[t];
    for (std::size_t n = 0; n < inst.nodes; ++n)
      if (inst.allowed[t * inst.nodes + n]) row.push_back(n);
    std::sort(row.begin(), row.end(), [&](std::size_t a, std::size_t b) {
      const double ka = key[t * inst.nodes + a];
      const double kb = key[t * inst.nodes + b];
      return ka != kb ? ka < kb : a < b;
    });
  }
  return cand;
}

// Surrogate placement cost: true device energy plus the task's output volume
// priced at the node's average outgoing link energy.
std::vector<double> surrogate_cost_matrix(const Instance& inst) {
  const std::vector<double> avg = avg_outgoing_energy(inst.net);
  std::vector<double> cost(inst.tasks * inst.nodes, 0.0);
  for (std::size_t t = 0; t < inst.tasks; ++t)
    for (std::size_t n = 0; n < inst.nodes; ++n)
      cost[t * inst.nodes + n] = inst.device_cost[t * inst.nodes + n] +
                                 inst.recipe.tasks[t].output_factor * avg[n];
  return cost;
}

SolverOutcome empty_recipe_outcome() {
  SolverOutcome out;
  out.status = SolveStatus::proven_optimal;
  out.allocation = Allocation{};
  out.breakdown = EnergyBreakdown{};
  return out;
}

// Depth-first exact search over the true objective. Leaf values are always
// recomputed through evaluate_energy so they are bit-identical with the
// brute-force oracle; the incrementally maintained bound is only used for
// pruning, with a relative slack wide enough to absorb summation-order noise.
struct ExactSearch {
  const Instance& inst;
  const SolveBudget& budget;
  double t_wall_start = 0.0;

  std::vector<std::size_t> assign;
  std::vector<double> remaining;      // node resource headroom
  std::vector<std::vector<std::size_t>> by_device;  // candidates by device cost

  double incumbent_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> incumbent;
  // True while the incumbent came from seeding rather than from a visited
  // leaf. A seeded incumbent must yield to the first (lexicographically
  // smallest) leaf matching its value, so ties resolve exactly as in plain
  // enumeration.
  bool incumbent_seeded = false;
  std::uint64_t explored = 0;
  bool out_of_budget = false;

  ExactSearch(const Instance& i, const SolveBudget& b)
      : inst(i), budget(b), by_device(sorted_candidates(i, i.device_cost)) {
    assign.resize(inst.tasks, 0);
    remaining.reserve(inst.nodes);
    for (const auto& node : inst.net.nodes) remaining.push_back(node.resources);
  }

  bool budget_exhausted() {
    if (budget.max_nodes && explored >= *budget.max_nodes) return true;
    if (budget.max_seconds && (explored & 1023u) == 0 &&
        wall_now() - t_wall_start > *budget.max_seconds)
      return true;
    return false;
  }

  // Cheapest device cost still achievable for every task >= depth. Returns
  // false when some open task has no capacity-feasible candidate left.
  bool open_task_bound(std::size_t depth, double& sum) {
    sum = 0.0;
    for (std::size_t t = depth; t < inst.tasks; ++t) {
      const double need = inst.recipe.tasks[t].resources;
      bool found = false;
      for (std::size_t n : by_device[t]) {
        if (need > remaining[n]) continue;
        sum += inst.device_cost[t * inst.nodes + n];
        found = true;
        break;
      }
      if (!found) return false;
    }
    return true;
  }

  void dfs(std::size_t depth, double partial) {
    if (out_of_budget) return;
    if (depth == inst.tasks) {
      Allocation alloc{assign};
      const EnergyBreakdown b = evaluate_energy(inst.recipe, inst.net, inst.costs, alloc);
      if (b.total_energy < incumbent_value ||
          (incumbent_seeded && b.total_energy == incumbent_value)) {
        incumbent_value = b.total_energy;
        incumbent = assign;
        incumbent_seeded = false;
      }
      return;
    }
    const double need = inst.recipe.tasks[depth].resources;
    for (std::size_t n = 0; n < inst.nodes; ++n) {
      if (!inst.allowed[depth * inst.nodes + n]) continue;
      if (need > remaining[n]) continue;
      if (budget_exhausted()) {
        out_of_budget = true;
        return;
      }
      ++explored;

      // Route every recipe edge closed by this placement; unreachable pairs
      // make the whole subtree infeasible.
      double child = partial + inst.device_cost[depth * inst.nodes + n];
      bool routable = true;
      for (std::size_t e : inst.edges_closed_at[depth]) {
        const auto& [a, b] = inst.recipe.edges[e];
        const std::size_t n_from = (a == depth) ? n : assign[a];
        const std::size_t n_to = (b == depth) ? n : assign[b];
        const auto hop = inst.costs.cost(n_from, n_to);
        if (!hop) {
          routable = false;
          break;
        }
        child += inst.recipe.tasks[a].output_factor * *hop;
      }
      if (!routable) continue;

      double tail = 0.0;
      assign[depth] = n;
      remaining[n] -= need;
      if (open_task_bound(depth + 1, tail)) {
        // Equal-value subtrees survive the slack so a seeded tie can still be
        // taken over by the first leaf that matches it.
        const double lb = child + tail;
        const double slack = 1e-9 * (1.0 + std::abs(incumbent_value));
        if (!(std::isfinite(incumbent_value) && lb >= incumbent_value + slack))
          dfs(depth + 1, child);
      }
      remaining[n] += need;
      if (out_of_budget) return;
    }
  }
};

// Exact search over the surrogate objective. The objective is a plain sum of
// per-task terms, so classic assignment orderings apply: tasks are branched
// in decreasing resource demand (ties by index) and candidates are tried
// cheapest-first, making the first descent a greedy solution that usually
// prunes the rest of the tree outright.
struct SurrogateSearch {
  const Instance& inst;
  const std::vector<double>& cost;  // surrogate cost per (t, n)

  std::vector<std::size_t> order;                // branching order over tasks
  std::vector<std::vector<std::size_t>> cand;    // candidates by surrogate cost
  std::vector<std::size_t> assign;
  std::vector<double> remaining;

  double incumbent_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> incumbent;
  std::uint64_t explored = 0;

  SurrogateSearch(const Instance& i, const std::vector<double>& c)
      : inst(i), cost(c), cand(sorted_candidates(i, c)) {
    order.resize(inst.tasks);
    for (std::size_t t = 0; t < inst.tasks; ++t) order[t] = t;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ra = inst.recipe.tasks[a].resources;
      const double rb = inst.recipe.tasks[b].resources;
      return ra != rb ? ra > rb : a < b;
    });
    assign.resize(inst.tasks, 0);
    remaining.reserve(inst.nodes);
    for (const auto& node : inst.net.nodes) remaining.push_back(node.resources);
  }

  bool open_task_bound(std::size_t pos, double& sum) {
    sum = 0.0;
    for (std::size_t p = pos; p < inst.tasks; ++p) {
      const std::size_t t = order[p];
      const double need = inst.recipe.tasks[t].resources;
      bool found = false;
      for (std::size_t n : cand[t]) {
        if (need > remaining[n]) continue;
        sum += cost[t * inst.nodes + n];
        found = true;
        break;
      }
      if (!found) return false;
    }
    return true;
  }

  void dfs(std::size_t pos, double partial) {
    if (pos == inst.tasks) {
      if (partial < incumbent_value) {
        incumbent_value = partial;
        incumbent = assign;
      }
      return;
    }
    const std::size_t t = order[pos];
    const double need = inst.recipe.tasks[t].resources;
    for (std::size_t n : cand[t]) {
      if (need > remaining[n]) continue;
      ++explored;
      const double child = partial + cost[t * inst.nodes + n];
      assign[t] = n;
      remaining[n] -= need;
      double tail = 0.0;
      if (open_task_bound(pos + 1, tail)) {
        const double lb = child + tail;
        const double slack = 1e-9 * (1.0 + std::abs(incumbent_value));
        if (!(std::isfinite(incumbent_value) && lb >= incumbent_value + slack))
          dfs(pos + 1, child);
      }
      remaining[n] += need;
    }
  }
};

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::proven_optimal: return "proven_optimal";
    case SolveStatus::feasible_heuristic: return "feasible_heuristic";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::resource_limit: return "resource_limit";
  }
  throw std::logic_error("unknown SolveStatus");
}

nlohmann::ordered_json SolverOutcome::to_json(const RecipeGraph& recipe,
                                              const NetworkGraph& net) const {
  nlohmann::ordered_json j;
  j["status"] = to_string(status);
  if (allocation) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < allocation->node_of.size(); ++t) {
      nlohmann::ordered_json row;
      row["task"] = recipe.tasks[t].id;
      row["node"] = net.nodes[allocation->node_of[t]].id;
      arr.push_back(std::move(row));
    }
    j["allocation"] = std::move(arr);
  } else {
    j["allocation"] = nullptr;
  }
  if (breakdown) {
    nlohmann::ordered_json b;
    b["device_energy"] = breakdown->device_energy;
    b["network_energy"] = breakdown->network_energy;
    b["total_energy"] = breakdown->total_energy;
    j["energy"] = std::move(b);
  } else {
    j["energy"] = nullptr;
  }
  nlohmann::ordered_json st;
  st["explored_nodes"] = stats.explored_nodes;
  st["build_seconds"] = stats.build_seconds;
  st["solve_wall_seconds"] = stats.solve_wall_seconds;
  st["solve_cpu_seconds"] = stats.solve_cpu_seconds;
  j["stats"] = std::move(st);
  return j;
}

ExactPlacementModel ExactPlacementModel::build(const RecipeGraph& recipe,
                                               const NetworkGraph& net) {
  recipe.validate();
  net.validate();
  ExactPlacementModel m;
  m.task_count = recipe.tasks.size();
  m.node_count = net.nodes.size();
  m.y_edges = recipe.edges;
  return m;
}

bool ExactPlacementModel::linearization_consistent(const Allocation& alloc) const {
  if (alloc.node_of.size() != task_count) return false;
  for (const auto& [t1, t2] : y_edges) {
    for (std::size_t n1 = 0; n1 < node_count; ++n1) {
      for (std::size_t n2 = 0; n2 < node_count; ++n2) {
        const int x1 = alloc.node_of[t1] == n1 ? 1 : 0;
        const int x2 = alloc.node_of[t2] == n2 ? 1 : 0;
        const int y = x1 * x2;
        if (y > x1 || y > x2 || y < x1 + x2 - 1) return false;
      }
    }
  }
  return true;
}

HeuristicPlacementModel HeuristicPlacementModel::build(const RecipeGraph& recipe,
                                                       const NetworkGraph& net) {
  recipe.validate();
  net.validate();
  return HeuristicPlacementModel{recipe.tasks.size(), net.nodes.size()};
}

double heuristic_surrogate_value(const RecipeGraph& recipe, const NetworkGraph& net,
                                 const Allocation& alloc) {
  if (alloc.node_of.size() != recipe.tasks.size())
    throw ShapeError("allocation covers " + std::to_string(alloc.node_of.size()) +
                     " tasks, recipe has " + std::to_string(recipe.tasks.size()));
  const std::vector<double> avg = avg_outgoing_energy(net);
  double v = 0.0;
  for (std::size_t t = 0; t < recipe.tasks.size(); ++t) {
    const auto& task = recipe.tasks[t];
    const auto& node = net.nodes[alloc.node_of[t]];
    v += node.compute_energy * task.computation_size / node.processing_power +
         task.output_factor * avg[alloc.node_of[t]];
  }
  return v;
}

SolverOutcome solve_exact(const RecipeGraph& recipe, const NetworkGraph& net,
                          const SolveBudget& budget, const CompatibilityMask& mask) {
  const double t0_wall = wall_now();
  recipe.validate();
  net.validate();
  if (recipe.tasks.empty()) return empty_recipe_outcome();

  Instance inst(recipe, net, mask);
  const std::vector<double> surrogate = surrogate_cost_matrix(inst);
  const double t1_wall = wall_now();
  const double t1_cpu = cpu_now();

  SolverOutcome out;
  out.stats.build_seconds = t1_wall - t0_wall;

  ExactSearch search(inst, budget);
  search.t_wall_start = t1_wall;

  // Seed the incumbent with the surrogate optimum when it routes: the
  // surrogate explores a different model, so its true energy is a valid upper
  // bound whenever communication is feasible.
  {
    SurrogateSearch seed(inst, surrogate);
    seed.dfs(0, 0.0);
    if (std::isfinite(seed.incumbent_value)) {
      try {
        Allocation alloc{seed.incumbent};
        const EnergyBreakdown eb = evaluate_energy(recipe, net, inst.costs, alloc);
        search.incumbent_value = eb.total_energy;
        search.incumbent = seed.incumbent;
        search.incumbent_seeded = true;
      } catch (const InfeasibleCommunicationError&) {
        // surrogate picked an unroutable placement; search without a seed
      }
    }
  }

  search.dfs(0, 0.0);

  out.stats.explored_nodes = search.explored;
  out.stats.solve_wall_seconds = wall_now() - t1_wall;
  out.stats.solve_cpu_seconds = cpu_now() - t1_cpu;

  if (search.out_of_budget) {
    out.status = SolveStatus::resource_limit;
    if (std::isfinite(search.incumbent_value)) {
      Allocation alloc{search.incumbent};
      out.allocation = alloc;
      out.breakdown = evaluate_energy(recipe, net, inst.costs, alloc);
    }
    return out;
  }
  if (!std::isfinite(search.incumbent_value)) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  Allocation alloc{search.incumbent};
  out.status = SolveStatus::proven_optimal;
  out.allocation = alloc;
  out.breakdown = evaluate_energy(recipe, net, inst.costs, alloc);
  return out;
}

SolverOutcome solve_heuristic(const RecipeGraph& recipe, const NetworkGraph& net,
                              const CompatibilityMask& mask) {
  const double t0_wall = wall_now();
  recipe.validate();
  net.validate();
  if (recipe.tasks.empty()) {
    SolverOutcome out = empty_recipe_outcome();
    out.status = SolveStatus::feasible_heuristic;
    return out;
  }

  Instance inst(recipe, net, mask);
  const std::vector<double> cost = surrogate_cost_matrix(inst);
  const double t1_wall = wall_now();
  const double t1_cpu = cpu_now();

  SolverOutcome out;
  out.stats.build_seconds = t1_wall - t0_wall;

  SurrogateSearch search(inst, cost);
  search.dfs(0, 0.0);

  out.stats.explored_nodes = search.explored;
  out.stats.solve_wall_seconds = wall_now() - t1_wall;
  out.stats.solve_cpu_seconds = cpu_now() - t1_cpu;

  if (!std::isfinite(search.incumbent_value)) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  Allocation alloc{search.incumbent};
  out.status = SolveStatus::feasible_heuristic;
  out.allocation = alloc;
  out.breakdown = evaluate_energy(recipe, net, inst.costs, alloc);
  return out;
}

SolverOutcome solve_brute_force(const RecipeGraph& recipe, const NetworkGraph& net,
                                const CompatibilityMask& mask) {
  const double t0_wall = wall_now();
  recipe.validate();
  net.validate();
  if (recipe.tasks.empty()) return empty_recipe_outcome();

  Instance inst(recipe, net, mask);
  if (inst.nodes == 0) {
    SolverOutcome out;
    out.status = SolveStatus::infeasible;
    return out;
  }
  const double combos = std::pow(static_cast<double>(inst.nodes),
                                 static_cast<double>(inst.tasks));
  if (combos > 1e7)
    throw SizeGuardError("brute force would enumerate " + std::to_string(combos) +
                         " assignments (limit 1e7)");

  SolverOutcome out;
  out.stats.build_seconds = wall_now() - t0_wall;
  const double t1_cpu = cpu_now();

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_assign;
  Allocation probe;
  probe.node_of.assign(inst.tasks, 0);
  std::uint64_t explored = 0;
  std::vector<double> used(inst.nodes, 0.0);

  while (true) {
    ++explored;
    bool feasible = true;
    std::fill(used.begin(), used.end(), 0.0);
    for (std::size_t t = 0; t < inst.tasks && feasible; ++t) {
      const std::size_t n = probe.node_of[t];
      if (!inst.allowed[t * inst.nodes + n]) feasible = false;
      used[n] += recipe.tasks[t].resources;
      if (used[n] > net.nodes[n].resources) feasible = false;
    }
    if (feasible) {
      for (const auto& [a, b] : recipe.edges) {
        if (!inst.costs.reachable(probe.node_of[a], probe.node_of[b])) {
          feasible = false;
          break;
        }
      }
    }
    if (feasible) {
      const EnergyBreakdown eb = evaluate_energy(recipe, net, inst.costs, probe);
      if (eb.total_energy < best) {
        best = eb.total_energy;
        best_assign = probe.node_of;
      }
    }
    // lexicographic odometer, rightmost task fastest
    bool advanced = false;
    for (std::size_t pos = inst.tasks; pos-- > 0;) {
      if (++probe.node_of[pos] < inst.nodes) {
        advanced = true;
        break;
      }
      probe.node_of[pos] = 0;
    }
    if (!advanced) break;
  }

  out.stats.explored_nodes = explored;
  out.stats.solve_wall_seconds = wall_now() - t0_wall - out.stats.build_seconds;
  out.stats.solve_cpu_seconds = cpu_now() - t1_cpu;

  if (!std::isfinite(best)) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  Allocation alloc{best_assign};
  out.status = SolveStatus::proven_optimal;
  out.allocation = alloc;
  out.breakdown = evaluate_energy(recipe, net, inst.costs, alloc);
  return out;
}

}  // namespace selfheal

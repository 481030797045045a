#include "doctest.h"

#include <cmath>
#include <vector>

#include "selfheal/allocation_solvers.hpp"
#include "selfheal/rng.hpp"
#include "selfheal/workload_gen.hpp"

using namespace selfheal;

namespace {

TaskSpec task(const std::string& id, double r, double o, double s) {
  TaskSpec t;
  t.id = id;
  t.resources = r;
  t.output_factor = o;
  t.computation_size = s;
  return t;
}

NodeSpec node(const std::string& id, double power, double res, double energy) {
  NodeSpec n;
  n.id = id;
  n.processing_power = power;
  n.resources = res;
  n.compute_energy = energy;
  return n;
}

LinkSpec link(std::size_t a, std::size_t b, double e) {
  LinkSpec l;
  l.a = a;
  l.b = b;
  l.transfer_energy = e;
  return l;
}

struct RandomInstance {
  RecipeGraph recipe;
  NetworkGraph net;
};

RandomInstance random_instance(Rng& rng, std::size_t max_tasks,
                               std::size_t max_nodes) {
  NetworkGenConfig ncfg;
  ncfg.node_count = 1 + rng.uniform_int(0, max_nodes - 1);
  ncfg.resource_range = {8.0, 16.0};  // keep a healthy share of instances feasible
  ncfg.seed = rng.next_u64();
  RecipeGenConfig rcfg;
  rcfg.task_count = 2 + rng.uniform_int(0, max_tasks - 2);
  rcfg.resource_range = {1.0, 4.0};
  rcfg.shape = rng.bernoulli(0.5) && rcfg.task_count >= 3 ? RecipeShape::wide
                                                          : RecipeShape::long_chain;
  rcfg.seed = rng.next_u64();
  return {gen_recipe(rcfg), gen_network(ncfg)};
}

}  // namespace

TEST_CASE("single task on a single sufficient node") {
  RecipeGraph r;
  r.tasks = {task("t", 2, 1, 3.0)};
  NetworkGraph n;
  n.nodes = {node("n", 1.5, 4, 0.8)};

  const auto out = solve_exact(r, n);
  REQUIRE(out.status == SolveStatus::proven_optimal);
  REQUIRE(out.allocation.has_value());
  CHECK(out.allocation->node_of == std::vector<std::size_t>{0});
  CHECK(out.breakdown->total_energy == doctest::Approx(0.8 * 3.0 / 1.5));
  CHECK(out.breakdown->network_energy == 0.0);

  const auto h = solve_heuristic(r, n);
  CHECK(h.status == SolveStatus::feasible_heuristic);
  CHECK(h.breakdown->total_energy == doctest::Approx(0.8 * 3.0 / 1.5));
}

TEST_CASE("chained tasks co-locate on the cheaper node when links cost energy") {
  RecipeGraph r;
  r.tasks = {task("a", 2, 1.0, 1), task("b", 2, 1.0, 1)};
  r.edges = {{0, 1}};
  NetworkGraph n;
  n.nodes = {node("cheap", 1, 8, 0.5), node("dear", 1, 8, 0.7)};
  n.links = {link(0, 1, 0.4)};

  const auto out = solve_exact(r, n);
  REQUIRE(out.status == SolveStatus::proven_optimal);
  CHECK(out.allocation->node_of == std::vector<std::size_t>{0, 0});
  CHECK(out.breakdown->total_energy == doctest::Approx(1.0));
  CHECK(out.breakdown->network_energy == 0.0);
}

TEST_CASE("pigeonhole infeasibility is reported, not thrown") {
  RecipeGraph r;
  r.tasks = {task("a", 8, 1, 1), task("b", 8, 1, 1), task("c", 8, 1, 1)};
  r.edges = {{0, 1}, {1, 2}};
  NetworkGraph n;
  n.nodes = {node("x", 1, 8, 1), node("y", 1, 8, 1)};
  n.links = {link(0, 1, 0.2)};

  for (const auto& out :
       {solve_exact(r, n), solve_brute_force(r, n), solve_heuristic(r, n)}) {
    CHECK(out.status == SolveStatus::infeasible);
    CHECK_FALSE(out.allocation.has_value());
    CHECK_FALSE(out.breakdown.has_value());
  }
}

TEST_CASE("empty recipe solves to an empty allocation") {
  RecipeGraph r;
  NetworkGraph n;
  n.nodes = {node("x", 1, 8, 1)};
  for (const auto& out : {solve_exact(r, n), solve_brute_force(r, n)}) {
    CHECK(out.status == SolveStatus::proven_optimal);
    REQUIRE(out.allocation.has_value());
    CHECK(out.allocation->node_of.empty());
    CHECK(out.breakdown->total_energy == 0.0);
  }
}

TEST_CASE("empty network is infeasible for any nonempty recipe") {
  RecipeGraph r;
  r.tasks = {task("a", 1, 1, 1)};
  NetworkGraph n;
  CHECK(solve_exact(r, n).status == SolveStatus::infeasible);
  CHECK(solve_heuristic(r, n).status == SolveStatus::infeasible);
}

TEST_CASE("brute force enumerates every total assignment") {
  RecipeGraph r;
  r.tasks = {task("a", 1, 1, 1), task("b", 1, 1, 1)};
  NetworkGraph n;
  n.nodes = {node("x", 1, 8, 1), node("y", 1, 8, 1), node("z", 1, 8, 1)};
  n.links = {link(0, 1, 0.2), link(1, 2, 0.2)};
  const auto out = solve_brute_force(r, n);
  CHECK(out.stats.explored_nodes == 9);  // 3^2 assignments
  CHECK(out.status == SolveStatus::proven_optimal);
}

TEST_CASE("brute force refuses oversized instances") {
  RecipeGraph r;
  for (int i = 0; i < 10; ++i) r.tasks.push_back(task("t" + std::to_string(i), 1, 1, 1));
  for (int i = 0; i + 1 < 10; ++i) r.edges.emplace_back(i, i + 1);
  NetworkGraph n;
  for (int i = 0; i < 6; ++i) n.nodes.push_back(node("n" + std::to_string(i), 1, 100, 1));
  for (int i = 0; i + 1 < 6; ++i) n.links.push_back(link(i, i + 1, 0.1));
  // 6^10 > 1e7
  CHECK_THROWS_AS(solve_brute_force(r, n), SizeGuardError);
}

TEST_CASE("exact solver matches the brute-force oracle on random instances") {
  Rng rng(20250801);
  std::size_t feasible_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto [recipe, net] = random_instance(rng, 4, 4);
    const auto oracle = solve_brute_force(recipe, net);
    const auto exact = solve_exact(recipe, net);
    REQUIRE(exact.status == oracle.status);
    if (oracle.status != SolveStatus::proven_optimal) continue;
    ++feasible_seen;
    // Exact objective equality; allocations may differ only under ties, and
    // tie-breaking is lexicographic in both, so they match outright.
    CHECK(exact.breakdown->total_energy == oracle.breakdown->total_energy);
    CHECK(exact.allocation->node_of == oracle.allocation->node_of);
    CHECK(check_feasibility(recipe, net, *exact.allocation).feasible());
  }
  CHECK(feasible_seen > 50);  // the suite actually exercised the interesting path
}

TEST_CASE("exact solver honors compatibility masks") {
  RecipeGraph r;
  r.tasks = {task("a", 1, 1, 1), task("b", 1, 1, 1)};
  r.edges = {{0, 1}};
  NetworkGraph n;
  n.nodes = {node("x", 1, 8, 0.1), node("y", 1, 8, 5.0)};
  n.links = {link(0, 1, 0.2)};

  CompatibilityMask mask(2, 2);
  mask.set(0, 0, false);  // task a may not run on the cheap node
  const auto out = solve_exact(r, n, {}, mask);
  REQUIRE(out.status == SolveStatus::proven_optimal);
  CHECK(out.allocation->node_of[0] == 1);

  const auto oracle = solve_brute_force(r, n, mask);
  CHECK(out.breakdown->total_energy == oracle.breakdown->total_energy);

  CompatibilityMask none(2, 2, false);
  CHECK(solve_exact(r, n, {}, none).status == SolveStatus::infeasible);
}

TEST_CASE("masked random instances still match the oracle") {
  Rng rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    auto [recipe, net] = random_instance(rng, 4, 4);
    CompatibilityMask mask(recipe.tasks.size(), net.nodes.size());
    for (std::size_t t = 0; t < recipe.tasks.size(); ++t)
      for (std::size_t n = 0; n < net.nodes.size(); ++n)
        if (rng.bernoulli(0.25)) mask.set(t, n, false);
    const auto oracle = solve_brute_force(recipe, net, mask);
    const auto exact = solve_exact(recipe, net, {}, mask);
    REQUIRE(exact.status == oracle.status);
    if (oracle.status == SolveStatus::proven_optimal) {
      CHECK(exact.breakdown->total_energy == oracle.breakdown->total_energy);
      CHECK(exact.allocation->node_of == oracle.allocation->node_of);
    }
  }
}

TEST_CASE("heuristic true energy never beats the exact optimum") {
  Rng rng(8888);
  std::size_t compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto [recipe, net] = random_instance(rng, 4, 4);
    const auto exact = solve_exact(recipe, net);
    if (exact.status != SolveStatus::proven_optimal) continue;
    SolverOutcome heur;
    try {
      heur = solve_heuristic(recipe, net);
    } catch (const InfeasibleCommunicationError&) {
      continue;  // surrogate picked an unroutable placement; allowed
    }
    if (heur.status != SolveStatus::feasible_heuristic) continue;
    ++compared;
    CHECK(heur.breakdown->total_energy >= exact.breakdown->total_energy - 1e-12);
    CHECK(check_feasibility(recipe, net, *heur.allocation).feasible());
  }
  CHECK(compared > 40);
}

TEST_CASE("heuristic is optimal for its own surrogate objective") {
  Rng rng(4242);
  for (int trial = 0; trial < 60; ++trial) {
    auto [recipe, net] = random_instance(rng, 3, 4);
    SolverOutcome heur;
    try {
      heur = solve_heuristic(recipe, net);
    } catch (const InfeasibleCommunicationError&) {
      continue;
    }
    if (heur.status != SolveStatus::feasible_heuristic) continue;
    const double chosen = heuristic_surrogate_value(recipe, net, *heur.allocation);

    // Enumerate every capacity-feasible assignment and compare surrogates
    // (the surrogate model ignores reachability, so only capacity counts).
    const std::size_t t_count = recipe.tasks.size();
    const std::size_t n_count = net.nodes.size();
    std::vector<std::size_t> assign(t_count, 0);
    bool more = true;
    while (more) {
      const Allocation cand{assign};
      const auto report = check_feasibility(recipe, net, cand);
      bool capacity_ok = true;
      for (const auto& issue : report.issues)
        if (issue.kind != "reachability") capacity_ok = false;
      if (capacity_ok)
        CHECK(chosen <= heuristic_surrogate_value(recipe, net, cand) + 1e-12);

      more = false;
      for (std::size_t p = t_count; p-- > 0;) {
        if (++assign[p] < n_count) {
          more = true;
          break;
        }
        assign[p] = 0;
      }
    }
  }
}

TEST_CASE("surrogate mis-ranking on an asymmetric star still upholds dominance") {
  // Hub x has links 0.1 (to y) and 0.9 (to z): surrogate sees 0.5 everywhere.
  RecipeGraph r;
  r.tasks = {task("src", 4, 1.0, 1), task("dst", 4, 1.0, 1)};
  r.edges = {{0, 1}};
  NetworkGraph n;
  n.nodes = {node("x", 1, 4, 1.0), node("y", 1, 4, 1.05), node("z", 1, 4, 1.0)};
  n.links = {link(0, 1, 0.1), link(0, 2, 0.9)};

  const auto exact = solve_exact(r, n);
  const auto heur = solve_heuristic(r, n);
  REQUIRE(exact.status == SolveStatus::proven_optimal);
  REQUIRE(heur.status == SolveStatus::feasible_heuristic);
  CHECK(heur.breakdown->total_energy >= exact.breakdown->total_energy);
}

TEST_CASE("exact model bookkeeping") {
  RecipeGraph r;
  r.tasks = {task("a", 1, 1, 1), task("b", 1, 1, 1), task("c", 1, 1, 1)};
  r.edges = {{0, 1}, {1, 2}};
  NetworkGraph n;
  n.nodes = {node("x", 1, 8, 1), node("y", 1, 8, 1), node("z", 1, 8, 1),
             node("w", 1, 8, 1)};
  n.links = {link(0, 1, 0.2)};

  const auto model = ExactPlacementModel::build(r, n);
  CHECK(model.x_variable_count() == 3 * 4);
  CHECK(model.y_variable_count() == 2 * 4 * 4);  // only recipe edges
  CHECK(model.assignment_constraint_count() == 3);
  CHECK(model.capacity_constraint_count() == 4);
  CHECK(model.linearization_constraint_count() == 3 * model.y_variable_count());
  CHECK(model.linearization_consistent(Allocation{{0, 1, 2}}));
  CHECK(model.linearization_consistent(Allocation{{3, 3, 3}}));

  const auto gap = HeuristicPlacementModel::build(r, n);
  CHECK(gap.variable_count() == 3 * 4);
}

TEST_CASE("deterministic outcomes including explored-node counts") {
  Rng rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    auto [recipe, net] = random_instance(rng, 4, 4);
    const auto a = solve_exact(recipe, net);
    const auto b = solve_exact(recipe, net);
    CHECK(a.status == b.status);
    CHECK(a.stats.explored_nodes == b.stats.explored_nodes);
    if (a.allocation) {
      REQUIRE(b.allocation.has_value());
      CHECK(a.allocation->node_of == b.allocation->node_of);
      CHECK(a.breakdown->total_energy == b.breakdown->total_energy);
    }
  }
}

TEST_CASE("node budget cuts off with the seeded incumbent") {
  RecipeGraph r;
  for (int i = 0; i < 6; ++i) r.tasks.push_back(task("t" + std::to_string(i), 1, 1, 1));
  for (int i = 0; i + 1 < 6; ++i) r.edges.emplace_back(i, i + 1);
  NetworkGraph n;
  for (int i = 0; i < 6; ++i) n.nodes.push_back(node("n" + std::to_string(i), 1, 10, 1));
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) n.links.push_back(link(i, j, 0.1 * (i + 1)));

  SolveBudget tight;
  tight.max_nodes = 3;
  const auto out = solve_exact(r, n, tight);
  CHECK(out.status == SolveStatus::resource_limit);
  // The heuristic incumbent survives the cutoff, so a feasible allocation and
  // its true energy are still reported.
  REQUIRE(out.allocation.has_value());
  REQUIRE(out.breakdown.has_value());
  CHECK(check_feasibility(r, n, *out.allocation).feasible());

  const auto full = solve_exact(r, n);
  CHECK(full.status == SolveStatus::proven_optimal);
  CHECK(full.breakdown->total_energy <= out.breakdown->total_energy + 1e-12);
}

TEST_CASE("outcome serializes with named assignments") {
  RecipeGraph r;
  r.tasks = {task("a", 1, 1, 1), task("b", 1, 1, 1)};
  r.edges = {{0, 1}};
  NetworkGraph n;
  n.nodes = {node("x", 1, 8, 1), node("y", 1, 8, 1)};
  n.links = {link(0, 1, 0.2)};
  const auto out = solve_exact(r, n);
  const auto j = out.to_json(r, n);
  CHECK(j.at("status").get<std::string>() == "proven_optimal");
  REQUIRE(j.at("allocation").is_array());
  CHECK(j.at("allocation")[0].at("task").get<std::string>() == "a");
  CHECK(j.at("allocation")[0].at("node").get<std::string>() ==
        n.nodes[out.allocation->node_of[0]].id);
  CHECK(j.at("energy").at("total_energy").get<double>() ==
        doctest::Approx(out.breakdown->total_energy));
  CHECK(j.at("stats").contains("explored_nodes"));
}

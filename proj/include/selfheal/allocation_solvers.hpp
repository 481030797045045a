#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfheal/allocation_model.hpp"

namespace selfheal {

enum class SolveStatus { proven_optimal, feasible_heuristic, infeasible, resource_limit };

std::string to_string(SolveStatus s);

struct SolverStats {
  std::uint64_t explored_nodes = 0;  // partial assignments examined
  double build_seconds = 0.0;        // model construction, wall clock
  double solve_wall_seconds = 0.0;
  double solve_cpu_seconds = 0.0;    // thread CPU time
};

struct SolverOutcome {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<Allocation> allocation;     // present for solved instances and
                                            // for resource_limit with an incumbent
  std::optional<EnergyBreakdown> breakdown; // always recomputed via evaluate_energy
  SolverStats stats;

  nlohmann::ordered_json to_json(const RecipeGraph& recipe,
                                 const NetworkGraph& net) const;
};

struct SolveBudget {
  std::optional<double> max_seconds;        // wall clock; nondeterministic cutoff
  std::optional<std::uint64_t> max_nodes;   // deterministic cutoff
};

// Optional per-pair placement permissions (capability filtering in the
// healing loop). A default-constructed mask allows every pairing.
class CompatibilityMask {
 public:
  CompatibilityMask() = default;
  CompatibilityMask(std::size_t tasks, std::size_t nodes, bool allowed = true)
      : nodes_(nodes), allow_(tasks * nodes, allowed ? 1 : 0) {}

  void set(std::size_t t, std::size_t n, bool allowed) {
    allow_[t * nodes_ + n] = allowed ? 1 : 0;
  }
  bool allowed(std::size_t t, std::size_t n) const {
    return allow_.empty() || allow_[t * nodes_ + n] != 0;
  }
  bool unconstrained() const { return allow_.empty(); }

 private:
  std::size_t nodes_ = 0;
  std::vector<char> allow_;
};

// Bookkeeping for the exact 0/1 model: assignment variables X[t, n] plus the
// linearization block Y[t1, t2, n1, n2] that encodes co-assignment of a
// communicating task pair. Y variables exist only for recipe edges; every
// other pair never enters the objective.
struct ExactPlacementModel {
  std::size_t task_count = 0;
  std::size_t node_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> y_edges;

  static ExactPlacementModel build(const RecipeGraph& recipe, const NetworkGraph& net);

  std::size_t x_variable_count() const { return task_count * node_count; }
  std::size_t y_variable_count() const {
    return y_edges.size() * node_count * node_count;
  }
  std::size_t assignment_constraint_count() const { return task_count; }
  std::size_t capacity_constraint_count() const { return node_count; }
  std::size_t linearization_constraint_count() const {
    return 3 * y_variable_count();
  }

  // Verifies that the Y values implied by a complete assignment satisfy the
  // three linearization inequalities and equal X[t1,n1] * X[t2,n2].
  bool linearization_consistent(const Allocation& alloc) const;
};

// Variable bookkeeping for the surrogate (generalized-assignment) model.
struct HeuristicPlacementModel {
  std::size_t task_count = 0;
  std::size_t node_count = 0;

  static HeuristicPlacementModel build(const RecipeGraph& recipe,
                                       const NetworkGraph& net);
  std::size_t variable_count() const { return task_count * node_count; }
};

// Exact minimum-energy placement. Depth-first branch and bound over the
// assignment variables in (task index, node index) order, pruned by an
// admissible bound: exact energy of the assigned prefix plus, for every
// unassigned task, its cheapest capacity-feasible device cost (transfer cost
// lower-bounded by zero, since co-location is always a candidate). The
// incumbent is seeded from the heuristic when its allocation is routable;
// seeding tightens pruning but cannot change the optimal value.
SolverOutcome solve_exact(const RecipeGraph& recipe, const NetworkGraph& net,
                          const SolveBudget& budget = {},
                          const CompatibilityMask& mask = {});

// Optimal solution of the surrogate model: per-pair cost
// C_n * S_t / P_n + O_t * avg_outgoing_energy(n) under the assignment and
// capacity constraints. The surrogate drops path topology, so the reported
// breakdown is the true energy of the chosen allocation, never the surrogate
// value. Throws InfeasibleCommunicationError when the chosen allocation
// routes an edge across disconnected nodes.
SolverOutcome solve_heuristic(const RecipeGraph& recipe, const NetworkGraph& net,
                              const CompatibilityMask& mask = {});

// Exhaustive oracle: enumerates all node_count^task_count assignments in
// lexicographic order. Guarded to 1e7 assignments; throws SizeGuardError above
// that.
SolverOutcome solve_brute_force(const RecipeGraph& recipe, const NetworkGraph& net,
                                const CompatibilityMask& mask = {});

// Surrogate objective value of an arbitrary allocation (test hook).
double heuristic_surrogate_value(const RecipeGraph& recipe, const NetworkGraph& net,
                                 const Allocation& alloc);

}  // namespace selfheal

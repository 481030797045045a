#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selfheal/errors.hpp"
#include "selfheal/fd_policy.hpp"

#include "json.hpp"

namespace selfheal {

// One abstract application task.
struct TaskSpec {
  std::string id;
  double resources = 1.0;         // R_t, resource units, > 0
  double output_factor = 1.0;     // O_t, packets emitted per received input, >= 0
  double computation_size = 1.0;  // S_t, reference-node time units, > 0
};

// Directed dataflow graph of tasks.
struct RecipeGraph {
  std::vector<TaskSpec> tasks;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // by task index

  std::size_t task_index(std::string_view id) const;  // throws ConfigError
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static RecipeGraph from_json(const nlohmann::json& j);
};

// One device.
struct NodeSpec {
  std::string id;
  double processing_power = 1.0;  // P_n, speedup vs the reference node, > 0
  double resources = 1.0;         // R_n, resource units, >= 0
  double compute_energy = 1.0;    // C_n, energy per unit of computation, >= 0
  NodeProfile profile;
};

struct LinkSpec {
  std::size_t a = 0;
  std::size_t b = 0;               // node indices, a != b
  double transfer_energy = 0.0;    // T_l, energy per data packet, >= 0
};

// Undirected device network.
struct NetworkGraph {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;

  std::size_t node_index(std::string_view id) const;  // throws ConfigError
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static NetworkGraph from_json(const nlohmann::json& j);
};

// Pairwise minimum-energy transfer costs; disconnected pairs are absent
// rather than infinite.
class PathCostTable {
 public:
  PathCostTable() = default;
  PathCostTable(std::size_t node_count, std::vector<double> costs)
      : n_(node_count), costs_(std::move(costs)) {}

  std::size_t node_count() const { return n_; }

  std::optional<double> cost(std::size_t a, std::size_t b) const {
    const double c = costs_[a * n_ + b];
    if (c < 0) return std::nullopt;
    return c;
  }

  bool reachable(std::size_t a, std::size_t b) const {
    return costs_[a * n_ + b] >= 0;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> costs_;  // row-major; -1 encodes "unreachable"
};

// All-pairs minimum path energy (Dijkstra per source; link energies are
// nonnegative). D(n, n) = 0 for every node.
PathCostTable shortest_path_energy(const NetworkGraph& net);

// Total assignment of recipe tasks to network nodes: node_of[t] is the node
// index hosting task t. Totality and uniqueness hold by construction once
// node_of.size() equals the task count.
struct Allocation {
  std::vector<std::size_t> node_of;

  bool operator==(const Allocation&) const = default;
};

struct EnergyBreakdown {
  double device_energy = 0.0;
  double network_energy = 0.0;
  double total_energy = 0.0;
};

// True energy of an allocation: per-task compute energy C_n * S_t / P_n plus
// per-recipe-edge transfer energy O_t1 * D(host(t1), host(t2)). Throws
// InfeasibleCommunicationError (naming the edge) when a recipe edge is routed
// between disconnected nodes.
EnergyBreakdown evaluate_energy(const RecipeGraph& recipe, const NetworkGraph& net,
                                const PathCostTable& costs, const Allocation& alloc);
EnergyBreakdown evaluate_energy(const RecipeGraph& recipe, const NetworkGraph& net,
                                const Allocation& alloc);

struct FeasibilityIssue {
  std::string kind;    // "totality" | "node-range" | "resources" | "reachability"
  std::string detail;  // offending task / node / edge
};

struct FeasibilityReport {
  std::vector<FeasibilityIssue> issues;
  bool feasible() const { return issues.empty(); }
  std::string summary() const;
};

// Per-constraint pass/fail report: assignment totality, per-node resource
// capacities, and reachability of every routed recipe edge.
FeasibilityReport check_feasibility(const RecipeGraph& recipe,
                                    const NetworkGraph& net,
                                    const PathCostTable& costs,
                                    const Allocation& alloc);
FeasibilityReport check_feasibility(const RecipeGraph& recipe,
                                    const NetworkGraph& net,
                                    const Allocation& alloc);

// Mean transfer energy over each node's incident links; isolated nodes get 0.
std::vector<double> avg_outgoing_energy(const NetworkGraph& net);

}  // namespace selfheal

#include "selfheal/allocation_model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <unordered_map>

namespace selfheal {

namespace {

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end())
      throw ConfigError("unknown key '" + it.key() + "' in " + context);
  }
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::size_t RecipeGraph::task_index(std::string_view id) const {
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].id == id) return i;
  throw ConfigError("unknown task id: " + std::string(id));
}

void RecipeGraph::validate() const {
  std::set<std::string> ids;
  for (const auto& t : tasks) {
    if (t.id.empty()) throw ConfigError("task with empty id");
    if (!ids.insert(t.id).second) throw ConfigError("duplicate task id: " + t.id);
    if (!(t.resources > 0) || !finite(t.resources))
      throw ConfigError("task " + t.id + ": resources must be > 0");
    if (t.output_factor < 0 || !finite(t.output_factor))
      throw ConfigError("task " + t.id + ": output_factor must be >= 0");
    if (!(t.computation_size > 0) || !finite(t.computation_size))
      throw ConfigError("task " + t.id + ": computation_size must be > 0");
  }
  for (const auto& [a, b] : edges) {
    if (a >= tasks.size() || b >= tasks.size())
      throw ConfigError("recipe edge references a missing task");
    if (a == b)
      throw ConfigError("recipe self-loop on task " + tasks[a].id);
  }
}

std::size_t NetworkGraph::node_index(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  throw ConfigError("unknown node id: " + std::string(id));
}

void NetworkGraph::validate() const {
  std::set<std::string> ids;
  for (const auto& n : nodes) {
    if (n.id.empty()) throw ConfigError("node with empty id");
    if (!ids.insert(n.id).second) throw ConfigError("duplicate node id: " + n.id);
    if (!(n.processing_power > 0) || !finite(n.processing_power))
      throw ConfigError("node " + n.id + ": processing_power must be > 0");
    if (n.resources < 0 || !finite(n.resources))
      throw ConfigError("node " + n.id + ": resources must be >= 0");
    if (n.compute_energy < 0 || !finite(n.compute_energy))
      throw ConfigError("node " + n.id + ": compute_energy must be >= 0");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& l : links) {
    if (l.a >= nodes.size() || l.b >= nodes.size())
      throw ConfigError("link references a missing node");
    if (l.a == l.b) throw ConfigError("link self-loop on node " + nodes[l.a].id);
    if (l.transfer_energy < 0 || !finite(l.transfer_energy))
      throw ConfigError("link energy must be >= 0");
    auto key = std::minmax(l.a, l.b);
    if (!seen.insert(key).second)
      throw ConfigError("duplicate link between " + nodes[l.a].id + " and " +
                        nodes[l.b].id);
  }
}

nlohmann::ordered_json RecipeGraph::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : tasks)
    j["tasks"].push_back({{"id", t.id},
                          {"resources", t.resources},
                          {"output_factor", t.output_factor},
                          {"computation_size", t.computation_size}});
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : edges)
    j["edges"].push_back({tasks[a].id, tasks[b].id});
  return j;
}

RecipeGraph RecipeGraph::from_json(const nlohmann::json& j) {
 try {
  require_keys(j, {"version", "tasks", "edges"}, "recipe");
  if (!j.contains("version") || j.at("version").get<int>() != 1)
    throw ConfigError("recipe: missing or unsupported version");
  RecipeGraph r;
  for (const auto& jt : j.at("tasks")) {
    require_keys(jt, {"id", "resources", "output_factor", "computation_size"},
                 "recipe task");
    TaskSpec t;
    t.id = jt.at("id").get<std::string>();
    t.resources = jt.value("resources", 1.0);
    t.output_factor = jt.value("output_factor", 1.0);
    t.computation_size = jt.value("computation_size", 1.0);
    r.tasks.push_back(std::move(t));
  }
  for (const auto& je : j.value("edges", nlohmann::json::array())) {
    if (!je.is_array() || je.size() != 2)
      throw ConfigError("recipe edge must be a [from, to] pair");
    r.edges.emplace_back(r.task_index(je.at(0).get<std::string>()),
                         r.task_index(je.at(1).get<std::string>()));
  }
  r.validate();
  return r;
 } catch (const nlohmann::json::exception& e) {
  throw ConfigError(std::string("recipe: malformed record: ") + e.what());
 }
}

nlohmann::ordered_json NetworkGraph::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes)
    j["nodes"].push_back({{"id", n.id},
                          {"processing_power", n.processing_power},
                          {"resources", n.resources},
                          {"compute_energy", n.compute_energy},
                          {"profile",
                           {{"link", to_string(n.profile.link)},
                            {"power", to_string(n.profile.power)},
                            {"mobility", to_string(n.profile.mobility)}}}});
  j["links"] = nlohmann::ordered_json::array();
  for (const auto& l : links)
    j["links"].push_back({{"a", nodes[l.a].id},
                          {"b", nodes[l.b].id},
                          {"energy", l.transfer_energy}});
  return j;
}

NetworkGraph NetworkGraph::from_json(const nlohmann::json& j) {
 try {
  require_keys(j, {"version", "nodes", "links"}, "network");
  if (!j.contains("version") || j.at("version").get<int>() != 1)
    throw ConfigError("network: missing or unsupported version");
  NetworkGraph g;
  for (const auto& jn : j.at("nodes")) {
    require_keys(jn, {"id", "processing_power", "resources", "compute_energy", "profile"},
                 "network node");
    NodeSpec n;
    n.id = jn.at("id").get<std::string>();
    n.processing_power = jn.value("processing_power", 1.0);
    n.resources = jn.value("resources", 1.0);
    n.compute_energy = jn.value("compute_energy", 1.0);
    if (jn.contains("profile")) {
      const auto& jp = jn.at("profile");
      require_keys(jp, {"link", "power", "mobility"}, "node profile");
      n.profile.link = link_kind_from_string(jp.value("link", "wired"));
      n.profile.power = power_kind_from_string(jp.value("power", "mains"));
      n.profile.mobility = mobility_from_string(jp.value("mobility", "stationary"));
    }
    g.nodes.push_back(std::move(n));
  }
  for (const auto& jl : j.value("links", nlohmann::json::array())) {
    require_keys(jl, {"a", "b", "energy"}, "network link");
    LinkSpec l;
    l.a = g.node_index(jl.at("a").get<std::string>());
    l.b = g.node_index(jl.at("b").get<std::string>());
    l.transfer_energy = jl.value("energy", 0.0);
    g.links.push_back(l);
  }
  g.validate();
  return g;
 } catch (const nlohmann::json::exception& e) {
  throw ConfigError(std::string("network: malformed record: ") + e.what());
 }
}

PathCostTable shortest_path_energy(const NetworkGraph& net) {
  const std::size_t n = net.nodes.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& l : net.links) {
    adj[l.a].emplace_back(l.b, l.transfer_energy);
    adj[l.b].emplace_back(l.a, l.transfer_energy);
  }

  std::vector<double> costs(n * n, -1.0);
  std::vector<double> dist(n);
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), -1.0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (dist[u] >= 0) continue;
      dist[u] = d;
      for (auto [v, w] : adj[u])
        if (dist[v] < 0) heap.emplace(d + w, v);
    }
    for (std::size_t dst = 0; dst < n; ++dst) costs[src * n + dst] = dist[dst];
  }
  return PathCostTable(n, std::move(costs));
}

EnergyBreakdown evaluate_energy(const RecipeGraph& recipe, const NetworkGraph& net,
                                const PathCostTable& costs, const Allocation& alloc) {
  if (alloc.node_of.size() != recipe.tasks.size())
    throw ConfigError("allocation does not cover every task");

  EnergyBreakdown out;
  for (std::size_t t = 0; t < recipe.tasks.size(); ++t) {
    const NodeSpec& host = net.nodes.at(alloc.node_of[t]);
    out.device_energy += host.compute_energy *
                         (recipe.tasks[t].computation_size / host.processing_power);
  }
  for (const auto& [t1, t2] : recipe.edges) {
    const std::size_t n1 = alloc.node_of[t1];
    const std::size_t n2 = alloc.node_of[t2];
    const auto d = costs.cost(n1, n2);
    if (!d)
      throw InfeasibleCommunicationError(
          "edge " + recipe.tasks[t1].id + " -> " + recipe.tasks[t2].id +
          " routed between disconnected nodes " + net.nodes[n1].id + " and " +
          net.nodes[n2].id);
    out.network_energy += recipe.tasks[t1].output_factor * *d;
  }
  out.total_energy = out.device_energy + out.network_energy;
  return out;
}

EnergyBreakdown evaluate_energy(const RecipeGraph& recipe, const NetworkGraph& net,
                                const Allocation& alloc) {
  return evaluate_energy(recipe, net, shortest_path_energy(net), alloc);
}

std::string FeasibilityReport::summary() const {
  if (feasible()) return "feasible";
  std::string s;
  for (const auto& i : issues) {
    if (!s.empty()) s += "; ";
    s += i.kind + ": " + i.detail;
  }
  return s;
}

FeasibilityReport check_feasibility(const RecipeGraph& recipe,
                                    const NetworkGraph& net,
                                    const PathCostTable& costs,
                                    const Allocation& alloc) {
  FeasibilityReport report;
  if (alloc.node_of.size() != recipe.tasks.size()) {
    report.issues.push_back(
        {"totality", "allocation covers " + std::to_string(alloc.node_of.size()) +
                         " of " + std::to_string(recipe.tasks.size()) + " tasks"});
    return report;
  }
  for (std::size_t t = 0; t < alloc.node_of.size(); ++t)
    if (alloc.node_of[t] >= net.nodes.size()) {
      report.issues.push_back({"node-range", "task " + recipe.tasks[t].id +
                                                 " assigned to a missing node"});
      return report;
    }

  std::vector<double> used(net.nodes.size(), 0.0);
  for (std::size_t t = 0; t < alloc.node_of.size(); ++t)
    used[alloc.node_of[t]] += recipe.tasks[t].resources;
  for (std::size_t n = 0; n < net.nodes.size(); ++n)
    if (used[n] > net.nodes[n].resources)
      report.issues.push_back(
          {"resources", "node " + net.nodes[n].id + " over capacity (" +
                            std::to_string(used[n]) + " > " +
                            std::to_string(net.nodes[n].resources) + ")"});

  for (const auto& [t1, t2] : recipe.edges)
    if (!costs.reachable(alloc.node_of[t1], alloc.node_of[t2]))
      report.issues.push_back(
          {"reachability", "edge " + recipe.tasks[t1].id + " -> " +
                               recipe.tasks[t2].id + " crosses disconnected nodes"});
  return report;
}

FeasibilityReport check_feasibility(const RecipeGraph& recipe,
                                    const NetworkGraph& net,
                                    const Allocation& alloc) {
  return check_feasibility(recipe, net, shortest_path_energy(net), alloc);
}

std::vector<double> avg_outgoing_energy(const NetworkGraph& net) {
  std::vector<double> sum(net.nodes.size(), 0.0);
  std::vector<std::size_t> degree(net.nodes.size(), 0);
  for (const auto& l : net.links) {
    sum[l.a] += l.transfer_energy;
    sum[l.b] += l.transfer_energy;
    degree[l.a] += 1;
    degree[l.b] += 1;
  }
  std::vector<double> out(net.nodes.size(), 0.0);
  for (std::size_t n = 0; n < net.nodes.size(); ++n)
    out[n] = degree[n] == 0 ? 0.0 : sum[n] / static_cast<double>(degree[n]);
  return out;
}

}  // namespace selfheal

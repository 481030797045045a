#include "selfheal/workload_gen.hpp"

#include <cmath>

#include "selfheal/errors.hpp"
#include "selfheal/rng.hpp"

namespace selfheal {

namespace {

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError(std::string(name) + " must be in [0, 1]");
}

void check_range(const ValueRange& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw ConfigError(std::string(name) + " must be a finite nonempty range");
}

}  // namespace

void NetworkGenConfig::validate() const {
  check_prob(wired_fraction, "wired_fraction");
  check_prob(connect_prob_wired_wired, "connect_prob.wired_wired");
  check_prob(connect_prob_wireless_wireless, "connect_prob.wireless_wireless");
  check_prob(connect_prob_wireless_wired, "connect_prob.wireless_wired");
  if (!(link_energy_wired > 0.0) || !(link_energy_wireless > 0.0))
    throw ConfigError("link energies must be > 0");
  check_range(resource_range, "resource_range");
  check_range(speed_range, "speed_range");
  check_range(compute_energy_range, "compute_energy_range");
  if (!(resource_range.lo > 0.0)) throw ConfigError("resource_range must start > 0");
  if (!(speed_range.lo > 0.0)) throw ConfigError("speed_range must start > 0");
  if (!(compute_energy_range.lo > 0.0))
    throw ConfigError("compute_energy_range must start > 0");
}

std::string to_string(RecipeShape s) {
  switch (s) {
    case RecipeShape::wide: return "wide";
    case RecipeShape::long_chain: return "long";
  }
  throw std::logic_error("unknown RecipeShape");
}

RecipeShape recipe_shape_from_string(const std::string& s) {
  if (s == "wide") return RecipeShape::wide;
  if (s == "long") return RecipeShape::long_chain;
  throw ConfigError("unknown recipe shape '" + s + "' (expected wide|long)");
}

void RecipeGenConfig::validate() const {
  if (task_count < 2) throw ConfigError("task_count must be >= 2");
  if (shape == RecipeShape::wide && task_count < 3)
    throw ShapeError("wide recipes need at least 3 tasks (start, middle, end)");
  check_range(resource_range, "resource_range");
  check_range(output_factor_range, "output_factor_range");
  if (!(resource_range.lo > 0.0)) throw ConfigError("resource_range must start > 0");
  if (!(output_factor_range.lo > 0.0))
    throw ConfigError("output_factor_range must start > 0");
  if (computation_sizes.empty())
    throw ConfigError("computation_sizes must not be empty");
  for (double c : computation_sizes)
    if (!(c > 0.0)) throw ConfigError("computation sizes must be > 0");
}

void HeartbeatTraceConfig::validate() const {
  for (const auto& seg : segments) {
    if (!(seg.mean > 0.0)) throw ConfigError("segment mean must be > 0");
    if (!(seg.variance >= 0.0)) throw ConfigError("segment variance must be >= 0");
    if (!(seg.duration > 0.0)) throw ConfigError("segment duration must be > 0");
  }
}

NetworkGraph gen_network(const NetworkGenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  NetworkGraph net;
  net.nodes.reserve(cfg.node_count);
  std::vector<bool> wired(cfg.node_count, false);
  for (std::size_t i = 0; i < cfg.node_count; ++i) {
    NodeSpec node;
    node.id = "n" + std::to_string(i);
    wired[i] = rng.bernoulli(cfg.wired_fraction);
    node.resources = rng.uniform(cfg.resource_range.lo, cfg.resource_range.hi);
    node.processing_power = rng.uniform(cfg.speed_range.lo, cfg.speed_range.hi);
    node.compute_energy =
        rng.uniform(cfg.compute_energy_range.lo, cfg.compute_energy_range.hi);
    node.profile.link = wired[i] ? LinkKind::wired : LinkKind::wireless;
    node.profile.power = wired[i] ? PowerKind::mains : PowerKind::battery;
    node.profile.mobility = Mobility::stationary;
    net.nodes.push_back(std::move(node));
  }
  for (std::size_t i = 0; i < cfg.node_count; ++i) {
    for (std::size_t j = i + 1; j < cfg.node_count; ++j) {
      double p;
      if (wired[i] && wired[j])
        p = cfg.connect_prob_wired_wired;
      else if (!wired[i] && !wired[j])
        p = cfg.connect_prob_wireless_wireless;
      else
        p = cfg.connect_prob_wireless_wired;
      if (!rng.bernoulli(p)) continue;
      LinkSpec link;
      link.a = i;
      link.b = j;
      link.transfer_energy =
          (wired[i] && wired[j]) ? cfg.link_energy_wired : cfg.link_energy_wireless;
      net.links.push_back(link);
    }
  }
  net.validate();
  return net;
}

RecipeGraph gen_recipe(const RecipeGenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  RecipeGraph recipe;
  recipe.tasks.reserve(cfg.task_count);
  for (std::size_t i = 0; i < cfg.task_count; ++i) {
    TaskSpec task;
    task.id = "t" + std::to_string(i);
    task.resources = rng.uniform(cfg.resource_range.lo, cfg.resource_range.hi);
    task.output_factor =
        rng.uniform(cfg.output_factor_range.lo, cfg.output_factor_range.hi);
    task.computation_size = cfg.computation_sizes[rng.uniform_int(
        0, static_cast<std::uint64_t>(cfg.computation_sizes.size()) - 1)];
    recipe.tasks.push_back(std::move(task));
  }
  if (cfg.shape == RecipeShape::long_chain) {
    for (std::size_t i = 0; i + 1 < cfg.task_count; ++i)
      recipe.edges.emplace_back(i, i + 1);
  } else {
    const std::size_t last = cfg.task_count - 1;
    for (std::size_t m = 1; m < last; ++m) recipe.edges.emplace_back(0, m);
    for (std::size_t m = 1; m < last; ++m) recipe.edges.emplace_back(m, last);
  }
  recipe.validate();
  return recipe;
}

std::vector<double> gen_heartbeat_trace(const HeartbeatTraceConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<double> arrivals;
  double t = 0.0;
  double segment_start = 0.0;
  for (const auto& seg : cfg.segments) {
    const double segment_end = segment_start + seg.duration;
    const double sd = std::sqrt(seg.variance);
    while (true) {
      double gap;
      do {
        gap = rng.normal(seg.mean, sd);
      } while (!(gap > 0.0));
      const double next = t + gap;
      if (next > segment_end) break;
      arrivals.push_back(next);
      t = next;
    }
    t = segment_end;
    segment_start = segment_end;
  }
  return arrivals;
}

}  // namespace selfheal

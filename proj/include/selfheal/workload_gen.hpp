#pragma once

#include <cstdint>
#include <vector>

#include "selfheal/allocation_model.hpp"

namespace selfheal {

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Random network model: node kinds are Bernoulli draws (wired with
// probability wired_fraction), each unordered node pair is linked
// independently with the probability for that kind pair, and a link costs the
// wireless energy unless both endpoints are wired.
struct NetworkGenConfig {
  std::size_t node_count = 0;
  double wired_fraction = 0.6;
  double connect_prob_wired_wired = 0.8;
  double connect_prob_wireless_wireless = 0.5;
  double connect_prob_wireless_wired = 0.4;
  double link_energy_wired = 0.2;
  double link_energy_wireless = 0.8;
  ValueRange resource_range{1.0, 8.0};
  ValueRange speed_range{1.0, 3.0};
  ValueRange compute_energy_range{0.5, 1.5};
  std::uint64_t seed = 0;

  void validate() const;
};

enum class RecipeShape { wide, long_chain };

std::string to_string(RecipeShape s);
RecipeShape recipe_shape_from_string(const std::string& s);

// Random recipe model. long: tasks linked serially t0 -> t1 -> ... -> tk.
// wide: first task fans out to every middle task, every middle task feeds the
// last task (requires at least 3 tasks).
struct RecipeGenConfig {
  std::size_t task_count = 2;
  RecipeShape shape = RecipeShape::long_chain;
  ValueRange resource_range{1.0, 8.0};
  ValueRange output_factor_range{0.5, 1.5};
  std::vector<double> computation_sizes{1.0, 2.0};
  std::uint64_t seed = 0;

  void validate() const;
};

// Piecewise-normal heartbeat trace: within a segment, inter-arrival times are
// drawn from N(mean, variance) truncated to > 0 by resampling. An arrival
// falling past the segment end is dropped and the clock advances to the
// boundary, so the next segment starts exactly on schedule.
struct TraceSegment {
  double mean = 0.0;      // seconds
  double variance = 0.0;  // seconds^2
  double duration = 0.0;  // seconds
};

struct HeartbeatTraceConfig {
  std::vector<TraceSegment> segments;
  std::uint64_t seed = 0;

  void validate() const;
};

// Draw order is part of the format: per node, kind then resources then
// processing power then compute energy; then each pair (i, j), i < j, in
// lexicographic order. Node ids are "n0".."n{k-1}".
NetworkGraph gen_network(const NetworkGenConfig& cfg);

// Draw order: per task, resources then output factor then computation size.
// Task ids are "t0".."t{k-1}".
RecipeGraph gen_recipe(const RecipeGenConfig& cfg);

// Returns cumulative arrival timestamps starting from time 0 (0 itself is not
// an arrival).
std::vector<double> gen_heartbeat_trace(const HeartbeatTraceConfig& cfg);

}  // namespace selfheal

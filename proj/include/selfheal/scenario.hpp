#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "selfheal/sim_harness.hpp"

#include "json.hpp"

namespace selfheal {

struct SelfHealScenario {
  KnowledgeBase kb;
  SelfHealConfig cfg;
};

// Parsed scenario file. Every section is validated by its owning module;
// unknown keys anywhere are rejected with the offending path. The global seed
// feeds each section's default base seed through mix_seed, so one scenario
// seed pins every derived stream.
struct Scenario {
  int schema_version = 1;
  std::uint64_t seed = 0;
  DetectorConfig detector;
  std::vector<PolicyRule> policy_rules = default_policy_rules();
  std::optional<ThresholdSweepConfig> threshold_sweep;
  std::optional<IntervalSweepConfig> interval_sweep;
  std::optional<WindowSweepConfig> window_sweep;
  std::optional<BenchConfig> bench;
  std::optional<SelfHealScenario> selfheal;
};

Scenario parse_scenario(const nlohmann::json& j,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

// Reads and parses a scenario file; all failures surface as ConfigError.
Scenario load_scenario(const std::string& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace selfheal

#include "doctest.h"

#include <string>

#include "json.hpp"
#include "selfheal/scenario.hpp"

using namespace selfheal;
using nlohmann::json;

namespace {

json minimal() { return json{{"schema_version", 1}}; }

json selfheal_section() {
  return json::parse(R"({
    "network": {
      "version": 1,
      "nodes": [
        {"id": "n0", "processing_power": 1, "resources": 8, "compute_energy": 0.5},
        {"id": "n1", "processing_power": 1, "resources": 8, "compute_energy": 1.0}
      ],
      "links": [{"a": "n0", "b": "n1", "energy": 0.2}]
    },
    "devices": [
      {"id": "n0", "capabilities": ["sense"]},
      {"id": "n1", "capabilities": ["sense"]}
    ],
    "applications": [
      {
        "id": "app",
        "recipe": {
          "version": 1,
          "tasks": [{"id": "t0", "resources": 1, "output_factor": 1, "computation_size": 1}],
          "edges": []
        },
        "required_capabilities": {"t0": "sense"}
      }
    ],
    "events": [{"time": 100.0, "kind": "device_failure", "subject": "n0"}]
  })");
}

std::string error_of(const json& j) {
  try {
    parse_scenario(j);
    return "";
  } catch (const ConfigError& e) {
    return e.what();
  }
}

}  // namespace

TEST_CASE("schema version is mandatory and pinned") {
  CHECK_THROWS_AS(parse_scenario(json::object()), ConfigError);
  CHECK(error_of(json{{"schema_version", 2}}).find("schema_version") !=
        std::string::npos);
  CHECK_NOTHROW(parse_scenario(minimal()));
}

TEST_CASE("unknown keys are rejected with their dotted path") {
  auto j = minimal();
  j["sweeps"] = json::object();
  CHECK(error_of(j).find("unknown key 'sweeps'") != std::string::npos);

  j = minimal();
  j["detector"] = {{"omega_minimum", 5}};
  const auto msg = error_of(j);
  CHECK(msg.find("scenario.detector") != std::string::npos);
  CHECK(msg.find("omega_minimum") != std::string::npos);

  j = minimal();
  j["threshold_sweep"] = {{"before", {{"mean", 20}, {"sd", 5}, {"duration", 100}}}};
  CHECK(error_of(j).find("threshold_sweep.before") != std::string::npos);

  j = minimal();
  j["selfheal"] = selfheal_section();
  j["selfheal"]["events"][0]["device"] = "n0";
  CHECK(error_of(j).find("selfheal.events[0]") != std::string::npos);
}

TEST_CASE("defaults: omitted sweep keys fall back to the reference experiment setup") {
  auto j = minimal();
  j["threshold_sweep"] = json::object();
  j["interval_sweep"] = json::object();
  j["window_sweep"] = json::object();
  const auto sc = parse_scenario(j);

  REQUIRE(sc.threshold_sweep.has_value());
  REQUIRE(sc.threshold_sweep->thresholds.size() == 20);
  CHECK(sc.threshold_sweep->thresholds.front() == doctest::Approx(0.1));
  CHECK(sc.threshold_sweep->thresholds.back() == doctest::Approx(2.0));
  CHECK(sc.threshold_sweep->seed_count == 20);
  CHECK(sc.threshold_sweep->before.mean == 20.0);
  CHECK(sc.threshold_sweep->before.variance == 5.0);
  CHECK(sc.threshold_sweep->before.duration == 3000.0);
  CHECK(sc.threshold_sweep->after.mean == 50.0);

  REQUIRE(sc.interval_sweep.has_value());
  CHECK(sc.interval_sweep->intervals == std::vector<double>{5.0, 10.0, 20.0, 40.0});
  CHECK(sc.interval_sweep->runs == 10);
  CHECK(sc.interval_sweep->detector.omega_max == kNeverReset);
  CHECK(sc.interval_sweep->detector.threshold == 0.8);

  REQUIRE(sc.window_sweep.has_value());
  CHECK(sc.window_sweep->omega_max_values ==
        std::vector<std::size_t>{10, 25, 50, 100, 200});
  REQUIRE(sc.window_sweep->segments.size() == 3);
  CHECK(sc.window_sweep->segments[1].mean == 50.0);
  CHECK(sc.window_sweep->segments[2].duration == 500.0);
}

TEST_CASE("global seed feeds section seeds; the override wins") {
  auto j = minimal();
  j["seed"] = 42;
  j["threshold_sweep"] = json::object();
  const auto a = parse_scenario(j);
  const auto b = parse_scenario(j);
  CHECK(a.threshold_sweep->base_seed == b.threshold_sweep->base_seed);

  const auto c = parse_scenario(j, 43);
  CHECK(c.seed == 43);
  CHECK(c.threshold_sweep->base_seed != a.threshold_sweep->base_seed);

  // explicit section seed is untouched by the global one
  j["threshold_sweep"]["base_seed"] = 7;
  const auto d = parse_scenario(j, 43);
  CHECK(d.threshold_sweep->base_seed == 7);
}

TEST_CASE("detector section overrides and validates") {
  auto j = minimal();
  j["detector"] = {{"omega_min", 4}, {"threshold", 1.1}};
  const auto sc = parse_scenario(j);
  CHECK(sc.detector.omega_min == 4);
  CHECK(sc.detector.threshold == 1.1);
  CHECK(sc.detector.omega_max == 1000);  // untouched default

  j["detector"] = {{"omega_min", 1}};
  CHECK(error_of(j).find("scenario.detector") != std::string::npos);
}

TEST_CASE("policy rules: default keyword or explicit table") {
  auto j = minimal();
  j["policy_rules"] = "default";
  CHECK(parse_scenario(j).policy_rules.size() == default_policy_rules().size());

  j["policy_rules"] = json::array({
      json{{"name", "base"}, {"priority", 0}},
      json{{"name", "hot"},
           {"priority", 5},
           {"match", {{"mobility", "mobile"}}},
           {"adjust", {{"threshold", {{"set", 0.3}}}}}},
  });
  const auto sc = parse_scenario(j);
  REQUIRE(sc.policy_rules.size() == 2);
  CHECK(sc.policy_rules[1].name == "hot");
  REQUIRE(sc.policy_rules[1].threshold.has_value());
  CHECK(sc.policy_rules[1].threshold->mode == FieldAdjust::Mode::set);
  CHECK(sc.policy_rules[1].threshold->value == 0.3);
  REQUIRE(sc.policy_rules[1].match.mobility.has_value());

  j["policy_rules"] = json::array(
      {json{{"name", "bad"}, {"adjust", {{"threshold", {{"set", 1}, {"scale", 2}}}}}}});
  CHECK(error_of(j).find("exactly one of 'set' or 'scale'") != std::string::npos);
}

TEST_CASE("selfheal section builds a validated knowledge base") {
  auto j = minimal();
  j["selfheal"] = selfheal_section();
  const auto sc = parse_scenario(j);
  REQUIRE(sc.selfheal.has_value());
  const auto& kb = sc.selfheal->kb;
  CHECK(kb.net.nodes.size() == 2);
  CHECK(kb.devices[0].capabilities == std::vector<std::string>{"sense"});
  REQUIRE(kb.applications.size() == 1);
  CHECK(kb.applications[0].required_capability ==
        std::vector<std::string>{"sense"});
  REQUIRE(sc.selfheal->cfg.events.size() == 1);
  CHECK(sc.selfheal->cfg.events[0].kind == EventKind::device_failure);

  SUBCASE("every node needs a device entry") {
    j["selfheal"]["devices"].erase(1);
    CHECK(error_of(j).find("device entry") != std::string::npos);
  }
  SUBCASE("duplicate device entries are rejected") {
    j["selfheal"]["devices"][1]["id"] = "n0";
    CHECK(error_of(j).find("duplicate device") != std::string::npos);
  }
  SUBCASE("event subjects must resolve") {
    j["selfheal"]["events"][0]["subject"] = "nX";
    CHECK(error_of(j).find("events[0].subject") != std::string::npos);
  }
  SUBCASE("capability map must cover every task") {
    j["selfheal"]["applications"][0]["required_capabilities"] = json::object();
    CHECK(error_of(j).find("one capability tag per task") != std::string::npos);
  }
  SUBCASE("unsorted events are rejected") {
    auto ev = j["selfheal"]["events"][0];
    ev["time"] = 50.0;
    j["selfheal"]["events"].push_back(ev);  // 100 then 50
    CHECK_THROWS(parse_scenario(j));
  }
}

TEST_CASE("bench section requires its grid") {
  auto j = minimal();
  j["bench"] = json::object();
  CHECK(error_of(j).find("node_counts") != std::string::npos);

  j["bench"] = {{"node_counts", {3, 5}},
                {"task_counts", {3}},
                {"shapes", {"long", "wide"}},
                {"seeds", 2},
                {"budget_seconds", 1.5}};
  const auto sc = parse_scenario(j);
  REQUIRE(sc.bench.has_value());
  CHECK(sc.bench->node_counts == std::vector<std::size_t>{3, 5});
  CHECK(sc.bench->shapes ==
        std::vector<RecipeShape>{RecipeShape::long_chain, RecipeShape::wide});
  REQUIRE(sc.bench->budget.max_seconds.has_value());
  CHECK(*sc.bench->budget.max_seconds == 1.5);
  CHECK_FALSE(sc.bench->budget.max_nodes.has_value());
}

TEST_CASE("load_scenario surfaces file problems as config errors") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), ConfigError);
}

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "selfheal/workload_gen.hpp"

using namespace selfheal;

TEST_CASE("network config validation") {
  NetworkGenConfig cfg;
  cfg.node_count = 3;
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("probability out of range") {
    cfg.wired_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("negative link energy") {
    cfg.link_energy_wired = -0.2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("inverted range") {
    cfg.speed_range = {3.0, 1.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}

TEST_CASE("empty network") {
  NetworkGenConfig cfg;
  cfg.node_count = 0;
  const auto net = gen_network(cfg);
  CHECK(net.nodes.empty());
  CHECK(net.links.empty());
}

TEST_CASE("certain connection probabilities force a complete graph") {
  NetworkGenConfig cfg;
  cfg.node_count = 9;
  cfg.connect_prob_wired_wired = 1.0;
  cfg.connect_prob_wireless_wireless = 1.0;
  cfg.connect_prob_wireless_wired = 1.0;
  cfg.seed = 17;
  const auto net = gen_network(cfg);
  CHECK(net.links.size() == 9 * 8 / 2);
  CHECK_NOTHROW(net.validate());
}

TEST_CASE("node kinds follow the wired fraction over many draws") {
  NetworkGenConfig cfg;
  cfg.node_count = 10000;
  // Suppress links to keep the instance light; kind draws are unaffected.
  cfg.connect_prob_wired_wired = 0.0;
  cfg.connect_prob_wireless_wireless = 0.0;
  cfg.connect_prob_wireless_wired = 0.0;
  cfg.seed = 2024;
  const auto net = gen_network(cfg);
  std::size_t wired = 0;
  for (const auto& n : net.nodes)
    if (n.profile.link == LinkKind::wired) ++wired;
  const double fraction = static_cast<double>(wired) / 10000.0;
  CHECK(std::abs(fraction - 0.6) <= 0.02);
}

TEST_CASE("wired nodes are mains-powered and stationary, wireless on battery") {
  NetworkGenConfig cfg;
  cfg.node_count = 200;
  cfg.seed = 5;
  const auto net = gen_network(cfg);
  for (const auto& n : net.nodes) {
    if (n.profile.link == LinkKind::wired) {
      CHECK(n.profile.power == PowerKind::mains);
    } else {
      CHECK(n.profile.power == PowerKind::battery);
    }
    CHECK(n.profile.mobility == Mobility::stationary);
  }
}

TEST_CASE("link energy depends on both endpoints being wired") {
  NetworkGenConfig cfg;
  cfg.node_count = 60;
  cfg.connect_prob_wired_wired = 1.0;
  cfg.connect_prob_wireless_wireless = 1.0;
  cfg.connect_prob_wireless_wired = 1.0;
  cfg.seed = 99;
  const auto net = gen_network(cfg);
  for (const auto& l : net.links) {
    const bool both_wired =
        net.nodes[l.a].profile.link == LinkKind::wired &&
        net.nodes[l.b].profile.link == LinkKind::wired;
    CHECK(l.transfer_energy == (both_wired ? 0.2 : 0.8));
  }
}

TEST_CASE("node parameters land in their configured ranges") {
  NetworkGenConfig cfg;
  cfg.node_count = 500;
  cfg.seed = 3;
  const auto net = gen_network(cfg);
  for (const auto& n : net.nodes) {
    CHECK(n.resources >= 1.0);
    CHECK(n.resources <= 8.0);
    CHECK(n.processing_power >= 1.0);
    CHECK(n.processing_power <= 3.0);
    CHECK(n.compute_energy >= 0.5);
    CHECK(n.compute_energy <= 1.5);
  }
  CHECK(net.nodes[0].id == "n0");
  CHECK(net.nodes[499].id == "n499");
}

TEST_CASE("parameter means match range midpoints over many draws") {
  NetworkGenConfig cfg;
  cfg.node_count = 10000;
  cfg.connect_prob_wired_wired = 0.0;
  cfg.connect_prob_wireless_wireless = 0.0;
  cfg.connect_prob_wireless_wired = 0.0;
  cfg.seed = 88;
  const auto net = gen_network(cfg);
  double res = 0, speed = 0, energy = 0;
  for (const auto& n : net.nodes) {
    res += n.resources;
    speed += n.processing_power;
    energy += n.compute_energy;
  }
  const double count = static_cast<double>(net.nodes.size());
  CHECK(res / count == doctest::Approx(4.5).epsilon(0.02));
  CHECK(speed / count == doctest::Approx(2.0).epsilon(0.02));
  CHECK(energy / count == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("recipe shapes") {
  RecipeGenConfig cfg;
  cfg.seed = 1;

  SUBCASE("long chain of 4 tasks has 3 path edges") {
    cfg.task_count = 4;
    cfg.shape = RecipeShape::long_chain;
    const auto r = gen_recipe(cfg);
    REQUIRE(r.tasks.size() == 4);
    REQUIRE(r.edges.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(r.edges[i] == std::make_pair(i, i + 1));
  }

  SUBCASE("long chain of 2 tasks has 1 edge") {
    cfg.task_count = 2;
    const auto r = gen_recipe(cfg);
    CHECK(r.edges.size() == 1);
  }

  SUBCASE("wide recipe of 5 tasks fans out and back in") {
    cfg.task_count = 5;
    cfg.shape = RecipeShape::wide;
    const auto r = gen_recipe(cfg);
    REQUIRE(r.tasks.size() == 5);
    REQUIRE(r.edges.size() == 6);  // 3 middles x (in + out)
    const std::size_t last = 4;
    for (std::size_t m = 1; m < last; ++m) {
      CHECK(std::count(r.edges.begin(), r.edges.end(), std::make_pair(std::size_t{0}, m)) == 1);
      CHECK(std::count(r.edges.begin(), r.edges.end(), std::make_pair(m, last)) == 1);
    }
  }

  SUBCASE("wide recipe needs at least 3 tasks") {
    cfg.task_count = 2;
    cfg.shape = RecipeShape::wide;
    CHECK_THROWS_AS(cfg.validate(), ShapeError);
    CHECK_THROWS_AS(gen_recipe(cfg), ShapeError);
  }

  SUBCASE("task parameters respect config") {
    cfg.task_count = 300;
    cfg.shape = RecipeShape::long_chain;
    const auto r = gen_recipe(cfg);
    for (const auto& t : r.tasks) {
      CHECK(t.resources >= 1.0);
      CHECK(t.resources <= 8.0);
      CHECK(t.output_factor >= 0.5);
      CHECK(t.output_factor <= 1.5);
      CHECK((t.computation_size == 1.0 || t.computation_size == 2.0));
    }
    CHECK(r.tasks[0].id == "t0");
  }
}

TEST_CASE("recipe shape names round-trip") {
  CHECK(recipe_shape_from_string(to_string(RecipeShape::wide)) == RecipeShape::wide);
  CHECK(recipe_shape_from_string("long") == RecipeShape::long_chain);
  CHECK_THROWS_AS(recipe_shape_from_string("diamond"), ConfigError);
}

TEST_CASE("zero-variance trace is an exact arithmetic progression") {
  HeartbeatTraceConfig cfg;
  cfg.segments = {{20.0, 0.0, 100.0}};
  const auto trace = gen_heartbeat_trace(cfg);
  CHECK(trace == std::vector<double>{20.0, 40.0, 60.0, 80.0, 100.0});
}

TEST_CASE("empty segment list yields an empty trace") {
  HeartbeatTraceConfig cfg;
  CHECK(gen_heartbeat_trace(cfg).empty());
}

TEST_CASE("segmented trace approximates the expected arrival count") {
  // Mean gaps 20 s for 1000 s, 50 s for 1000 s, 20 s for 500 s:
  // about 50 + 20 + 25 = 95 arrivals.
  HeartbeatTraceConfig cfg;
  cfg.segments = {{20.0, 1.0, 1000.0}, {50.0, 1.0, 1000.0}, {20.0, 1.0, 500.0}};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    const auto trace = gen_heartbeat_trace(cfg);
    CHECK(trace.size() >= 90);
    CHECK(trace.size() <= 100);
    CHECK(std::is_sorted(trace.begin(), trace.end()));
    CHECK(trace.back() <= 2500.0 + 1e-9);
  }
}

TEST_CASE("arrivals are strictly increasing and positive") {
  HeartbeatTraceConfig cfg;
  cfg.segments = {{5.0, 25.0, 400.0}, {2.0, 9.0, 200.0}};
  cfg.seed = 41;
  const auto trace = gen_heartbeat_trace(cfg);
  REQUIRE_FALSE(trace.empty());
  CHECK(trace.front() > 0.0);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] > trace[i - 1]);
}

TEST_CASE("trace validation") {
  HeartbeatTraceConfig cfg;
  cfg.segments = {{-1.0, 1.0, 100.0}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.segments = {{20.0, 1.0, 0.0}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.segments = {{20.0, -1.0, 100.0}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("generators are seed-deterministic") {
  NetworkGenConfig ncfg;
  ncfg.node_count = 40;
  ncfg.seed = 1234;
  const auto n1 = gen_network(ncfg);
  const auto n2 = gen_network(ncfg);
  CHECK(n1.to_json() == n2.to_json());
  ncfg.seed = 1235;
  CHECK(gen_network(ncfg).to_json() != n1.to_json());

  RecipeGenConfig rcfg;
  rcfg.task_count = 12;
  rcfg.seed = 77;
  CHECK(gen_recipe(rcfg).to_json() == gen_recipe(rcfg).to_json());

  HeartbeatTraceConfig tcfg;
  tcfg.segments = {{20.0, 5.0, 3000.0}};
  tcfg.seed = 9;
  CHECK(gen_heartbeat_trace(tcfg) == gen_heartbeat_trace(tcfg));
}

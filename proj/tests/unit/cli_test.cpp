#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "selfheal-cli-XXXXXX").string();
    path = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

int run_cli(const std::string& args) {
  const char* bin = std::getenv("SELFHEAL_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "SELFHEAL_CLI must point at the binary");
  const std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file " + p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSweepScenario = R"({
  "schema_version": 1,
  "seed": 7,
  "threshold_sweep": {
    "thresholds": [0.5, 1.0],
    "seeds": 3,
    "before": {"mean": 20, "variance": 5, "duration": 400},
    "after": {"mean": 50, "variance": 5, "duration": 400}
  }
})";

json two_node_network() {
  return json::parse(R"({
    "version": 1,
    "nodes": [
      {"id": "n0", "processing_power": 2, "resources": 4, "compute_energy": 0.5},
      {"id": "n1", "processing_power": 1, "resources": 4, "compute_energy": 1.0}
    ],
    "links": [{"a": "n0", "b": "n1", "energy": 0.2}]
  })");
}

json chain_recipe(std::size_t tasks, double resources = 1.0) {
  json j{{"version", 1}, {"tasks", json::array()}, {"edges", json::array()}};
  for (std::size_t t = 0; t < tasks; ++t) {
    j["tasks"].push_back({{"id", "t" + std::to_string(t)},
                          {"resources", resources},
                          {"output_factor", 1.0},
                          {"computation_size", 1.0}});
    if (t > 0)
      j["edges"].push_back({"t" + std::to_string(t - 1), "t" + std::to_string(t)});
  }
  return j;
}

}  // namespace

TEST_CASE("cli: bad invocations exit with the config code") {
  CHECK(run_cli("") == 2);                      // subcommand required
  CHECK(run_cli("fd-sweep --kind threshold") == 2);  // missing required options
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli: missing scenario file fails without leaving output") {
  TempDir dir;
  const fs::path out = dir.path / "rows.csv";
  CHECK(run_cli("fd-sweep --kind threshold --scenario " +
                (dir.path / "nope.json").string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("cli: fd-sweep output is byte-stable across reruns and jobs") {
  TempDir dir;
  const fs::path scen = dir.path / "scenario.json";
  write_file(scen, kSweepScenario);
  const fs::path out1 = dir.path / "a.csv";
  const fs::path out2 = dir.path / "b.csv";

  REQUIRE(run_cli("fd-sweep --kind threshold --scenario " + scen.string() +
                  " --out " + out1.string()) == 0);
  REQUIRE(run_cli("fd-sweep --kind threshold --scenario " + scen.string() +
                  " --out " + out2.string() + " --jobs 3") == 0);

  const std::string a = read_file(out1);
  CHECK(a == read_file(out2));
  CHECK(a.rfind("threshold,seed,detection_time_s,mistake_rate\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 2 * 3);

  // a different seed changes the rows
  const fs::path out3 = dir.path / "c.csv";
  REQUIRE(run_cli("fd-sweep --kind threshold --scenario " + scen.string() +
                  " --out " + out3.string() + " --seed 8") == 0);
  CHECK(a != read_file(out3));
}

TEST_CASE("cli: allocate solves and reports per solver") {
  TempDir dir;
  const fs::path recipe = dir.path / "recipe.json";
  const fs::path network = dir.path / "network.json";
  write_file(recipe, chain_recipe(3).dump());
  write_file(network, two_node_network().dump());

  const fs::path exact_out = dir.path / "exact.json";
  const fs::path brute_out = dir.path / "brute.json";
  const fs::path heur_out = dir.path / "heur.json";
  const std::string base = "allocate --recipe " + recipe.string() + " --network " +
                           network.string() + " --out ";
  REQUIRE(run_cli(base + exact_out.string() + " --solver exact") == 0);
  REQUIRE(run_cli(base + brute_out.string() + " --solver brute") == 0);
  REQUIRE(run_cli(base + heur_out.string() + " --solver heuristic") == 0);

  const json je = json::parse(read_file(exact_out));
  const json jb = json::parse(read_file(brute_out));
  const json jh = json::parse(read_file(heur_out));
  CHECK(je.at("status") == "proven_optimal");
  CHECK(jb.at("status") == "proven_optimal");
  CHECK(jh.at("status") == "feasible_heuristic");
  CHECK(je.at("energy").at("total_energy").get<double>() ==
        jb.at("energy").at("total_energy").get<double>());
  CHECK(je.at("allocation") == jb.at("allocation"));
  CHECK(jh.at("energy").at("total_energy").get<double>() >=
        je.at("energy").at("total_energy").get<double>());
}

TEST_CASE("cli: infeasible instance exits 3 with a feasibility report") {
  TempDir dir;
  const fs::path recipe = dir.path / "recipe.json";
  const fs::path network = dir.path / "network.json";
  write_file(recipe, chain_recipe(2, 99.0).dump());  // no node can host these
  write_file(network, two_node_network().dump());
  const fs::path out = dir.path / "alloc.json";

  CHECK(run_cli("allocate --recipe " + recipe.string() + " --network " +
                network.string() + " --out " + out.string()) == 3);
  const json j = json::parse(read_file(out));
  CHECK(j.at("status") == "infeasible");
  REQUIRE(!j.at("feasibility").empty());
  CHECK(j.at("feasibility")[0].at("kind") == "resources");
}

TEST_CASE("cli: exhausted time budget exits 4 but keeps the incumbent") {
  TempDir dir;
  const fs::path recipe = dir.path / "recipe.json";
  const fs::path network = dir.path / "network.json";
  write_file(recipe, chain_recipe(7).dump());
  auto net = two_node_network();
  for (int n = 2; n < 7; ++n) {  // widen so the search cannot finish instantly
    net["nodes"].push_back({{"id", "n" + std::to_string(n)},
                            {"processing_power", 1.0},
                            {"resources", 4.0},
                            {"compute_energy", 1.0}});
    net["links"].push_back({{"a", "n0"}, {"b", "n" + std::to_string(n)}, {"energy", 0.3}});
  }
  write_file(network, net.dump());
  const fs::path out = dir.path / "alloc.json";

  CHECK(run_cli("allocate --recipe " + recipe.string() + " --network " +
                network.string() + " --out " + out.string() +
                " --time-budget 1e-9") == 4);
  const json j = json::parse(read_file(out));
  CHECK(j.at("status") == "resource_limit");
  CHECK(j.at("allocation").is_array());  // heuristic incumbent survives
}

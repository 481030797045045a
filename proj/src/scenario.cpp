#include "selfheal/scenario.hpp"

#include <fstream>
#include <set>

#include "selfheal/errors.hpp"
#include "selfheal/rng.hpp"

namespace selfheal {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  expect_object(j, path);
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) fail(path, "unknown key '" + key + "'");
  }
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::size_t as_size(const json& j, const std::string& path) {
  return static_cast<std::size_t>(as_u64(j, path));
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

ValueRange as_range(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
  return {as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]")};
}

TraceSegment parse_segment(const json& j, const std::string& path) {
  check_keys(j, path, {"mean", "variance", "duration"});
  TraceSegment s;
  if (!j.contains("mean")) fail(path, "missing 'mean'");
  if (!j.contains("duration")) fail(path, "missing 'duration'");
  s.mean = as_double(j.at("mean"), path + ".mean");
  s.variance = j.contains("variance") ? as_double(j.at("variance"), path + ".variance") : 0.0;
  s.duration = as_double(j.at("duration"), path + ".duration");
  return s;
}

DetectorConfig parse_detector(const json& j, const std::string& path,
                              const DetectorConfig& base) {
  check_keys(j, path, {"omega_min", "omega_max", "heartbeat_period", "threshold"});
  DetectorConfig d = base;
  if (j.contains("omega_min"))
    d.omega_min = static_cast<std::uint32_t>(as_u64(j.at("omega_min"), path + ".omega_min"));
  if (j.contains("omega_max"))
    d.omega_max = static_cast<std::uint32_t>(as_u64(j.at("omega_max"), path + ".omega_max"));
  if (j.contains("heartbeat_period"))
    d.heartbeat_period = as_double(j.at("heartbeat_period"), path + ".heartbeat_period");
  if (j.contains("threshold"))
    d.threshold = as_double(j.at("threshold"), path + ".threshold");
  try {
    d.validate();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return d;
}

FieldAdjust parse_adjust(const json& j, const std::string& path) {
  check_keys(j, path, {"set", "scale"});
  const bool has_set = j.contains("set");
  const bool has_scale = j.contains("scale");
  if (has_set == has_scale) fail(path, "expected exactly one of 'set' or 'scale'");
  FieldAdjust a;
  a.mode = has_set ? FieldAdjust::Mode::set : FieldAdjust::Mode::scale;
  a.value = as_double(has_set ? j.at("set") : j.at("scale"),
                      path + (has_set ? ".set" : ".scale"));
  return a;
}

std::vector<PolicyRule> parse_policy_rules(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "default") return default_policy_rules();
    fail(path, "expected \"default\" or an array of rules");
  }
  if (!j.is_array()) fail(path, "expected \"default\" or an array of rules");
  std::vector<PolicyRule> rules;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    const json& jr = j[i];
    check_keys(jr, rp, {"name", "priority", "match", "adjust"});
    PolicyRule rule;
    if (!jr.contains("name")) fail(rp, "missing 'name'");
    rule.name = as_string(jr.at("name"), rp + ".name");
    if (jr.contains("priority")) {
      if (!jr.at("priority").is_number_integer()) fail(rp + ".priority", "expected an integer");
      rule.priority = jr.at("priority").get<int>();
    }
    if (jr.contains("match")) {
      const json& jm = jr.at("match");
      const std::string mp = rp + ".match";
      check_keys(jm, mp,
                 {"link", "power", "mobility", "replacement_available",
                  "central_to_application"});
      if (jm.contains("link"))
        rule.match.link = link_kind_from_string(as_string(jm.at("link"), mp + ".link"));
      if (jm.contains("power"))
        rule.match.power =
            power_kind_from_string(as_string(jm.at("power"), mp + ".power"));
      if (jm.contains("mobility"))
        rule.match.mobility =
            mobility_from_string(as_string(jm.at("mobility"), mp + ".mobility"));
      if (jm.contains("replacement_available"))
        rule.match.replacement_available =
            as_bool(jm.at("replacement_available"), mp + ".replacement_available");
      if (jm.contains("central_to_application"))
        rule.match.central_to_application =
            as_bool(jm.at("central_to_application"), mp + ".central_to_application");
    }
    if (jr.contains("adjust")) {
      const json& ja = jr.at("adjust");
      const std::string ap = rp + ".adjust";
      check_keys(ja, ap, {"omega_min", "omega_max", "heartbeat_period", "threshold"});
      if (ja.contains("omega_min"))
        rule.omega_min = parse_adjust(ja.at("omega_min"), ap + ".omega_min");
      if (ja.contains("omega_max"))
        rule.omega_max = parse_adjust(ja.at("omega_max"), ap + ".omega_max");
      if (ja.contains("heartbeat_period"))
        rule.heartbeat_period =
            parse_adjust(ja.at("heartbeat_period"), ap + ".heartbeat_period");
      if (ja.contains("threshold"))
        rule.threshold = parse_adjust(ja.at("threshold"), ap + ".threshold");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

DetectionOptions parse_detection_options(const json& j, const std::string& path,
                                         bool* saw_any = nullptr) {
  DetectionOptions opts;
  if (j.contains("sampling_interval")) {
    opts.sampling_interval =
        as_double(j.at("sampling_interval"), path + ".sampling_interval");
    if (saw_any) *saw_any = true;
  }
  if (j.contains("post_trace_horizon")) {
    opts.post_trace_horizon =
        as_double(j.at("post_trace_horizon"), path + ".post_trace_horizon");
    if (saw_any) *saw_any = true;
  }
  return opts;
}

ThresholdSweepConfig parse_threshold_sweep(const json& j, const Scenario& sc) {
  const std::string path = "threshold_sweep";
  check_keys(j, path,
             {"thresholds", "seeds", "base_seed", "before", "after",
              "sampling_interval", "post_trace_horizon", "detector"});
  ThresholdSweepConfig cfg;
  cfg.detector = sc.detector;
  if (j.contains("detector"))
    cfg.detector = parse_detector(j.at("detector"), path + ".detector", sc.detector);
  if (j.contains("thresholds")) {
    cfg.thresholds.clear();
    const json& ja = j.at("thresholds");
    if (!ja.is_array()) fail(path + ".thresholds", "expected an array");
    for (std::size_t i = 0; i < ja.size(); ++i)
      cfg.thresholds.push_back(
          as_double(ja[i], path + ".thresholds[" + std::to_string(i) + "]"));
  } else {
    for (int i = 1; i <= 20; ++i)
      cfg.thresholds.push_back(static_cast<double>(i) / 10.0);
  }
  cfg.seed_count = j.contains("seeds") ? as_size(j.at("seeds"), path + ".seeds") : 20;
  cfg.base_seed = j.contains("base_seed") ? as_u64(j.at("base_seed"), path + ".base_seed")
                                          : mix_seed(sc.seed, 1);
  if (j.contains("before")) cfg.before = parse_segment(j.at("before"), path + ".before");
  if (j.contains("after")) cfg.after = parse_segment(j.at("after"), path + ".after");
  cfg.detection = parse_detection_options(j, path);
  cfg.validate();
  return cfg;
}

IntervalSweepConfig parse_interval_sweep(const json& j, const Scenario& sc) {
  const std::string path = "interval_sweep";
  check_keys(j, path,
             {"intervals", "runs", "base_seed", "variance", "duration",
              "sampling_interval", "post_trace_horizon", "detector"});
  IntervalSweepConfig cfg;
  cfg.detector = sc.detector;
  cfg.detector.omega_max = kNeverReset;  // paper setup: no learning-window reset
  if (j.contains("detector"))
    cfg.detector = parse_detector(j.at("detector"), path + ".detector", cfg.detector);
  if (j.contains("intervals")) {
    cfg.intervals.clear();
    const json& ja = j.at("intervals");
    if (!ja.is_array()) fail(path + ".intervals", "expected an array");
    for (std::size_t i = 0; i < ja.size(); ++i)
      cfg.intervals.push_back(
          as_double(ja[i], path + ".intervals[" + std::to_string(i) + "]"));
  }
  if (j.contains("runs")) cfg.runs = as_size(j.at("runs"), path + ".runs");
  cfg.base_seed = j.contains("base_seed") ? as_u64(j.at("base_seed"), path + ".base_seed")
                                          : mix_seed(sc.seed, 2);
  if (j.contains("variance")) cfg.variance = as_double(j.at("variance"), path + ".variance");
  if (j.contains("duration")) cfg.duration = as_double(j.at("duration"), path + ".duration");
  cfg.detection = parse_detection_options(j, path);
  cfg.validate();
  return cfg;
}

WindowSweepConfig parse_window_sweep(const json& j, const Scenario& sc) {
  const std::string path = "window_sweep";
  check_keys(j, path,
             {"omega_max", "seeds", "base_seed", "segments", "threshold",
              "heartbeat_period", "omega_min_cap", "sampling_interval",
              "post_trace_horizon"});
  WindowSweepConfig cfg;
  cfg.threshold = sc.detector.threshold;
  cfg.heartbeat_period = sc.detector.heartbeat_period;
  if (j.contains("omega_max")) {
    cfg.omega_max_values.clear();
    const json& ja = j.at("omega_max");
    if (!ja.is_array()) fail(path + ".omega_max", "expected an array");
    for (std::size_t i = 0; i < ja.size(); ++i)
      cfg.omega_max_values.push_back(
          as_size(ja[i], path + ".omega_max[" + std::to_string(i) + "]"));
  }
  cfg.seed_count = j.contains("seeds") ? as_size(j.at("seeds"), path + ".seeds") : 20;
  cfg.base_seed = j.contains("base_seed") ? as_u64(j.at("base_seed"), path + ".base_seed")
                                          : mix_seed(sc.seed, 3);
  if (j.contains("segments")) {
    cfg.segments.clear();
    const json& ja = j.at("segments");
    if (!ja.is_array()) fail(path + ".segments", "expected an array");
    for (std::size_t i = 0; i < ja.size(); ++i)
      cfg.segments.push_back(
          parse_segment(ja[i], path + ".segments[" + std::to_string(i) + "]"));
  }
  if (j.contains("threshold"))
    cfg.threshold = as_double(j.at("threshold"), path + ".threshold");
  if (j.contains("heartbeat_period"))
    cfg.heartbeat_period = as_double(j.at("heartbeat_period"), path + ".heartbeat_period");
  if (j.contains("omega_min_cap"))
    cfg.omega_min_cap = as_size(j.at("omega_min_cap"), path + ".omega_min_cap");
  cfg.detection = parse_detection_options(j, path);
  cfg.validate();
  return cfg;
}

NetworkGenConfig parse_network_gen(const json& j, const std::string& path) {
  check_keys(j, path,
             {"wired_fraction", "connect_prob", "link_energy", "resource_range",
              "speed_range", "compute_energy_range"});
  NetworkGenConfig cfg;
  if (j.contains("wired_fraction"))
    cfg.wired_fraction = as_double(j.at("wired_fraction"), path + ".wired_fraction");
  if (j.contains("connect_prob")) {
    const json& jp = j.at("connect_prob");
    const std::string pp = path + ".connect_prob";
    check_keys(jp, pp, {"wired_wired", "wireless_wireless", "wireless_wired"});
    if (jp.contains("wired_wired"))
      cfg.connect_prob_wired_wired = as_double(jp.at("wired_wired"), pp + ".wired_wired");
    if (jp.contains("wireless_wireless"))
      cfg.connect_prob_wireless_wireless =
          as_double(jp.at("wireless_wireless"), pp + ".wireless_wireless");
    if (jp.contains("wireless_wired"))
      cfg.connect_prob_wireless_wired =
          as_double(jp.at("wireless_wired"), pp + ".wireless_wired");
  }
  if (j.contains("link_energy")) {
    const json& jp = j.at("link_energy");
    const std::string pp = path + ".link_energy";
    check_keys(jp, pp, {"wired", "wireless"});
    if (jp.contains("wired")) cfg.link_energy_wired = as_double(jp.at("wired"), pp + ".wired");
    if (jp.contains("wireless"))
      cfg.link_energy_wireless = as_double(jp.at("wireless"), pp + ".wireless");
  }
  if (j.contains("resource_range"))
    cfg.resource_range = as_range(j.at("resource_range"), path + ".resource_range");
  if (j.contains("speed_range"))
    cfg.speed_range = as_range(j.at("speed_range"), path + ".speed_range");
  if (j.contains("compute_energy_range"))
    cfg.compute_energy_range =
        as_range(j.at("compute_energy_range"), path + ".compute_energy_range");
  return cfg;
}

RecipeGenConfig parse_recipe_gen(const json& j, const std::string& path) {
  check_keys(j, path, {"resource_range", "output_factor_range", "computation_sizes"});
  RecipeGenConfig cfg;
  if (j.contains("resource_range"))
    cfg.resource_range = as_range(j.at("resource_range"), path + ".resource_range");
  if (j.contains("output_factor_range"))
    cfg.output_factor_range =
        as_range(j.at("output_factor_range"), path + ".output_factor_range");
  if (j.contains("computation_sizes")) {
    cfg.computation_sizes.clear();
    const json& ja = j.at("computation_sizes");
    if (!ja.is_array()) fail(path + ".computation_sizes", "expected an array");
    for (std::size_t i = 0; i < ja.size(); ++i)
      cfg.computation_sizes.push_back(
          as_double(ja[i], path + ".computation_sizes[" + std::to_string(i) + "]"));
  }
  return cfg;
}

BenchConfig parse_bench(const json& j, const Scenario& sc) {
  const std::string path = "bench";
  check_keys(j, path,
             {"node_counts", "task_counts", "shapes", "seeds", "solvers",
              "budget_seconds", "budget_nodes", "base_seed", "network", "recipe"});
  BenchConfig cfg;
  const auto parse_size_list = [&](const char* key, std::vector<std::size_t>& out) {
    if (!j.contains(key)) return;
    const json& ja = j.at(key);
    if (!ja.is_array()) fail(path + "." + key, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < ja.size(); ++i)
      out.push_back(as_size(ja[i], path + "." + key + "[" + std::to_string(i) + "]"));
  };
  parse_size_list("node_counts", cfg.node_counts);
  parse_size_list("task_counts", cfg.task_counts);
  if (j.contains("shapes")) {
    const json& ja = j.at("shapes");
    if (!ja.is_array()) fail(path + ".shapes", "expected an array");
    cfg.shapes.clear();
    for (std::size_t i = 0; i < ja.size(); ++i)
      cfg.shapes.push_back(recipe_shape_from_string(
          as_string(ja[i], path + ".shapes[" + std::to_string(i) + "]")));
  }
  if (j.contains("seeds")) cfg.seed_count = as_size(j.at("seeds"), path + ".seeds");
  if (j.contains("solvers")) {
    const json& ja = j.at("solvers");
    if (!ja.is_array()) fail(path + ".solvers", "expected an array");
    cfg.solvers.clear();
    for (std::size_t i = 0; i < ja.size(); ++i)
      cfg.solvers.push_back(as_string(ja[i], path + ".solvers[" + std::to_string(i) + "]"));
  }
  if (j.contains("budget_seconds"))
    cfg.budget.max_seconds = as_double(j.at("budget_seconds"), path + ".budget_seconds");
  if (j.contains("budget_nodes"))
    cfg.budget.max_nodes = as_u64(j.at("budget_nodes"), path + ".budget_nodes");
  cfg.base_seed = j.contains("base_seed") ? as_u64(j.at("base_seed"), path + ".base_seed")
                                          : mix_seed(sc.seed, 4);
  if (j.contains("network")) cfg.network = parse_network_gen(j.at("network"), path + ".network");
  if (j.contains("recipe")) cfg.recipe = parse_recipe_gen(j.at("recipe"), path + ".recipe");
  if (cfg.node_counts.empty()) fail(path, "missing 'node_counts'");
  if (cfg.task_counts.empty()) fail(path, "missing 'task_counts'");
  cfg.validate();
  return cfg;
}

EventKind event_kind_from_string(const std::string& s, const std::string& path) {
  if (s == "heartbeat") return EventKind::heartbeat;
  if (s == "device_failure") return EventKind::device_failure;
  if (s == "distribution_change") return EventKind::distribution_change;
  fail(path, "unknown event kind '" + s + "'");
}

SelfHealScenario parse_selfheal(const json& j, const Scenario& sc) {
  const std::string path = "selfheal";
  check_keys(j, path,
             {"network", "devices", "applications", "events", "sampling_interval",
              "duration", "heartbeat_jitter_variance", "solver_budget_seconds",
              "solver_budget_nodes", "seed"});
  SelfHealScenario out;
  if (!j.contains("network")) fail(path, "missing 'network'");
  try {
    out.kb.net = NetworkGraph::from_json(j.at("network"));
  } catch (const ConfigError& e) {
    fail(path + ".network", e.what());
  }
  out.kb.devices.assign(out.kb.net.nodes.size(), DeviceMeta{});

  if (!j.contains("devices")) fail(path, "missing 'devices'");
  const json& jd = j.at("devices");
  if (!jd.is_array()) fail(path + ".devices", "expected an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < jd.size(); ++i) {
    const std::string dp = path + ".devices[" + std::to_string(i) + "]";
    check_keys(jd[i], dp, {"id", "capabilities", "alive"});
    if (!jd[i].contains("id")) fail(dp, "missing 'id'");
    const std::string id = as_string(jd[i].at("id"), dp + ".id");
    if (!seen.insert(id).second) fail(dp, "duplicate device '" + id + "'");
    std::size_t idx;
    try {
      idx = out.kb.net.node_index(id);
    } catch (const ConfigError& e) {
      fail(dp, e.what());
    }
    if (jd[i].contains("capabilities")) {
      const json& jc = jd[i].at("capabilities");
      if (!jc.is_array()) fail(dp + ".capabilities", "expected an array");
      for (std::size_t c = 0; c < jc.size(); ++c)
        out.kb.devices[idx].capabilities.push_back(
            as_string(jc[c], dp + ".capabilities[" + std::to_string(c) + "]"));
    }
    if (jd[i].contains("alive"))
      out.kb.devices[idx].alive = as_bool(jd[i].at("alive"), dp + ".alive");
  }
  if (seen.size() != out.kb.net.nodes.size())
    fail(path + ".devices", "every network node needs a device entry");

  if (!j.contains("applications")) fail(path, "missing 'applications'");
  const json& ja = j.at("applications");
  if (!ja.is_array()) fail(path + ".applications", "expected an array");
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const std::string apath = path + ".applications[" + std::to_string(i) + "]";
    check_keys(ja[i], apath, {"id", "recipe", "required_capabilities"});
    ApplicationEntry app;
    if (!ja[i].contains("id")) fail(apath, "missing 'id'");
    app.id = as_string(ja[i].at("id"), apath + ".id");
    if (!ja[i].contains("recipe")) fail(apath, "missing 'recipe'");
    try {
      app.recipe = RecipeGraph::from_json(ja[i].at("recipe"));
    } catch (const ConfigError& e) {
      fail(apath + ".recipe", e.what());
    }
    if (!ja[i].contains("required_capabilities"))
      fail(apath, "missing 'required_capabilities'");
    const json& jr = ja[i].at("required_capabilities");
    expect_object(jr, apath + ".required_capabilities");
    app.required_capability.assign(app.recipe.tasks.size(), "");
    std::size_t filled = 0;
    for (const auto& [task_id, tag] : jr.items()) {
      std::size_t t;
      try {
        t = app.recipe.task_index(task_id);
      } catch (const ConfigError& e) {
        fail(apath + ".required_capabilities", e.what());
      }
      app.required_capability[t] =
          as_string(tag, apath + ".required_capabilities." + task_id);
      ++filled;
    }
    if (filled != app.recipe.tasks.size())
      fail(apath + ".required_capabilities", "one capability tag per task expected");
    out.kb.applications.push_back(std::move(app));
  }

  out.cfg.policy_rules = sc.policy_rules;
  out.cfg.base_detector = sc.detector;
  out.cfg.seed = j.contains("seed") ? as_u64(j.at("seed"), path + ".seed")
                                    : mix_seed(sc.seed, 5);
  if (j.contains("sampling_interval"))
    out.cfg.sampling_interval = as_double(j.at("sampling_interval"), path + ".sampling_interval");
  if (j.contains("duration"))
    out.cfg.duration = as_double(j.at("duration"), path + ".duration");
  if (j.contains("heartbeat_jitter_variance"))
    out.cfg.heartbeat_jitter_variance =
        as_double(j.at("heartbeat_jitter_variance"), path + ".heartbeat_jitter_variance");
  if (j.contains("solver_budget_seconds"))
    out.cfg.solver_budget.max_seconds =
        as_double(j.at("solver_budget_seconds"), path + ".solver_budget_seconds");
  if (j.contains("solver_budget_nodes"))
    out.cfg.solver_budget.max_nodes =
        as_u64(j.at("solver_budget_nodes"), path + ".solver_budget_nodes");

  if (j.contains("events")) {
    const json& je = j.at("events");
    if (!je.is_array()) fail(path + ".events", "expected an array");
    for (std::size_t i = 0; i < je.size(); ++i) {
      const std::string ep = path + ".events[" + std::to_string(i) + "]";
      check_keys(je[i], ep, {"time", "kind", "subject", "period"});
      ScenarioEvent ev;
      if (!je[i].contains("time")) fail(ep, "missing 'time'");
      if (!je[i].contains("kind")) fail(ep, "missing 'kind'");
      if (!je[i].contains("subject")) fail(ep, "missing 'subject'");
      ev.time = as_double(je[i].at("time"), ep + ".time");
      ev.kind = event_kind_from_string(as_string(je[i].at("kind"), ep + ".kind"), ep + ".kind");
      ev.subject = as_string(je[i].at("subject"), ep + ".subject");
      try {
        out.kb.net.node_index(ev.subject);
      } catch (const ConfigError& e) {
        fail(ep + ".subject", e.what());
      }
      if (je[i].contains("period"))
        ev.new_period = as_double(je[i].at("period"), ep + ".period");
      out.cfg.events.push_back(std::move(ev));
    }
  }

  out.cfg.validate();
  out.kb.validate();
  return out;
}

}  // namespace

Scenario parse_scenario(const nlohmann::json& j,
                        std::optional<std::uint64_t> seed_override) {
  check_keys(j, "scenario",
             {"schema_version", "seed", "detector", "policy_rules",
              "threshold_sweep", "interval_sweep", "window_sweep", "bench",
              "selfheal"});
  if (!j.contains("schema_version")) fail("scenario", "missing 'schema_version'");
  Scenario sc;
  sc.schema_version = static_cast<int>(as_u64(j.at("schema_version"), "scenario.schema_version"));
  if (sc.schema_version != 1)
    fail("scenario.schema_version", "unsupported version " + std::to_string(sc.schema_version));
  if (j.contains("seed")) sc.seed = as_u64(j.at("seed"), "scenario.seed");
  if (seed_override) sc.seed = *seed_override;
  if (j.contains("detector"))
    sc.detector = parse_detector(j.at("detector"), "scenario.detector", DetectorConfig{});
  if (j.contains("policy_rules"))
    sc.policy_rules = parse_policy_rules(j.at("policy_rules"), "scenario.policy_rules");
  if (j.contains("threshold_sweep"))
    sc.threshold_sweep = parse_threshold_sweep(j.at("threshold_sweep"), sc);
  if (j.contains("interval_sweep"))
    sc.interval_sweep = parse_interval_sweep(j.at("interval_sweep"), sc);
  if (j.contains("window_sweep"))
    sc.window_sweep = parse_window_sweep(j.at("window_sweep"), sc);
  if (j.contains("bench")) sc.bench = parse_bench(j.at("bench"), sc);
  if (j.contains("selfheal")) sc.selfheal = parse_selfheal(j.at("selfheal"), sc);
  return sc;
}

Scenario load_scenario(const std::string& path,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario file '" + path + "': " + e.what());
  }
  return parse_scenario(j, seed_override);
}

}  // namespace selfheal

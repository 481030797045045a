#include "selfheal/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "selfheal/errors.hpp"
#include "selfheal/rng.hpp"

namespace selfheal {

namespace {

double snap_up(double t, double interval) {
  // smallest multiple of interval >= t, robust to t/interval landing a hair
  // above an integer
  const double k = std::ceil(t / interval - 1e-9);
  return k <= 0.0 ? 0.0 : k * interval;
}

}  // namespace

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

DetectionResult run_detection(const std::vector<double>& trace,
                              const DetectorConfig& cfg, double onset,
                              const DetectionOptions& opts) {
  cfg.validate();
  if (!(opts.sampling_interval > 0.0))
    throw ConfigError("sampling_interval must be > 0");
  if (!std::is_sorted(trace.begin(), trace.end()))
    throw OrderingError("heartbeat trace is not sorted");

  const double interval = opts.sampling_interval;
  const double onset_eff = snap_up(onset, interval);
  const double trace_end = trace.empty() ? 0.0 : trace.back();
  const double stop = std::max(trace_end + opts.post_trace_horizon, onset_eff);

  AccrualEstimator est(cfg);
  DetectionResult result;
  std::size_t next_arrival = 0;
  std::size_t pre_samples = 0;
  std::size_t pre_failures = 0;

  for (std::uint64_t k = 1;; ++k) {
    const double t = interval * static_cast<double>(k);
    if (t > stop) break;
    while (next_arrival < trace.size() && trace[next_arrival] <= t)
      est.record_heartbeat(trace[next_arrival++]);
    const double phi = est.suspicion(t);
    const bool failed = phi >= cfg.threshold;
    result.samples.push_back({t, phi, failed});
    if (t < onset_eff) {
      ++pre_samples;
      if (failed) ++pre_failures;
    } else if (failed) {
      result.metrics.detection_time = t - onset_eff;
      break;
    }
  }

  result.metrics.mistake_rate =
      pre_samples ? static_cast<double>(pre_failures) / static_cast<double>(pre_samples)
                  : 0.0;
  result.metrics.samples = result.samples.size();
  return result;
}

DetectionMetrics metrics_from_samples(const std::vector<SuspicionSample>& samples,
                                      double onset, double sampling_interval) {
  if (!(sampling_interval > 0.0))
    throw ConfigError("sampling_interval must be > 0");
  const double onset_eff = snap_up(onset, sampling_interval);
  DetectionMetrics m;
  std::size_t pre_samples = 0;
  std::size_t pre_failures = 0;
  for (const auto& s : samples) {
    if (s.time < onset_eff) {
      ++pre_samples;
      if (s.failed) ++pre_failures;
    } else if (s.failed && !m.detection_time) {
      m.detection_time = s.time - onset_eff;
    }
  }
  m.mistake_rate =
      pre_samples ? static_cast<double>(pre_failures) / static_cast<double>(pre_samples)
                  : 0.0;
  m.samples = samples.size();
  return m;
}

// ---------------------------------------------------------------------------
// Parallel helper
// ---------------------------------------------------------------------------

void parallel_for_index(std::size_t count, std::size_t jobs,
                        const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

void ThresholdSweepConfig::validate() const {
  detector.validate();
  for (double u : thresholds)
    if (!(u > 0.0)) throw ConfigError("thresholds must be > 0");
  HeartbeatTraceConfig probe{{before, after}, 0};
  probe.validate();
  if (!(detection.sampling_interval > 0.0))
    throw ConfigError("sampling_interval must be > 0");
}

std::vector<ThresholdSweepRow> sweep_threshold(const ThresholdSweepConfig& cfg,
                                               std::size_t jobs) {
  cfg.validate();
  std::vector<ThresholdSweepRow> rows(cfg.thresholds.size() * cfg.seed_count);
  parallel_for_index(cfg.seed_count, jobs, [&](std::size_t s) {
    HeartbeatTraceConfig trace_cfg{{cfg.before, cfg.after},
                                   mix_seed(cfg.base_seed, s)};
    const std::vector<double> trace = gen_heartbeat_trace(trace_cfg);
    const double onset = cfg.before.duration;
    for (std::size_t ti = 0; ti < cfg.thresholds.size(); ++ti) {
      DetectorConfig d = cfg.detector;
      d.threshold = cfg.thresholds[ti];
      const DetectionResult r = run_detection(trace, d, onset, cfg.detection);
      rows[ti * cfg.seed_count + s] = {cfg.thresholds[ti], s,
                                       r.metrics.detection_time,
                                       r.metrics.mistake_rate};
    }
  });
  return rows;
}

CsvTable threshold_sweep_table(const std::vector<ThresholdSweepRow>& rows) {
  CsvTable t({"threshold", "seed", "detection_time_s", "mistake_rate"});
  for (const auto& r : rows)
    t.add_row({format_double(r.threshold), std::to_string(r.seed),
               CsvTable::cell(r.detection_time), format_double(r.mistake_rate)});
  return t;
}

void IntervalSweepConfig::validate() const {
  detector.validate();
  for (double iv : intervals)
    if (!(iv > 0.0)) throw ConfigError("intervals must be > 0");
  if (!(variance >= 0.0)) throw ConfigError("variance must be >= 0");
  if (!(duration > 0.0)) throw ConfigError("duration must be > 0");
  if (!(detection.sampling_interval > 0.0))
    throw ConfigError("sampling_interval must be > 0");
}

std::vector<IntervalSweepRow> sweep_interval(const IntervalSweepConfig& cfg,
                                             std::size_t jobs) {
  cfg.validate();
  std::vector<IntervalSweepRow> rows(cfg.intervals.size() * cfg.runs);
  parallel_for_index(rows.size(), jobs, [&](std::size_t idx) {
    const std::size_t ii = idx / cfg.runs;
    const std::size_t run = idx % cfg.runs;
    HeartbeatTraceConfig trace_cfg{
        {TraceSegment{cfg.intervals[ii], cfg.variance, cfg.duration}},
        mix_seed(mix_seed(cfg.base_seed, ii), run)};
    const std::vector<double> trace = gen_heartbeat_trace(trace_cfg);
    DetectorConfig d = cfg.detector;
    d.heartbeat_period = cfg.intervals[ii];
    const DetectionResult r = run_detection(trace, d, cfg.duration, cfg.detection);
    rows[idx] = {cfg.intervals[ii], run, r.metrics.detection_time};
  });
  return rows;
}

CsvTable interval_sweep_table(const std::vector<IntervalSweepRow>& rows) {
  CsvTable t({"interval_s", "run", "detection_time_s"});
  for (const auto& r : rows)
    t.add_row({format_double(r.interval), std::to_string(r.run),
               CsvTable::cell(r.detection_time)});
  return t;
}

void WindowSweepConfig::validate() const {
  HeartbeatTraceConfig probe{segments, 0};
  probe.validate();
  if (segments.empty()) throw ConfigError("window sweep needs trace segments");
  if (!(threshold > 0.0)) throw ConfigError("threshold must be > 0");
  if (!(heartbeat_period > 0.0)) throw ConfigError("heartbeat_period must be > 0");
  if (omega_min_cap < 2) throw ConfigError("omega_min_cap must be >= 2");
  for (std::size_t w : omega_max_values)
    if (w != kNeverReset && w <= 2)
      throw ConfigError("finite omega_max values must be > 2");
  if (!(detection.sampling_interval > 0.0))
    throw ConfigError("sampling_interval must be > 0");
}

std::vector<WindowSweepRow> sweep_window(const WindowSweepConfig& cfg,
                                         std::size_t jobs) {
  cfg.validate();
  std::vector<WindowSweepRow> rows(cfg.omega_max_values.size() * cfg.seed_count);
  parallel_for_index(cfg.seed_count, jobs, [&](std::size_t s) {
    HeartbeatTraceConfig trace_cfg{cfg.segments, mix_seed(cfg.base_seed, s)};
    const std::vector<double> trace = gen_heartbeat_trace(trace_cfg);
    const double onset = cfg.segments.front().duration;
    for (std::size_t wi = 0; wi < cfg.omega_max_values.size(); ++wi) {
      const std::size_t w = cfg.omega_max_values[wi];
      DetectorConfig d;
      d.omega_max = static_cast<std::uint32_t>(w);
      d.omega_min = static_cast<std::uint32_t>(
          (w == kNeverReset) ? cfg.omega_min_cap : std::min(cfg.omega_min_cap, w - 1));
      d.heartbeat_period = cfg.heartbeat_period;
      d.threshold = cfg.threshold;
      const DetectionResult r = run_detection(trace, d, onset, cfg.detection);
      rows[wi * cfg.seed_count + s] = {w, s, r.metrics.detection_time,
                                       r.metrics.mistake_rate};
    }
  });
  return rows;
}

CsvTable window_sweep_table(const std::vector<WindowSweepRow>& rows) {
  CsvTable t({"omega_max", "seed", "detection_time_s", "mistake_rate"});
  for (const auto& r : rows)
    t.add_row({std::to_string(r.omega_max), std::to_string(r.seed),
               CsvTable::cell(r.detection_time), format_double(r.mistake_rate)});
  return t;
}

// ---------------------------------------------------------------------------
// Knowledge base
// ---------------------------------------------------------------------------

std::string to_string(AppStatus s) {
  switch (s) {
    case AppStatus::running: return "running";
    case AppStatus::degraded: return "degraded";
    case AppStatus::unplaceable: return "unplaceable";
  }
  throw std::logic_error("unknown AppStatus");
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::heartbeat: return "heartbeat";
    case EventKind::device_failure: return "device_failure";
    case EventKind::distribution_change: return "distribution_change";
  }
  throw std::logic_error("unknown EventKind");
}

std::size_t KnowledgeBase::device_index(const std::string& id) const {
  for (std::size_t i = 0; i < net.nodes.size(); ++i)
    if (net.nodes[i].id == id) return i;
  throw ConfigError("unknown device id '" + id + "'");
}

void KnowledgeBase::validate() const {
  net.validate();
  if (devices.size() != net.nodes.size())
    throw ShapeError("device metadata count does not match node count");
  for (const auto& app : applications) {
    app.recipe.validate();
    if (app.required_capability.size() != app.recipe.tasks.size())
      throw ShapeError("application '" + app.id +
                       "': one required capability per task expected");
    if (!app.allocation) continue;
    if (app.allocation->node_of.size() != app.recipe.tasks.size())
      throw ShapeError("application '" + app.id + "': allocation arity mismatch");
    for (std::size_t n : app.allocation->node_of) {
      if (n >= devices.size())
        throw ShapeError("application '" + app.id + "': allocation to unknown device");
      if (!devices[n].alive)
        throw ConfigError("application '" + app.id + "' allocated to dead device '" +
                          net.nodes[n].id + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Self-healing loop
// ---------------------------------------------------------------------------

void SelfHealConfig::validate() const {
  base_detector.validate();
  if (!(sampling_interval > 0.0)) throw ConfigError("sampling_interval must be > 0");
  if (duration && !(*duration > 0.0)) throw ConfigError("duration must be > 0");
  if (!(heartbeat_jitter_variance >= 0.0))
    throw ConfigError("heartbeat_jitter_variance must be >= 0");
  if (!std::is_sorted(events.begin(), events.end(),
                      [](const ScenarioEvent& a, const ScenarioEvent& b) {
                        return a.time < b.time;
                      }))
    throw OrderingError("scenario events must be sorted by time");
  for (const auto& e : events) {
    if (e.kind == EventKind::distribution_change &&
        (!e.new_period || !(*e.new_period > 0.0)))
      throw ConfigError("distribution_change needs a positive new period");
  }
}

std::string SelfHealReport::log_as_ndjson() const {
  std::string out;
  for (const auto& entry : log) {
    nlohmann::ordered_json j;
    j["time"] = entry.time;
    j["step"] = entry.step;
    for (const auto& [k, v] : entry.detail.items()) j[k] = v;
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

struct LiveSubnet {
  NetworkGraph net;
  std::vector<std::size_t> global_of;  // local node index -> kb node index
};

LiveSubnet live_subnet(const KnowledgeBase& kb) {
  LiveSubnet sub;
  std::vector<std::size_t> local_of(kb.net.nodes.size(),
                                    std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < kb.net.nodes.size(); ++i) {
    if (!kb.devices[i].alive) continue;
    local_of[i] = sub.net.nodes.size();
    sub.net.nodes.push_back(kb.net.nodes[i]);
    sub.global_of.push_back(i);
  }
  for (const auto& link : kb.net.links) {
    if (local_of[link.a] == std::numeric_limits<std::size_t>::max()) continue;
    if (local_of[link.b] == std::numeric_limits<std::size_t>::max()) continue;
    sub.net.links.push_back({local_of[link.a], local_of[link.b], link.transfer_energy});
  }
  return sub;
}

bool device_offers(const DeviceMeta& meta, const std::string& tag) {
  return std::find(meta.capabilities.begin(), meta.capabilities.end(), tag) !=
         meta.capabilities.end();
}

CompatibilityMask tag_mask(const ApplicationEntry& app, const KnowledgeBase& kb,
                           const LiveSubnet& sub) {
  CompatibilityMask mask(app.recipe.tasks.size(), sub.net.nodes.size());
  for (std::size_t t = 0; t < app.recipe.tasks.size(); ++t)
    for (std::size_t n = 0; n < sub.net.nodes.size(); ++n)
      mask.set(t, n, device_offers(kb.devices[sub.global_of[n]],
                                   app.required_capability[t]));
  return mask;
}

nlohmann::ordered_json allocation_json(const ApplicationEntry& app,
                                       const KnowledgeBase& kb) {
  auto arr = nlohmann::ordered_json::array();
  if (!app.allocation) return arr;
  for (std::size_t t = 0; t < app.recipe.tasks.size(); ++t) {
    nlohmann::ordered_json row;
    row["task"] = app.recipe.tasks[t].id;
    row["node"] = kb.net.nodes[app.allocation->node_of[t]].id;
    arr.push_back(std::move(row));
  }
  return arr;
}

struct PlacementResult {
  SolveStatus status;
  std::optional<Allocation> global_allocation;
  std::optional<EnergyBreakdown> breakdown;
  std::string solver_used;
  std::uint64_t explored_nodes = 0;
};

// Exact solver under the budget; heuristic when the budget runs out. Local
// node indices are translated back to knowledge-base indices.
PlacementResult place_app(const ApplicationEntry& app, const KnowledgeBase& kb,
                          const LiveSubnet& sub, const SolveBudget& budget) {
  const CompatibilityMask mask = tag_mask(app, kb, sub);
  PlacementResult result;
  SolverOutcome outcome = solve_exact(app.recipe, sub.net, budget, mask);
  result.solver_used = "exact";
  if (outcome.status == SolveStatus::resource_limit) {
    outcome = solve_heuristic(app.recipe, sub.net, mask);
    result.solver_used = "heuristic";
  }
  result.status = outcome.status;
  result.explored_nodes = outcome.stats.explored_nodes;
  result.breakdown = outcome.breakdown;
  if (outcome.allocation) {
    Allocation global;
    global.node_of.reserve(outcome.allocation->node_of.size());
    for (std::size_t local : outcome.allocation->node_of)
      global.node_of.push_back(sub.global_of[local]);
    result.global_allocation = std::move(global);
  }
  return result;
}

struct DeviceRuntime {
  AccrualEstimator estimator;
  double period = 0.0;
  double next_heartbeat = 0.0;
  bool truth_alive = true;
  Rng jitter;

  DeviceRuntime(const DetectorConfig& cfg, std::uint64_t seed)
      : estimator(cfg), period(cfg.heartbeat_period), jitter(seed) {}
};

}  // namespace

SelfHealReport run_selfheal(const KnowledgeBase& initial, const SelfHealConfig& cfg) {
  cfg.validate();
  SelfHealReport report;
  KnowledgeBase kb = initial;
  kb.validate();

  const auto log_entry = [&](double time, const std::string& step,
                             nlohmann::ordered_json detail) {
    report.log.push_back({time, step, std::move(detail)});
  };

  // --- initial placement for applications arriving without one
  {
    const LiveSubnet sub = live_subnet(kb);
    for (auto& app : kb.applications) {
      if (app.allocation) continue;
      const PlacementResult placed = place_app(app, kb, sub, cfg.solver_budget);
      nlohmann::ordered_json detail;
      detail["application"] = app.id;
      detail["solver"] = placed.solver_used;
      if (placed.global_allocation &&
          (placed.status == SolveStatus::proven_optimal ||
           placed.status == SolveStatus::feasible_heuristic)) {
        app.allocation = placed.global_allocation;
        app.status = AppStatus::running;
      } else {
        app.status = AppStatus::unplaceable;
      }
      detail["status"] = to_string(app.status);
      detail["allocation"] = allocation_json(app, kb);
      if (placed.breakdown && app.allocation) {
        detail["energy"] = {{"device_energy", placed.breakdown->device_energy},
                            {"network_energy", placed.breakdown->network_energy},
                            {"total_energy", placed.breakdown->total_energy}};
      }
      log_entry(0.0, "init", std::move(detail));
    }
  }
  kb.validate();

  // --- per-device detector bank, configured once at deployment time
  const std::size_t device_count = kb.net.nodes.size();
  std::vector<DeviceRuntime> runtime;
  runtime.reserve(device_count);
  for (std::size_t d = 0; d < device_count; ++d) {
    TaskCriticality crit;
    crit.replacement_available = true;
    crit.central_to_application = false;
    for (const auto& app : kb.applications) {
      if (!app.allocation) continue;
      std::vector<std::size_t> in_deg(app.recipe.tasks.size(), 0);
      std::vector<std::size_t> out_deg(app.recipe.tasks.size(), 0);
      for (const auto& [a, b] : app.recipe.edges) {
        ++out_deg[a];
        ++in_deg[b];
      }
      for (std::size_t t = 0; t < app.recipe.tasks.size(); ++t) {
        if (app.allocation->node_of[t] != d) continue;
        if (in_deg[t] > 0 && out_deg[t] > 0) crit.central_to_application = true;
        bool has_alternative = false;
        for (std::size_t e = 0; e < device_count && !has_alternative; ++e)
          has_alternative = e != d && kb.devices[e].alive &&
                            device_offers(kb.devices[e], app.required_capability[t]);
        if (!has_alternative) crit.replacement_available = false;
      }
    }
    const DetectorConfig derived = derive_config(kb.net.nodes[d].profile, crit,
                                                 cfg.policy_rules, cfg.base_detector);
    runtime.emplace_back(derived, mix_seed(cfg.seed, d));
    runtime.back().truth_alive = kb.devices[d].alive;
    if (!runtime.back().truth_alive)
      runtime.back().next_heartbeat = std::numeric_limits<double>::infinity();
  }

  const double last_event =
      cfg.events.empty() ? 0.0 : cfg.events.back().time;
  const double end_time = cfg.duration.value_or(last_event + 600.0);

  const auto next_gap = [&](DeviceRuntime& rt) {
    if (cfg.heartbeat_jitter_variance <= 0.0) return rt.period;
    const double sd = std::sqrt(cfg.heartbeat_jitter_variance);
    double gap;
    do {
      gap = rt.jitter.normal(rt.period, sd);
    } while (!(gap > 0.0));
    return gap;
  };

  const auto deliver_heartbeat = [&](std::size_t d, double t) {
    runtime[d].estimator.record_heartbeat(t);
  };

  // Merged stream of synthesized heartbeats and scripted events in
  // (time, subject, kind) order, cut off at `until`.
  std::size_t next_scripted = 0;
  const auto pump_events = [&](double until) {
    for (;;) {
      // earliest synthesized heartbeat
      std::size_t hb_device = device_count;
      double hb_time = std::numeric_limits<double>::infinity();
      for (std::size_t d = 0; d < device_count; ++d) {
        const double t = runtime[d].next_heartbeat;
        if (t < hb_time ||
            (t == hb_time && hb_device < device_count &&
             kb.net.nodes[d].id < kb.net.nodes[hb_device].id)) {
          hb_time = t;
          hb_device = d;
        }
      }
      const ScenarioEvent* scripted =
          next_scripted < cfg.events.size() ? &cfg.events[next_scripted] : nullptr;

      const bool have_hb = hb_device < device_count && hb_time <= until;
      const bool have_scripted = scripted && scripted->time <= until;
      if (!have_hb && !have_scripted) return;

      bool take_scripted;
      if (!have_hb) {
        take_scripted = true;
      } else if (!have_scripted) {
        take_scripted = false;
      } else if (scripted->time != hb_time) {
        take_scripted = scripted->time < hb_time;
      } else {
        // tie: order by (subject, kind); synthesized heartbeats have kind 0
        const std::string& hb_subject = kb.net.nodes[hb_device].id;
        if (scripted->subject != hb_subject)
          take_scripted = scripted->subject < hb_subject;
        else
          take_scripted = false;  // heartbeat kind sorts first
      }

      if (take_scripted) {
        const ScenarioEvent& ev = *scripted;
        const std::size_t d = kb.device_index(ev.subject);
        switch (ev.kind) {
          case EventKind::heartbeat:
            deliver_heartbeat(d, ev.time);
            break;
          case EventKind::device_failure:
            runtime[d].truth_alive = false;
            runtime[d].next_heartbeat = std::numeric_limits<double>::infinity();
            break;
          case EventKind::distribution_change:
            runtime[d].period = *ev.new_period;
            break;
        }
        ++next_scripted;
      } else {
        deliver_heartbeat(hb_device, hb_time);
        runtime[hb_device].next_heartbeat = hb_time + next_gap(runtime[hb_device]);
      }
    }
  };

  const auto heal_device = [&](std::size_t dead, double t, double phi) {
    kb.devices[dead].alive = false;
    ++report.healing_rounds;
    {
      nlohmann::ordered_json detail;
      detail["device"] = kb.net.nodes[dead].id;
      detail["phi"] = phi;
      log_entry(t, "detect", std::move(detail));
    }
    const LiveSubnet sub = live_subnet(kb);
    for (auto& app : kb.applications) {
      if (!app.allocation) continue;
      const bool affected =
          std::find(app.allocation->node_of.begin(), app.allocation->node_of.end(),
                    dead) != app.allocation->node_of.end();
      if (!affected) continue;

      // capability matching: every task must have a live device offering its tag
      bool matchable = true;
      {
        nlohmann::ordered_json detail;
        detail["application"] = app.id;
        auto tasks = nlohmann::ordered_json::array();
        for (std::size_t ti = 0; ti < app.recipe.tasks.size(); ++ti) {
          auto candidates = nlohmann::ordered_json::array();
          for (std::size_t n = 0; n < sub.net.nodes.size(); ++n)
            if (device_offers(kb.devices[sub.global_of[n]], app.required_capability[ti]))
              candidates.push_back(sub.net.nodes[n].id);
          if (candidates.empty()) matchable = false;
          nlohmann::ordered_json row;
          row["task"] = app.recipe.tasks[ti].id;
          row["capability"] = app.required_capability[ti];
          row["candidates"] = std::move(candidates);
          tasks.push_back(std::move(row));
        }
        detail["tasks"] = std::move(tasks);
        detail["matched"] = matchable;
        log_entry(t, "match", std::move(detail));
      }

      if (!matchable) {
        app.allocation.reset();
        app.status = AppStatus::degraded;
        nlohmann::ordered_json detail;
        detail["application"] = app.id;
        detail["status"] = to_string(app.status);
        log_entry(t, "reconfigure", std::move(detail));
        continue;
      }

      const PlacementResult placed = place_app(app, kb, sub, cfg.solver_budget);
      if (placed.global_allocation &&
          (placed.status == SolveStatus::proven_optimal ||
           placed.status == SolveStatus::feasible_heuristic)) {
        app.allocation = placed.global_allocation;
        app.status = AppStatus::running;
      } else {
        app.allocation.reset();
        app.status = AppStatus::unplaceable;
      }
      {
        nlohmann::ordered_json detail;
        detail["application"] = app.id;
        detail["solver"] = placed.solver_used;
        detail["explored_nodes"] = placed.explored_nodes;
        detail["allocation"] = allocation_json(app, kb);
        if (placed.breakdown && app.allocation)
          detail["energy"] = {{"device_energy", placed.breakdown->device_energy},
                              {"network_energy", placed.breakdown->network_energy},
                              {"total_energy", placed.breakdown->total_energy}};
        log_entry(t, "reallocate", std::move(detail));
      }
      {
        nlohmann::ordered_json detail;
        detail["application"] = app.id;
        detail["status"] = to_string(app.status);
        log_entry(t, "reconfigure", std::move(detail));
      }

      // the healed placement must be feasible on the surviving network
      if (app.allocation) {
        Allocation local;
        local.node_of.reserve(app.allocation->node_of.size());
        for (std::size_t global : app.allocation->node_of) {
          const auto it =
              std::find(sub.global_of.begin(), sub.global_of.end(), global);
          local.node_of.push_back(
              static_cast<std::size_t>(it - sub.global_of.begin()));
        }
        const FeasibilityReport feas = check_feasibility(app.recipe, sub.net, local);
        if (!feas.feasible())
          throw std::logic_error("healed allocation infeasible: " + feas.summary());
      }
    }
    kb.validate();
  };

  for (std::uint64_t k = 1;; ++k) {
    const double t = cfg.sampling_interval * static_cast<double>(k);
    if (t > end_time) break;
    pump_events(t);
    for (std::size_t d = 0; d < device_count; ++d) {
      if (!kb.devices[d].alive) continue;
      const double phi = runtime[d].estimator.suspicion(t);
      if (phi >= runtime[d].estimator.config().threshold) heal_device(d, t, phi);
    }
  }
  pump_events(end_time);

  kb.validate();
  report.final_kb = std::move(kb);
  return report;
}

// ---------------------------------------------------------------------------
// Benchmark
// ---------------------------------------------------------------------------

void BenchConfig::validate() const {
  for (std::size_t n : node_counts)
    if (n == 0) throw ConfigError("node counts must be > 0");
  for (std::size_t t : task_counts)
    if (t < 2) throw ConfigError("task counts must be >= 2");
  if (shapes.empty()) throw ConfigError("bench needs at least one recipe shape");
  const bool has_wide =
      std::find(shapes.begin(), shapes.end(), RecipeShape::wide) != shapes.end();
  if (has_wide)
    for (std::size_t t : task_counts)
      if (t < 3)
        throw ConfigError("wide recipes need >= 3 tasks; drop the wide shape or "
                          "raise the task counts");
  if (seed_count == 0) throw ConfigError("bench needs at least one seed");
  if (solvers.empty()) throw ConfigError("bench needs at least one solver");
  for (const auto& s : solvers)
    if (s != "exact" && s != "heuristic" && s != "brute")
      throw ConfigError("unknown solver '" + s + "' (expected exact|heuristic|brute)");
  network.validate();
  recipe.validate();
}

std::vector<BenchRow> bench_allocation(const BenchConfig& cfg, std::size_t jobs) {
  cfg.validate();
  struct InstanceKey {
    std::size_t nodes, tasks;
    RecipeShape shape;
    std::size_t seed;
  };
  std::vector<InstanceKey> instances;
  for (std::size_t n : cfg.node_counts)
    for (std::size_t t : cfg.task_counts)
      for (RecipeShape shape : cfg.shapes)
        for (std::size_t s = 0; s < cfg.seed_count; ++s)
          instances.push_back({n, t, shape, s});

  std::vector<BenchRow> rows(instances.size() * cfg.solvers.size());
  parallel_for_index(instances.size(), jobs, [&](std::size_t i) {
    const InstanceKey& key = instances[i];
    const std::uint64_t inst_seed = mix_seed(
        mix_seed(mix_seed(mix_seed(cfg.base_seed, key.nodes), key.tasks),
                 key.shape == RecipeShape::wide ? 1 : 0),
        key.seed);
    NetworkGenConfig net_cfg = cfg.network;
    net_cfg.node_count = key.nodes;
    net_cfg.seed = mix_seed(inst_seed, 0);
    RecipeGenConfig rec_cfg = cfg.recipe;
    rec_cfg.task_count = key.tasks;
    rec_cfg.shape = key.shape;
    rec_cfg.seed = mix_seed(inst_seed, 1);
    const NetworkGraph net = gen_network(net_cfg);
    const RecipeGraph recipe = gen_recipe(rec_cfg);

    std::optional<double> exact_energy;
    std::optional<double> heuristic_energy;
    std::size_t heuristic_row = rows.size();

    for (std::size_t j = 0; j < cfg.solvers.size(); ++j) {
      const std::string& solver = cfg.solvers[j];
      BenchRow row;
      row.nodes = key.nodes;
      row.tasks = key.tasks;
      row.shape = key.shape;
      row.seed = key.seed;
      row.solver = solver;
      try {
        SolverOutcome outcome;
        if (solver == "exact")
          outcome = solve_exact(recipe, net, cfg.budget);
        else if (solver == "heuristic")
          outcome = solve_heuristic(recipe, net);
        else
          outcome = solve_brute_force(recipe, net);
        row.cpu_time_s = outcome.stats.solve_cpu_seconds;
        row.status = outcome.status;
        if (outcome.breakdown) row.total_energy = outcome.breakdown->total_energy;
        if (solver == "exact" && outcome.status == SolveStatus::proven_optimal)
          exact_energy = row.total_energy;
        if (solver == "heuristic" &&
            outcome.status == SolveStatus::feasible_heuristic) {
          heuristic_energy = row.total_energy;
          heuristic_row = i * cfg.solvers.size() + j;
        }
      } catch (const InfeasibleCommunicationError&) {
        // the heuristic picked an unroutable placement; report as infeasible
        row.status = SolveStatus::infeasible;
      }
      rows[i * cfg.solvers.size() + j] = std::move(row);
    }
    if (exact_energy && heuristic_energy && heuristic_row < rows.size() &&
        *heuristic_energy > 0.0)
      rows[heuristic_row].ratio = *exact_energy / *heuristic_energy;
  });
  return rows;
}

CsvTable bench_table(const std::vector<BenchRow>& rows) {
  CsvTable t({"nodes", "tasks", "shape", "seed", "solver", "cpu_time_s",
              "total_energy", "status", "ratio"});
  for (const auto& r : rows)
    t.add_row({std::to_string(r.nodes), std::to_string(r.tasks), to_string(r.shape),
               std::to_string(r.seed), r.solver, format_double(r.cpu_time_s),
               CsvTable::cell(r.total_energy), to_string(r.status),
               CsvTable::cell(r.ratio)});
  return t;
}

}  // namespace selfheal

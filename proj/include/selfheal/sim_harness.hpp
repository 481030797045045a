#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "selfheal/accrual_fd.hpp"
#include "selfheal/allocation_model.hpp"
#include "selfheal/allocation_solvers.hpp"
#include "selfheal/csv.hpp"
#include "selfheal/fd_policy.hpp"
#include "selfheal/workload_gen.hpp"

namespace selfheal {

// ---------------------------------------------------------------------------
// Trace replay and detection metrics
// ---------------------------------------------------------------------------

struct DetectionMetrics {
  std::optional<double> detection_time;  // seconds past onset; absent = never
  double mistake_rate = 0.0;             // failed verdicts / samples, pre-onset
  std::size_t samples = 0;               // total verdict samples taken

  bool operator==(const DetectionMetrics&) const = default;
};

struct SuspicionSample {
  double time = 0.0;
  double phi = 0.0;
  bool failed = false;

  bool operator==(const SuspicionSample&) const = default;
};

struct DetectionOptions {
  double sampling_interval = 5.0;
  // How long past the final arrival sampling continues while no detection
  // fires. Bounds the replay when the threshold is unreachable.
  double post_trace_horizon = 5000.0;
};

struct DetectionResult {
  DetectionMetrics metrics;
  std::vector<SuspicionSample> samples;
};

// Replays an arrival trace through one estimator, sampling the verdict at
// every multiple of sampling_interval (arrivals at or before a sample time are
// delivered first). The onset is snapped up to the sampling grid so the
// detection delay is always a whole number of intervals; samples strictly
// before the snapped onset count toward the mistake rate, and the first failed
// sample at or after it stops the replay. Throws OrderingError on an unsorted
// trace.
DetectionResult run_detection(const std::vector<double>& trace,
                              const DetectorConfig& cfg, double onset,
                              const DetectionOptions& opts = {});

// Recomputes the metrics from a dumped sample trace; equals the online result
// exactly for traces produced by run_detection with the same onset/interval.
DetectionMetrics metrics_from_samples(const std::vector<SuspicionSample>& samples,
                                      double onset, double sampling_interval);

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

// Mean shift mid-trace: learn N(before.mean, before.variance), then the
// distribution changes; onset = the change time.
struct ThresholdSweepConfig {
  DetectorConfig detector;  // threshold is overridden per row
  std::vector<double> thresholds;
  std::size_t seed_count = 20;
  std::uint64_t base_seed = 1;
  TraceSegment before{20.0, 5.0, 3000.0};
  TraceSegment after{50.0, 5.0, 3000.0};
  DetectionOptions detection;

  void validate() const;
};

struct ThresholdSweepRow {
  double threshold = 0.0;
  std::uint64_t seed = 0;  // seed index, not the mixed raw seed
  std::optional<double> detection_time;
  double mistake_rate = 0.0;
};

std::vector<ThresholdSweepRow> sweep_threshold(const ThresholdSweepConfig& cfg,
                                               std::size_t jobs = 1);
CsvTable threshold_sweep_table(const std::vector<ThresholdSweepRow>& rows);

// Crash detection at varying heartbeat rates: one segment per run, heartbeats
// cease at the segment end (the onset).
struct IntervalSweepConfig {
  DetectorConfig detector;  // heartbeat_period overridden per interval
  std::vector<double> intervals{5.0, 10.0, 20.0, 40.0};
  std::size_t runs = 10;
  std::uint64_t base_seed = 2;
  double variance = 1.0;
  double duration = 1000.0;
  DetectionOptions detection;

  void validate() const;
};

struct IntervalSweepRow {
  double interval = 0.0;
  std::uint64_t run = 0;
  std::optional<double> detection_time;
};

std::vector<IntervalSweepRow> sweep_interval(const IntervalSweepConfig& cfg,
                                             std::size_t jobs = 1);
CsvTable interval_sweep_table(const std::vector<IntervalSweepRow>& rows);

// Learning-window reset effect around a distribution change and back.
struct WindowSweepConfig {
  std::vector<std::size_t> omega_max_values{10, 25, 50, 100, 200};
  std::size_t seed_count = 20;
  std::uint64_t base_seed = 3;
  std::vector<TraceSegment> segments{{20.0, 1.0, 1000.0},
                                     {50.0, 1.0, 1000.0},
                                     {20.0, 1.0, 500.0}};
  double threshold = 0.8;
  double heartbeat_period = 20.0;
  // omega_min per row = min(omega_min_cap, omega_max - 1)
  std::size_t omega_min_cap = 10;
  DetectionOptions detection;

  void validate() const;
};

struct WindowSweepRow {
  std::size_t omega_max = 0;
  std::uint64_t seed = 0;
  std::optional<double> detection_time;
  double mistake_rate = 0.0;
};

std::vector<WindowSweepRow> sweep_window(const WindowSweepConfig& cfg,
                                         std::size_t jobs = 1);
CsvTable window_sweep_table(const std::vector<WindowSweepRow>& rows);

// ---------------------------------------------------------------------------
// Knowledge base and the healing loop
// ---------------------------------------------------------------------------

struct DeviceMeta {
  std::vector<std::string> capabilities;  // offered tags
  bool alive = true;                      // the configurator's belief
};

enum class AppStatus { running, degraded, unplaceable };
std::string to_string(AppStatus s);

struct ApplicationEntry {
  std::string id;
  RecipeGraph recipe;
  // one required capability tag per task, matched by string equality
  std::vector<std::string> required_capability;
  std::optional<Allocation> allocation;
  AppStatus status = AppStatus::running;
};

struct KnowledgeBase {
  NetworkGraph net;
  std::vector<DeviceMeta> devices;  // parallel to net.nodes
  std::vector<ApplicationEntry> applications;

  std::size_t device_index(const std::string& id) const;
  // allocated => registered and believed-live; shapes consistent
  void validate() const;
};

enum class EventKind { heartbeat, device_failure, distribution_change };
std::string to_string(EventKind k);

struct ScenarioEvent {
  double time = 0.0;
  EventKind kind = EventKind::heartbeat;
  std::string subject;                    // device id
  std::optional<double> new_period;       // distribution_change payload

  // queue order: (time, subject, kind)
  friend bool operator<(const ScenarioEvent& a, const ScenarioEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.subject != b.subject) return a.subject < b.subject;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  }
};

struct SelfHealConfig {
  std::vector<ScenarioEvent> events;
  std::vector<PolicyRule> policy_rules = default_policy_rules();
  DetectorConfig base_detector;        // policy adjustments start from this
  double sampling_interval = 5.0;
  std::optional<double> duration;      // default: last event + 600 s
  double heartbeat_jitter_variance = 0.0;
  std::uint64_t seed = 0;
  SolveBudget solver_budget{10.0, std::nullopt};

  void validate() const;
};

// One line-delimited-JSON-able log record. Timestamps are simulation time.
struct SelfHealLogEntry {
  double time = 0.0;
  std::string step;  // init | detect | match | reallocate | reconfigure
  nlohmann::ordered_json detail;
};

struct SelfHealReport {
  std::vector<SelfHealLogEntry> log;
  KnowledgeBase final_kb;
  std::size_t healing_rounds = 0;

  std::string log_as_ndjson() const;
};

// Runs the detect -> match -> reallocate -> reconfigure loop over a simulated
// device network. Heartbeats are synthesized per device at its policy-derived
// period (optionally jittered); the configurator samples every device's
// suspicion on a fixed grid and starts a healing round for each device whose
// verdict turns failed. Placement uses the exact solver within the budget and
// falls back to the heuristic when the budget is exhausted.
SelfHealReport run_selfheal(const KnowledgeBase& initial, const SelfHealConfig& cfg);

// ---------------------------------------------------------------------------
// Allocation benchmark
// ---------------------------------------------------------------------------

struct BenchConfig {
  std::vector<std::size_t> node_counts;
  std::vector<std::size_t> task_counts;
  std::vector<RecipeShape> shapes{RecipeShape::long_chain, RecipeShape::wide};
  std::size_t seed_count = 5;
  std::uint64_t base_seed = 4;
  std::vector<std::string> solvers{"exact", "heuristic"};
  SolveBudget budget;
  NetworkGenConfig network;  // node_count/seed overridden per instance
  RecipeGenConfig recipe;    // task_count/shape/seed overridden per instance

  void validate() const;
};

struct BenchRow {
  std::size_t nodes = 0;
  std::size_t tasks = 0;
  RecipeShape shape = RecipeShape::long_chain;
  std::uint64_t seed = 0;
  std::string solver;
  double cpu_time_s = 0.0;
  std::optional<double> total_energy;
  SolveStatus status = SolveStatus::infeasible;
  // optimal/heuristic energy, on heuristic rows where both solved
  std::optional<double> ratio;
};

std::vector<BenchRow> bench_allocation(const BenchConfig& cfg, std::size_t jobs = 1);
CsvTable bench_table(const std::vector<BenchRow>& rows);

// Deterministic helper shared by the sweeps: runs fn(i) for i in [0, count)
// on `jobs` threads, each result landing in its index slot.
void parallel_for_index(std::size_t count, std::size_t jobs,
                        const std::function<void(std::size_t)>& fn);

}  // namespace selfheal

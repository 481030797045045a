#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "selfheal/errors.hpp"

namespace selfheal {

// omega_max sentinel: the estimator never resets its learning window.
inline constexpr std::uint32_t kNeverReset = 0;

// Tunable parameters of the accrual failure detector.
struct DetectorConfig {
  std::uint32_t omega_min = 10;     // samples required before an estimate is used
  std::uint32_t omega_max = 1000;   // samples per window before a reset; kNeverReset disables
  double heartbeat_period = 20.0;   // expected send interval, seconds
  double threshold = 0.8;           // suspicion threshold u

  // Throws ConfigError unless omega_min >= 2, omega_max > omega_min (or the
  // kNeverReset sentinel), heartbeat_period > 0 and threshold > 0.
  void validate() const;

  bool operator==(const DetectorConfig&) const = default;
};

// Running sums over one learning window. Mean and sample variance of the
// recorded inter-arrival times are recoverable from (rho, kappa, n) alone,
// so the estimator's state stays constant-size no matter how many heartbeats
// it has seen.
struct WindowAccumulators {
  double rho = 0.0;       // sum of inter-arrival times, seconds
  double kappa = 0.0;     // sum of squared inter-arrival times, seconds^2
  std::uint64_t n = 0;    // recorded sample count

  void add(double sample) {
    rho += sample;
    kappa += sample * sample;
    n += 1;
  }

  void reset() { *this = WindowAccumulators{}; }

  double mean() const;       // requires n >= 1
  double variance() const;   // requires n >= 2; n-1 denominator, clamped at 0

  bool operator==(const WindowAccumulators&) const = default;
};

// Reference single-pass estimate over a full sample sequence: arithmetic mean
// and sample variance (n-1 denominator). Oracle for the incremental
// accumulators. Throws ArityError for fewer than 2 samples.
std::pair<double, double> batch_estimate(std::span<const double> samples);

// Accrual failure detector for one monitored peer.
//
// Heartbeat inter-arrival times feed constant-space accumulators; suspicion
// phi(now) = -log10 of a one-sided Chebyshev bound on the probability that
// the next heartbeat is still outstanding. Accumulators are periodically
// reset: once the active window holds omega_max samples it is frozen and a
// fresh learning window starts filling; the learning window takes over as
// soon as it holds omega_min samples. While the learning window fills, the
// frozen window keeps answering suspicion queries.
class AccrualEstimator {
 public:
  AccrualEstimator() { config_.validate(); }
  explicit AccrualEstimator(DetectorConfig config, double phi_cap = 1e6);

  // Records a heartbeat arrival (monotone clock, seconds). The first arrival
  // only seeds the clock; later ones add one inter-arrival sample. Throws
  // OrderingError (state untouched) when arrival <= the previous one.
  void record_heartbeat(double arrival);

  // Suspicion at time `now` (same clock as record_heartbeat). Returns 0 while
  // fewer than omega_min samples are available or while elapsed <= mean;
  // returns phi_cap for a zero-variance estimate with elapsed > mean.
  // Throws OrderingError if now precedes the last recorded arrival.
  double suspicion(double now) const;

  bool is_failed(double now) const {
    return suspicion(now) >= config_.threshold;
  }

  const DetectorConfig& config() const { return config_; }
  const WindowAccumulators& active_window() const { return active_; }
  const std::optional<WindowAccumulators>& learning_window() const {
    return learning_;
  }
  std::optional<double> last_arrival() const { return last_arrival_; }
  double phi_cap() const { return phi_cap_; }

  // Versioned, human-readable, fixed-width state record. The byte length is
  // independent of how many heartbeats were recorded.
  std::string serialize() const;
  static AccrualEstimator deserialize(const std::string& text);

  bool operator==(const AccrualEstimator&) const = default;

 private:
  WindowAccumulators active_;
  std::optional<WindowAccumulators> learning_;  // engaged only mid-reset
  std::optional<double> last_arrival_;
  DetectorConfig config_;
  double phi_cap_ = 1e6;
};

}  // namespace selfheal

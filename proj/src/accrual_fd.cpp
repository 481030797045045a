#include "selfheal/accrual_fd.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "json.hpp"

namespace selfheal {

void DetectorConfig::validate() const {
  if (omega_min < 2)
    throw ConfigError("omega_min must be >= 2 (sample variance needs n-1 >= 1)");
  if (omega_max != kNeverReset && omega_max <= omega_min)
    throw ConfigError("omega_max must exceed omega_min (or be 0 for never-reset)");
  if (!(heartbeat_period > 0.0))
    throw ConfigError("heartbeat_period must be positive");
  if (!(threshold > 0.0))
    throw ConfigError("threshold must be positive");
}

double WindowAccumulators::mean() const {
  if (n == 0) throw ArityError("mean undefined for an empty window");
  return rho / static_cast<double>(n);
}

double WindowAccumulators::variance() const {
  if (n < 2) throw ArityError("sample variance undefined for n < 2");
  const double mu = mean();
  const double num = kappa - static_cast<double>(n) * mu * mu;
  // Cauchy-Schwarz gives kappa >= rho^2/n; a negative numerator can only be
  // floating-point noise.
  return num > 0.0 ? num / static_cast<double>(n - 1) : 0.0;
}

std::pair<double, double> batch_estimate(std::span<const double> samples) {
  if (samples.size() < 2)
    throw ArityError("batch_estimate needs at least 2 samples");
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mu = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double x : samples) ss += (x - mu) * (x - mu);
  return {mu, ss / static_cast<double>(samples.size() - 1)};
}

AccrualEstimator::AccrualEstimator(DetectorConfig config, double phi_cap)
    : config_(config), phi_cap_(phi_cap) {
  config_.validate();
  if (!(phi_cap_ > 0.0)) throw ConfigError("phi_cap must be positive");
}

void AccrualEstimator::record_heartbeat(double arrival) {
  if (last_arrival_ && !(arrival > *last_arrival_))
    throw OrderingError("heartbeat arrival is not later than the previous one");
  if (!last_arrival_) {
    // First heartbeat: no inter-arrival time exists yet.
    last_arrival_ = arrival;
    return;
  }
  const double sample = arrival - *last_arrival_;
  last_arrival_ = arrival;
  if (learning_) {
    learning_->add(sample);
    if (learning_->n >= config_.omega_min) {
      active_ = *learning_;
      learning_.reset();
    }
    return;
  }
  active_.add(sample);
  if (config_.omega_max != kNeverReset && active_.n >= config_.omega_max) {
    // Freeze the active window; it keeps answering queries until the fresh
    // window holds omega_min samples.
    learning_.emplace();
  }
}

double AccrualEstimator::suspicion(double now) const {
  if (last_arrival_ && now < *last_arrival_)
    throw OrderingError("suspicion queried before the last recorded arrival");
  if (!last_arrival_ || active_.n < config_.omega_min) return 0.0;
  const double elapsed = now - *last_arrival_;
  const double mu = active_.mean();
  if (elapsed <= mu) return 0.0;
  const double sigma2 = active_.variance();
  if (sigma2 <= 0.0) return phi_cap_;
  const double dev = elapsed - mu;
  const double p_later = sigma2 / (sigma2 + dev * dev);
  const double phi = -std::log10(p_later);
  return phi < phi_cap_ ? phi : phi_cap_;
}

namespace {

// %.17e roundtrips doubles exactly; the exponent is padded to three digits so
// every serialized double occupies the same number of bytes.
std::string fixed_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%+.17e", v);
  std::string s(buf);
  auto e = s.find('e');
  std::string exp = s.substr(e + 2);  // digits after the exponent sign
  while (exp.size() < 3) exp.insert(exp.begin(), '0');
  return s.substr(0, e + 2) + exp;
}

std::string fixed_u64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%020llu", static_cast<unsigned long long>(v));
  return buf;
}

double parse_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

std::uint64_t parse_u64(const std::string& s) {
  return std::strtoull(s.c_str(), nullptr, 10);
}

nlohmann::ordered_json window_record(const WindowAccumulators* w) {
  return {{"present", w ? 1 : 0},
          {"rho", fixed_double(w ? w->rho : 0.0)},
          {"kappa", fixed_double(w ? w->kappa : 0.0)},
          {"n", fixed_u64(w ? w->n : 0)}};
}

WindowAccumulators parse_window(const nlohmann::json& j) {
  WindowAccumulators w;
  w.rho = parse_double(j.at("rho").get<std::string>());
  w.kappa = parse_double(j.at("kappa").get<std::string>());
  w.n = parse_u64(j.at("n").get<std::string>());
  return w;
}

}  // namespace

std::string AccrualEstimator::serialize() const {
  nlohmann::ordered_json j;
  j["v"] = 1;
  j["active"] = window_record(&active_);
  j["learning"] = window_record(learning_ ? &*learning_ : nullptr);
  j["last_arrival"] = {{"present", last_arrival_ ? 1 : 0},
                       {"t", fixed_double(last_arrival_.value_or(0.0))}};
  j["config"] = {{"omega_min", fixed_u64(config_.omega_min)},
                 {"omega_max", fixed_u64(config_.omega_max)},
                 {"heartbeat_period", fixed_double(config_.heartbeat_period)},
                 {"threshold", fixed_double(config_.threshold)}};
  j["phi_cap"] = fixed_double(phi_cap_);
  return j.dump();
}

AccrualEstimator AccrualEstimator::deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("estimator state is not valid JSON: ") + e.what());
  }
  if (!j.contains("v") || j.at("v").get<int>() != 1)
    throw ConfigError("unsupported estimator state version");
  DetectorConfig cfg;
  const auto& c = j.at("config");
  cfg.omega_min = static_cast<std::uint32_t>(parse_u64(c.at("omega_min").get<std::string>()));
  cfg.omega_max = static_cast<std::uint32_t>(parse_u64(c.at("omega_max").get<std::string>()));
  cfg.heartbeat_period = parse_double(c.at("heartbeat_period").get<std::string>());
  cfg.threshold = parse_double(c.at("threshold").get<std::string>());
  AccrualEstimator est(cfg, parse_double(j.at("phi_cap").get<std::string>()));
  est.active_ = parse_window(j.at("active"));
  if (j.at("learning").at("present").get<int>() != 0)
    est.learning_ = parse_window(j.at("learning"));
  if (j.at("last_arrival").at("present").get<int>() != 0)
    est.last_arrival_ = parse_double(j.at("last_arrival").at("t").get<std::string>());
  return est;
}

}  // namespace selfheal

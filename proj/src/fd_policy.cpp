#include "selfheal/fd_policy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace selfheal {

std::string to_string(LinkKind k) {
  return k == LinkKind::wired ? "wired" : "wireless";
}
std::string to_string(PowerKind k) {
  return k == PowerKind::mains ? "mains" : "battery";
}
std::string to_string(Mobility k) {
  return k == Mobility::stationary ? "stationary" : "mobile";
}

LinkKind link_kind_from_string(const std::string& s) {
  if (s == "wired") return LinkKind::wired;
  if (s == "wireless") return LinkKind::wireless;
  throw ConfigError("unknown link kind: " + s);
}
PowerKind power_kind_from_string(const std::string& s) {
  if (s == "mains") return PowerKind::mains;
  if (s == "battery") return PowerKind::battery;
  throw ConfigError("unknown power kind: " + s);
}
Mobility mobility_from_string(const std::string& s) {
  if (s == "stationary") return Mobility::stationary;
  if (s == "mobile") return Mobility::mobile;
  throw ConfigError("unknown mobility: " + s);
}

bool RuleMatch::matches(const NodeProfile& p, const TaskCriticality& c) const {
  if (link && *link != p.link) return false;
  if (power && *power != p.power) return false;
  if (mobility && *mobility != p.mobility) return false;
  if (replacement_available && *replacement_available != c.replacement_available)
    return false;
  if (central_to_application && *central_to_application != c.central_to_application)
    return false;
  return true;
}

bool RuleMatch::is_catch_all() const {
  return !link && !power && !mobility && !replacement_available &&
         !central_to_application;
}

std::vector<PolicyRule> default_policy_rules() {
  std::vector<PolicyRule> rules;

  PolicyRule fallback;
  fallback.name = "default";
  fallback.priority = 0;
  rules.push_back(fallback);

  PolicyRule mobile;
  mobile.name = "mobile";
  mobile.priority = 10;
  mobile.match.mobility = Mobility::mobile;
  mobile.omega_min = FieldAdjust{FieldAdjust::Mode::set, 5};
  mobile.omega_max = FieldAdjust{FieldAdjust::Mode::set, 50};
  rules.push_back(mobile);

  PolicyRule wired;
  wired.name = "wired-stationary";
  wired.priority = 15;
  wired.match.link = LinkKind::wired;
  wired.match.mobility = Mobility::stationary;
  wired.omega_max = FieldAdjust{FieldAdjust::Mode::set, 5000};
  rules.push_back(wired);

  PolicyRule replaceable;
  replaceable.name = "replaceable";
  replaceable.priority = 20;
  replaceable.match.replacement_available = true;
  replaceable.threshold = FieldAdjust{FieldAdjust::Mode::set, 0.5};
  rules.push_back(replaceable);

  PolicyRule critical;
  critical.name = "critical-no-replacement";
  critical.priority = 30;
  critical.match.central_to_application = true;
  critical.match.replacement_available = false;
  critical.heartbeat_period = FieldAdjust{FieldAdjust::Mode::scale, 0.5};
  critical.threshold = FieldAdjust{FieldAdjust::Mode::set, 1.2};
  rules.push_back(critical);

  return rules;
}

namespace {

double apply_adjust(const FieldAdjust& a, double current) {
  return a.mode == FieldAdjust::Mode::set ? a.value : current * a.value;
}

std::uint32_t to_window_count(double v, const std::string& rule,
                              const std::string& field) {
  const double r = std::llround(v);
  if (v < 0 || r > 4e9)
    throw PolicyConflictError("rule '" + rule + "' drives " + field +
                              " out of range");
  return static_cast<std::uint32_t>(r);
}

}  // namespace

DetectorConfig derive_config(const NodeProfile& profile,
                             const TaskCriticality& criticality,
                             std::vector<PolicyRule> rules,
                             const DetectorConfig& base) {
  base.validate();
  if (rules.empty()) throw ConfigError("policy rule set is empty");

  std::set<int> priorities;
  for (const auto& r : rules)
    if (!priorities.insert(r.priority).second)
      throw ConfigError("duplicate policy priority " + std::to_string(r.priority) +
                        " (rule '" + r.name + "')");

  // Priority alone decides the application order, so storage order is
  // irrelevant.
  std::sort(rules.begin(), rules.end(),
            [](const PolicyRule& a, const PolicyRule& b) {
              return a.priority < b.priority;
            });

  if (!rules.front().match.is_catch_all())
    throw ConfigError("policy rule set needs a catch-all rule at lowest priority");

  DetectorConfig out = base;
  std::string last_window_rule = "base";  // last rule that touched a window bound
  for (const auto& rule : rules) {
    if (!rule.match.matches(profile, criticality)) continue;
    if (rule.omega_min) {
      out.omega_min = to_window_count(
          apply_adjust(*rule.omega_min, out.omega_min), rule.name, "omega_min");
      last_window_rule = rule.name;
    }
    if (rule.omega_max) {
      out.omega_max = to_window_count(
          apply_adjust(*rule.omega_max, out.omega_max), rule.name, "omega_max");
      last_window_rule = rule.name;
    }
    if (rule.heartbeat_period)
      out.heartbeat_period = apply_adjust(*rule.heartbeat_period, out.heartbeat_period);
    if (rule.threshold)
      out.threshold = apply_adjust(*rule.threshold, out.threshold);
  }

  try {
    out.validate();
  } catch (const ConfigError& e) {
    throw PolicyConflictError(std::string(e.what()) + " (last rule touching the "
                              "learning window: '" + last_window_rule + "')");
  }
  return out;
}

}  // namespace selfheal

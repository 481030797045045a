#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfheal/accrual_fd.hpp"

namespace selfheal {

enum class LinkKind { wired, wireless };
enum class PowerKind { mains, battery };
enum class Mobility { stationary, mobile };

std::string to_string(LinkKind k);
std::string to_string(PowerKind k);
std::string to_string(Mobility k);
LinkKind link_kind_from_string(const std::string& s);
PowerKind power_kind_from_string(const std::string& s);
Mobility mobility_from_string(const std::string& s);

// Static attributes of a device that policies key on.
struct NodeProfile {
  LinkKind link = LinkKind::wired;
  PowerKind power = PowerKind::mains;
  Mobility mobility = Mobility::stationary;

  bool operator==(const NodeProfile&) const = default;
};

// How much an application depends on the monitored task. Computed from the
// recipe structure and the replacement analysis, never guessed by hand.
struct TaskCriticality {
  bool replacement_available = true;
  bool central_to_application = false;

  bool operator==(const TaskCriticality&) const = default;
};

// One detector-config field override: either an absolute value or a factor
// applied to the value accumulated so far.
struct FieldAdjust {
  enum class Mode { set, scale };
  Mode mode = Mode::set;
  double value = 0.0;
};

// Conjunction of optional attribute tests; an empty match is a catch-all.
struct RuleMatch {
  std::optional<LinkKind> link;
  std::optional<PowerKind> power;
  std::optional<Mobility> mobility;
  std::optional<bool> replacement_available;
  std::optional<bool> central_to_application;

  bool matches(const NodeProfile& p, const TaskCriticality& c) const;
  bool is_catch_all() const;
};

struct PolicyRule {
  std::string name;
  int priority = 0;  // higher priority is applied later and wins on conflicts
  RuleMatch match;
  std::optional<FieldAdjust> omega_min;
  std::optional<FieldAdjust> omega_max;
  std::optional<FieldAdjust> heartbeat_period;
  std::optional<FieldAdjust> threshold;
};

// The shipped rule table. Directions follow the usual tuning advice for
// heterogeneous device fleets; the magnitudes are configuration defaults, not
// constants anything else depends on.
//
//   default        catch-all, no overrides
//   mobile         omega_min 5, omega_max 50 (adapt quickly to link changes)
//   wired-stationary   omega_max 5000 (ride out transient hiccups)
//   replaceable    threshold 0.5 (false positives are cheap)
//   critical       heartbeat_period x0.5, threshold 1.2 (central task, no spare)
std::vector<PolicyRule> default_policy_rules();

// Applies every matching rule to `base` in ascending priority order and
// validates the result. Throws ConfigError when the rule set lacks a
// catch-all or contains duplicate priorities, and PolicyConflictError (naming
// the offending rules) when the derived config is invalid.
DetectorConfig derive_config(const NodeProfile& profile,
                             const TaskCriticality& criticality,
                             std::vector<PolicyRule> rules,
                             const DetectorConfig& base);

}  // namespace selfheal

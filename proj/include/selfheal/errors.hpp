#pragma once

#include <stdexcept>
#include <string>

namespace selfheal {

// Base class for all domain errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A timestamp was not strictly later than the previous one.
struct OrderingError : Error {
  using Error::Error;
};

// Too few samples for the requested statistic.
struct ArityError : Error {
  using Error::Error;
};

// Invalid configuration value, section, or file.
struct ConfigError : Error {
  using Error::Error;
};

// Policy application produced an invalid detector configuration.
struct PolicyConflictError : Error {
  using Error::Error;
};

// An allocation routes a recipe edge between disconnected nodes.
struct InfeasibleCommunicationError : Error {
  using Error::Error;
};

// Recipe shape constraints violated (e.g. wide recipe with < 3 tasks).
struct ShapeError : Error {
  using Error::Error;
};

// Instance exceeds a hard size guard.
struct SizeGuardError : Error {
  using Error::Error;
};

}  // namespace selfheal

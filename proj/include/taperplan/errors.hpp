#pragma once

#include <stdexcept>
#include <string>

namespace taperplan {

// Bad user-supplied configuration or arguments.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failure while integrating a charge trace (stall, step-size abuse, ...).
struct SimulationError : std::runtime_error {
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

// Solver-level failure: malformed model, singular basis, iteration runaway.
struct SolveError : std::runtime_error {
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (model files, solution files, profiles).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace taperplan

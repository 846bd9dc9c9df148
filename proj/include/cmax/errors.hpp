#pragma once

#include <stdexcept>
#include <string>

namespace cmax {

// Malformed input text (instance files, scheme files, CLI numbers).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A configured resource cap (box volume, time limit, size cap) was hit.
// Deliberately distinct from "infeasible": the caller may retry with a
// larger budget or fall back to a heuristic.
struct ResourceLimitError : std::runtime_error {
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant failed. Never expected on any input; indicates a bug.
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace cmax

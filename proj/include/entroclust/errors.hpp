#pragma once

#include <stdexcept>
#include <string>

namespace entroclust {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unreadable input (CSV, XES, JSON). Carries a human-readable
// location (row number, line, trace id) inside the message.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// A caller violated an operation precondition (unaugmented trace, removing
// counts that were never added, unknown node, ...).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& msg) : Error(msg) {}
};

// Invalid argument combination (k out of range, degenerate matrix, ...).
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

// A metric is undefined for the given input (e.g. density of a graph with
// fewer than two nodes).
class UndefinedMetricError : public Error {
 public:
  explicit UndefinedMetricError(const std::string& msg) : Error(msg) {}
};

// A trace hit a zero-probability transition during relevance scoring.
// variant_index is -1 when the trace did not come from a variant log.
class NonFittingTraceError : public Error {
 public:
  NonFittingTraceError(const std::string& msg, long long variant_index = -1)
      : Error(msg), variant_index_(variant_index) {}

  long long variant_index() const { return variant_index_; }

 private:
  long long variant_index_;
};

}  // namespace entroclust

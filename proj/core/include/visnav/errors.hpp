#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace visnav {

// Base class for recoverable stack errors. Precondition violations throw
// std::invalid_argument directly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// World generation could not satisfy its invariants within the retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Data failed an invariant check (wire responses, manifests, configs).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-contract wire traffic.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

// Relative-pose estimation failure between two frames.
class EstimateError : public Error {
 public:
  enum class Kind { DegenerateGeometry, UnreliableEstimate };

  EstimateError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Plan decode failure, carrying the offending step index so the policy layer
// can decide on a fallback.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t step_index, EstimateError::Kind kind, const std::string& what)
      : Error(what), step_index_(step_index), kind_(kind) {}

  std::size_t step_index() const { return step_index_; }
  EstimateError::Kind kind() const { return kind_; }

 private:
  std::size_t step_index_;
  EstimateError::Kind kind_;
};

}  // namespace visnav

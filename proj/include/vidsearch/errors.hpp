#pragma once

#include <stdexcept>
#include <string>

namespace vidsearch {

// Caller passed a value outside an operation's precondition.
class RejectedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A backend returned data that breaks its interface contract
// (e.g. a similarity outside [0,1]).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The segment has no interior grid point and cannot be split further.
class UnexpandableSegment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Network-level failure: connection refused, timeout, non-2xx status.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, int status = 0)
      : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// The backend answered but the payload could not be interpreted.
class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A backend call failed after exhausting its retry budget.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, int retries)
      : std::runtime_error(what), retries_(retries) {}
  int retries() const noexcept { return retries_; }

 private:
  int retries_;
};

}  // namespace vidsearch

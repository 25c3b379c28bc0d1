#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <utility>

#include "vidsearch/errors.hpp"

namespace vidsearch {

struct RetryPolicy {
  int max_retries = 2;
  // Delay before retry n (1-based) is base_delay * 2^(n-1). Zero in simulation.
  std::chrono::milliseconds base_delay{0};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for

  std::chrono::milliseconds delay_before(int retry) const;
  void wait(int retry) const;
};

enum class FailureKind { transport, malformed };

// Failure after the retry budget is spent; remembers the last failure kind.
class RetriesExhausted : public BackendError {
 public:
  RetriesExhausted(const std::string& what, int retries, FailureKind kind)
      : BackendError(what, retries), kind_(kind) {}
  FailureKind kind() const noexcept { return kind_; }

 private:
  FailureKind kind_;
};

// Runs `fn` until it succeeds, retrying on TransportError and
// MalformedResponse. `retries` receives the number of retries performed.
template <class Fn>
auto call_with_retry(const RetryPolicy& policy, Fn&& fn, int& retries) -> decltype(fn()) {
  retries = 0;
  for (;;) {
    FailureKind kind;
    std::string message;
    try {
      return fn();
    } catch (const TransportError& e) {
      kind = FailureKind::transport;
      message = e.what();
    } catch (const MalformedResponse& e) {
      kind = FailureKind::malformed;
      message = e.what();
    }
    if (retries >= policy.max_retries) {
      throw RetriesExhausted(message + " (after " + std::to_string(retries) + " retries)", retries,
                             kind);
    }
    ++retries;
    policy.wait(retries);
  }
}

}  // namespace vidsearch

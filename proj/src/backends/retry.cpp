#include "vidsearch/backends/retry.hpp"

#include <thread>

namespace vidsearch {

std::chrono::milliseconds RetryPolicy::delay_before(int retry) const {
  if (retry <= 0) return std::chrono::milliseconds{0};
  return base_delay * (1LL << (retry - 1));
}

void RetryPolicy::wait(int retry) const {
  const auto delay = delay_before(retry);
  if (delay.count() <= 0) return;
  if (sleep) {
    sleep(delay);
  } else {
    std::this_thread::sleep_for(delay);
  }
}

}  // namespace vidsearch

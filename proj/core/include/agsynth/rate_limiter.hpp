#pragma once

#include <chrono>
#include <functional>
#include <mutex>

namespace agsynth {

/// Spaces request start times at least 60 / requests_per_minute seconds
/// apart across every thread sharing the limiter.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  using Sleep = std::function<void(std::chrono::steady_clock::duration)>;

  explicit RateLimiter(double requests_per_minute, Clock clock = {}, Sleep sleep = {});

  /// Blocks until the caller's slot arrives.
  void acquire();

  std::chrono::steady_clock::duration interval() const noexcept { return interval_; }

 private:
  std::chrono::steady_clock::duration interval_;
  Clock clock_;
  Sleep sleep_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_slot_{};
  bool first_ = true;
};

}  // namespace agsynth

#include "agsynth/rate_limiter.hpp"

#include <thread>

#include "agsynth/error.hpp"

namespace agsynth {

RateLimiter::RateLimiter(double requests_per_minute, Clock clock, Sleep sleep)
    : clock_(std::move(clock)), sleep_(std::move(sleep)) {
  if (!(requests_per_minute >= 1.0))
    throw Error(ErrorCode::kInvalidConfig, "requests_per_minute must be >= 1");
  interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(60.0 / requests_per_minute));
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
  if (!sleep_) sleep_ = [](auto d) { std::this_thread::sleep_for(d); };
}

void RateLimiter::acquire() {
  std::chrono::steady_clock::duration wait{0};
  {
    std::lock_guard lock(mu_);
    const auto now = clock_();
    auto slot = now;
    if (!first_ && next_slot_ > now) {
      slot = next_slot_;
      wait = next_slot_ - now;
    }
    first_ = false;
    next_slot_ = slot + interval_;
  }
  if (wait.count() > 0) sleep_(wait);
}

}  // namespace agsynth

#pragma once

#include <chrono>
#include <string>

namespace asrbench {

// Time source used for RTFx spans and result timestamps.
class Clock {
 public:
  virtual ~Clock() = default;
  // Seconds on a monotonic timeline; only differences are meaningful.
  virtual double monotonic_seconds() const = 0;
  virtual std::chrono::system_clock::time_point wall_now() const = 0;
};

class SteadyClock final : public Clock {
 public:
  double monotonic_seconds() const override;
  std::chrono::system_clock::time_point wall_now() const override;
};

// The process-wide real clock.
const Clock& steady_clock();

// Virtual clock advanced explicitly; wall time is the Unix epoch plus the
// accumulated offset so simulated runs produce stable timestamps.
class ManualClock final : public Clock {
 public:
  double monotonic_seconds() const override { return now_; }
  std::chrono::system_clock::time_point wall_now() const override;
  void advance(double seconds);

 private:
  double now_ = 0.0;
};

// RFC 3339 UTC timestamp with millisecond precision, e.g. 2025-10-08T12:00:00.000Z.
std::string format_utc(std::chrono::system_clock::time_point tp);

// Wall-clock seconds spent in `fn`, measured on `clock`.
template <typename Fn>
double time_call(const Clock& clock, Fn&& fn) {
  const double start = clock.monotonic_seconds();
  fn();
  return clock.monotonic_seconds() - start;
}

}  // namespace asrbench

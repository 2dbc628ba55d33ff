#include "asrbench/clock.hpp"

#include <ctime>

#include <fmt/format.h>

namespace asrbench {

double SteadyClock::monotonic_seconds() const {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::chrono::system_clock::time_point SteadyClock::wall_now() const {
  return std::chrono::system_clock::now();
}

const Clock& steady_clock() {
  static const SteadyClock clock;
  return clock;
}

std::chrono::system_clock::time_point ManualClock::wall_now() const {
  using namespace std::chrono;
  return system_clock::time_point{} + duration_cast<system_clock::duration>(duration<double>(now_));
}

void ManualClock::advance(double seconds) {
  if (seconds > 0) now_ += seconds;
}

std::string format_utc(std::chrono::system_clock::time_point tp) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(tp.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms % 1000);
}

}  // namespace asrbench

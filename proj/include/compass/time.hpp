#pragma once

#include <atomic>
#include <chrono>
#include <string>
#include <string_view>

namespace compass {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Date = std::chrono::year_month_day;

/// "2024-05-09T08:00:00.000Z"
std::string format_timestamp(Timestamp t);
/// Accepts the format above, with or without the millisecond part.
Timestamp parse_timestamp(std::string_view s);

/// "2024-05-09"
std::string format_date(Date d);
Date parse_date(std::string_view s);

Date utc_date(Timestamp t);
Timestamp start_of_day(Date d);

/// Time source for everything that stamps records or waits. Offline runs use
/// SimulatedClock so stores are reproducible byte for byte.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
  void sleep_until(Timestamp t) {
    const auto n = now();
    if (t > n) sleep_for(t - n);
  }
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
  void sleep_for(std::chrono::milliseconds d) override;
};

/// Frozen clock that only moves when slept on or advanced. Thread-safe.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(Timestamp start) : ms_(start.time_since_epoch().count()) {}

  Timestamp now() const override {
    return Timestamp{std::chrono::milliseconds{ms_.load()}};
  }
  void sleep_for(std::chrono::milliseconds d) override { ms_ += d.count(); }
  void set(Timestamp t) { ms_ = t.time_since_epoch().count(); }

 private:
  std::atomic<long long> ms_;
};

}  // namespace compass

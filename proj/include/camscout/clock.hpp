#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "camscout/linkmodel.hpp"

namespace camscout {

using Duration = std::chrono::milliseconds;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
  virtual void sleep_until(Timestamp when) = 0;
  void sleep_for(Duration d) { sleep_until(now() + d); }
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override { return std::chrono::system_clock::now(); }
  void sleep_until(Timestamp when) override;
};

// Time only moves when someone sleeps. Sleeping advances the clock to the
// requested instant immediately, so 12-hour schedules run in microseconds.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Timestamp start = default_epoch()) : now_(start) {}

  Timestamp now() const override;
  void sleep_until(Timestamp when) override;
  void advance(Duration d);

  // 2019-01-01T00:00:00Z
  static Timestamp default_epoch();

 private:
  mutable std::mutex mu_;
  Timestamp now_;
};

// RFC 3339 UTC with millisecond precision, e.g. 2019-01-01T00:00:00.000Z.
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);
std::int64_t to_unix_ms(Timestamp t);
Timestamp from_unix_ms(std::int64_t ms);

// "250ms", "3s", "5m", "12h", "1d" or a bare number of seconds.
Duration parse_duration(std::string_view text);
std::string format_duration(Duration d);

}  // namespace camscout

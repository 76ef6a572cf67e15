#include "camscout/clock.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <thread>

#include "camscout/error.hpp"

namespace camscout {

void SystemClock::sleep_until(Timestamp when) { std::this_thread::sleep_until(when); }

Timestamp VirtualClock::now() const {
  std::lock_guard lock(mu_);
  return now_;
}

void VirtualClock::sleep_until(Timestamp when) {
  std::lock_guard lock(mu_);
  if (when > now_) now_ = when;
}

void VirtualClock::advance(Duration d) {
  std::lock_guard lock(mu_);
  now_ += d;
}

Timestamp VirtualClock::default_epoch() { return from_unix_ms(1546300800000LL); }

std::int64_t to_unix_ms(Timestamp t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

Timestamp from_unix_ms(std::int64_t ms) {
  return Timestamp(std::chrono::duration_cast<Timestamp::duration>(std::chrono::milliseconds(ms)));
}

std::string format_timestamp(Timestamp t) {
  std::int64_t ms = to_unix_ms(t);
  std::int64_t secs = ms >= 0 ? ms / 1000 : (ms - 999) / 1000;
  int millis = static_cast<int>(ms - secs * 1000);
  std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  std::tm tm{};
  int millis = 0;
  std::string s(text);
  int year, mon, day, hour, min;
  double sec = 0;
  char tz[16] = {0};
  int n = std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%lf%15s", &year, &mon, &day, &hour, &min, &sec, tz);
  if (n < 6) throw Error(ErrorKind::InvalidConfig, "bad timestamp '" + s + "'");
  tm.tm_year = year - 1900;
  tm.tm_mon = mon - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = min;
  tm.tm_sec = static_cast<int>(sec);
  millis = static_cast<int>((sec - tm.tm_sec) * 1000.0 + 0.5);
  std::int64_t epoch = timegm(&tm);
  std::int64_t offset_s = 0;
  std::string_view zone(tz);
  if (!zone.empty() && zone != "Z" && (zone[0] == '+' || zone[0] == '-')) {
    int oh = 0, om = 0;
    std::sscanf(tz + 1, "%d:%d", &oh, &om);
    offset_s = (oh * 3600 + om * 60) * (zone[0] == '+' ? 1 : -1);
  }
  return from_unix_ms((epoch - offset_s) * 1000 + millis);
}

Duration parse_duration(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::InvalidConfig, "empty duration");
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{}) throw Error(ErrorKind::InvalidConfig, "bad duration '" + std::string(text) + "'");
  std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
  double scale_ms = 1000.0;
  if (unit.empty() || unit == "s") scale_ms = 1000.0;
  else if (unit == "ms") scale_ms = 1.0;
  else if (unit == "m" || unit == "min") scale_ms = 60'000.0;
  else if (unit == "h" || unit == "hr" || unit == "hrs") scale_ms = 3'600'000.0;
  else if (unit == "d") scale_ms = 86'400'000.0;
  else throw Error(ErrorKind::InvalidConfig, "bad duration unit '" + std::string(unit) + "'");
  if (value < 0) throw Error(ErrorKind::InvalidConfig, "negative duration");
  return Duration(static_cast<std::int64_t>(value * scale_ms + 0.5));
}

std::string format_duration(Duration d) {
  auto ms = d.count();
  if (ms % 3'600'000 == 0 && ms != 0) return std::to_string(ms / 3'600'000) + "h";
  if (ms % 60'000 == 0 && ms != 0) return std::to_string(ms / 60'000) + "m";
  if (ms % 1000 == 0) return std::to_string(ms / 1000) + "s";
  return std::to_string(ms) + "ms";
}

}  // namespace camscout

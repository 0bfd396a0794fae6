#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mmdd {

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

// Weekday of a day number, Monday = 0 .. Sunday = 6.
int weekday_mon0(std::int64_t days);

// One wall-clock hour. Timestamps are naive local time, so a repeated DST
// hour collapses onto a single slot and its counts merge.
struct HourSlot {
  std::int64_t hours = 0;  // hours since 1970-01-01 00:00

  friend auto operator<=>(const HourSlot&, const HourSlot&) = default;

  std::int64_t day() const;
  int hour_of_day() const;  // 0..23

  static HourSlot from_civil(int year, unsigned month, unsigned day, int hour);
  static HourSlot from_seconds(std::int64_t seconds_since_epoch);
};

// (week, weekday, hour) coordinates of a slot relative to a span start.
// Weeks are Monday-based, counted from the week containing the span start.
struct SlotParts {
  int week = 0;
  int weekday = 0;  // Mon = 0
  int hour = 0;     // 0..23
};

// Throws std::invalid_argument when the slot precedes the span start.
SlotParts decompose_slot(HourSlot slot, HourSlot span_start);
HourSlot recompose_slot(const SlotParts& parts, HourSlot span_start);

// Seconds since epoch for a datetime string, nullopt on malformed input.
// `format` takes std::get_time directives, e.g. "%Y-%m-%d %H:%M:%S".
std::optional<std::int64_t> parse_datetime(std::string_view text,
                                           const std::string& format);

std::string format_hour(HourSlot slot);     // "YYYY-MM-DD HH:00:00"
std::string format_date(HourSlot slot);     // "YYYY-MM-DD"
std::string format_seconds(std::int64_t seconds_since_epoch);

}  // namespace mmdd

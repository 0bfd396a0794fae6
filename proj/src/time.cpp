#include "mmdd/time.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mmdd {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

bool valid_civil(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30,
                                      31, 31, 30, 31, 30, 31};
  int max_day = lengths[month - 1];
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) max_day = 29;
  return day <= max_day;
}

}  // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp + (mp < 10 ? 3 : -9);
  year = static_cast<int>(y + (month <= 2));
}

int weekday_mon0(std::int64_t days) {
  // 1970-01-01 was a Thursday.
  return static_cast<int>(floor_mod(days + 3, 7));
}

std::int64_t HourSlot::day() const { return floor_div(hours, 24); }

int HourSlot::hour_of_day() const {
  return static_cast<int>(floor_mod(hours, 24));
}

HourSlot HourSlot::from_civil(int year, unsigned month, unsigned day, int hour) {
  return HourSlot{days_from_civil(year, month, day) * 24 + hour};
}

HourSlot HourSlot::from_seconds(std::int64_t seconds) {
  return HourSlot{floor_div(seconds, 3600)};
}

SlotParts decompose_slot(HourSlot slot, HourSlot span_start) {
  if (slot < span_start) {
    throw std::invalid_argument("decompose_slot: slot precedes span start");
  }
  const std::int64_t day = slot.day();
  const std::int64_t monday = day - weekday_mon0(day);
  const std::int64_t start_day = span_start.day();
  const std::int64_t start_monday = start_day - weekday_mon0(start_day);
  SlotParts parts;
  parts.week = static_cast<int>((monday - start_monday) / 7);
  parts.weekday = weekday_mon0(day);
  parts.hour = slot.hour_of_day();
  return parts;
}

HourSlot recompose_slot(const SlotParts& parts, HourSlot span_start) {
  const std::int64_t start_day = span_start.day();
  const std::int64_t start_monday = start_day - weekday_mon0(start_day);
  const std::int64_t day = start_monday + 7LL * parts.week + parts.weekday;
  return HourSlot{day * 24 + parts.hour};
}

std::optional<std::int64_t> parse_datetime(std::string_view text,
                                           const std::string& format) {
  std::istringstream in{std::string(text)};
  std::tm tm{};
  tm.tm_mday = 1;
  in >> std::get_time(&tm, format.c_str());
  if (in.fail()) return std::nullopt;
  // Anything beyond trailing whitespace means a malformed value.
  char c;
  while (in.get(c)) {
    if (c != ' ' && c != '\t' && c != '\r') return std::nullopt;
  }
  const int year = tm.tm_year + 1900;
  const int month = tm.tm_mon + 1;
  if (!valid_civil(year, month, tm.tm_mday)) return std::nullopt;
  if (tm.tm_hour < 0 || tm.tm_hour > 23 || tm.tm_min < 0 || tm.tm_min > 59 ||
      tm.tm_sec < 0 || tm.tm_sec > 60) {
    return std::nullopt;
  }
  std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                      static_cast<unsigned>(tm.tm_mday));
  return days * 86400 + tm.tm_hour * 3600 + tm.tm_min * 60 + tm.tm_sec;
}

std::string format_hour(HourSlot slot) {
  int year;
  unsigned month, day;
  civil_from_days(slot.day(), year, month, day);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02d:00:00", year, month, day,
                slot.hour_of_day());
  return buf;
}

std::string format_date(HourSlot slot) {
  int year;
  unsigned month, day;
  civil_from_days(slot.day(), year, month, day);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
  return buf;
}

std::string format_seconds(std::int64_t seconds) {
  const std::int64_t days = seconds >= 0 ? seconds / 86400
                                         : (seconds - 86399) / 86400;
  const std::int64_t rem = seconds - days * 86400;
  int year;
  unsigned month, day;
  civil_from_days(days, year, month, day);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02lld:%02lld:%02lld", year,
                month, day, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace mmdd

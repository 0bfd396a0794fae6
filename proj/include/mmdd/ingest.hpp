#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmdd/mode.hpp"
#include "mmdd/series.hpp"
#include "mmdd/time.hpp"

namespace mmdd {

// Column layout of one delimiter-separated event feed.
struct ColumnSchema {
  char delimiter = ',';
  std::string timestamp_column = "timestamp";
  std::string mode_column = "mode";
  std::string timestamp_format = "%Y-%m-%d %H:%M:%S";
  // Single-mode feeds (e.g. a probe-vehicle dump) carry no mode column.
  std::optional<Mode> fixed_mode;
};

struct RawEvent {
  Mode mode = Mode::bus;
  std::int64_t ts_seconds = 0;
  std::string source_id;
  std::size_t line = 0;  // 1-based input line; 0 for synthetic events
};

struct Reject {
  std::size_t line = 0;
  std::string reason;
};

// Above this share of rejected rows/events the whole input is refused.
inline constexpr double kMaxRejectRate = 0.10;

struct ParseResult {
  std::vector<RawEvent> events;  // input order
  std::vector<Reject> rejects;
  std::size_t data_rows = 0;     // rows after the header
};

// Parses one feed. Throws InputError when the header lacks a mapped column or
// the reject rate exceeds kMaxRejectRate.
ParseResult parse_events(std::istream& in, const ColumnSchema& schema);

struct AggregateResult {
  DemandSeries series;
  std::vector<Reject> rejects;  // events outside the span, keyed by input line
  std::size_t accepted = 0;
};

// Counts events into hourly cells. Hours with zero events across all modes
// are flagged missing (a city-wide gap is a data outage, not real demand);
// zeros in only some modes stay as zeros. Throws InputError when too many
// events fall outside the span.
AggregateResult aggregate_hourly(const std::vector<RawEvent>& events,
                                 HourSlot span_start, std::size_t n_hours);

// One "<line>\t<reason>" line per reject.
void write_reject_log(std::ostream& out, const std::vector<Reject>& rejects);

// Splits one CSV line; double quotes group fields, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line, char delimiter);

}  // namespace mmdd

#include "mmdd/ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "mmdd/errors.hpp"

namespace mmdd {

namespace {

void strip_bom(std::string& line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB &&
      static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

int find_column(const std::vector<std::string>& header,
                const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return -1;
  return static_cast<int>(it - header.begin());
}

void check_reject_rate(std::size_t rejects, std::size_t total,
                       const char* what) {
  if (total == 0) return;
  if (static_cast<double>(rejects) >
      kMaxRejectRate * static_cast<double>(total)) {
    throw InputError(std::string(what) + ": reject rate " +
                     std::to_string(rejects) + "/" + std::to_string(total) +
                     " exceeds 10%");
  }
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == delimiter && !quoted) {
      fields.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  fields.push_back(std::move(cell));
  return fields;
}

ParseResult parse_events(std::istream& in, const ColumnSchema& schema) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("parse_events: missing header row");
  }
  strip_bom(line);
  strip_cr(line);
  const auto header = split_csv_line(line, schema.delimiter);

  const int ts_col = find_column(header, schema.timestamp_column);
  if (ts_col < 0) {
    throw InputError("parse_events: timestamp column '" +
                     schema.timestamp_column + "' not in header");
  }
  int mode_col = -1;
  if (!schema.fixed_mode) {
    mode_col = find_column(header, schema.mode_column);
    if (mode_col < 0) {
      throw InputError("parse_events: mode column '" + schema.mode_column +
                       "' not in header");
    }
  }
  const int id_col = find_column(header, "source_id");
  const std::size_t min_fields =
      static_cast<std::size_t>(std::max(ts_col, mode_col)) + 1;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    ++result.data_rows;
    const auto fields = split_csv_line(line, schema.delimiter);
    if (fields.size() < min_fields) {
      result.rejects.push_back({line_no, "malformed row: too few fields"});
      continue;
    }
    const auto ts = parse_datetime(fields[ts_col], schema.timestamp_format);
    if (!ts) {
      result.rejects.push_back(
          {line_no, "bad timestamp '" + fields[ts_col] + "'"});
      continue;
    }
    Mode mode;
    if (schema.fixed_mode) {
      mode = *schema.fixed_mode;
    } else {
      const auto parsed = mode_from_string(fields[mode_col]);
      if (!parsed) {
        result.rejects.push_back(
            {line_no, "unknown mode '" + fields[mode_col] + "'"});
        continue;
      }
      mode = *parsed;
    }
    RawEvent event;
    event.mode = mode;
    event.ts_seconds = *ts;
    if (id_col >= 0 && static_cast<std::size_t>(id_col) < fields.size()) {
      event.source_id = fields[id_col];
    }
    event.line = line_no;
    result.events.push_back(std::move(event));
  }
  check_reject_rate(result.rejects.size(), result.data_rows, "parse_events");
  return result;
}

AggregateResult aggregate_hourly(const std::vector<RawEvent>& events,
                                 HourSlot span_start, std::size_t n_hours) {
  AggregateResult result{DemandSeries(span_start, n_hours), {}, 0};
  for (const auto& event : events) {
    const auto slot = HourSlot::from_seconds(event.ts_seconds);
    const auto idx = result.series.index_of(slot);
    if (!idx) {
      result.rejects.push_back({event.line, "event outside span"});
      continue;
    }
    result.series.add_count(event.mode, *idx, 1);
    ++result.accepted;
  }
  check_reject_rate(result.rejects.size(), events.size(), "aggregate_hourly");
  for (std::size_t i = 0; i < result.series.size(); ++i) {
    std::int64_t total = 0;
    for (Mode q : kAllModes) total += result.series.count(q, i);
    result.series.set_missing(i, total == 0);
  }
  return result;
}

void write_reject_log(std::ostream& out, const std::vector<Reject>& rejects) {
  for (const auto& r : rejects) {
    out << r.line << '\t' << r.reason << '\n';
  }
}

}  // namespace mmdd

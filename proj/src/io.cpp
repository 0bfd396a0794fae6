#include "mmdd/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mmdd/errors.hpp"

namespace mmdd::io {

namespace {

constexpr const char* kGridHeader = "timestamp,bus,tram,metro,bike,car";

double parse_double(const std::string& field, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string(what) + ": bad numeric field '" + field + "'");
  }
}

long long parse_int(const std::string& field, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string(what) + ": bad integer field '" + field + "'");
  }
}

HourSlot parse_hour_field(const std::string& field, const char* what) {
  const auto ts = parse_datetime(field, "%Y-%m-%d %H:%M:%S");
  if (!ts) {
    throw InputError(std::string(what) + ": bad timestamp '" + field + "'");
  }
  return HourSlot::from_seconds(*ts);
}

std::string next_line(std::istream& in, bool& ok) {
  std::string line;
  ok = static_cast<bool>(std::getline(in, line));
  if (ok && !line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_events_csv(std::ostream& out, const DemandSeries& series) {
  out << "timestamp,mode\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.missing(i)) continue;
    const std::int64_t base = series.slot(i).hours * 3600;
    for (Mode q : kAllModes) {
      const std::int64_t count = series.count(q, i);
      for (std::int64_t e = 0; e < count; ++e) {
        const std::int64_t second = e * 3600 / count;
        out << format_seconds(base + second) << ',' << to_string(q) << '\n';
      }
    }
  }
}

void write_demand_csv(std::ostream& out, const DemandSeries& series) {
  out << kGridHeader << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_hour(series.slot(i));
    if (series.missing(i)) {
      out << ",,,,,";
    } else {
      for (Mode q : kAllModes) out << ',' << series.count(q, i);
    }
    out << '\n';
  }
}

DemandSeries read_demand_csv(std::istream& in) {
  bool ok = false;
  const std::string header = next_line(in, ok);
  if (!ok || header != kGridHeader) {
    throw InputError("demand csv: bad or missing header");
  }
  struct Row {
    HourSlot slot;
    bool missing;
    std::array<std::int64_t, kNumModes> counts;
  };
  std::vector<Row> rows;
  while (true) {
    const std::string line = next_line(in, ok);
    if (!ok) break;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, ',');
    if (fields.size() != 1 + kNumModes) {
      throw InputError("demand csv: wrong field count");
    }
    Row row{parse_hour_field(fields[0], "demand csv"), false, {}};
    row.missing = fields[1].empty();
    for (int q = 0; q < kNumModes; ++q) {
      const auto& f = fields[static_cast<std::size_t>(q) + 1];
      if (f.empty() != row.missing) {
        throw InputError("demand csv: partially empty row");
      }
      row.counts[static_cast<std::size_t>(q)] =
          row.missing ? 0 : parse_int(f, "demand csv");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw InputError("demand csv: no rows");
  const std::size_t n = rows.size();
  DemandSeries series(rows.front().slot, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].slot != series.slot(i)) {
      throw InputError("demand csv: rows must be contiguous hours");
    }
    series.set_missing(i, rows[i].missing);
    for (Mode q : kAllModes) {
      series.set_count(q, i,
                       rows[i].counts[static_cast<std::size_t>(mode_index(q))]);
    }
  }
  return series;
}

void write_signature_csv(std::ostream& out, const SignatureTable& table) {
  out << "mode,week,weekday,hour,mu,sigma,lambda,n_samples\n";
  for (Mode q : kAllModes) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      const SlotParts parts = decompose_slot(
          HourSlot{table.start().hours + static_cast<std::int64_t>(i)},
          table.start());
      out << to_string(q) << ',' << parts.week << ',' << parts.weekday << ','
          << parts.hour << ',';
      const auto& element = table.at(q, i);
      if (element) {
        out << format_full(element->mu) << ',' << format_full(element->sigma)
            << ',' << format_full(element->lambda) << ','
            << element->n_samples;
      } else {
        out << ",,,0";
      }
      out << '\n';
    }
  }
}

SignatureTable read_signature_csv(std::istream& in, HourSlot start,
                                  std::size_t n_hours, double alpha, int K) {
  bool ok = false;
  const std::string header = next_line(in, ok);
  if (!ok || header != "mode,week,weekday,hour,mu,sigma,lambda,n_samples") {
    throw InputError("signature csv: bad or missing header");
  }
  SignatureTable table(start, n_hours, alpha, K);
  while (true) {
    const std::string line = next_line(in, ok);
    if (!ok) break;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, ',');
    if (fields.size() != 8) throw InputError("signature csv: wrong field count");
    const auto mode = mode_from_string(fields[0]);
    if (!mode) throw InputError("signature csv: unknown mode '" + fields[0] + "'");
    SlotParts parts;
    parts.week = static_cast<int>(parse_int(fields[1], "signature csv"));
    parts.weekday = static_cast<int>(parse_int(fields[2], "signature csv"));
    parts.hour = static_cast<int>(parse_int(fields[3], "signature csv"));
    const HourSlot slot = recompose_slot(parts, start);
    const std::int64_t offset = slot.hours - start.hours;
    if (offset < 0 || offset >= static_cast<std::int64_t>(n_hours)) {
      throw InputError("signature csv: cell outside span");
    }
    if (fields[4].empty()) continue;  // unsupported cell
    SignatureElement element;
    element.mu = parse_double(fields[4], "signature csv");
    element.sigma = parse_double(fields[5], "signature csv");
    element.lambda = parse_double(fields[6], "signature csv");
    element.n_samples = static_cast<int>(parse_int(fields[7], "signature csv"));
    element.support = TemporalSupport{parts.week, parts.weekday, parts.hour, {}};
    table.at(*mode, static_cast<std::size_t>(offset)) = std::move(element);
  }
  return table;
}

void write_deviance_csv(std::ostream& out, const DevianceMatrix& matrix) {
  out << kGridHeader << '\n';
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    out << format_hour(matrix.slot(i));
    for (const auto& cell : matrix.rows[i]) {
      out << ',';
      if (cell) out << format_full(*cell);
    }
    out << '\n';
  }
}

void write_anomaly_csv(std::ostream& out, const AnomalyMatrix& matrix) {
  out << kGridHeader << ",flags\n";
  for (const auto& row : matrix.rows) {
    out << format_hour(row.slot);
    for (double delta : row.deviance) out << ',' << format_full(delta);
    out << ',';
    for (bool flag : row.flags) out << (flag ? '1' : '0');
    out << '\n';
  }
}

AnomalyMatrix read_anomaly_csv(std::istream& in, double alpha) {
  bool ok = false;
  const std::string header = next_line(in, ok);
  if (!ok || header != std::string(kGridHeader) + ",flags") {
    throw InputError("anomaly csv: bad or missing header");
  }
  AnomalyMatrix matrix;
  matrix.alpha = alpha;
  while (true) {
    const std::string line = next_line(in, ok);
    if (!ok) break;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, ',');
    if (fields.size() != 2 + kNumModes) {
      throw InputError("anomaly csv: wrong field count");
    }
    AnomalyRow row;
    row.slot = parse_hour_field(fields[0], "anomaly csv");
    for (int q = 0; q < kNumModes; ++q) {
      const double delta =
          parse_double(fields[static_cast<std::size_t>(q) + 1], "anomaly csv");
      row.deviance[static_cast<std::size_t>(q)] = delta;
      row.flags[static_cast<std::size_t>(q)] = std::abs(delta) > alpha;
    }
    matrix.rows.push_back(row);
  }
  matrix.complete_rows = matrix.rows.size();  // provenance lost in export
  return matrix;
}

void write_clusters_csv(std::ostream& out, const ClusterResult& result) {
  out << "timestamp,cluster_id\n";
  std::vector<std::pair<HourSlot, int>> rows;
  for (const auto& cluster : result.clusters) {
    for (const HourSlot& slot : cluster.hours) {
      rows.emplace_back(slot, cluster.cluster_id);
    }
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& [slot, id] : rows) {
    out << format_hour(slot) << ',' << id << '\n';
  }
}

std::vector<std::pair<HourSlot, int>> read_clusters_csv(std::istream& in) {
  bool ok = false;
  const std::string header = next_line(in, ok);
  if (!ok || header != "timestamp,cluster_id") {
    throw InputError("clusters csv: bad or missing header");
  }
  std::vector<std::pair<HourSlot, int>> rows;
  while (true) {
    const std::string line = next_line(in, ok);
    if (!ok) break;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, ',');
    if (fields.size() != 2) throw InputError("clusters csv: wrong field count");
    rows.emplace_back(parse_hour_field(fields[0], "clusters csv"),
                      static_cast<int>(parse_int(fields[1], "clusters csv")));
  }
  return rows;
}

json profiles_to_json(const ClusterResult& result) {
  json out = json::array();
  for (const auto& cluster : result.clusters) {
    json profile;
    for (Mode q : kAllModes) {
      profile[std::string(to_string(q))] =
          cluster.mean_deviance[static_cast<std::size_t>(mode_index(q))];
    }
    out.push_back({{"cluster_id", cluster.cluster_id},
                   {"size", cluster.size},
                   {"share", cluster.share},
                   {"profile", profile}});
  }
  return out;
}

void write_profiles_json(std::ostream& out, const ClusterResult& result) {
  out << profiles_to_json(result).dump(2) << '\n';
}

void write_db_curve_csv(std::ostream& out,
                        const std::vector<std::pair<int, double>>& curve) {
  out << "k,db_index\n";
  for (const auto& [k, db] : curve) {
    out << k << ',' << (std::isinf(db) ? "inf" : format_full(db)) << '\n';
  }
}

void write_sensitivity_csv(std::ostream& out, const SensitivityCurve& curve) {
  out << "alpha,anomaly_fraction\n";
  for (const auto& [alpha, fraction] : curve.points) {
    out << format_full(alpha) << ',' << format_full(fraction) << '\n';
  }
}

void write_calendar_csv(std::ostream& out, const ClusterResult& result) {
  out << "date,hour,cluster_id\n";
  std::vector<std::pair<HourSlot, int>> rows;
  for (const auto& cluster : result.clusters) {
    for (const HourSlot& slot : cluster.hours) {
      rows.emplace_back(slot, cluster.cluster_id);
    }
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& [slot, id] : rows) {
    out << format_date(slot) << ',' << slot.hour_of_day() << ',' << id << '\n';
  }
}

CovariateSeries read_covariate_csv(std::istream& in) {
  bool ok = false;
  const std::string header = next_line(in, ok);
  if (!ok) throw InputError("covariate csv: missing header");
  const auto header_fields = split_csv_line(header, ',');
  if (header_fields.size() != 2 || header_fields[0] != "timestamp") {
    throw InputError("covariate csv: expected 'timestamp,<value>' header");
  }
  CovariateSeries series;
  series.units = header_fields[1];
  while (true) {
    const std::string line = next_line(in, ok);
    if (!ok) break;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, ',');
    if (fields.size() != 2) throw InputError("covariate csv: wrong field count");
    const HourSlot slot = parse_hour_field(fields[0], "covariate csv");
    series.values[slot] = parse_double(fields[1], "covariate csv");
  }
  return series;
}

json ground_truth_to_json(const std::vector<InjectedSlot>& truth) {
  json out = json::array();
  for (const auto& injected : truth) {
    json targets;
    for (Mode q : kAllModes) {
      targets[std::string(to_string(q))] =
          injected.targets[static_cast<std::size_t>(mode_index(q))];
    }
    out.push_back({{"timestamp", format_hour(injected.slot)},
                   {"kind", std::string(to_string(injected.kind))},
                   {"targets", targets}});
  }
  return out;
}

void write_ground_truth_json(std::ostream& out,
                             const std::vector<InjectedSlot>& truth) {
  out << ground_truth_to_json(truth).dump(2) << '\n';
}

BaselineSpec baseline_spec_from_json(const json& j) {
  const json& b = j.contains("baseline") ? j.at("baseline") : j;
  const int weeks = b.value("weeks", 9);
  const std::uint64_t seed = b.value("seed", 0ULL);
  const double noise_frac = b.value("noise_frac", 0.001);

  BaselineSpec spec = BaselineSpec::urban_default(weeks, seed, noise_frac);
  if (b.contains("start")) {
    const auto ts =
        parse_datetime(b.at("start").get<std::string>(), "%Y-%m-%d %H:%M:%S");
    if (!ts) throw ConfigError("baseline: bad start timestamp");
    spec.start = HourSlot::from_seconds(*ts);
  }
  if (b.contains("scale")) {
    for (Mode q : kAllModes) {
      const std::string name(to_string(q));
      if (!b.at("scale").contains(name)) continue;
      const double factor = b.at("scale").at(name).get<double>();
      for (double& m : spec.mean[static_cast<std::size_t>(mode_index(q))]) {
        m *= factor;
      }
    }
    spec.set_noise_frac(noise_frac);
  }
  if (b.contains("mean")) {  // explicit 7x24 template per mode
    for (Mode q : kAllModes) {
      const std::string name(to_string(q));
      if (!b.at("mean").contains(name)) continue;
      const auto& rows = b.at("mean").at(name);
      if (rows.size() != 168) {
        throw ConfigError("baseline: mean template for " + name +
                          " must list 168 values");
      }
      for (std::size_t i = 0; i < 168; ++i) {
        spec.mean[static_cast<std::size_t>(mode_index(q))][i] =
            rows[i].get<double>();
      }
    }
    spec.set_noise_frac(noise_frac);
  }
  return spec;
}

std::vector<Scenario> scenarios_from_json(const json& j) {
  std::vector<Scenario> scenarios;
  if (!j.contains("scenarios")) return scenarios;
  for (const auto& s : j.at("scenarios")) {
    Scenario scenario;
    const auto kind = scenario_kind_from_string(s.value("kind", "custom"));
    if (!kind) {
      throw ConfigError("scenario: unknown kind '" +
                        s.value("kind", std::string()) + "'");
    }
    scenario.kind = *kind;
    scenario.ground_truth = s.value("ground_truth", true);
    if (s.contains("targets")) {
      for (Mode q : kAllModes) {
        const std::string name(to_string(q));
        if (s.at("targets").contains(name)) {
          scenario.targets[static_cast<std::size_t>(mode_index(q))] =
              s.at("targets").at(name).get<double>();
        }
      }
    }
    auto parse_range = [](const json& r) {
      const auto ts =
          parse_datetime(r.at("start").get<std::string>(), "%Y-%m-%d %H:%M:%S");
      if (!ts) throw ConfigError("scenario: bad range start");
      return HourRange{HourSlot::from_seconds(*ts), r.at("hours").get<int>()};
    };
    if (s.contains("ranges")) {
      for (const auto& r : s.at("ranges")) scenario.ranges.push_back(parse_range(r));
    } else if (s.contains("start")) {
      scenario.ranges.push_back(parse_range(s));
    } else {
      throw ConfigError("scenario: needs 'start'/'hours' or 'ranges'");
    }
    scenarios.push_back(std::move(scenario));
  }
  return scenarios;
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace mmdd::io

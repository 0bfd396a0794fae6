#include "mmdd/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mmdd/calibration.hpp"
#include "mmdd/clustering.hpp"
#include "mmdd/deviance.hpp"
#include "mmdd/errors.hpp"
#include "mmdd/io.hpp"
#include "mmdd/radar.hpp"
#include "mmdd/version.hpp"

namespace mmdd {

namespace {

using nlohmann::json;

ColumnSchema schema_from_json(const json& j) {
  ColumnSchema schema;
  if (j.contains("delimiter")) {
    const auto d = j.at("delimiter").get<std::string>();
    if (d.size() != 1) throw ConfigError("schema: delimiter must be one char");
    schema.delimiter = d[0];
  }
  schema.timestamp_column = j.value("timestamp_column", schema.timestamp_column);
  schema.mode_column = j.value("mode_column", schema.mode_column);
  schema.timestamp_format = j.value("timestamp_format", schema.timestamp_format);
  if (j.contains("mode")) {
    const auto mode = mode_from_string(j.at("mode").get<std::string>());
    if (!mode) {
      throw ConfigError("schema: unknown fixed mode '" +
                        j.at("mode").get<std::string>() + "'");
    }
    schema.fixed_mode = mode;
  }
  return schema;
}

json schema_to_json(const ColumnSchema& schema) {
  json j{{"delimiter", std::string(1, schema.delimiter)},
         {"timestamp_column", schema.timestamp_column},
         {"mode_column", schema.mode_column},
         {"timestamp_format", schema.timestamp_format}};
  if (schema.fixed_mode) j["mode"] = std::string(to_string(*schema.fixed_mode));
  return j;
}

HourSlot parse_start(const json& j, const char* what) {
  const auto ts = parse_datetime(j.get<std::string>(), "%Y-%m-%d %H:%M:%S");
  if (!ts) throw ConfigError(std::string(what) + ": bad timestamp");
  return HourSlot::from_seconds(*ts);
}

class StageClock {
 public:
  explicit StageClock(RunManifest& manifest) : manifest_(manifest) {}

  template <typename Fn>
  void run(const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (...) {
      manifest_.failed_stage = name;
      throw;
    }
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - t0;
    manifest_.timings.emplace_back(name, dt.count());
  }

 private:
  RunManifest& manifest_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  io::atomic_write(path, text);
}

template <typename Writer>
void write_artifact(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream buffer;
  writer(buffer);
  io::atomic_write(path, buffer.str());
}

}  // namespace

json RunConfig::to_json() const {
  json j;
  j["span"] = {{"start", format_hour(span_start)}, {"hours", span_hours}};
  j["K"] = K;
  if (alpha) {
    j["alpha"] = *alpha;
  } else {
    j["alpha"] = "auto";
    json grid = json::array();
    for (double a : alpha_grid) grid.push_back(a);
    j["alpha_grid"] = grid;
  }
  j["k_range"] = {{"min", k_min}, {"max", k_max}};
  j["out_dir"] = out_dir.string();
  j["seed"] = seed;
  j["threads"] = threads;
  json srcs = json::array();
  for (const auto& source : sources) {
    json s = schema_to_json(source.schema);
    s["path"] = source.path;
    srcs.push_back(s);
  }
  j["sources"] = srcs;
  if (synth) {
    json b;
    b["start"] = format_hour(synth->baseline.start);
    b["weeks"] = synth->baseline.weeks;
    b["seed"] = synth->baseline.seed;
    j["synth"] = {{"baseline", b}, {"scenarios", synth->scenarios.size()}};
  }
  if (!covariate_path.empty()) {
    j["covariate"] = covariate_path;
    j["sidedness"] = std::string(to_string(sidedness));
  }
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig config;
  if (!j.contains("span") || !j.at("span").contains("start")) {
    throw ConfigError("config: span.start is required");
  }
  config.span_start = parse_start(j.at("span").at("start"), "span.start");
  const auto& span = j.at("span");
  if (span.contains("hours")) {
    config.span_hours = span.at("hours").get<std::size_t>();
  } else if (span.contains("weeks")) {
    config.span_hours = span.at("weeks").get<std::size_t>() * 168;
  } else if (span.contains("end")) {
    const HourSlot end = parse_start(span.at("end"), "span.end");
    if (end < config.span_start) throw ConfigError("config: span.end before start");
    config.span_hours =
        static_cast<std::size_t>(end.hours - config.span_start.hours) + 1;
  } else {
    throw ConfigError("config: span needs hours, weeks or end");
  }
  if (config.span_hours == 0) throw ConfigError("config: empty span");

  config.K = j.value("K", 4);
  if (config.K < 2 || config.K % 2 != 0) {
    throw ConfigError("config: K must be even and >= 2");
  }
  if (j.contains("alpha")) {
    if (j.at("alpha").is_string()) {
      if (j.at("alpha").get<std::string>() != "auto") {
        throw ConfigError("config: alpha must be a number or \"auto\"");
      }
    } else {
      config.alpha = j.at("alpha").get<double>();
      if (*config.alpha <= 0) throw ConfigError("config: alpha must be > 0");
    }
  } else {
    config.alpha = 4.0;
  }
  config.alpha_grid = default_alpha_grid();
  if (j.contains("alpha_grid")) {
    config.alpha_grid.clear();
    for (const auto& a : j.at("alpha_grid")) {
      config.alpha_grid.push_back(a.get<double>());
    }
  }
  if (j.contains("k_range")) {
    config.k_min = j.at("k_range").value("min", 2);
    config.k_max = j.at("k_range").value("max", 20);
  }
  if (config.k_min < 2 || config.k_min > config.k_max) {
    throw ConfigError("config: need 2 <= k_range.min <= k_range.max");
  }
  config.out_dir = j.value("out_dir", std::string("out"));
  config.seed = j.value("seed", 0ULL);
  config.threads = j.value("threads", 1U);
  if (config.threads < 1) throw ConfigError("config: threads must be >= 1");

  if (j.contains("sources")) {
    for (const auto& s : j.at("sources")) {
      SourceConfig source;
      if (!s.contains("path")) throw ConfigError("config: source without path");
      source.path = s.at("path").get<std::string>();
      source.schema = schema_from_json(s);
      config.sources.push_back(std::move(source));
    }
  }
  if (j.contains("synth")) {
    SynthSourceConfig synth;
    synth.baseline = io::baseline_spec_from_json(j.at("synth"));
    if (!j.at("synth").contains("baseline") ||
        !j.at("synth").at("baseline").contains("seed")) {
      synth.baseline.seed = config.seed;
    }
    if (!j.at("synth").contains("baseline") ||
        !j.at("synth").at("baseline").contains("start")) {
      synth.baseline.start = config.span_start;
    }
    synth.scenarios = io::scenarios_from_json(j.at("synth"));
    config.synth = std::move(synth);
  }
  if (config.sources.empty() && !config.synth) {
    throw ConfigError("config: needs at least one source or a synth block");
  }
  if (j.contains("covariate")) {
    config.covariate_path = j.at("covariate").get<std::string>();
  }
  if (j.contains("sidedness")) {
    const auto s = j.at("sidedness").get<std::string>();
    if (s == "one-sided-greater") {
      config.sidedness = Sidedness::one_sided_greater;
    } else if (s == "two-sided") {
      config.sidedness = Sidedness::two_sided;
    } else {
      throw ConfigError("config: sidedness must be one-sided-greater or "
                        "two-sided");
    }
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return run_config_from_json(j);
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &config;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot - pos);
    if (part.empty()) throw ConfigError("bad override key: " + key);
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::exception&) {
        parsed = value;  // plain string
      }
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

json RunManifest::to_json() const {
  json j;
  j["version"] = version;
  j["config"] = config;
  json timing = json::array();
  for (const auto& [stage, seconds] : timings) {
    timing.push_back({{"stage", stage}, {"seconds", seconds}});
  }
  j["timings"] = timing;
  j["counts"] = {{"parse_rejects", parse_rejects},
                 {"span_rejects", span_rejects},
                 {"missing_hours", missing_hours},
                 {"rows_excluded_missing", rows_excluded_missing}};
  j["alpha"] = {{"value", alpha_used}, {"auto", alpha_auto}};
  if (!sensitivity.empty()) {
    json curve = json::array();
    for (const auto& [a, f] : sensitivity) curve.push_back({a, f});
    j["alpha"]["sensitivity"] = curve;
  }
  j["anomaly"] = {{"fraction", anomaly_frac}, {"rows", n_anomalous}};
  json clustering;
  if (k_star) {
    clustering["k_star"] = *k_star;
    json curve = json::array();
    for (const auto& [k, db] : db_curve) {
      curve.push_back({k, std::isinf(db) ? json(nullptr) : json(db)});
    }
    clustering["db_curve"] = curve;
    json summary = json::array();
    for (const auto& c : clusters) {
      summary.push_back(
          {{"cluster_id", c.cluster_id}, {"size", c.size}, {"share", c.share}});
    }
    clustering["clusters"] = summary;
  } else {
    clustering["skipped"] = "fewer than 3 anomalous hours";
  }
  j["clustering"] = clustering;
  if (!validation.empty()) {
    json reports = json::array();
    for (const auto& [cluster_id, report] : validation) {
      reports.push_back({{"cluster_id", cluster_id},
                         {"t", report.t},
                         {"p", report.p},
                         {"df", report.df},
                         {"n", report.n},
                         {"mu0", report.mu0},
                         {"sidedness", std::string(to_string(report.sidedness))},
                         {"hours_requested", report.hours_requested},
                         {"hours_matched", report.hours_matched},
                         {"low_coverage", report.low_coverage}});
    }
    j["validation"] = reports;
  }
  j["status"] = failed_stage.empty() ? "ok" : "failed: " + failed_stage;
  return j;
}

RunManifest run_pipeline(const RunConfig& config) {
  RunManifest manifest;
  manifest.version = std::string(kVersion);
  manifest.config = config.to_json();
  manifest.alpha_auto = !config.alpha.has_value();

  const auto& out_dir = config.out_dir;
  std::filesystem::create_directories(out_dir);

  auto flush_manifest = [&] {
    write_text(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  };

  StageClock clock(manifest);
  try {
    std::vector<SourceConfig> sources = config.sources;

    if (config.synth) {
      clock.run("synth", [&] {
        const DemandSeries baseline = generate_baseline(config.synth->baseline);
        const InjectResult injected =
            inject(baseline, config.synth->scenarios, config.K);
        write_artifact(out_dir / "events.csv", [&](std::ostream& out) {
          io::write_events_csv(out, injected.series);
        });
        write_artifact(out_dir / "ground_truth.json", [&](std::ostream& out) {
          io::write_ground_truth_json(out, injected.truth);
        });
        SourceConfig source;
        source.path = (out_dir / "events.csv").string();
        sources.push_back(std::move(source));
      });
    }

    std::optional<DemandSeries> series;
    clock.run("ingest", [&] {
      std::vector<RawEvent> events;
      for (std::size_t s = 0; s < sources.size(); ++s) {
        std::ifstream in(sources[s].path);
        if (!in) throw InputError("cannot read source " + sources[s].path);
        ParseResult parsed = parse_events(in, sources[s].schema);
        manifest.parse_rejects += parsed.rejects.size();
        write_artifact(out_dir / ("rejects_source_" + std::to_string(s) + ".log"),
                       [&](std::ostream& out) {
                         write_reject_log(out, parsed.rejects);
                       });
        events.insert(events.end(),
                      std::make_move_iterator(parsed.events.begin()),
                      std::make_move_iterator(parsed.events.end()));
      }
      AggregateResult aggregated =
          aggregate_hourly(events, config.span_start, config.span_hours);
      manifest.span_rejects = aggregated.rejects.size();
      write_artifact(out_dir / "rejects_aggregate.log", [&](std::ostream& out) {
        write_reject_log(out, aggregated.rejects);
      });
      manifest.missing_hours = aggregated.series.missing_count();
      series.emplace(std::move(aggregated.series));
      write_artifact(out_dir / "demand.csv", [&](std::ostream& out) {
        io::write_demand_csv(out, *series);
      });
    });

    std::optional<SignatureTable> table;
    clock.run("signature", [&] {
      table.emplace(build_signature(*series, config.alpha.value_or(1.0),
                                    config.K, config.threads));
    });

    std::optional<DevianceMatrix> matrix;
    clock.run("deviance", [&] {
      matrix.emplace(compute_deviance(*series, *table, config.threads));
    });

    double alpha = config.alpha.value_or(0.0);
    if (!config.alpha) {
      clock.run("calibrate", [&] {
        const SensitivityCurve curve =
            sensitivity_curve(*matrix, config.alpha_grid, config.threads);
        manifest.sensitivity = curve.points;
        alpha = knee_point(curve);
        *table = table->with_alpha(alpha);
        matrix->alpha = alpha;
        write_artifact(out_dir / "sensitivity.csv", [&](std::ostream& out) {
          io::write_sensitivity_csv(out, curve);
        });
      });
    }
    manifest.alpha_used = alpha;

    write_artifact(out_dir / "signature.csv", [&](std::ostream& out) {
      io::write_signature_csv(out, *table);
    });
    write_artifact(out_dir / "deviance.csv", [&](std::ostream& out) {
      io::write_deviance_csv(out, *matrix);
    });

    std::optional<AnomalyMatrix> anomalies;
    clock.run("filter", [&] {
      anomalies.emplace(filter_anomalies(*matrix));
      manifest.anomaly_frac = anomaly_fraction(*matrix);
      manifest.n_anomalous = anomalies->rows.size();
      manifest.rows_excluded_missing = anomalies->excluded_missing_rows;
      write_artifact(out_dir / "anomalies.csv", [&](std::ostream& out) {
        io::write_anomaly_csv(out, *anomalies);
      });
    });

    std::optional<ClusterResult> clusters;
    clock.run("cluster", [&] {
      const std::size_t n = anomalies->rows.size();
      if (n < 3) return;  // nothing to categorize; manifest notes the skip
      FeatureRows rows;
      std::vector<HourSlot> hours;
      rows.reserve(n);
      hours.reserve(n);
      for (const auto& row : anomalies->rows) {
        rows.emplace_back(row.deviance.begin(), row.deviance.end());
        hours.push_back(row.slot);
      }
      const int k_max = std::min<int>(config.k_max, static_cast<int>(n) - 1);
      const int k_min = std::min(config.k_min, k_max);
      const KSelection selection = select_k(rows, k_min, k_max, config.threads);
      manifest.k_star = selection.k_star;
      manifest.db_curve = selection.curve;
      const auto labels = agglomerative(rows, selection.k_star, config.threads);
      clusters.emplace(profile_clusters(rows, labels, hours));
      for (const auto& c : clusters->clusters) {
        manifest.clusters.push_back({c.cluster_id, c.size, c.share});
      }
      write_artifact(out_dir / "clusters.csv", [&](std::ostream& out) {
        io::write_clusters_csv(out, *clusters);
      });
      write_artifact(out_dir / "profiles.json", [&](std::ostream& out) {
        io::write_profiles_json(out, *clusters);
      });
      write_artifact(out_dir / "db_curve.csv", [&](std::ostream& out) {
        io::write_db_curve_csv(out, selection.curve);
      });
    });

    if (!config.covariate_path.empty() && clusters) {
      clock.run("validate", [&] {
        std::ifstream in(config.covariate_path);
        if (!in) {
          throw InputError("cannot read covariate " + config.covariate_path);
        }
        const CovariateSeries covariate = io::read_covariate_csv(in);
        for (const auto& cluster : clusters->clusters) {
          std::size_t matched = 0;
          for (const HourSlot& slot : cluster.hours) {
            matched += covariate.values.count(slot);
          }
          if (matched < 2) continue;  // too small to test
          manifest.validation.emplace_back(
              cluster.cluster_id,
              covariate_test(cluster.hours, covariate, config.sidedness));
        }
      });
    }

    clock.run("report", [&] {
      if (clusters) {
        for (const auto& cluster : clusters->clusters) {
          const std::string name =
              "radar_cluster_" + std::to_string(cluster.cluster_id) + ".svg";
          write_text(out_dir / name,
                     render_radar(cluster.mean_deviance,
                                  RadarMeta{cluster.cluster_id, cluster.size,
                                            cluster.share}));
        }
        write_artifact(out_dir / "calendar.csv", [&](std::ostream& out) {
          io::write_calendar_csv(out, *clusters);
        });
      }
    });
  } catch (...) {
    flush_manifest();
    throw;
  }
  flush_manifest();
  return manifest;
}

}  // namespace mmdd

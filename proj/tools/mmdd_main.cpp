// Command-line front end: each stage runs standalone on the previous stage's
// exports, and `run` drives the whole pipeline from a config file.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmdd/calibration.hpp"
#include "mmdd/clustering.hpp"
#include "mmdd/deviance.hpp"
#include "mmdd/errors.hpp"
#include "mmdd/io.hpp"
#include "mmdd/pipeline.hpp"
#include "mmdd/radar.hpp"
#include "mmdd/version.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitStage = 4;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mmdd::InputError("cannot read " + path);
  return in;
}

mmdd::DemandSeries load_demand(const std::string& path) {
  auto in = open_input(path);
  return mmdd::io::read_demand_csv(in);
}

void write_file(const fs::path& path, const std::string& content) {
  mmdd::io::atomic_write(path, content);
  std::cerr << "wrote " << path.string() << "\n";
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ostringstream buffer;
  writer(buffer);
  write_file(path, buffer.str());
}

std::string default_out_dir() {
  if (const char* env = std::getenv("MMDD_OUT_DIR")) return env;
  return "out";
}

std::vector<double> parse_grid(const std::string& text) {
  // "lo:hi:step"
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      step <= 0) {
    throw mmdd::ConfigError("bad grid '" + text + "', expected lo:hi:step");
  }
  std::vector<double> grid;
  for (double a = lo; a <= hi + 1e-12; a += step) grid.push_back(a);
  return grid;
}

struct SynthArgs {
  std::string spec_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int K = 4;
};

int cmd_synth(const SynthArgs& args) {
  auto in = open_input(args.spec_path);
  json spec;
  try {
    in >> spec;
  } catch (const json::exception& e) {
    throw mmdd::ConfigError("spec parse error: " + std::string(e.what()));
  }
  mmdd::BaselineSpec baseline = mmdd::io::baseline_spec_from_json(spec);
  if (args.seed >= 0) baseline.seed = static_cast<std::uint64_t>(args.seed);
  const auto scenarios = mmdd::io::scenarios_from_json(spec);

  const mmdd::DemandSeries clean = mmdd::generate_baseline(baseline);
  const mmdd::InjectResult injected = mmdd::inject(clean, scenarios, args.K);

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  write_with(out_dir / "events.csv", [&](std::ostream& out) {
    mmdd::io::write_events_csv(out, injected.series);
  });
  write_with(out_dir / "demand.csv", [&](std::ostream& out) {
    mmdd::io::write_demand_csv(out, injected.series);
  });
  write_with(out_dir / "ground_truth.json", [&](std::ostream& out) {
    mmdd::io::write_ground_truth_json(out, injected.truth);
  });
  return kExitOk;
}

int cmd_ingest(const std::string& config_path, const std::string& out_override) {
  mmdd::RunConfig config = mmdd::load_run_config(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  fs::create_directories(config.out_dir);
  std::vector<mmdd::RawEvent> events;
  std::size_t reject_total = 0;
  for (std::size_t s = 0; s < config.sources.size(); ++s) {
    auto in = open_input(config.sources[s].path);
    mmdd::ParseResult parsed = mmdd::parse_events(in, config.sources[s].schema);
    reject_total += parsed.rejects.size();
    write_with(config.out_dir / ("rejects_source_" + std::to_string(s) + ".log"),
               [&](std::ostream& out) {
                 mmdd::write_reject_log(out, parsed.rejects);
               });
    events.insert(events.end(), std::make_move_iterator(parsed.events.begin()),
                  std::make_move_iterator(parsed.events.end()));
  }
  mmdd::AggregateResult aggregated =
      mmdd::aggregate_hourly(events, config.span_start, config.span_hours);
  write_with(config.out_dir / "rejects_aggregate.log", [&](std::ostream& out) {
    mmdd::write_reject_log(out, aggregated.rejects);
  });
  write_with(config.out_dir / "demand.csv", [&](std::ostream& out) {
    mmdd::io::write_demand_csv(out, aggregated.series);
  });
  std::cerr << "accepted " << aggregated.accepted << " events, "
            << reject_total + aggregated.rejects.size() << " rejects, "
            << aggregated.series.missing_count() << " missing hours\n";
  return kExitOk;
}

int cmd_signature(const std::string& demand_path, int K, double alpha,
                  unsigned threads, const std::string& out_path) {
  const auto series = load_demand(demand_path);
  const auto table = mmdd::build_signature(series, alpha, K, threads);
  write_with(out_path, [&](std::ostream& out) {
    mmdd::io::write_signature_csv(out, table);
  });
  return kExitOk;
}

int cmd_detect(const std::string& demand_path, const std::string& signature_path,
               int K, double alpha, unsigned threads,
               const std::string& out_dir_arg) {
  const auto series = load_demand(demand_path);
  std::optional<mmdd::SignatureTable> table;
  if (!signature_path.empty()) {
    auto in = open_input(signature_path);
    table.emplace(mmdd::io::read_signature_csv(in, series.start(),
                                               series.size(), alpha, K));
    table->with_alpha(alpha);
  } else {
    table.emplace(mmdd::build_signature(series, alpha, K, threads));
  }
  const auto matrix = mmdd::compute_deviance(series, *table, threads);
  const auto anomalies = mmdd::filter_anomalies(matrix);
  const fs::path out_dir(out_dir_arg);
  fs::create_directories(out_dir);
  write_with(out_dir / "deviance.csv", [&](std::ostream& out) {
    mmdd::io::write_deviance_csv(out, matrix);
  });
  write_with(out_dir / "anomalies.csv", [&](std::ostream& out) {
    mmdd::io::write_anomaly_csv(out, anomalies);
  });
  std::cerr << "anomalous hours: " << anomalies.rows.size() << " of "
            << anomalies.complete_rows
            << " complete (fraction " << mmdd::anomaly_fraction(matrix)
            << "); " << anomalies.excluded_missing_rows
            << " rows excluded for missing cells\n";
  return kExitOk;
}

int cmd_calibrate(const std::string& demand_path, int K, const std::string& grid,
                  unsigned threads, const std::string& out_path) {
  const auto series = load_demand(demand_path);
  const auto alphas =
      grid.empty() ? mmdd::default_alpha_grid() : parse_grid(grid);
  const auto curve = mmdd::sensitivity_curve(series, alphas, K, threads);
  const double alpha_star = mmdd::knee_point(curve);
  write_with(out_path, [&](std::ostream& out) {
    mmdd::io::write_sensitivity_csv(out, curve);
  });
  std::cout << "alpha_star=" << alpha_star << "\n";
  return kExitOk;
}

int cmd_cluster(const std::string& anomalies_path, double alpha, int k_fixed,
                int k_min, int k_max, unsigned threads,
                const std::string& out_dir_arg) {
  auto in = open_input(anomalies_path);
  const auto matrix = mmdd::io::read_anomaly_csv(in, alpha);
  if (matrix.rows.size() < 3) {
    throw mmdd::InputError("cluster: needs at least 3 anomalous hours");
  }
  mmdd::FeatureRows rows;
  std::vector<mmdd::HourSlot> hours;
  for (const auto& row : matrix.rows) {
    rows.emplace_back(row.deviance.begin(), row.deviance.end());
    hours.push_back(row.slot);
  }
  const fs::path out_dir(out_dir_arg);
  fs::create_directories(out_dir);

  int k = k_fixed;
  if (k <= 0) {
    const int hi = std::min<int>(k_max, static_cast<int>(rows.size()) - 1);
    const int lo = std::min(k_min, hi);
    const auto selection = mmdd::select_k(rows, lo, hi, threads);
    k = selection.k_star;
    write_with(out_dir / "db_curve.csv", [&](std::ostream& out) {
      mmdd::io::write_db_curve_csv(out, selection.curve);
    });
    std::cout << "k_star=" << k << "\n";
  }
  const auto labels = mmdd::agglomerative(rows, k, threads);
  const auto result = mmdd::profile_clusters(rows, labels, hours);
  write_with(out_dir / "clusters.csv", [&](std::ostream& out) {
    mmdd::io::write_clusters_csv(out, result);
  });
  write_with(out_dir / "profiles.json", [&](std::ostream& out) {
    mmdd::io::write_profiles_json(out, result);
  });
  return kExitOk;
}

int cmd_validate(const std::string& clusters_path, const std::string& cov_path,
                 int cluster_id, bool two_sided) {
  auto cin_ = open_input(clusters_path);
  const auto rows = mmdd::io::read_clusters_csv(cin_);
  std::vector<mmdd::HourSlot> hours;
  for (const auto& [slot, id] : rows) {
    if (id == cluster_id) hours.push_back(slot);
  }
  if (hours.empty()) {
    throw mmdd::InputError("no hours labelled with cluster " +
                           std::to_string(cluster_id));
  }
  auto vin = open_input(cov_path);
  const auto covariate = mmdd::io::read_covariate_csv(vin);
  const auto report = mmdd::covariate_test(
      hours, covariate,
      two_sided ? mmdd::Sidedness::two_sided
                : mmdd::Sidedness::one_sided_greater);
  json out{{"cluster_id", cluster_id},
           {"covariate", covariate.units},
           {"t", report.t},
           {"p", report.p},
           {"df", report.df},
           {"n", report.n},
           {"mu0", report.mu0},
           {"sidedness", std::string(mmdd::to_string(report.sidedness))},
           {"hours_requested", report.hours_requested},
           {"hours_matched", report.hours_matched},
           {"low_coverage", report.low_coverage}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_report(const std::string& clusters_path, const std::string& profiles_path,
               const std::string& out_dir_arg) {
  auto pin = open_input(profiles_path);
  json profiles;
  try {
    pin >> profiles;
  } catch (const json::exception& e) {
    throw mmdd::InputError("profiles parse error: " + std::string(e.what()));
  }
  auto cin_ = open_input(clusters_path);
  const auto rows = mmdd::io::read_clusters_csv(cin_);

  mmdd::ClusterResult result;
  for (const auto& entry : profiles) {
    mmdd::ClusterProfile profile;
    profile.cluster_id = entry.at("cluster_id").get<int>();
    profile.size = entry.at("size").get<std::size_t>();
    profile.share = entry.at("share").get<double>();
    for (mmdd::Mode q : mmdd::kAllModes) {
      profile.mean_deviance[static_cast<std::size_t>(mmdd::mode_index(q))] =
          entry.at("profile").at(std::string(mmdd::to_string(q))).get<double>();
    }
    for (const auto& [slot, id] : rows) {
      if (id == profile.cluster_id) profile.hours.push_back(slot);
    }
    result.clusters.push_back(std::move(profile));
  }
  result.k = static_cast<int>(result.clusters.size());

  const fs::path out_dir(out_dir_arg);
  fs::create_directories(out_dir);
  for (const auto& cluster : result.clusters) {
    write_file(out_dir / ("radar_cluster_" + std::to_string(cluster.cluster_id) +
                          ".svg"),
               mmdd::render_radar(cluster.mean_deviance,
                                  mmdd::RadarMeta{cluster.cluster_id,
                                                  cluster.size, cluster.share}));
  }
  write_with(out_dir / "calendar.csv", [&](std::ostream& out) {
    mmdd::io::write_calendar_csv(out, result);
  });
  return kExitOk;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides,
            const std::string& out_override, unsigned threads_override) {
  auto in = open_input(config_path);
  json raw;
  try {
    in >> raw;
  } catch (const json::exception& e) {
    throw mmdd::ConfigError("config parse error: " + std::string(e.what()));
  }
  for (const auto& assignment : overrides) {
    mmdd::apply_override(raw, assignment);
  }
  mmdd::RunConfig config = mmdd::run_config_from_json(raw);
  if (!raw.contains("out_dir")) config.out_dir = default_out_dir();
  if (!out_override.empty()) config.out_dir = out_override;
  if (threads_override > 0) config.threads = threads_override;

  const mmdd::RunManifest manifest = mmdd::run_pipeline(config);
  std::cout << "alpha=" << manifest.alpha_used
            << (manifest.alpha_auto ? " (auto)" : "");
  if (manifest.k_star) std::cout << " k_star=" << *manifest.k_star;
  std::cout << " anomalous_hours=" << manifest.n_anomalous << "\n"
            << "manifest: " << (config.out_dir / "manifest.json").string()
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-modal demand anomaly detection and disruption profiling"};
  app.set_version_flag("--version", std::string(mmdd::kVersion));
  app.require_subcommand(1);

  // synth
  SynthArgs synth_args;
  synth_args.out_dir = default_out_dir();
  auto* synth = app.add_subcommand("synth", "Generate a synthetic event feed");
  synth->add_option("--spec", synth_args.spec_path, "Scenario spec JSON")
      ->required();
  synth->add_option("--out", synth_args.out_dir, "Output directory");
  synth->add_option("--seed", synth_args.seed, "Override the spec seed");
  synth->add_option("--k", synth_args.K, "Support weeks for injection");

  // ingest
  std::string ingest_config, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Parse feeds into an hourly grid");
  ingest->add_option("--config", ingest_config, "Run config JSON")->required();
  ingest->add_option("--out", ingest_out, "Output directory");

  // signature
  std::string sig_demand, sig_out = "signature.csv";
  int sig_k = 4;
  double sig_alpha = 4.0;
  auto* signature =
      app.add_subcommand("signature", "Expected-demand signature table");
  signature->add_option("--demand", sig_demand, "demand.csv")->required();
  signature->add_option("--k", sig_k, "Support weeks");
  signature->add_option("--alpha", sig_alpha, "Band amplitude multiplier");
  signature->add_option("--out", sig_out, "Output CSV");

  // detect
  std::string det_demand, det_signature, det_out;
  det_out = default_out_dir();
  int det_k = 4;
  double det_alpha = 4.0;
  auto* detect =
      app.add_subcommand("detect", "Deviances and anomalous hours");
  detect->add_option("--demand", det_demand, "demand.csv")->required();
  detect->add_option("--signature", det_signature,
                     "Reuse a signature.csv instead of rebuilding");
  detect->add_option("--k", det_k, "Support weeks");
  detect->add_option("--alpha", det_alpha, "Anomaly threshold");
  detect->add_option("--out", det_out, "Output directory");

  // calibrate
  std::string cal_demand, cal_grid, cal_out = "sensitivity.csv";
  int cal_k = 4;
  auto* calibrate =
      app.add_subcommand("calibrate", "Pick alpha from the knee of the curve");
  calibrate->add_option("--demand", cal_demand, "demand.csv")->required();
  calibrate->add_option("--k", cal_k, "Support weeks");
  calibrate->add_option("--grid", cal_grid, "Alpha grid lo:hi:step");
  calibrate->add_option("--out", cal_out, "Curve CSV");

  // cluster
  std::string clu_anomalies, clu_out;
  clu_out = default_out_dir();
  double clu_alpha = 4.0;
  int clu_k = 0, clu_kmin = 2, clu_kmax = 20;
  auto* cluster = app.add_subcommand("cluster", "Cluster anomalous hours");
  cluster->add_option("--anomalies", clu_anomalies, "anomalies.csv")->required();
  cluster->add_option("--alpha", clu_alpha, "Threshold used for the flags");
  cluster->add_option("--k", clu_k, "Fixed k (skips the sweep)");
  cluster->add_option("--k-min", clu_kmin, "Sweep lower bound");
  cluster->add_option("--k-max", clu_kmax, "Sweep upper bound");
  cluster->add_option("--out", clu_out, "Output directory");

  // validate
  std::string val_clusters, val_covariate;
  int val_cluster_id = 0;
  bool val_two_sided = false;
  auto* validate =
      app.add_subcommand("validate", "Test a covariate against a cluster");
  validate->add_option("--clusters", val_clusters, "clusters.csv")->required();
  validate->add_option("--covariate", val_covariate, "covariate csv")
      ->required();
  validate->add_option("--cluster-id", val_cluster_id, "Cluster to test")
      ->required();
  validate->add_flag("--two-sided", val_two_sided, "Two-sided test");

  // report
  std::string rep_clusters, rep_profiles, rep_out;
  rep_out = default_out_dir();
  auto* report = app.add_subcommand("report", "Radar plots and calendar");
  report->add_option("--clusters", rep_clusters, "clusters.csv")->required();
  report->add_option("--profiles", rep_profiles, "profiles.json")->required();
  report->add_option("--out", rep_out, "Output directory");

  // run
  std::string run_config, run_out;
  unsigned run_threads = 0;
  std::vector<std::string> run_sets;
  auto* run = app.add_subcommand("run", "Full pipeline from a config file");
  run->add_option("--config", run_config, "Run config JSON")->required();
  run->add_option("--out", run_out, "Output directory (wins over env/config)");
  run->add_option("--threads", run_threads, "Worker cap for parallel stages");
  run->add_option("--set", run_sets, "Config override key=value")
      ->take_all();

  unsigned global_threads = 1;
  signature->add_option("--threads", global_threads, "Worker cap");
  detect->add_option("--threads", global_threads, "Worker cap");
  calibrate->add_option("--threads", global_threads, "Worker cap");
  cluster->add_option("--threads", global_threads, "Worker cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_args);
    if (ingest->parsed()) return cmd_ingest(ingest_config, ingest_out);
    if (signature->parsed()) {
      return cmd_signature(sig_demand, sig_k, sig_alpha, global_threads, sig_out);
    }
    if (detect->parsed()) {
      return cmd_detect(det_demand, det_signature, det_k, det_alpha,
                        global_threads, det_out);
    }
    if (calibrate->parsed()) {
      return cmd_calibrate(cal_demand, cal_k, cal_grid, global_threads, cal_out);
    }
    if (cluster->parsed()) {
      return cmd_cluster(clu_anomalies, clu_alpha, clu_k, clu_kmin, clu_kmax,
                         global_threads, clu_out);
    }
    if (validate->parsed()) {
      return cmd_validate(val_clusters, val_covariate, val_cluster_id,
                          val_two_sided);
    }
    if (report->parsed()) return cmd_report(rep_clusters, rep_profiles, rep_out);
    if (run->parsed()) return cmd_run(run_config, run_sets, run_out, run_threads);
  } catch (const mmdd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mmdd::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}

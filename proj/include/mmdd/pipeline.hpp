#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mmdd/ingest.hpp"
#include "mmdd/synth.hpp"
#include "mmdd/validation.hpp"

namespace mmdd {

struct SourceConfig {
  std::string path;
  ColumnSchema schema;
};

// Generated input: the events file is written into the output directory and
// ingested through the regular parser.
struct SynthSourceConfig {
  BaselineSpec baseline;
  std::vector<Scenario> scenarios;
};

struct RunConfig {
  std::vector<SourceConfig> sources;
  std::optional<SynthSourceConfig> synth;
  HourSlot span_start{};
  std::size_t span_hours = 0;
  int K = 4;
  std::optional<double> alpha;  // nullopt: calibrate via the knee point
  std::vector<double> alpha_grid;
  int k_min = 2;
  int k_max = 20;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string covariate_path;  // empty: skip the validation stage
  Sidedness sidedness = Sidedness::one_sided_greater;

  nlohmann::json to_json() const;  // resolved config, as recorded in the manifest
};

// Parses and validates a config document. Throws ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Applies one "dotted.key=value" override onto the raw config document.
// Values parse as JSON when possible, else as strings.
void apply_override(nlohmann::json& config, const std::string& assignment);

struct ClusterSummary {
  int cluster_id = 0;
  std::size_t size = 0;
  double share = 0.0;
};

struct RunManifest {
  std::string version;
  nlohmann::json config;
  std::vector<std::pair<std::string, double>> timings;  // (stage, seconds)
  std::size_t parse_rejects = 0;
  std::size_t span_rejects = 0;
  std::size_t missing_hours = 0;
  std::size_t rows_excluded_missing = 0;
  double alpha_used = 0.0;
  bool alpha_auto = false;
  std::vector<std::pair<double, double>> sensitivity;  // auto-alpha only
  double anomaly_frac = 0.0;
  std::size_t n_anomalous = 0;
  std::optional<int> k_star;
  std::vector<std::pair<int, double>> db_curve;
  std::vector<ClusterSummary> clusters;
  std::vector<std::pair<int, TestReport>> validation;  // (cluster id, report)
  std::string failed_stage;  // empty on success

  nlohmann::json to_json() const;
};

// Runs ingest -> signature -> deviance -> (calibration) -> filter ->
// clustering -> profiles -> (validation) -> report, writing every stage
// export plus the manifest under config.out_dir. On a stage error the
// partial manifest names the failed stage and the error is rethrown.
RunManifest run_pipeline(const RunConfig& config);

}  // namespace mmdd

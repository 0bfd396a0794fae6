#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mmdd/calibration.hpp"
#include "mmdd/clustering.hpp"
#include "mmdd/deviance.hpp"
#include "mmdd/ingest.hpp"
#include "mmdd/series.hpp"
#include "mmdd/signature.hpp"
#include "mmdd/synth.hpp"
#include "mmdd/validation.hpp"

// Readers and writers for every pipeline artifact. Machine-readable doubles
// are serialized at full round-trip precision.
namespace mmdd::io {

using json = nlohmann::json;

std::string format_full(double v);  // %.17g

// Event feed: "timestamp,mode", one row per counted event. Counts expand to
// rows with seconds spread deterministically across the hour.
void write_events_csv(std::ostream& out, const DemandSeries& series);

// Hourly grid: "timestamp,bus,tram,metro,bike,car"; a missing hour keeps all
// five fields empty.
void write_demand_csv(std::ostream& out, const DemandSeries& series);
DemandSeries read_demand_csv(std::istream& in);

// "mode,week,weekday,hour,mu,sigma,lambda,n_samples"; unsupported cells keep
// the statistics empty.
void write_signature_csv(std::ostream& out, const SignatureTable& table);
SignatureTable read_signature_csv(std::istream& in, HourSlot start,
                                  std::size_t n_hours, double alpha, int K);

// "timestamp,bus,tram,metro,bike,car" with empty fields for missing cells.
void write_deviance_csv(std::ostream& out, const DevianceMatrix& matrix);

// Deviance columns plus a 5-char bitmask of breaching modes, mode order as
// the canonical column order.
void write_anomaly_csv(std::ostream& out, const AnomalyMatrix& matrix);
AnomalyMatrix read_anomaly_csv(std::istream& in, double alpha);

void write_clusters_csv(std::ostream& out, const ClusterResult& result);
std::vector<std::pair<HourSlot, int>> read_clusters_csv(std::istream& in);

json profiles_to_json(const ClusterResult& result);
void write_profiles_json(std::ostream& out, const ClusterResult& result);

void write_db_curve_csv(std::ostream& out,
                        const std::vector<std::pair<int, double>>& curve);

void write_sensitivity_csv(std::ostream& out, const SensitivityCurve& curve);

// "date,hour,cluster_id", chronological; joins against external calendars.
void write_calendar_csv(std::ostream& out, const ClusterResult& result);

// "timestamp,value"; the value column's header is kept as the units label.
CovariateSeries read_covariate_csv(std::istream& in);

json ground_truth_to_json(const std::vector<InjectedSlot>& truth);
void write_ground_truth_json(std::ostream& out,
                             const std::vector<InjectedSlot>& truth);

// Synthetic-run spec: {"baseline": {...}, "scenarios": [...]}.
BaselineSpec baseline_spec_from_json(const json& j);
std::vector<Scenario> scenarios_from_json(const json& j);

// Writes content to a temp file and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace mmdd::io

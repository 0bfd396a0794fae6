#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mmdd/signature.hpp"

namespace mmdd {

// Sentinel deviance for cells whose signature band has zero width: any
// departure from a perfectly constant baseline is anomalous, without
// introducing infinities. Far above any workable alpha.
inline constexpr double kClampedDeviance = 100.0;

// Standardized deviance per (hour, mode); rows chronological over the span.
// A cell is empty iff the hour was missing or its signature unsupported.
struct DevianceMatrix {
  HourSlot start{};
  std::vector<std::array<std::optional<double>, kNumModes>> rows;
  double alpha = 4.0;  // threshold used by the anomaly filter

  HourSlot slot(std::size_t idx) const {
    return HourSlot{start.hours + static_cast<std::int64_t>(idx)};
  }
  bool complete_row(std::size_t idx) const;
};

// (count - mu) / sigma per cell. Throws InputError when the table was built
// for a different span.
DevianceMatrix compute_deviance(const DemandSeries& series,
                                const SignatureTable& table,
                                unsigned threads = 1);

struct AnomalyRow {
  HourSlot slot{};
  std::array<double, kNumModes> deviance{};
  std::array<bool, kNumModes> flags{};  // |deviance| > alpha, per mode
};

// Rows whose worst mode breaches the band. Rows with any empty cell are
// excluded outright (clustering needs complete vectors); the count of such
// rows is kept for audit.
struct AnomalyMatrix {
  std::vector<AnomalyRow> rows;
  double alpha = 4.0;
  std::size_t complete_rows = 0;
  std::size_t excluded_missing_rows = 0;
};

AnomalyMatrix filter_anomalies(const DevianceMatrix& matrix);
AnomalyMatrix filter_anomalies(const DevianceMatrix& matrix, double alpha);

// Retained rows over complete rows; 0 when nothing is complete.
double anomaly_fraction(const DevianceMatrix& matrix);
double anomaly_fraction(const DevianceMatrix& matrix, double alpha);

}  // namespace mmdd

#include "mmdd/deviance.hpp"

#include <cmath>

#include "mmdd/errors.hpp"
#include "mmdd/parallel.hpp"

namespace mmdd {

bool DevianceMatrix::complete_row(std::size_t idx) const {
  for (const auto& cell : rows[idx]) {
    if (!cell) return false;
  }
  return true;
}

DevianceMatrix compute_deviance(const DemandSeries& series,
                                const SignatureTable& table, unsigned threads) {
  if (series.start() != table.start() || series.size() != table.size()) {
    throw InputError("compute_deviance: series and signature span mismatch");
  }
  DevianceMatrix matrix;
  matrix.start = series.start();
  matrix.alpha = table.alpha();
  matrix.rows.resize(series.size());
  parallel_for(series.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& row = matrix.rows[i];
      if (series.missing(i)) continue;  // all cells stay empty
      for (Mode q : kAllModes) {
        const auto& element = table.at(q, i);
        if (!element) continue;
        const double n = static_cast<double>(series.count(q, i));
        double delta;
        if (element->sigma > 0.0) {
          delta = (n - element->mu) / element->sigma;
        } else if (n == element->mu) {
          delta = 0.0;
        } else {
          delta = std::copysign(kClampedDeviance, n - element->mu);
        }
        row[static_cast<std::size_t>(mode_index(q))] = delta;
      }
    }
  });
  return matrix;
}

AnomalyMatrix filter_anomalies(const DevianceMatrix& matrix, double alpha) {
  AnomalyMatrix out;
  out.alpha = alpha;
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    if (!matrix.complete_row(i)) {
      ++out.excluded_missing_rows;
      continue;
    }
    ++out.complete_rows;
    AnomalyRow row;
    row.slot = matrix.slot(i);
    bool any = false;
    for (int q = 0; q < kNumModes; ++q) {
      const double delta = *matrix.rows[i][static_cast<std::size_t>(q)];
      row.deviance[static_cast<std::size_t>(q)] = delta;
      const bool breach = std::abs(delta) > alpha;  // strictly outside the band
      row.flags[static_cast<std::size_t>(q)] = breach;
      any = any || breach;
    }
    if (any) out.rows.push_back(std::move(row));
  }
  return out;
}

AnomalyMatrix filter_anomalies(const DevianceMatrix& matrix) {
  return filter_anomalies(matrix, matrix.alpha);
}

double anomaly_fraction(const DevianceMatrix& matrix, double alpha) {
  const AnomalyMatrix filtered = filter_anomalies(matrix, alpha);
  if (filtered.complete_rows == 0) return 0.0;
  return static_cast<double>(filtered.rows.size()) /
         static_cast<double>(filtered.complete_rows);
}

double anomaly_fraction(const DevianceMatrix& matrix) {
  return anomaly_fraction(matrix, matrix.alpha);
}

}  // namespace mmdd

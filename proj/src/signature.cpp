#include "mmdd/signature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "mmdd/errors.hpp"
#include "mmdd/parallel.hpp"

namespace mmdd {

std::vector<int> support_weeks(int m, int K, const std::vector<int>& available) {
  if (K < 2 || K % 2 != 0) {
    throw std::invalid_argument("support_weeks: K must be even and >= 2");
  }
  if (available.empty()) {
    throw std::invalid_argument("support_weeks: no weeks available");
  }
  std::vector<int> candidates;
  candidates.reserve(available.size());
  for (int w : available) {
    if (w != m) candidates.push_back(w);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [m](int a, int b) {
    const int da = std::abs(a - m);
    const int db = std::abs(b - m);
    if (da != db) return da < db;
    return a < b;  // tie toward the earlier week
  });
  if (candidates.size() > static_cast<std::size_t>(K)) {
    candidates.resize(static_cast<std::size_t>(K));
  }
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

std::optional<SignatureElement> compute_element(
    std::span<const std::int64_t> counts, double alpha) {
  if (counts.size() < 2) return std::nullopt;
  const double n = static_cast<double>(counts.size());
  double sum = 0.0;
  for (std::int64_t c : counts) sum += static_cast<double>(c);
  const double mu = sum / n;
  double sq = 0.0;
  for (std::int64_t c : counts) {
    const double d = static_cast<double>(c) - mu;
    sq += d * d;
  }
  SignatureElement element;
  element.mu = mu;
  element.sigma = std::sqrt(sq / n);
  element.lambda = alpha * element.sigma;
  element.n_samples = static_cast<int>(counts.size());
  return element;
}

SignatureTable::SignatureTable(HourSlot start, std::size_t n_hours,
                               double alpha, int K)
    : start_(start), n_hours_(n_hours), alpha_(alpha), k_(K) {
  for (auto& column : cells_) column.assign(n_hours, std::nullopt);
}

SignatureTable SignatureTable::with_alpha(double alpha) const {
  SignatureTable out = *this;
  out.alpha_ = alpha;
  for (auto& column : out.cells_) {
    for (auto& cell : column) {
      if (cell) cell->lambda = alpha * cell->sigma;
    }
  }
  return out;
}

SignatureTable build_signature(const DemandSeries& series, double alpha, int K,
                               unsigned threads) {
  if (series.num_weeks() < 3) {
    throw InputError("build_signature: span must cover at least 3 weeks");
  }
  const auto available = series.week_indices();
  std::vector<std::vector<int>> supports(available.size());
  for (int m : available) {
    supports[static_cast<std::size_t>(m)] = support_weeks(m, K, available);
  }

  SignatureTable table(series.start(), series.size(), alpha, K);
  parallel_for(series.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::int64_t> samples;
    samples.reserve(static_cast<std::size_t>(K));
    for (std::size_t i = begin; i < end; ++i) {
      const SlotParts parts = decompose_slot(series.slot(i), series.start());
      const auto& weeks = supports[static_cast<std::size_t>(parts.week)];
      for (Mode q : kAllModes) {
        samples.clear();
        for (int w : weeks) {  // ascending weeks: chronological summation
          const HourSlot target =
              recompose_slot({w, parts.weekday, parts.hour}, series.start());
          const auto idx = series.index_of(target);
          if (!idx || series.missing(*idx)) continue;
          samples.push_back(series.count(q, *idx));
        }
        auto element = compute_element(samples, alpha);
        if (element) {
          element->support =
              TemporalSupport{parts.week, parts.weekday, parts.hour, weeks};
        }
        table.at(q, i) = std::move(element);
      }
    }
  });
  return table;
}

}  // namespace mmdd

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mmdd/series.hpp"

namespace mmdd {

// Weeks aggregated for one (week, weekday, hour) reference cell. The
// reference week itself is never part of the set.
struct TemporalSupport {
  int week = 0;
  int weekday = 0;
  int hour = 0;
  std::vector<int> weeks;  // ascending; size may fall short of K at the edges
};

// Expected demand band mu +/- lambda for one cell, lambda = alpha * sigma.
struct SignatureElement {
  double mu = 0.0;
  double sigma = 0.0;  // population std over the support samples
  double lambda = 0.0;
  int n_samples = 0;
  TemporalSupport support;
};

// The K weeks nearest to m (ties toward the earlier week), drawn from
// `available` (ascending, unique) and never including m itself. Returns all
// candidates when fewer than K exist. K must be even and >= 2.
std::vector<int> support_weeks(int m, int K, const std::vector<int>& available);

// Mean / population std / band amplitude over the samples, in the order
// given (chronological by contract). Nullopt when fewer than two samples.
std::optional<SignatureElement> compute_element(
    std::span<const std::int64_t> counts, double alpha);

class SignatureTable {
 public:
  SignatureTable(HourSlot start, std::size_t n_hours, double alpha, int K);

  HourSlot start() const { return start_; }
  std::size_t size() const { return n_hours_; }
  double alpha() const { return alpha_; }
  int K() const { return k_; }

  const std::optional<SignatureElement>& at(Mode q, std::size_t idx) const {
    return cells_[mode_index(q)][idx];
  }
  std::optional<SignatureElement>& at(Mode q, std::size_t idx) {
    return cells_[mode_index(q)][idx];
  }

  // Same statistics with the band amplitude rebuilt for a different alpha.
  SignatureTable with_alpha(double alpha) const;

 private:
  HourSlot start_;
  std::size_t n_hours_;
  double alpha_;
  int k_;
  std::array<std::vector<std::optional<SignatureElement>>, kNumModes> cells_;
};

// Expected-demand signature for every (mode, hour) cell of the span. Missing
// hours never contribute samples. Throws InputError when the span covers
// fewer than three weeks.
SignatureTable build_signature(const DemandSeries& series, double alpha, int K,
                               unsigned threads = 1);

}  // namespace mmdd

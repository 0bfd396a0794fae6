#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mmdd/mode.hpp"
#include "mmdd/time.hpp"

namespace mmdd {

// Dense hourly demand grid over a contiguous span. Hours with no data in any
// mode are flagged missing instead of being kept as silent zeros.
class DemandSeries {
 public:
  DemandSeries(HourSlot start, std::size_t n_hours);

  HourSlot start() const { return start_; }
  std::size_t size() const { return missing_.size(); }

  HourSlot slot(std::size_t idx) const {
    return HourSlot{start_.hours + static_cast<std::int64_t>(idx)};
  }
  std::optional<std::size_t> index_of(HourSlot slot) const;

  std::int64_t count(Mode q, std::size_t idx) const {
    return counts_[mode_index(q)][idx];
  }
  void set_count(Mode q, std::size_t idx, std::int64_t c) {
    counts_[mode_index(q)][idx] = c;
  }
  void add_count(Mode q, std::size_t idx, std::int64_t c) {
    counts_[mode_index(q)][idx] += c;
  }

  bool missing(std::size_t idx) const { return missing_[idx] != 0; }
  void set_missing(std::size_t idx, bool m) { missing_[idx] = m ? 1 : 0; }
  std::size_t missing_count() const;

  // Monday-based week indices covered by the span, 0-based from the week of
  // the first slot. Partial first/last weeks count.
  int num_weeks() const;
  std::vector<int> week_indices() const;

  bool operator==(const DemandSeries& other) const;

 private:
  HourSlot start_;
  std::array<std::vector<std::int64_t>, kNumModes> counts_;
  std::vector<char> missing_;
};

}  // namespace mmdd

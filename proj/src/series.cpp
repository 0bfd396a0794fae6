#include "mmdd/series.hpp"

#include <numeric>
#include <stdexcept>

namespace mmdd {

DemandSeries::DemandSeries(HourSlot start, std::size_t n_hours)
    : start_(start), missing_(n_hours, 0) {
  if (n_hours == 0) {
    throw std::invalid_argument("DemandSeries: empty span");
  }
  for (auto& column : counts_) column.assign(n_hours, 0);
}

std::optional<std::size_t> DemandSeries::index_of(HourSlot slot) const {
  if (slot < start_) return std::nullopt;
  const std::int64_t offset = slot.hours - start_.hours;
  if (offset >= static_cast<std::int64_t>(size())) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

std::size_t DemandSeries::missing_count() const {
  return static_cast<std::size_t>(
      std::count(missing_.begin(), missing_.end(), 1));
}

int DemandSeries::num_weeks() const {
  return decompose_slot(slot(size() - 1), start_).week + 1;
}

std::vector<int> DemandSeries::week_indices() const {
  std::vector<int> weeks(static_cast<std::size_t>(num_weeks()));
  std::iota(weeks.begin(), weeks.end(), 0);
  return weeks;
}

bool DemandSeries::operator==(const DemandSeries& other) const {
  return start_ == other.start_ && missing_ == other.missing_ &&
         counts_ == other.counts_;
}

}  // namespace mmdd

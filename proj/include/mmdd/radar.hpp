#pragma once

#include <array>
#include <string>
#include <utility>

#include "mmdd/mode.hpp"

namespace mmdd {

struct RadarMeta {
  int cluster_id = 0;
  std::size_t size = 0;
  double share = 0.0;
};

// Radial range: max |value| rounded up to an integer, at least 1. The axis
// spans [-range, +range] with the zero ring at mid-radius.
double radar_range(const std::array<double, kNumModes>& profile);

// Per-axis radii in [0, 1] of the axis length.
std::array<double, kNumModes> radar_radii(
    const std::array<double, kNumModes>& profile, double range);

// Five-axis radar plot (axis order = canonical mode order, first axis at the
// top, clockwise). Output is deterministic byte-for-byte.
std::string render_radar(const std::array<double, kNumModes>& profile,
                         const RadarMeta& meta);

}  // namespace mmdd

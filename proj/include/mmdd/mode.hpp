#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace mmdd {

// Transport modes, in canonical column order.
enum class Mode : int { bus = 0, tram = 1, metro = 2, bike = 3, car = 4 };

inline constexpr int kNumModes = 5;

inline constexpr std::array<Mode, kNumModes> kAllModes{
    Mode::bus, Mode::tram, Mode::metro, Mode::bike, Mode::car};

inline constexpr std::array<std::string_view, kNumModes> kModeNames{
    "bus", "tram", "metro", "bike", "car"};

constexpr std::string_view to_string(Mode q) {
  return kModeNames[static_cast<int>(q)];
}

constexpr int mode_index(Mode q) { return static_cast<int>(q); }

std::optional<Mode> mode_from_string(std::string_view name);

}  // namespace mmdd

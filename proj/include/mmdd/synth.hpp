#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mmdd/series.hpp"

namespace mmdd {

// Weekly demand template plus Gaussian count noise, per mode.
struct BaselineSpec {
  HourSlot start{};
  int weeks = 9;
  std::uint64_t seed = 0;
  // indexed [mode][weekday * 24 + hour]
  std::array<std::array<double, 168>, kNumModes> mean{};
  std::array<std::array<double, 168>, kNumModes> noise_std{};

  // Commute-peaked weekday / flatter weekend template with per-mode scales
  // and nighttime floors. The default noise keeps counts effectively on the
  // template; raise noise_frac for stress tests.
  static BaselineSpec urban_default(int weeks, std::uint64_t seed,
                                    double noise_frac = 0.001);

  // noise_std = frac * mean, elementwise.
  void set_noise_frac(double frac);
};

// round(template + N(0, noise)) clipped at zero; a single sequential RNG
// stream keeps output reproducible for a given seed. Weeks must be >= 5.
DemandSeries generate_baseline(const BaselineSpec& spec);

enum class ScenarioKind { holiday, rain, metro_closure, custom };
std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> scenario_kind_from_string(std::string_view name);

struct HourRange {
  HourSlot start{};
  int hours = 0;
};

// One disruption episode. Targets are per-mode demand offsets in units of
// the local signature sigma; where sigma is zero they fall back to absolute
// count offsets (a constant baseline has no scale to calibrate against).
// A zero target leaves the mode untouched.
struct Scenario {
  ScenarioKind kind = ScenarioKind::custom;
  std::vector<HourRange> ranges;
  std::array<double, kNumModes> targets{};
  bool ground_truth = true;
};

struct InjectedSlot {
  HourSlot slot{};
  ScenarioKind kind = ScenarioKind::custom;
  std::array<double, kNumModes> targets{};
};

struct InjectResult {
  DemandSeries series;
  std::vector<InjectedSlot> truth;  // ascending by slot
};

// Rewrites targeted cells to mu + target * sigma, with mu/sigma taken from a
// signature pass over the clean series. Later scenarios win on overlap.
// Throws std::invalid_argument when a range leaves the span.
InjectResult inject(const DemandSeries& series,
                    const std::vector<Scenario>& scenarios, int K = 4);

}  // namespace mmdd

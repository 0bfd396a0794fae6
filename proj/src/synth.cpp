#include "mmdd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "mmdd/signature.hpp"

namespace mmdd {

namespace {

constexpr std::array<double, 24> kWeekdayShape = {
    0.05, 0.03, 0.02, 0.02, 0.03, 0.08, 0.25, 0.65, 1.00, 0.70, 0.50, 0.48,
    0.52, 0.50, 0.48, 0.55, 0.75, 1.00, 0.85, 0.55, 0.38, 0.28, 0.18, 0.10};

constexpr std::array<double, 24> kWeekendShape = {
    0.08, 0.06, 0.04, 0.03, 0.03, 0.04, 0.08, 0.15, 0.28, 0.45, 0.60, 0.70,
    0.72, 0.70, 0.68, 0.65, 0.62, 0.60, 0.58, 0.52, 0.45, 0.38, 0.28, 0.15};

struct ModeShape {
  double scale;
  double floor;           // nighttime minimum
  double weekend_factor;
};

constexpr std::array<ModeShape, kNumModes> kModeShapes = {{
    {90.0, 6.0, 0.55},    // bus
    {60.0, 4.0, 0.55},    // tram
    {120.0, 8.0, 0.50},   // metro
    {30.0, 6.0, 0.85},    // bike
    {150.0, 10.0, 0.80},  // car
}};

std::int64_t clip_round(double v) {
  const auto c = std::llround(v);
  return c < 0 ? 0 : c;
}

}  // namespace

BaselineSpec BaselineSpec::urban_default(int weeks, std::uint64_t seed,
                                         double noise_frac) {
  BaselineSpec spec;
  spec.start = HourSlot::from_civil(2019, 1, 7, 0);  // a Monday
  spec.weeks = weeks;
  spec.seed = seed;
  for (int q = 0; q < kNumModes; ++q) {
    const ModeShape& shape = kModeShapes[static_cast<std::size_t>(q)];
    for (int d = 0; d < 7; ++d) {
      const bool weekend = d >= 5;
      const auto& curve = weekend ? kWeekendShape : kWeekdayShape;
      const double factor = weekend ? shape.weekend_factor : 1.0;
      for (int h = 0; h < 24; ++h) {
        const double v = shape.scale * factor * curve[static_cast<std::size_t>(h)];
        spec.mean[static_cast<std::size_t>(q)][static_cast<std::size_t>(
            d * 24 + h)] = std::max(shape.floor, v);
      }
    }
  }
  spec.set_noise_frac(noise_frac);
  return spec;
}

void BaselineSpec::set_noise_frac(double frac) {
  for (int q = 0; q < kNumModes; ++q) {
    for (int i = 0; i < 168; ++i) {
      noise_std[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)] =
          frac * mean[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
    }
  }
}

DemandSeries generate_baseline(const BaselineSpec& spec) {
  if (spec.weeks < 5) {
    throw std::invalid_argument("generate_baseline: needs at least 5 weeks");
  }
  for (const auto& column : spec.mean) {
    for (double m : column) {
      if (m < 0.0) {
        throw std::invalid_argument("generate_baseline: negative mean");
      }
    }
  }
  const std::size_t n_hours = static_cast<std::size_t>(spec.weeks) * 168;
  DemandSeries series(spec.start, n_hours);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n_hours; ++i) {
    const HourSlot slot = series.slot(i);
    const int d = weekday_mon0(slot.day());
    const int h = slot.hour_of_day();
    const std::size_t cell = static_cast<std::size_t>(d * 24 + h);
    for (Mode q : kAllModes) {
      const auto qi = static_cast<std::size_t>(mode_index(q));
      const double sd = spec.noise_std[qi][cell];
      double v = spec.mean[qi][cell];
      if (sd > 0.0) v += gauss(rng) * sd;
      series.set_count(q, i, clip_round(v));
    }
  }
  return series;
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::holiday: return "holiday";
    case ScenarioKind::rain: return "rain";
    case ScenarioKind::metro_closure: return "metro_closure";
    case ScenarioKind::custom: return "custom";
  }
  return "custom";
}

std::optional<ScenarioKind> scenario_kind_from_string(std::string_view name) {
  if (name == "holiday") return ScenarioKind::holiday;
  if (name == "rain") return ScenarioKind::rain;
  if (name == "metro_closure") return ScenarioKind::metro_closure;
  if (name == "custom") return ScenarioKind::custom;
  return std::nullopt;
}

InjectResult inject(const DemandSeries& series,
                    const std::vector<Scenario>& scenarios, int K) {
  for (const auto& scenario : scenarios) {
    for (const auto& range : scenario.ranges) {
      if (range.hours <= 0) {
        throw std::invalid_argument("inject: empty scenario range");
      }
      const HourSlot last{range.start.hours + range.hours - 1};
      if (!series.index_of(range.start) || !series.index_of(last)) {
        throw std::invalid_argument("inject: scenario outside span");
      }
    }
  }

  InjectResult result{series, {}};
  if (scenarios.empty()) return result;

  // mu/sigma from the clean series; the alpha used here only shapes lambda,
  // which injection never reads.
  const SignatureTable table = build_signature(series, 1.0, K);

  std::map<std::size_t, InjectedSlot> truth;  // last writer wins
  for (const auto& scenario : scenarios) {
    for (const auto& range : scenario.ranges) {
      for (int offset = 0; offset < range.hours; ++offset) {
        const HourSlot slot{range.start.hours + offset};
        const std::size_t idx = *series.index_of(slot);
        for (Mode q : kAllModes) {
          const auto qi = static_cast<std::size_t>(mode_index(q));
          const double target = scenario.targets[qi];
          if (target == 0.0) continue;
          double mu, sigma;
          if (const auto& element = table.at(q, idx)) {
            mu = element->mu;
            sigma = element->sigma;
          } else {
            mu = static_cast<double>(series.count(q, idx));
            sigma = 0.0;
          }
          const double v = sigma > 0.0 ? mu + target * sigma : mu + target;
          result.series.set_count(q, idx, clip_round(v));
        }
        if (scenario.ground_truth) {
          truth[idx] = InjectedSlot{slot, scenario.kind, scenario.targets};
        }
      }
    }
  }
  result.truth.reserve(truth.size());
  for (auto& [idx, injected] : truth) result.truth.push_back(injected);
  return result;
}

}  // namespace mmdd

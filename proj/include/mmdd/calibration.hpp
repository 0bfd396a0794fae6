#pragma once

#include <utility>
#include <vector>

#include "mmdd/deviance.hpp"

namespace mmdd {

// (alpha, anomaly fraction) pairs, alpha strictly increasing. The fraction
// is non-increasing in alpha.
struct SensitivityCurve {
  std::vector<std::pair<double, double>> points;
};

// Anomaly fraction per alpha. The signature statistics are computed once;
// only the threshold moves across the grid. Grid must be strictly increasing
// with at least four points.
SensitivityCurve sensitivity_curve(const DemandSeries& series,
                                   const std::vector<double>& alphas, int K,
                                   unsigned threads = 1);
SensitivityCurve sensitivity_curve(const DevianceMatrix& matrix,
                                   const std::vector<double>& alphas,
                                   unsigned threads = 1);

// Alpha of the point farthest (perpendicular) from the chord joining the
// curve endpoints, after min-max normalizing both axes; ties go to the
// smaller alpha. Throws NoKneeError when every point sits on the chord.
double knee_point(const SensitivityCurve& curve);

std::vector<double> default_alpha_grid();  // 1.0 .. 8.0 step 0.5

}  // namespace mmdd

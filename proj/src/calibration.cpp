#include "mmdd/calibration.hpp"

#include <cmath>
#include <stdexcept>

#include "mmdd/errors.hpp"
#include "mmdd/parallel.hpp"

namespace mmdd {

namespace {

void validate_grid(const std::vector<double>& alphas) {
  if (alphas.size() < 4) {
    throw std::invalid_argument("sensitivity grid needs at least 4 alphas");
  }
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (!(alphas[i] > alphas[i - 1])) {
      throw std::invalid_argument("sensitivity grid must be strictly "
                                  "increasing");
    }
  }
}

}  // namespace

SensitivityCurve sensitivity_curve(const DevianceMatrix& matrix,
                                   const std::vector<double>& alphas,
                                   unsigned threads) {
  validate_grid(alphas);
  SensitivityCurve curve;
  curve.points.resize(alphas.size());
  parallel_for(alphas.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      curve.points[i] = {alphas[i], anomaly_fraction(matrix, alphas[i])};
    }
  });
  return curve;
}

SensitivityCurve sensitivity_curve(const DemandSeries& series,
                                   const std::vector<double>& alphas, int K,
                                   unsigned threads) {
  validate_grid(alphas);
  const SignatureTable table = build_signature(series, alphas[0], K, threads);
  const DevianceMatrix matrix = compute_deviance(series, table, threads);
  return sensitivity_curve(matrix, alphas, threads);
}

double knee_point(const SensitivityCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 4) {
    throw std::invalid_argument("knee_point: needs at least 4 points");
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].first > pts[i - 1].first)) {
      throw std::invalid_argument("knee_point: alphas must be strictly "
                                  "increasing");
    }
    if (pts[i].second > pts[i - 1].second) {
      throw std::invalid_argument("knee_point: curve must be non-increasing");
    }
  }

  const double x_min = pts.front().first;
  const double x_max = pts.back().first;
  double y_min = pts.front().second, y_max = pts.front().second;
  for (const auto& [x, y] : pts) {
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (y_max == y_min) {
    throw NoKneeError("knee_point: flat curve has no knee");
  }

  auto norm_x = [&](double x) { return (x - x_min) / (x_max - x_min); };
  auto norm_y = [&](double y) { return (y - y_min) / (y_max - y_min); };

  const double x0 = norm_x(pts.front().first);
  const double y0 = norm_y(pts.front().second);
  const double x1 = norm_x(pts.back().first);
  const double y1 = norm_y(pts.back().second);
  const double chord = std::hypot(x1 - x0, y1 - y0);

  double best_dist = -1.0;
  double best_alpha = pts.front().first;
  for (const auto& [alpha, frac] : pts) {
    const double px = norm_x(alpha);
    const double py = norm_y(frac);
    const double dist =
        std::abs((x1 - x0) * (y0 - py) - (x0 - px) * (y1 - y0)) / chord;
    if (dist > best_dist) {  // strict: ties keep the smaller alpha
      best_dist = dist;
      best_alpha = alpha;
    }
  }
  if (best_dist < 1e-12) {
    throw NoKneeError("knee_point: all points collinear with the chord");
  }
  return best_alpha;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 14; ++i) grid.push_back(1.0 + 0.5 * i);
  return grid;
}

}  // namespace mmdd

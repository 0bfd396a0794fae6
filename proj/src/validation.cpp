#include "mmdd/validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmdd/errors.hpp"

namespace mmdd {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int df) {
  if (df < 1) throw std::invalid_argument("student_t_cdf: df must be >= 1");
  const double v = static_cast<double>(df);
  const double x = v / (v + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(v / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

TestReport one_sample_t(std::span<const double> sample, double mu0,
                        Sidedness sidedness) {
  const std::size_t n = sample.size();
  if (n < 2) throw InputError("one_sample_t: needs at least 2 observations");
  double sum = 0.0;
  for (double x : sample) sum += x;
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double x : sample) {
    const double d = x - mean;
    sq += d * d;
  }
  const double var = sq / static_cast<double>(n - 1);
  if (var <= 0.0) throw InputError("one_sample_t: zero-variance sample");
  const double se = std::sqrt(var / static_cast<double>(n));

  TestReport report;
  report.n = static_cast<int>(n);
  report.df = static_cast<int>(n) - 1;
  report.mu0 = mu0;
  report.sidedness = sidedness;
  report.t = (mean - mu0) / se;
  const double survival = 1.0 - student_t_cdf(report.t, report.df);
  if (sidedness == Sidedness::one_sided_greater) {
    report.p = survival;
  } else {
    report.p = std::min(1.0, 2.0 * (1.0 - student_t_cdf(std::abs(report.t),
                                                        report.df)));
  }
  return report;
}

TestReport covariate_test(const std::vector<HourSlot>& cluster_hours,
                          const CovariateSeries& covariate,
                          Sidedness sidedness) {
  if (covariate.values.empty()) {
    throw InputError("covariate_test: empty covariate series");
  }
  std::vector<double> sample;
  sample.reserve(cluster_hours.size());
  for (const HourSlot& slot : cluster_hours) {
    const auto it = covariate.values.find(slot);
    if (it != covariate.values.end()) sample.push_back(it->second);
  }
  if (sample.size() < 2) {
    throw InputError("covariate_test: fewer than 2 cluster hours matched the "
                     "covariate");
  }
  double total = 0.0;
  for (const auto& [slot, value] : covariate.values) total += value;
  const double mu0 = total / static_cast<double>(covariate.values.size());

  TestReport report = one_sample_t(sample, mu0, sidedness);
  report.hours_requested = cluster_hours.size();
  report.hours_matched = sample.size();
  report.low_coverage =
      2 * sample.size() < cluster_hours.size();  // under 50% matched
  return report;
}

std::string_view to_string(Sidedness s) {
  return s == Sidedness::one_sided_greater ? "one-sided-greater" : "two-sided";
}

}  // namespace mmdd

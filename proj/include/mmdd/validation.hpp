#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "mmdd/time.hpp"

namespace mmdd {

enum class Sidedness { one_sided_greater, two_sided };

// Hourly external covariate (precipitation, wind, ...), at most one value
// per slot.
struct CovariateSeries {
  std::string units;
  std::map<HourSlot, double> values;
};

struct TestReport {
  double t = 0.0;
  double p = 1.0;
  int df = 0;
  int n = 0;
  double mu0 = 0.0;
  Sidedness sidedness = Sidedness::one_sided_greater;
  // covariate_test bookkeeping
  std::size_t hours_requested = 0;
  std::size_t hours_matched = 0;
  bool low_coverage = false;  // fewer than half the cluster hours matched
};

// One-sample Student's t-test with sample (n-1) standard deviation. Throws
// InputError on n < 2 or a zero-variance sample.
TestReport one_sample_t(std::span<const double> sample, double mu0,
                        Sidedness sidedness = Sidedness::one_sided_greater);

// Tests whether the covariate over the cluster's hours exceeds its
// full-period mean. Throws InputError when fewer than two cluster hours
// match the covariate.
TestReport covariate_test(const std::vector<HourSlot>& cluster_hours,
                          const CovariateSeries& covariate,
                          Sidedness sidedness = Sidedness::one_sided_greater);

// P(T <= t) for Student's t with df degrees of freedom, via the regularized
// incomplete beta function. Absolute error well under 1e-6.
double student_t_cdf(double t, int df);

double regularized_incomplete_beta(double a, double b, double x);

std::string_view to_string(Sidedness s);

}  // namespace mmdd

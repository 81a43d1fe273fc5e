#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace prime {

/// Two-tailed paired Student t-test on d_i = x_i - y_i with n - 1 degrees of
/// freedom. When every difference is equal the variance vanishes: t is
/// +-infinity with p = 0 for a nonzero mean, and t = 0 with p = 1 otherwise
/// (`degenerate` is set in both cases). With n < 2, t and p are NaN.
struct PairedT {
  std::size_t n = 0;
  double mean_diff = 0;
  double sd_diff = 0;
  double t = 0;
  double df = 0;
  double p_value = 1;
  bool degenerate = false;
};

PairedT paired_t_test(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

inline constexpr double kAlpha = 0.05;

struct BiasDifference {
  std::size_t n = 0;
  double mean_s = 0, mean_as = 0;
  double delta = 0;  // mean_s - mean_as; negative means stereotype-aligned advantage
  PairedT test;
  bool significant() const { return test.n >= 2 && test.p_value < kAlpha; }
};

BiasDifference bias_difference(const std::vector<std::pair<double, double>>& s_as_pairs);

}  // namespace prime

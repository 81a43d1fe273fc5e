#include "prime/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace prime {

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t) || !(df > 0)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

PairedT paired_t_test(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("paired_t_test: samples differ in length");
  PairedT r;
  r.n = x.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (r.n == 0) {
    r.t = r.p_value = r.mean_diff = nan;
    return r;
  }
  double sum = 0;
  for (std::size_t i = 0; i < r.n; ++i) sum += x[i] - y[i];
  r.mean_diff = sum / static_cast<double>(r.n);
  if (r.n < 2) {
    r.t = r.p_value = r.sd_diff = nan;
    return r;
  }
  double ss = 0;
  for (std::size_t i = 0; i < r.n; ++i) {
    const double dev = (x[i] - y[i]) - r.mean_diff;
    ss += dev * dev;
  }
  r.df = static_cast<double>(r.n - 1);
  r.sd_diff = std::sqrt(ss / r.df);
  if (r.sd_diff == 0.0) {
    r.degenerate = true;
    if (r.mean_diff == 0.0) {
      r.t = 0.0;
      r.p_value = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
      r.p_value = 0.0;
    }
    return r;
  }
  r.t = r.mean_diff / (r.sd_diff / std::sqrt(static_cast<double>(r.n)));
  r.p_value = student_t_two_sided_p(r.t, r.df);
  return r;
}

BiasDifference bias_difference(const std::vector<std::pair<double, double>>& pairs) {
  BiasDifference b;
  b.n = pairs.size();
  std::vector<double> s, as;
  for (const auto& [x, y] : pairs) {
    s.push_back(x);
    as.push_back(y);
  }
  if (b.n) {
    double ss = 0, sa = 0;
    for (std::size_t i = 0; i < b.n; ++i) {
      ss += s[i];
      sa += as[i];
    }
    b.mean_s = ss / static_cast<double>(b.n);
    b.mean_as = sa / static_cast<double>(b.n);
  }
  b.test = paired_t_test(s, as);
  b.delta = b.n ? b.test.mean_diff : 0.0;
  return b;
}

}  // namespace prime

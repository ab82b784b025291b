#include "igatc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace igatc {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  GaussRule r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) dp = 1.0;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.points(i) = 0.5 * (1.0 - x);
    r.points(n - 1 - i) = 0.5 * (1.0 + x);
    r.weights(i) = r.weights(n - 1 - i) = 0.5 * w;
  }
  if (n == 1) {
    r.points(0) = 0.5;
    r.weights(0) = 1.0;
  }
  return r;
}

IntervalRule composite_gauss(const std::vector<double>& breakpoints, int n) {
  const GaussRule g = gauss_legendre(n);
  IntervalRule r;
  for (size_t e = 0; e + 1 < breakpoints.size(); ++e) {
    const double a = breakpoints[e], b = breakpoints[e + 1];
    if (!(b > a)) continue;
    for (int q = 0; q < n; ++q) {
      r.points.push_back(a + (b - a) * g.points(q));
      r.weights.push_back((b - a) * g.weights(q));
      r.interval.push_back(static_cast<int>(e));
    }
  }
  return r;
}

}  // namespace igatc

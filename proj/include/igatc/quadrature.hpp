#pragma once

#include <Eigen/Dense>

#include <vector>

namespace igatc {

/// Gauss-Legendre rule on [0,1].
struct GaussRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

GaussRule gauss_legendre(int n);

/// Rule of n points on every interval between consecutive breakpoints.
struct IntervalRule {
  std::vector<double> points;
  std::vector<double> weights;
  std::vector<int> interval;
};

IntervalRule composite_gauss(const std::vector<double>& breakpoints, int n);

}  // namespace igatc

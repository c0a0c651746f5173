#pragma once

#include <functional>
#include <vector>

namespace fbtumor {

// Cumulative integral of uniformly spaced samples: result[i] approximates
// the integral from node 0 to node i, fourth order in the spacing.
std::vector<double> cumulative_integral(const std::vector<double>& values, double h);

// Adaptive Simpson quadrature.  Throws ConvergenceError if the recursion
// depth is exhausted before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

}  // namespace fbtumor

#pragma once

#include <vector>

#include "chaining/functional.hpp"
#include "chaining/metric.hpp"

namespace chaining {

// H(mu, t) = integral over r of h(mu(B(t, r))), evaluated exactly as a sum
// over the ball-mass profile pieces; the integrand vanishes past the last
// breakpoint where the mass reaches 1. Returns +inf when the mass is zero on
// an interval of positive length (t outside the support with the nearest
// supported point at positive distance).
double H_point(const ChainingFunctional& h, const MetricSpace& X, const Measure& mu, int t);
double H_point(const ChainingFunctional& h, const BallMassProfile& profile);

// gamma_h(mu, X) = max_t H(mu, t); upper-bounds gamma_h(X) for every mu.
// Propagates the +inf sentinel.
double gamma_value(const ChainingFunctional& h, const MetricSpace& X, const Measure& mu);

struct DualValueBreakdown {
  std::vector<int> support;      // points with nu(x) > 0, ascending
  std::vector<double> per_point; // H(nu, x) for each supported x
  double aggregate = 0.0;        // weighted mean (entropic) or min (simplified)
};

// Entropic dual value of nu: sum_x nu(x) H(nu, x).
DualValueBreakdown entropic_dual_value(const ChainingFunctional& h, const MetricSpace& X,
                                       const Measure& nu);

// Simplified dual value of nu: min over supported x of H(nu, x).
DualValueBreakdown simplified_dual_value(const ChainingFunctional& h, const MetricSpace& X,
                                         const Measure& nu);

// The saddle objective phi(mu, nu) = sum_x nu(x) H(mu, x). mu and nu may be
// arbitrary nonnegative vectors here (the solver evaluates it off the
// simplex during line searches and tests feed finite-difference points).
double saddle_objective(const ChainingFunctional& h, const MetricSpace& X,
                        const std::vector<double>& mu, const std::vector<double>& nu);

}  // namespace chaining

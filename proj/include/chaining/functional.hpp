#pragma once

#include <string>
#include <vector>

namespace chaining {

enum class FunctionalKind {
  kExponential,    // tail density exp(-(c_q s)^q), c_q = Gamma(1+1/q), q >= 1
  kGaussianExact,  // tail density exp(-pi s^2 / 4)
  kGaussianApprox, // sqrt(log(1/p)), no normalization guarantee
  kCustomDensity,  // tabulated nonincreasing log-concave density, f(0) = 1
};

// A chaining functional h(p) = F^{-1}(p), where F is the complementary CDF
// of a nonincreasing probability density f on [0, inf) normalized so that
// f(0) = 1 (hence h'(1) = -1). h(1) = 0, h strictly decreasing and convex
// on (0,1], extended by h(p) = 0 for p > 1.
//
// Values are immutable after construction and all evaluations are pure, so
// instances are safe to share across threads. No evaluation memo is kept.
class ChainingFunctional {
 public:
  static ChainingFunctional exponential(double q);
  static ChainingFunctional gaussian();
  static ChainingFunctional gaussian_approx();
  // Samples are (s, f(s)) pairs with strictly increasing s starting at 0.
  // The density is scaled to integrate to 1 (it must already do so within
  // 1e-6 in the f(0)=1 normalization) and the axes are rescaled so that
  // f(0) = 1 exactly. Mass beyond the last grid point is treated as zero.
  static ChainingFunctional from_density(
      const std::vector<std::pair<double, double>>& samples);

  // h(p). Requires p > 0; returns 0 for p >= 1. Throws DomainError for
  // p <= 0 or p below the inversion floor (1e-300).
  double value(double p) const;

  // h'(a) = -1/f(h(a)) for a in (0,1]. Throws DomainError outside.
  double derivative(double a) const;

  // Complementary CDF F(s) and density f(s) of the underlying tail law.
  double ccdf(double s) const;
  double density(double s) const;

  // sup_{p -> 0+} h(p): +inf for unbounded support, the support endpoint
  // for tabulated compact densities.
  double limit_at_zero() const;

  FunctionalKind kind() const { return kind_; }
  double exponent() const { return q_; }
  std::string describe() const;

 private:
  ChainingFunctional() = default;

  FunctionalKind kind_ = FunctionalKind::kExponential;
  double q_ = 1.0;   // exponent for kExponential
  double cq_ = 1.0;  // Gamma(1 + 1/q)

  // Tabulated density after normalization; ccdf_ holds F at each grid point.
  std::vector<double> grid_s_, grid_f_, grid_ccdf_;
};

// Parses "exp:Q", "gaussian", "gaussian-approx" or "density:FILE" (two-column
// text: s f(s) per line).
ChainingFunctional parse_functional_spec(const std::string& spec);

// Property-grid report for a functional. Violations are signed maxima: a
// positive entry means the property failed by that much somewhere on the
// grid. `grid` is the per-axis resolution (the sub-multiplicativity check
// runs on the grid x grid log lattice, the 1-D checks on grid^2 points).
struct FunctionalCheckReport {
  int grid = 0;
  double h_at_one = 0.0;              // must be 0 exactly
  double deriv_at_one = 0.0;          // must be -1 for normalized kinds
  double submult_violation = 0.0;     // max h(ab) - h(a) - h(b)
  double deriv_lower_violation = 0.0; // max of -(1 + a h'(a))
  double deriv_upper_violation = 0.0; // max of a h'(a)
  double log_bound_violation = 0.0;   // max h(a) - log(1/a)
  double inversion_error = 0.0;       // max |F(h(p)) - p|
  double fd_rel_error = 0.0;          // h' vs central differences
  double monotone_violation = 0.0;    // max h(p') - h(p) for p' > p
  double convexity_violation = 0.0;   // max midpoint excess
};

FunctionalCheckReport check_functional(const ChainingFunctional& h, int grid = 50);

}  // namespace chaining

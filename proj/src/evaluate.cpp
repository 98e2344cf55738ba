#include "chaining/evaluate.hpp"

#include <algorithm>
#include <limits>

#include "chaining/errors.hpp"
#include "chaining/util.hpp"

namespace chaining {

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

double H_point(const ChainingFunctional& h, const BallMassProfile& profile) {
  double acc = 0.0;
  for (std::size_t k = 1; k < profile.radii.size(); ++k) {
    double m = profile.mass[k - 1];
    double len = profile.radii[k] - profile.radii[k - 1];
    if (len <= 0.0) continue;
    if (m <= 0.0) return kInf;
    if (m >= 1.0) break;  // h(1) = 0 and masses only grow
    acc += h.value(m) * len;
  }
  return acc;
}

double H_point(const ChainingFunctional& h, const MetricSpace& X, const Measure& mu, int t) {
  return H_point(h, ball_mass_profile(X, mu, t));
}

double gamma_value(const ChainingFunctional& h, const MetricSpace& X, const Measure& mu) {
  std::vector<double> vals(static_cast<std::size_t>(X.n()));
  parallel_for(static_cast<std::size_t>(X.n()), [&](std::size_t t) {
    vals[t] = H_point(h, X, mu, static_cast<int>(t));
  });
  double best = 0.0;
  for (double v : vals) best = std::max(best, v);
  return best;
}

DualValueBreakdown entropic_dual_value(const ChainingFunctional& h, const MetricSpace& X,
                                       const Measure& nu) {
  DualValueBreakdown out;
  out.support = nu.support();
  out.per_point.resize(out.support.size());
  parallel_for(out.support.size(), [&](std::size_t i) {
    out.per_point[i] = H_point(h, X, nu, out.support[i]);
  });
  double acc = 0.0;
  for (std::size_t i = 0; i < out.support.size(); ++i)
    acc += nu.weights[static_cast<std::size_t>(out.support[i])] * out.per_point[i];
  out.aggregate = acc;
  return out;
}

DualValueBreakdown simplified_dual_value(const ChainingFunctional& h, const MetricSpace& X,
                                         const Measure& nu) {
  DualValueBreakdown out;
  out.support = nu.support();
  if (out.support.empty()) throw DomainError("simplified dual of a measure with empty support");
  out.per_point.resize(out.support.size());
  parallel_for(out.support.size(), [&](std::size_t i) {
    out.per_point[i] = H_point(h, X, nu, out.support[i]);
  });
  out.aggregate = *std::min_element(out.per_point.begin(), out.per_point.end());
  return out;
}

double saddle_objective(const ChainingFunctional& h, const MetricSpace& X,
                        const std::vector<double>& mu, const std::vector<double>& nu) {
  Measure m;
  m.weights = mu;
  double acc = 0.0;
  for (int x = 0; x < X.n(); ++x) {
    double w = nu[static_cast<std::size_t>(x)];
    if (w == 0.0) continue;
    acc += w * H_point(h, X, m, x);
  }
  return acc;
}

}  // namespace chaining

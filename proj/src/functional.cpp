#include "chaining/functional.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chaining/errors.hpp"

namespace chaining {

namespace {

constexpr double kInversionFloor = 1e-300;
constexpr double kInvertTol = 1e-12;
const double kInf = std::numeric_limits<double>::infinity();

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
// series for x < a + 1, continued fraction otherwise.
double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) by series, Q = 1 - P.
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - lg);
    return 1.0 - p;
  }
  // Lentz's continued fraction for Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double frac = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    frac *= delta;
    if (std::fabs(delta - 1.0) < 1e-17) break;
  }
  return frac * std::exp(-x + a * std::log(x) - lg);
}

// Solves F(s) = p for s on [lo, hi] where F is strictly decreasing with
// F' = -f. Bisection bracket maintained throughout, Newton steps taken when
// they stay inside the bracket.
template <typename Fc, typename Fd>
double invert_ccdf(const Fc& F, const Fd& f, double p, double lo, double hi) {
  double flo = F(lo) - p;  // >= 0
  double fhi = F(hi) - p;  // <= 0
  if (flo < 0.0) return lo;
  if (fhi > 0.0) return hi;
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > kInvertTol; ++it) {
    double fs = F(s) - p;
    if (fs > 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    double den = f(s);
    double snewton = den > 0.0 ? s + fs / den : lo - 1.0;
    if (snewton > lo && snewton < hi) {
      s = snewton;
    } else {
      s = 0.5 * (lo + hi);
    }
  }
  return s;
}

}  // namespace

ChainingFunctional ChainingFunctional::exponential(double q) {
  if (!(q >= 1.0)) throw DomainError("exponential functional requires q >= 1");
  ChainingFunctional h;
  h.kind_ = FunctionalKind::kExponential;
  h.q_ = q;
  h.cq_ = std::tgamma(1.0 + 1.0 / q);
  return h;
}

ChainingFunctional ChainingFunctional::gaussian() {
  ChainingFunctional h;
  h.kind_ = FunctionalKind::kGaussianExact;
  return h;
}

ChainingFunctional ChainingFunctional::gaussian_approx() {
  ChainingFunctional h;
  h.kind_ = FunctionalKind::kGaussianApprox;
  return h;
}

ChainingFunctional ChainingFunctional::from_density(
    const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) throw ValidationError("tabulated density needs at least 2 samples");
  if (samples.front().first != 0.0)
    throw ValidationError("tabulated density grid must start at s = 0");
  std::vector<double> s(samples.size()), f(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    s[i] = samples[i].first;
    f[i] = samples[i].second;
    if (i > 0 && !(s[i] > s[i - 1]))
      throw ValidationError("tabulated density grid must be strictly increasing");
    if (!(f[i] >= 0.0)) throw ValidationError("tabulated density must be nonnegative");
    if (i > 0 && f[i] > f[i - 1] + 1e-12 * std::max(1.0, f[0]))
      throw ValidationError("tabulated density must be nonincreasing");
  }
  if (!(f[0] > 0.0)) throw ValidationError("tabulated density must have f(0) > 0");

  // Log-concavity along the grid: log f must lie above its chords. Once the
  // density hits zero it must stay zero.
  bool seen_zero = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) seen_zero = true;
    else if (seen_zero)
      throw ValidationError("tabulated density has an interior zero");
  }
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    if (f[i + 1] == 0.0) continue;
    double w = (s[i] - s[i - 1]) / (s[i + 1] - s[i - 1]);
    double chord = (1.0 - w) * std::log(f[i - 1]) + w * std::log(f[i + 1]);
    if (std::log(f[i]) < chord - 1e-9)
      throw ValidationError("tabulated density is not log-concave");
  }

  // The axis map (s, f) -> (s * f0, f / f0) fixes f(0) = 1 and preserves the
  // integral, so the input must already integrate to 1 within 1e-6.
  auto trapezoid = [&]() {
    double acc = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i)
      acc += 0.5 * (f[i] + f[i - 1]) * (s[i] - s[i - 1]);
    return acc;
  };
  double integral = trapezoid();
  if (std::fabs(integral - 1.0) > 1e-6)
    throw ValidationError("tabulated density must integrate to 1 (got " +
                          std::to_string(integral) + ")");
  const double beta = f[0];
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] *= beta;
    f[i] /= beta;  // f[0] becomes exactly 1
  }
  // Shrinking the s-axis by the residual integral makes the trapezoid
  // integral exactly 1 while leaving f(0) = 1 untouched.
  integral = trapezoid();
  for (auto& v : s) v /= integral;
  std::vector<double> ccdf(s.size());
  ccdf.back() = 0.0;
  for (std::size_t i = s.size() - 1; i-- > 0;)
    ccdf[i] = ccdf[i + 1] + 0.5 * (f[i] + f[i + 1]) * (s[i + 1] - s[i]);
  ccdf[0] = 1.0;

  ChainingFunctional h;
  h.kind_ = FunctionalKind::kCustomDensity;
  h.grid_s_ = std::move(s);
  h.grid_f_ = std::move(f);
  h.grid_ccdf_ = std::move(ccdf);
  return h;
}

double ChainingFunctional::ccdf(double s) const {
  if (s <= 0.0) return 1.0;
  switch (kind_) {
    case FunctionalKind::kExponential: {
      if (q_ == 1.0) return std::exp(-s);
      double u = std::pow(cq_ * s, q_);
      return gamma_q(1.0 / q_, u);
    }
    case FunctionalKind::kGaussianExact:
      return std::erfc(s * std::sqrt(M_PI) / 2.0);
    case FunctionalKind::kGaussianApprox:
      return std::exp(-s * s);
    case FunctionalKind::kCustomDensity: {
      if (s >= grid_s_.back()) return 0.0;
      auto it = std::upper_bound(grid_s_.begin(), grid_s_.end(), s);
      std::size_t k = static_cast<std::size_t>(it - grid_s_.begin()) - 1;
      double ds = s - grid_s_[k];
      double seg = grid_s_[k + 1] - grid_s_[k];
      double fs = grid_f_[k] + (grid_f_[k + 1] - grid_f_[k]) * (ds / seg);
      return grid_ccdf_[k] - 0.5 * (grid_f_[k] + fs) * ds;
    }
  }
  return 0.0;
}

double ChainingFunctional::density(double s) const {
  if (s < 0.0) return 0.0;
  switch (kind_) {
    case FunctionalKind::kExponential:
      return std::exp(-std::pow(cq_ * s, q_));
    case FunctionalKind::kGaussianExact:
      return std::exp(-M_PI * s * s / 4.0);
    case FunctionalKind::kGaussianApprox:
      return 2.0 * s * std::exp(-s * s);  // -F'(s) for F = exp(-s^2)
    case FunctionalKind::kCustomDensity: {
      if (s >= grid_s_.back()) return 0.0;
      auto it = std::upper_bound(grid_s_.begin(), grid_s_.end(), s);
      std::size_t k = static_cast<std::size_t>(it - grid_s_.begin()) - 1;
      double seg = grid_s_[k + 1] - grid_s_[k];
      return grid_f_[k] + (grid_f_[k + 1] - grid_f_[k]) * ((s - grid_s_[k]) / seg);
    }
  }
  return 0.0;
}

double ChainingFunctional::value(double p) const {
  if (!(p > 0.0)) throw DomainError("h(p) requires p > 0");
  if (p < kInversionFloor) throw DomainError("h(p) below numeric-inversion floor");
  if (p >= 1.0) return 0.0;
  switch (kind_) {
    case FunctionalKind::kExponential:
      if (q_ == 1.0) return std::log(1.0 / p);
      break;
    case FunctionalKind::kGaussianApprox:
      return std::sqrt(std::log(1.0 / p));
    default:
      break;
  }
  // Numeric inversion. h(p) <= log(1/p) under the f(0)=1 normalization,
  // and for compact tabulated support the root lies inside the grid.
  double hi = std::log(1.0 / p) + 1.0;
  if (kind_ == FunctionalKind::kCustomDensity) hi = std::min(hi, grid_s_.back());
  return invert_ccdf([this](double s) { return ccdf(s); },
                     [this](double s) { return density(s); }, p, 0.0, hi);
}

double ChainingFunctional::derivative(double a) const {
  if (!(a > 0.0) || a > 1.0) throw DomainError("h'(a) requires a in (0,1]");
  if (kind_ == FunctionalKind::kGaussianApprox) {
    if (a == 1.0) return -kInf;
    double g = std::sqrt(std::log(1.0 / a));
    return -1.0 / (2.0 * a * g);
  }
  double fh = density(value(a));
  if (fh <= 0.0) return -kInf;
  return -1.0 / fh;
}

double ChainingFunctional::limit_at_zero() const {
  if (kind_ == FunctionalKind::kCustomDensity) return grid_s_.back();
  return kInf;
}

std::string ChainingFunctional::describe() const {
  switch (kind_) {
    case FunctionalKind::kExponential: {
      std::ostringstream os;
      os << "exp:" << q_;
      return os.str();
    }
    case FunctionalKind::kGaussianExact:
      return "gaussian";
    case FunctionalKind::kGaussianApprox:
      return "gaussian-approx";
    case FunctionalKind::kCustomDensity:
      return "density[" + std::to_string(grid_s_.size()) + " samples]";
  }
  return "?";
}

FunctionalCheckReport check_functional(const ChainingFunctional& h, int grid) {
  FunctionalCheckReport rep;
  rep.grid = grid;
  rep.h_at_one = h.value(1.0);
  const bool normalized = h.kind() != FunctionalKind::kGaussianApprox;
  if (normalized) rep.deriv_at_one = h.derivative(1.0);

  const int n1 = grid * grid;
  const double lo = 1e-6;
  auto grid_point = [&](int i, int count) {
    // log-spaced in (lo, 1]
    double t = static_cast<double>(i) / (count - 1);
    return std::exp(std::log(lo) * (1.0 - t));
  };

  // Sub-multiplicativity on the log lattice, including factors above 1 that
  // exercise the h(a) = 0 extension.
  std::vector<double> axis(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) axis[static_cast<std::size_t>(i)] = grid_point(i, grid);
  std::vector<double> axis_ext(axis);
  axis_ext.push_back(1.25);
  axis_ext.push_back(2.0);
  axis_ext.push_back(10.0);
  auto h_ext = [&](double p) { return p >= 1.0 ? 0.0 : h.value(p); };
  for (double a : axis_ext)
    for (double b : axis) {
      if (a * b <= 0.0) continue;
      double v = h_ext(a * b) - h_ext(a) - h_ext(b);
      rep.submult_violation = std::max(rep.submult_violation, v);
    }

  double prev = -1.0;
  bool have_prev = false;
  rep.monotone_violation = -kInf;
  for (int i = 0; i < n1; ++i) {
    double a = grid_point(i, n1);
    double ha = h.value(a);
    rep.log_bound_violation = std::max(rep.log_bound_violation, ha - std::log(1.0 / a));
    rep.inversion_error = std::max(rep.inversion_error, std::fabs(h.ccdf(ha) - a));
    if (normalized) {
      double d = h.derivative(a);
      rep.deriv_lower_violation = std::max(rep.deriv_lower_violation, -(1.0 + a * d));
      rep.deriv_upper_violation = std::max(rep.deriv_upper_violation, a * d);
    }
    // a ascends toward 1 with i, so h must strictly drop between grid points.
    if (have_prev) rep.monotone_violation = std::max(rep.monotone_violation, ha - prev);
    prev = ha;
    have_prev = true;
    if (i > 0 && i + 1 < n1) {
      double b = grid_point(i + 1, n1);
      double mid = 0.5 * (a + b);
      double hm = h.value(mid);
      rep.convexity_violation =
          std::max(rep.convexity_violation, hm - 0.5 * (ha + h.value(b)));
      double eps = 1e-5 * mid;
      if (mid + eps < 1.0) {
        double fd = (h.value(mid + eps) - h.value(mid - eps)) / (2.0 * eps);
        double d = h.derivative(mid);
        if (std::isfinite(d)) {
          double rel = std::fabs(fd - d) / std::max(1.0, std::fabs(d));
          rep.fd_rel_error = std::max(rep.fd_rel_error, rel);
        }
      }
    }
  }
  return rep;
}

ChainingFunctional parse_functional_spec(const std::string& spec) {
  if (spec == "gaussian") return ChainingFunctional::gaussian();
  if (spec == "gaussian-approx") return ChainingFunctional::gaussian_approx();
  if (spec.rfind("exp:", 0) == 0) {
    std::size_t pos = 0;
    double q;
    try {
      q = std::stod(spec.substr(4), &pos);
    } catch (const std::exception&) {
      throw FormatError("bad exponent in functional spec '" + spec + "'");
    }
    if (pos != spec.size() - 4) throw FormatError("bad exponent in functional spec '" + spec + "'");
    return ChainingFunctional::exponential(q);
  }
  if (spec.rfind("density:", 0) == 0) {
    std::string path = spec.substr(8);
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open density file '" + path + "'");
    std::vector<std::pair<double, double>> samples;
    double s, f;
    while (in >> s >> f) samples.emplace_back(s, f);
    if (!in.eof()) throw FormatError("trailing garbage in density file '" + path + "'");
    return ChainingFunctional::from_density(samples);
  }
  throw FormatError("unknown functional spec '" + spec +
                    "' (expected gaussian, gaussian-approx, exp:Q or density:FILE)");
}

}  // namespace chaining

#include "chaining/solve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chaining/errors.hpp"
#include "chaining/util.hpp"

namespace chaining {

std::vector<double> project_truncated_simplex(const std::vector<double>& v, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("truncation level must be in [0,1)");
  const std::size_t n = v.size();
  const double floor = alpha / static_cast<double>(n);
  const double budget = 1.0 - alpha;  // remaining mass above the floor
  // Substitute u = w - floor: project v - floor onto { u >= 0, sum u <= budget }.
  std::vector<double> u(n);
  double pos_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = v[i] - floor;
    if (u[i] > 0.0) pos_sum += u[i];
  }
  if (pos_sum <= budget) {
    for (auto& x : u) x = std::max(x, 0.0) + floor;
    return u;
  }
  // Cap binds: project onto { u >= 0, sum u = budget } by the sort-threshold
  // rule.
  std::vector<double> sorted(u);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cumulative += sorted[k];
    double cand = (cumulative - budget) / static_cast<double>(k + 1);
    if (k + 1 == n || sorted[k + 1] <= cand) {
      tau = cand;
      break;
    }
  }
  for (auto& x : u) x = std::max(x - tau, 0.0) + floor;
  return u;
}

Subgradient subgradient(const ChainingFunctional& h, const MetricSpace& X,
                        const std::vector<double>& mu, const std::vector<double>& nu) {
  const int n = X.n();
  Subgradient g;
  g.grad_mu.assign(static_cast<std::size_t>(n), 0.0);
  g.grad_nu.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 1) return g;

  Measure m;
  m.weights = mu;

  // grad_nu[t] = H(mu, t).
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t t) {
    double v = H_point(h, X, m, static_cast<int>(t));
    if (!std::isfinite(v)) throw DomainError("subgradient: zero ball mass under mu");
    g.grad_nu[t] = v;
  });

  // grad_mu via per-center suffix sums over the profile pieces.
  std::vector<double> suffix(static_cast<std::size_t>(n) + 1);
  for (int x = 0; x < n; ++x) {
    double w = nu[static_cast<std::size_t>(x)];
    if (w == 0.0) continue;
    BallMassProfile prof = ball_mass_profile(X, m, x);
    const std::size_t K = prof.radii.size();
    suffix.assign(K + 1, 0.0);
    for (std::size_t k = K; k-- > 1;) {
      double mass = prof.mass[k - 1];
      double len = prof.radii[k] - prof.radii[k - 1];
      double hp;
      if (mass <= 0.0) throw DomainError("subgradient: zero ball mass under mu");
      hp = mass >= 1.0 ? 0.0 : h.derivative(mass);
      suffix[k] = suffix[k + 1] + hp * len;
    }
    // Point at sorted position p enters the ball at breakpoint index given
    // by how many breakpoints precede it.
    const auto& idx = X.sorted_neighbors(x);
    const auto& brk = X.breakpoint_index(x);
    std::size_t b = 0;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      while (b < brk.size() && static_cast<std::size_t>(brk[b]) <= p) ++b;
      // k_*(t, x) = b; contributions start with piece b+1.
      g.grad_mu[static_cast<std::size_t>(idx[p])] += w * suffix[b + 1];
    }
  }
  return g;
}

void SolverParams::validate() const {
  if (max_iters <= 0 || step_scale <= 0.0 || eval_every <= 0)
    throw DomainError("solver parameters must be positive");
  if (gap_target && !(*gap_target > 0.0))
    throw DomainError("solver parameters must be positive");
}

namespace {

// Scale a nonnegative vector with sum in (0, 1] up to a probability vector.
Measure to_measure(std::vector<double> w) {
  double s = std::accumulate(w.begin(), w.end(), 0.0);
  if (s > 0.0)
    for (auto& x : w) x /= s;
  Measure m;
  m.weights = std::move(w);
  return m;
}

}  // namespace

SaddleSolution solve_saddle_point(const ChainingFunctional& h, const MetricSpace& X,
                                  const SolverParams& params) {
  params.validate();
  const int n = X.n();
  const double diam = X.diameter();
  const double alpha = 1.0 - 1.0 / M_E;

  SaddleSolution sol;
  sol.truncation_bound = diam * std::log(1.0 / (1.0 - alpha));

  if (n == 1) {
    sol.mu_star.weights = {1.0};
    sol.nu_star.weights = {1.0};
    return sol;
  }

  std::vector<double> mu(static_cast<std::size_t>(n), 1.0 / n);
  std::vector<double> nu(static_cast<std::size_t>(n), 1.0 / n);
  std::vector<double> mu_sum(mu), nu_sum(nu);

  double best_primal = 0.0, best_proxy = 0.0;
  Measure best_mu, best_nu;
  bool have_best = false;
  double grad_norm_max = 0.0;

  const double gap_target = params.gap_target.value_or(-1.0);
  const double default_bound = kGapConstant * diam;

  // The running averages live in Delta^alpha (coordinate floors are convex
  // constraints) and scaling a sub-probability vector up to mass 1 keeps
  // feasibility while only lowering gamma, so the reported measures are both
  // feasible and at least as good as the raw averages.
  auto eval_point = [&](int t) {
    Measure mb = to_measure(std::vector<double>(mu_sum));
    Measure nb = to_measure(std::vector<double>(nu_sum));
    double primal = gamma_value(h, X, mb);
    double ent = entropic_dual_value(h, X, nb).aggregate;
    double proxy = std::max(0.0, (ent - diam / M_E) / 2.0);
    if (!have_best || primal < best_primal) {
      best_primal = primal;
      best_mu = std::move(mb);
    }
    if (!have_best || proxy > best_proxy) {
      best_proxy = proxy;
      best_nu = std::move(nb);
    }
    have_best = true;
    sol.trace.push_back({t, best_primal, best_proxy});
  };

  int iters = 0;
  for (int t = 1; t <= params.max_iters; ++t) {
    Subgradient g = subgradient(h, X, mu, nu);
    double norm2 = 0.0;
    for (double v : g.grad_mu) norm2 += v * v;
    for (double v : g.grad_nu) norm2 += v * v;
    grad_norm_max = std::max(grad_norm_max, std::sqrt(norm2));
    double eta = params.step_scale * std::sqrt(2.0) /
                 (std::max(grad_norm_max, 1e-300) * std::sqrt(static_cast<double>(t)));
    for (int i = 0; i < n; ++i) {
      mu[static_cast<std::size_t>(i)] -= eta * g.grad_mu[static_cast<std::size_t>(i)];
      nu[static_cast<std::size_t>(i)] += eta * g.grad_nu[static_cast<std::size_t>(i)];
    }
    mu = project_truncated_simplex(mu, alpha);
    nu = project_truncated_simplex(nu, 0.0);
    for (int i = 0; i < n; ++i) {
      mu_sum[static_cast<std::size_t>(i)] += mu[static_cast<std::size_t>(i)];
      nu_sum[static_cast<std::size_t>(i)] += nu[static_cast<std::size_t>(i)];
    }
    iters = t;
    if (t % params.eval_every == 0 || t == params.max_iters) {
      eval_point(t);
      if (gap_target > 0.0 && best_primal - best_proxy <= gap_target) break;
    }
  }
  if (!have_best) eval_point(0);

  sol.mu_star = best_mu;
  sol.nu_star = best_nu;
  sol.primal_value = best_primal;
  sol.dual_proxy = best_proxy;
  sol.gap_estimate = best_primal - best_proxy;
  sol.iterations = iters;
  double target = gap_target > 0.0 ? gap_target : default_bound;
  sol.budget_exhausted = sol.gap_estimate > target;
  return sol;
}

}  // namespace chaining

#include "chaining/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chaining/errors.hpp"

namespace chaining {

namespace {
const double kInf = std::numeric_limits<double>::infinity();

Measure conditional_measure(const Measure& nu, const std::vector<bool>& in_S) {
  Measure out;
  out.weights.assign(nu.weights.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < nu.weights.size(); ++i)
    if (in_S[i]) total += nu.weights[i];
  if (total <= 0.0) throw DomainError("conditioning on a zero-mass set");
  for (std::size_t i = 0; i < nu.weights.size(); ++i)
    if (in_S[i]) out.weights[i] = nu.weights[i] / total;
  return out;
}
}  // namespace

ConditioningResult condition_dual(const ChainingFunctional& h, const MetricSpace& X,
                                  const Measure& nu) {
  nu.validate();
  const int n = X.n();
  std::vector<bool> in_S(static_cast<std::size_t>(n), false);
  int size = 0;
  for (int i = 0; i < n; ++i)
    if (nu.weights[static_cast<std::size_t>(i)] > 0.0) {
      in_S[static_cast<std::size_t>(i)] = true;
      ++size;
    }
  if (size == 0) throw DomainError("condition_dual: measure has empty support");

  const double diam = X.diameter();
  ConditioningResult res;
  Measure nu_S = conditional_measure(nu, in_S);

  for (int round = 0; round <= n; ++round) {
    // Per-point H under the current conditional measure.
    double h_nu_nu = 0.0;
    double mn = kInf;
    int argmin = -1;
    for (int x = 0; x < n; ++x) {
      if (!in_S[static_cast<std::size_t>(x)]) continue;
      double v = H_point(h, X, nu_S, x);
      h_nu_nu += nu_S.weights[static_cast<std::size_t>(x)] * v;
      if (v < mn) {
        mn = v;
        argmin = x;
      }
    }
    if (res.entropic_trace.empty()) res.entropic_start = h_nu_nu;
    res.entropic_trace.push_back(h_nu_nu);
    if (h_nu_nu <= mn + diam) {
      res.achieved_min = mn;
      break;
    }
    in_S[static_cast<std::size_t>(argmin)] = false;
    --size;
    res.removed_order.push_back(argmin);
    nu_S = conditional_measure(nu, in_S);
  }

  res.nu_S = nu_S;
  for (int i = 0; i < n; ++i)
    if (in_S[static_cast<std::size_t>(i)]) res.S.push_back(i);
  return res;
}

PerScaleResult per_scale_certificate(const ChainingFunctional& h, const MetricSpace& X,
                                     const Measure& nu, const Measure& mu, double r) {
  if (!(r > 0.0)) throw DomainError("per-scale certificate needs r > 0");
  PerScaleResult res;
  double lhs = 0.0, rhs = 1.0 / M_E;
  for (int x = 0; x < X.n(); ++x) {
    double w = nu.weights[static_cast<std::size_t>(x)];
    if (w == 0.0) continue;
    lhs += w * h.value(std::max(ball_mass(X, nu, x, 2.0 * r), w));
    double m = ball_mass(X, mu, x, r);
    if (m <= 0.0) {
      // h has no value at mass zero; the inequality holds vacuously when the
      // limit is infinite, which we surface via the flag.
      double lim = h.limit_at_zero();
      if (std::isinf(lim)) {
        res.rhs_infinite = true;
        rhs = kInf;
      } else {
        rhs += w * lim;
      }
    } else if (std::isfinite(rhs)) {
      rhs += w * h.value(m);
    }
  }
  res.lhs = lhs;
  res.rhs = rhs;
  res.slack = rhs - lhs;
  res.holds = lhs <= rhs + 1e-9;
  return res;
}

PrincipalSequence principal_sequence(const BipartiteGraph& g, const Measure& mu,
                                     const Measure& nu, int cap) {
  if (g.n1 <= 0 || g.n2 <= 0) throw DomainError("bipartite graph is empty");
  cap = std::min(cap, 31);  // subsets are enumerated as 32-bit masks
  if (g.n1 > cap) throw SizeError("principal_sequence is an exhaustive oracle, |X1| capped at " +
                                  std::to_string(cap));
  if (mu.n() != g.n1 || nu.n() != g.n2)
    throw DomainError("measure sizes do not match the bipartite graph");
  mu.validate();
  nu.validate();
  for (int i = 0; i < g.n1; ++i) {
    if (g.adj[static_cast<std::size_t>(i)].empty())
      throw DomainError("isolated vertex in X1");
    if (!(mu.weights[static_cast<std::size_t>(i)] > 0.0))
      throw DomainError("principal_sequence requires mu > 0 on X1");
  }
  {
    std::vector<bool> covered(static_cast<std::size_t>(g.n2), false);
    for (const auto& nb : g.adj)
      for (int y : nb) covered[static_cast<std::size_t>(y)] = true;
    for (int y = 0; y < g.n2; ++y) {
      if (!covered[static_cast<std::size_t>(y)]) throw DomainError("isolated vertex in X2");
      if (!(nu.weights[static_cast<std::size_t>(y)] > 0.0))
        throw DomainError("principal_sequence requires supp(nu) = X2");
    }
  }

  // Neighborhood bitmasks over X2 (n2 may exceed 64 only if n1 small; cap n2
  // to 64 for the mask representation).
  if (g.n2 > 64) throw SizeError("principal_sequence oracle supports |X2| <= 64");
  std::vector<std::uint64_t> nbr(static_cast<std::size_t>(g.n1), 0);
  for (int i = 0; i < g.n1; ++i)
    for (int y : g.adj[static_cast<std::size_t>(i)])
      nbr[static_cast<std::size_t>(i)] |= 1ULL << y;

  auto mu_of = [&](std::uint32_t setmask) {
    double acc = 0.0;
    for (int i = 0; i < g.n1; ++i)
      if (setmask & (1u << i)) acc += mu.weights[static_cast<std::size_t>(i)];
    return acc;
  };
  auto nu_of = [&](std::uint64_t ymask) {
    double acc = 0.0;
    for (int y = 0; y < g.n2; ++y)
      if (ymask & (1ULL << y)) acc += nu.weights[static_cast<std::size_t>(y)];
    return acc;
  };
  auto neighborhood = [&](std::uint32_t setmask) {
    std::uint64_t ymask = 0;
    for (int i = 0; i < g.n1; ++i)
      if (setmask & (1u << i)) ymask |= nbr[static_cast<std::size_t>(i)];
    return ymask;
  };

  PrincipalSequence seq;
  const std::uint32_t full = g.n1 == 32 ? 0xffffffffu : ((1u << g.n1) - 1);
  std::uint32_t S_prev = 0;
  std::uint64_t N_prev = 0;

  while (S_prev != full) {
    std::uint32_t remaining = full & ~S_prev;
    // Exhaustive minimum of nu(N(S') \ N_prev) / mu(S') over nonempty
    // subsets S' of the remaining vertices.
    double beta = kInf;
    std::uint32_t union_min = 0;
    for (std::uint32_t sub = remaining; sub != 0; sub = (sub - 1) & remaining) {
      double ratio = nu_of(neighborhood(sub) & ~N_prev) / mu_of(sub);
      if (!std::isfinite(beta) || ratio < beta - 1e-12 * std::max(1.0, beta)) {
        beta = ratio;
        union_min = sub;
      } else if (ratio <= beta + 1e-12 * std::max(1.0, beta)) {
        union_min |= sub;
      }
    }
    // The maximal minimizer is the union of all minimizers; check that the
    // union itself attains the minimum instead of assuming it.
    double union_ratio = nu_of(neighborhood(union_min) & ~N_prev) / mu_of(union_min);
    if (std::fabs(union_ratio - beta) > 1e-9 * std::max(1.0, std::fabs(beta)))
      throw CertificateError("union of ratio minimizers does not attain the minimum");
    if (!seq.betas.empty() && !(beta > seq.betas.back()))
      throw CertificateError("principal sequence ratios failed to increase strictly");

    S_prev |= union_min;
    N_prev |= neighborhood(union_min);
    seq.betas.push_back(beta);
    std::vector<int> s;
    for (int i = 0; i < g.n1; ++i)
      if (S_prev & (1u << i)) s.push_back(i);
    seq.sets.push_back(std::move(s));
  }

  // Re-verify both defining properties exhaustively.
  std::uint32_t prev = 0;
  std::uint64_t nprev = 0;
  for (std::size_t step = 0; step < seq.sets.size(); ++step) {
    std::uint32_t cur = 0;
    for (int i : seq.sets[step]) cur |= 1u << i;
    std::uint32_t diff = cur & ~prev;
    double lhs = seq.betas[step] * mu_of(diff);
    double rhs = nu_of(neighborhood(cur) & ~nprev);
    if (std::fabs(lhs - rhs) > 1e-9 * std::max(1.0, std::fabs(rhs)))
      throw CertificateError("principal sequence property 1 failed at step " +
                             std::to_string(step) + ": " + std::to_string(lhs) +
                             " != " + std::to_string(rhs));
    std::uint32_t rem = full & ~prev;
    for (std::uint32_t sub = rem; sub != 0; sub = (sub - 1) & rem) {
      if (seq.betas[step] * mu_of(sub) > nu_of(neighborhood(sub) & ~nprev) + 1e-9)
        throw CertificateError("principal sequence property 2 failed");
    }
    prev = cur;
    nprev |= neighborhood(cur);
  }
  return seq;
}

}  // namespace chaining

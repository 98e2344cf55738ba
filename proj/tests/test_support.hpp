#pragma once

// Shared instance generators and independent oracles for the test suites.
// Everything is seeded explicitly so runs are reproducible.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "chaining/evaluate.hpp"
#include "chaining/functional.hpp"
#include "chaining/metric.hpp"
#include "chaining/solve.hpp"

namespace testsupport {

using chaining::ChainingFunctional;
using chaining::Measure;
using chaining::MetricSpace;

// Euclidean point cloud in [0,1]^dim.
inline MetricSpace random_point_metric(int n, int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(dim)));
  for (auto& p : pts)
    for (auto& c : p) c = unif(rng);
  return MetricSpace::from_points(pts);
}

// Distances drawn uniformly from [1, 2]; the triangle inequality holds for
// any such matrix.
inline MetricSpace random_matrix_metric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = unif(rng);
      d[static_cast<std::size_t>(i) * n + j] = v;
      d[static_cast<std::size_t>(j) * n + i] = v;
    }
  return MetricSpace::from_matrix(std::move(d), n);
}

inline MetricSpace mixed_random_metric(int n, unsigned seed) {
  return seed % 2 == 0 ? random_point_metric(n, 1 + static_cast<int>(seed % 3), seed)
                       : random_matrix_metric(n, seed);
}

// Dirichlet-ish random measure; zero_frac of the entries are zeroed before
// normalization (keeping at least one positive).
inline Measure random_measure(int n, unsigned seed, double zero_frac = 0.0) {
  std::mt19937 rng(seed);
  std::exponential_distribution<double> expd(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Measure m;
  m.weights.resize(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (auto& w : m.weights) {
    w = expd(rng);
    if (unif(rng) < zero_frac) w = 0.0;
    sum += w;
  }
  if (sum == 0.0) {
    m.weights[0] = 1.0;
    sum = 1.0;
  }
  for (auto& w : m.weights) w /= sum;
  return m;
}

// Reference simplex projection by dense grid refinement: minimizes
// ||w - v||_2 over {w >= floor, sum w <= 1} with coordinate descent. Only
// for tiny n in tests.
inline std::vector<double> grid_project_simplex(const std::vector<double>& v, double alpha,
                                                int iters = 20000) {
  const std::size_t n = v.size();
  const double floor = alpha / static_cast<double>(n);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double step = 0.5;
  std::vector<double> best = w;
  auto dist2 = [&](const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (x[i] - v[i]) * (x[i] - v[i]);
    return acc;
  };
  auto feasible = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (double c : x) {
      if (c < floor - 1e-15) return false;
      s += c;
    }
    return s <= 1.0 + 1e-15;
  };
  std::mt19937 rng(12345);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int it = 0; it < iters; ++it) {
    std::vector<double> cand = best;
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    std::uniform_real_distribution<double> mag(-step, step);
    cand[i] += mag(rng);
    cand[j] += mag(rng);
    if (feasible(cand) && dist2(cand) < dist2(best)) best = cand;
    step *= 0.9995;
    if (step < 1e-10) step = 1e-10;
  }
  return best;
}

// High-accuracy projected-gradient minimizer of
//   f(mu) = sum_x nu(x) h(mu(B(x, r)))
// over the probability simplex, used as the adversary for the per-scale
// inequality. Any suboptimality only loosens the test.
inline Measure minimize_scale_objective(const ChainingFunctional& h, const MetricSpace& X,
                                        const Measure& nu, double r, int iters = 4000) {
  const int n = X.n();
  std::vector<double> mu(static_cast<std::size_t>(n), 1.0 / n);
  auto objective = [&](const std::vector<double>& m) {
    double acc = 0.0;
    for (int x = 0; x < n; ++x) {
      double w = nu.weights[static_cast<std::size_t>(x)];
      if (w == 0.0) continue;
      double mass = 0.0;
      for (int y = 0; y < n; ++y)
        if (X.dist(x, y) <= r) mass += m[static_cast<std::size_t>(y)];
      acc += w * h.value(std::max(mass, 1e-12));
    }
    return acc;
  };
  std::vector<double> best = mu;
  double best_val = objective(mu);
  for (int t = 1; t <= iters; ++t) {
    // Gradient of the objective at mu.
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    for (int x = 0; x < n; ++x) {
      double w = nu.weights[static_cast<std::size_t>(x)];
      if (w == 0.0) continue;
      double mass = 0.0;
      for (int y = 0; y < n; ++y)
        if (X.dist(x, y) <= r) mass += mu[static_cast<std::size_t>(y)];
      double d = w * h.derivative(std::min(1.0, std::max(mass, 1e-9)));
      for (int y = 0; y < n; ++y)
        if (X.dist(x, y) <= r) g[static_cast<std::size_t>(y)] += d;
    }
    double norm = 0.0;
    for (double v : g) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-14) break;
    double eta = 1.0 / (norm * std::sqrt(static_cast<double>(t)));
    for (int i = 0; i < n; ++i) mu[static_cast<std::size_t>(i)] -= eta * g[static_cast<std::size_t>(i)];
    // Project onto the simplex (floor 0, sum exactly <= 1 with renormalize).
    mu = chaining::project_truncated_simplex(mu, 1e-6);
    double val = objective(mu);
    if (val < best_val) {
      best_val = val;
      best = mu;
    }
  }
  double s = 0.0;
  for (double v : best) s += v;
  for (auto& v : best) v /= s;
  Measure out;
  out.weights = std::move(best);
  return out;
}

}  // namespace testsupport

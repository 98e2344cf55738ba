#pragma once

#include <vector>

#include "chaining/evaluate.hpp"
#include "chaining/functional.hpp"
#include "chaining/metric.hpp"

namespace chaining {

struct ConditioningResult {
  std::vector<int> S;            // surviving support, ascending
  Measure nu_S;                  // nu conditioned on S (zeros off S)
  double achieved_min = 0.0;     // min_{x in S} H(nu_S, x)
  double entropic_start = 0.0;   // H(nu, nu) before any eviction
  std::vector<int> removed_order;
  // H(nu_S, nu_S) after each eviction, starting with the initial value;
  // nondecreasing along the greedy run.
  std::vector<double> entropic_trace;
};

// Greedy eviction: while H(nu_S, nu_S) > min_{x in S} H(nu_S, x) + diam(X),
// remove the minimizing point (smallest index on ties). On return,
// H(nu, nu) <= achieved_min + diam(X). O(n) rounds of O(n^2) work.
ConditioningResult condition_dual(const ChainingFunctional& h, const MetricSpace& X,
                                  const Measure& nu);

// Certifies sum_x nu(x) h(nu(B(x,2r))) <= sum_x nu(x) h(mu(B(x,r))) + 1/e
// at one scale r > 0.
struct PerScaleResult {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;   // includes the +1/e term; +inf if mu gives a supported
                      // point a zero ball at radius r
  double slack = 0.0; // rhs - lhs
  bool rhs_infinite = false;
};

PerScaleResult per_scale_certificate(const ChainingFunctional& h, const MetricSpace& X,
                                     const Measure& nu, const Measure& mu, double r);

// Principal sequence of a weighted bipartite graph: nested sets
// emptyset = S_0 < S_1 < ... < S_k = X1 with strictly increasing ratios
// beta_i such that
//   (1) beta_i * mu(S_i \ S_{i-1}) = nu(N(S_i) \ N(S_{i-1}))
//   (2) beta_i * mu(A) <= nu(N(A) \ N(S_{i-1})) for all A inside X1 \ S_{i-1}.
// Exhaustive-enumeration test oracle: |X1| is capped, every subset is
// inspected, and both properties are re-verified before returning.
struct PrincipalSequence {
  std::vector<std::vector<int>> sets;  // S_1, ..., S_k (ascending indices)
  std::vector<double> betas;
};

struct BipartiteGraph {
  int n1 = 0;
  int n2 = 0;
  // adj[i] lists the X2-neighbors of X1-vertex i.
  std::vector<std::vector<int>> adj;
};

PrincipalSequence principal_sequence(const BipartiteGraph& g, const Measure& mu,
                                     const Measure& nu, int cap = 14);

}  // namespace chaining

#pragma once

#include <string>
#include <vector>

#include "chaining/metric.hpp"
#include "chaining/reduce.hpp"
#include "chaining/rounding.hpp"
#include "chaining/solve.hpp"

namespace chaining {

// One verified inequality in the pipeline chain.
struct CheckedInequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;  // inequality is lhs <= rhs (+ tolerance)
  double slack = 0.0;
  bool holds = false;
};

struct CertificateReport {
  std::string instance_hash;
  int n = 0;
  double diameter = 0.0;
  std::string functional;

  double gamma_primal = 0.0;        // gamma_value at mu*
  double entropic_dual = 0.0;       // entropic value at nu*
  double simplified_dual_star = 0.0;  // simplified value at the conditioned nu_S
  double val_labelled_star = 0.0;
  double val_chaining_star = 0.0;
  double val_packing_star = 0.0;
  double dual_proxy = 0.0;
  double gap_estimate = 0.0;
  double sandwich_ratio = 0.0;  // val_chaining / max(val_packing, 1e-12)

  // The proved per-lemma constants the checks used, name -> value.
  std::vector<std::pair<std::string, double>> constants_used;
  std::vector<CheckedInequality> checks;
  bool all_passed = false;

  std::vector<std::pair<std::string, double>> timings_ms;

  SaddleSolution solution;
  LabelledNet net;
  ChainingTree chain;
  PackingTree packing;
  ConditioningResult conditioning;

  // Deterministic serializations; `include_timings` is off for the
  // byte-identity comparisons.
  std::string to_json(bool include_timings = true) const;
  std::string to_text() const;
};

// Full pipeline: saddle-point solve, primal rounding to a labelled net and
// chaining tree, dual conditioning and rounding to a packing tree, with
// every intermediate inequality checked at its proved constant.
// `fail_fast` converts the first failed check into a CertificateError.
CertificateReport run_pipeline(const ChainingFunctional& h, const MetricSpace& X,
                               const SolverParams& params = {}, double alpha = 0.1,
                               bool fail_fast = false);

struct WeakDualityResult {
  bool holds = false;
  double gamma = 0.0;
  double bound = 0.0;  // (1-alpha)/2 * val_packing
  double slack = 0.0;
};

// gamma_h(mu, X) >= (1-alpha)/2 * val_h(T) for any packing tree T and any
// measure mu.
WeakDualityResult verify_weak_duality(const ChainingFunctional& h, const MetricSpace& X,
                                      const PackingTree& T, const Measure& mu);

}  // namespace chaining

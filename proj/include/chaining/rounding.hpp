#pragma once

#include <vector>

#include "chaining/functional.hpp"
#include "chaining/metric.hpp"

namespace chaining {

// ---------------------------------------------------------------------------
// Certificate tree types. All of them store nodes in an arena vector with
// node 0 as the root; children hold arena indices and point sets are kept as
// ascending index lists.
// ---------------------------------------------------------------------------

// Recursive partition tree with diameter-decay labels m and sibling orders
// sigma. Single-child chains are stored compressed: m_entry is the label the
// node was created with, m the label after descending through the chain
// (equal when no chain was collapsed). diam(V) <= alpha^m * diam(X).
struct LabelledNet {
  struct Node {
    std::vector<int> points;
    int m_entry = 0;
    int m = 0;
    int sigma = 1;  // order among siblings, 1-based
    int parent = -1;
    std::vector<int> children;
  };
  double alpha = 0.1;
  double diam = 0.0;
  int n = 0;
  std::vector<Node> nodes;

  bool is_leaf(int v) const { return nodes[static_cast<std::size_t>(v)].children.empty(); }
};

// Rooted spanning tree on the points with probability labels on edges.
// edge_p[v] and edge_len[v] describe the edge from v to parent[v]; the root
// has parent -1. Sum of probabilities is at most 1/2 and every
// edge_len = d(v, parent) * h(edge_p).
struct ChainingTree {
  int n = 0;
  int root = 0;
  std::vector<int> parent;
  std::vector<double> edge_p;
  std::vector<double> edge_len;
};

// Laminar tree of well-separated subsets with singleton leaves.
struct PackingTree {
  struct Node {
    std::vector<int> points;
    int chi = 0;
    int parent = -1;
    std::vector<int> children;
  };
  double alpha = 0.1;
  double diam = 0.0;
  int n = 0;
  std::vector<Node> nodes;

  bool is_leaf(int v) const { return nodes[static_cast<std::size_t>(v)].children.empty(); }
};

// Refining sequence of partitions A_0, A_1, ..., A_k with |A_i| <= 2^{2^i};
// the last partition consists of singletons.
struct AdmissibleNet {
  int n = 0;
  std::vector<std::vector<std::vector<int>>> partitions;
};

// Structural + metric validation; throws ValidationError on violations.
void validate_labelled(const LabelledNet& net, const MetricSpace& X);
void validate_chaining(const ChainingTree& tree, const MetricSpace& X,
                       const ChainingFunctional& h);
void validate_packing(const PackingTree& tree, const MetricSpace& X);
void validate_admissible(const AdmissibleNet& anet);

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

// Per-leaf path sums of alpha^{m(V)} * diam(X) * h(1/sigma(W)) over the path
// edges (V, W); val_labelled is their maximum.
std::vector<double> labelled_path_values(const LabelledNet& net, const ChainingFunctional& h,
                                         std::vector<int>* leaf_points = nullptr);
double val_labelled(const LabelledNet& net, const ChainingFunctional& h);

// Maximum root-to-leaf sum of the stored edge lengths.
double val_chaining(const ChainingTree& tree);

// inf over leaves of the path sum of alpha^{chi(V)} * diam(X) * h(1/deg(V)),
// the leaf itself excluded; single-child nodes contribute 0.
double val_packing(const PackingTree& tree, const ChainingFunctional& h);

// max over points of sum_i g(2^{-2^i}) * diam(A_i(x)) with g the square-root
// log approximation.
double val_admissible(const AdmissibleNet& anet, const MetricSpace& X);

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

// Greedy ball partitioning: centers maximize rho(B(x, alpha^{m+2} D / 2)),
// removed pieces are balls of radius alpha^{m+1} D / 2, recursing per piece.
// Deterministic: all argmax ties resolve to the smallest point index.
LabelledNet greedy_ball_partition(const MetricSpace& X, const Measure& rho,
                                  double alpha = 0.1);

// Chaining tree from a labelled net: walk the net top-down in sibling order,
// attach the smallest unused point of each node to the current anchor, with
// p_e = (3/2) pi^-2 2^{-m(C)} prod_{V on path below root} (2 sigma(V))^-2.
ChainingTree labelled_to_chaining(const LabelledNet& net, const MetricSpace& X,
                                  const ChainingFunctional& h);

// Measure carried by a chaining tree: mass 1/2 on the root, p_e on the child
// endpoint of each edge, probabilities scaled up so they sum to exactly 1/2.
// gamma_value of the result is at most 3 * val_chaining(tree).
Measure chaining_to_measure(const ChainingTree& tree);

// Baseline tree over greedy 2^{-k}-nets (farthest-point traversal).
ChainingTree dudley_tree(const MetricSpace& X, const ChainingFunctional& h);

// Greedy separated ball partitioning. `tree` is the final laminar packing
// tree; `raw_tree` keeps the pre-laminarization nodes with their m labels in
// the chi slot (the per-lemma value check is stated on that tree), and
// trivial_branch records whether the two-leaf shortcut fired.
struct SeparatedPartitionResult {
  PackingTree tree;
  PackingTree raw_tree;
  bool trivial_branch = false;
};

SeparatedPartitionResult greedy_separated_partition(const MetricSpace& X, const Measure& rho,
                                                    const ChainingFunctional& h,
                                                    double alpha = 0.1);

// Admissible net from a labelled net via the potential
// Psi(V) = prod (2 sigma)^2 over the path, cutting where Psi < 2^{2^i}.
AdmissibleNet labelled_to_admissible(const LabelledNet& net);

}  // namespace chaining

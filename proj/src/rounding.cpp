#include "chaining/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chaining/errors.hpp"

namespace chaining {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double set_diameter(const MetricSpace& X, const std::vector<int>& pts) {
  double d = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      d = std::max(d, X.dist(pts[a], pts[b]));
  return d;
}

double set_distance(const MetricSpace& X, const std::vector<int>& A, const std::vector<int>& B) {
  double d = kInf;
  for (int a : A)
    for (int b : B) d = std::min(d, X.dist(a, b));
  return d;
}

bool sorted_equal(std::vector<int> a, const std::vector<int>& b) {
  return a == b;
}

}  // namespace

// ---------------------------------------------------------------------------
// Validators
// ---------------------------------------------------------------------------

void validate_labelled(const LabelledNet& net, const MetricSpace& X) {
  if (net.nodes.empty()) throw ValidationError("labelled net has no nodes");
  if (net.n != X.n()) throw ValidationError("labelled net size does not match the metric space");
  const double D = X.diameter();
  const double tol = 1e-9 * std::max(1.0, D);
  {
    std::vector<int> all(static_cast<std::size_t>(X.n()));
    std::iota(all.begin(), all.end(), 0);
    if (!sorted_equal(net.nodes[0].points, all))
      throw ValidationError("labelled net root must be the whole space");
  }
  for (std::size_t v = 0; v < net.nodes.size(); ++v) {
    const auto& node = net.nodes[v];
    if (node.points.empty()) throw ValidationError("labelled net has an empty node");
    if (!std::is_sorted(node.points.begin(), node.points.end()))
      throw ValidationError("labelled net point sets must be ascending");
    if (node.m_entry > node.m || node.m_entry < 0)
      throw ValidationError("labelled net labels out of order");
    if (node.children.empty()) {
      if (node.points.size() != 1) throw ValidationError("labelled net leaf is not a singleton");
      continue;
    }
    if (set_diameter(X, node.points) > std::pow(net.alpha, node.m) * D + tol)
      throw ValidationError("labelled net node exceeds its diameter bound");
    // Children partition the node.
    std::vector<int> merged;
    std::vector<int> sigmas;
    for (int c : net.nodes[v].children) {
      const auto& child = net.nodes[static_cast<std::size_t>(c)];
      if (child.parent != static_cast<int>(v))
        throw ValidationError("labelled net parent pointers are inconsistent");
      if (child.m_entry < node.m + 1)
        throw ValidationError("labelled net child label must exceed the parent label");
      merged.insert(merged.end(), child.points.begin(), child.points.end());
      sigmas.push_back(child.sigma);
    }
    std::sort(merged.begin(), merged.end());
    if (std::adjacent_find(merged.begin(), merged.end()) != merged.end() ||
        !sorted_equal(merged, node.points))
      throw ValidationError("labelled net children do not partition their parent");
    std::sort(sigmas.begin(), sigmas.end());
    for (std::size_t k = 0; k < sigmas.size(); ++k)
      if (sigmas[k] != static_cast<int>(k) + 1)
        throw ValidationError("labelled net sibling orders are not a bijection onto 1..k");
  }
}

void validate_chaining(const ChainingTree& tree, const MetricSpace& X,
                       const ChainingFunctional& h) {
  if (tree.n != X.n()) throw ValidationError("chaining tree size does not match the metric space");
  if (tree.root < 0 || tree.root >= tree.n || tree.parent[static_cast<std::size_t>(tree.root)] != -1)
    throw ValidationError("chaining tree root is invalid");
  double sum_p = 0.0;
  std::vector<int> depth(static_cast<std::size_t>(tree.n), -1);
  depth[static_cast<std::size_t>(tree.root)] = 0;
  for (int v = 0; v < tree.n; ++v) {
    if (v == tree.root) continue;
    // Follow parents; every chain must reach the root without a cycle.
    int u = v;
    int steps = 0;
    while (u != tree.root) {
      u = tree.parent[static_cast<std::size_t>(u)];
      if (u < 0 || ++steps > tree.n) throw ValidationError("chaining tree is not a tree");
    }
    double p = tree.edge_p[static_cast<std::size_t>(v)];
    if (!(p > 0.0 && p <= 0.5))
      throw ValidationError("chaining tree edge probability outside (0, 1/2]");
    sum_p += p;
    double expect = X.dist(v, tree.parent[static_cast<std::size_t>(v)]) * h.value(p);
    if (tree.edge_len[static_cast<std::size_t>(v)] != expect)
      throw ValidationError("chaining tree edge length does not match d * h(p)");
  }
  if (sum_p > 0.5 + 1e-12)
    throw ValidationError("chaining tree edge probabilities sum to more than 1/2");
}

void validate_packing(const PackingTree& tree, const MetricSpace& X) {
  if (tree.nodes.empty()) throw ValidationError("packing tree has no nodes");
  if (tree.n != X.n()) throw ValidationError("packing tree size does not match the metric space");
  const double D = X.diameter();
  const double tol = 1e-9 * std::max(1.0, D);
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const auto& node = tree.nodes[v];
    if (node.points.empty()) throw ValidationError("packing tree has an empty node");
    if (node.chi < 0) throw ValidationError("packing tree label is negative");
    if (node.children.empty()) {
      if (node.points.size() != 1) throw ValidationError("packing tree leaf is not a singleton");
      continue;
    }
    const double scale = std::pow(tree.alpha, node.chi) * D;
    for (std::size_t a = 0; a < node.children.size(); ++a) {
      const auto& ca = tree.nodes[static_cast<std::size_t>(node.children[a])];
      if (ca.parent != static_cast<int>(v))
        throw ValidationError("packing tree parent pointers are inconsistent");
      if (!std::includes(node.points.begin(), node.points.end(), ca.points.begin(),
                         ca.points.end()))
        throw ValidationError("packing tree child is not contained in its parent");
      if (set_diameter(X, ca.points) > tree.alpha * scale + tol)
        throw ValidationError("packing tree child exceeds its diameter bound");
      for (std::size_t b = a + 1; b < node.children.size(); ++b) {
        const auto& cb = tree.nodes[static_cast<std::size_t>(node.children[b])];
        std::vector<int> inter;
        std::set_intersection(ca.points.begin(), ca.points.end(), cb.points.begin(),
                              cb.points.end(), std::back_inserter(inter));
        if (!inter.empty()) throw ValidationError("packing tree children overlap");
        if (set_distance(X, ca.points, cb.points) < 0.1 * scale - tol)
          throw ValidationError("packing tree children are not separated");
      }
    }
  }
}

void validate_admissible(const AdmissibleNet& anet) {
  if (anet.partitions.empty()) throw ValidationError("admissible net has no partitions");
  for (std::size_t i = 0; i < anet.partitions.size(); ++i) {
    const auto& part = anet.partitions[i];
    double cap = std::pow(2.0, std::pow(2.0, static_cast<double>(i)));
    if (static_cast<double>(part.size()) > cap)
      throw ValidationError("admissible net level " + std::to_string(i) + " has too many parts");
    std::vector<int> merged;
    for (const auto& cell : part) {
      if (cell.empty() || !std::is_sorted(cell.begin(), cell.end()))
        throw ValidationError("admissible net cell is empty or unsorted");
      merged.insert(merged.end(), cell.begin(), cell.end());
    }
    std::sort(merged.begin(), merged.end());
    for (int k = 0; k < anet.n; ++k)
      if (merged[static_cast<std::size_t>(k)] != k ||
          merged.size() != static_cast<std::size_t>(anet.n))
        throw ValidationError("admissible net level is not a partition of the points");
    if (i > 0) {
      // Every cell must sit inside some cell of the previous level.
      for (const auto& cell : part) {
        bool inside = false;
        for (const auto& prev : anet.partitions[i - 1])
          if (std::includes(prev.begin(), prev.end(), cell.begin(), cell.end())) {
            inside = true;
            break;
          }
        if (!inside) throw ValidationError("admissible net levels do not refine");
      }
    }
  }
  for (const auto& cell : anet.partitions.back())
    if (cell.size() != 1)
      throw ValidationError("admissible net must end in singleton cells");
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

std::vector<double> labelled_path_values(const LabelledNet& net, const ChainingFunctional& h,
                                         std::vector<int>* leaf_points) {
  std::vector<double> out;
  if (leaf_points) leaf_points->clear();
  const double D = net.diam;
  // DFS carrying the accumulated path sum; the edge into W contributes
  // alpha^{m(V)} * D * h(1/sigma(W)) with V the parent.
  std::vector<std::pair<int, double>> stack{{0, 0.0}};
  while (!stack.empty()) {
    auto [v, acc] = stack.back();
    stack.pop_back();
    const auto& node = net.nodes[static_cast<std::size_t>(v)];
    if (node.children.empty()) {
      out.push_back(acc);
      if (leaf_points) leaf_points->push_back(node.points.front());
      continue;
    }
    double coeff = std::pow(net.alpha, node.m) * D;
    for (int c : node.children) {
      const auto& child = net.nodes[static_cast<std::size_t>(c)];
      double term = child.sigma >= 2 ? coeff * h.value(1.0 / child.sigma) : 0.0;
      stack.emplace_back(c, acc + term);
    }
  }
  return out;
}

double val_labelled(const LabelledNet& net, const ChainingFunctional& h) {
  auto vals = labelled_path_values(net, h);
  double best = 0.0;
  for (double v : vals) best = std::max(best, v);
  return best;
}

double val_chaining(const ChainingTree& tree) {
  std::vector<double> pathsum(static_cast<std::size_t>(tree.n), -1.0);
  pathsum[static_cast<std::size_t>(tree.root)] = 0.0;
  double best = 0.0;
  for (int v = 0; v < tree.n; ++v) {
    // Resolve lazily with path compression over the parent chain.
    std::vector<int> chain;
    int u = v;
    while (pathsum[static_cast<std::size_t>(u)] < 0.0) {
      chain.push_back(u);
      u = tree.parent[static_cast<std::size_t>(u)];
    }
    double acc = pathsum[static_cast<std::size_t>(u)];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      acc += tree.edge_len[static_cast<std::size_t>(*it)];
      pathsum[static_cast<std::size_t>(*it)] = acc;
    }
    best = std::max(best, pathsum[static_cast<std::size_t>(v)]);
  }
  return best;
}

double val_packing(const PackingTree& tree, const ChainingFunctional& h) {
  const double D = tree.diam;
  // DFS from the root accumulating the per-node contribution, take the
  // minimum over leaves.
  double best = kInf;
  std::vector<std::pair<int, double>> stack{{0, 0.0}};
  while (!stack.empty()) {
    auto [v, acc] = stack.back();
    stack.pop_back();
    const auto& node = tree.nodes[static_cast<std::size_t>(v)];
    if (node.children.empty()) {
      best = std::min(best, acc);
      continue;
    }
    double deg = static_cast<double>(node.children.size());
    double term = deg >= 2.0
                      ? std::pow(tree.alpha, node.chi) * D * h.value(1.0 / deg)
                      : 0.0;
    for (int c : node.children) stack.emplace_back(c, acc + term);
  }
  return std::isfinite(best) ? best : 0.0;
}

double val_admissible(const AdmissibleNet& anet, const MetricSpace& X) {
  ChainingFunctional g = ChainingFunctional::gaussian_approx();
  double best = 0.0;
  for (int x = 0; x < anet.n; ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < anet.partitions.size(); ++i) {
      const auto& part = anet.partitions[i];
      for (const auto& cell : part)
        if (std::binary_search(cell.begin(), cell.end(), x)) {
          double gv = g.value(std::pow(2.0, -std::pow(2.0, static_cast<double>(i))));
          std::vector<int> pts(cell.begin(), cell.end());
          acc += gv * set_diameter(X, pts);
          break;
        }
    }
    best = std::max(best, acc);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Measure from a chaining tree
// ---------------------------------------------------------------------------

Measure chaining_to_measure(const ChainingTree& tree) {
  Measure mu;
  mu.weights.assign(static_cast<std::size_t>(tree.n), 0.0);
  double sum_p = 0.0;
  for (int v = 0; v < tree.n; ++v)
    if (v != tree.root) sum_p += tree.edge_p[static_cast<std::size_t>(v)];
  if (sum_p <= 0.0) {
    mu.weights[static_cast<std::size_t>(tree.root)] = 1.0;
    return mu;
  }
  const double scale = 0.5 / sum_p;  // >= 1 since sum_p <= 1/2
  for (int v = 0; v < tree.n; ++v)
    if (v != tree.root)
      mu.weights[static_cast<std::size_t>(v)] = scale * tree.edge_p[static_cast<std::size_t>(v)];
  mu.weights[static_cast<std::size_t>(tree.root)] = 0.5;
  return mu;
}

}  // namespace chaining

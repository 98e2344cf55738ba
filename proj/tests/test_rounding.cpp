#include <cmath>
#include <sstream>

#include <doctest.h>

#include "chaining/certify.hpp"
#include "chaining/errors.hpp"
#include "chaining/evaluate.hpp"
#include "chaining/rounding.hpp"
#include "chaining/treeio.hpp"
#include "test_support.hpp"

using namespace chaining;

namespace {

MetricSpace metric_from(const char* text) {
  std::istringstream in(text);
  return MetricSpace::load(in);
}

MetricSpace uniform_metric(int n) {
  std::vector<double> d(static_cast<std::size_t>(n) * n, 1.0);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i) * n + i] = 0.0;
  return MetricSpace::from_matrix(std::move(d), n);
}

MetricSpace single_point() { return metric_from("1\n0\n"); }

}  // namespace

TEST_CASE("greedy ball partition: single point") {
  auto h = ChainingFunctional::exponential(1.0);
  MetricSpace X = single_point();
  LabelledNet net = greedy_ball_partition(X, Measure::uniform(1));
  validate_labelled(net, X);
  CHECK(net.nodes.size() == 1);
  CHECK(val_labelled(net, h) == 0.0);
}

TEST_CASE("greedy ball partition: two points, skewed measure") {
  auto h = ChainingFunctional::exponential(1.0);
  MetricSpace X = metric_from("2\n0 1\n1 0\n");
  Measure rho;
  rho.weights = {0.6, 0.4};
  LabelledNet net = greedy_ball_partition(X, rho);
  validate_labelled(net, X);
  REQUIRE(net.nodes.size() == 3);
  const auto& root = net.nodes[0];
  CHECK(root.m == 0);
  REQUIRE(root.children.size() == 2);
  // center order follows the measure: point 0 first
  CHECK(net.nodes[1].points == std::vector<int>{0});
  CHECK(net.nodes[1].sigma == 1);
  CHECK(net.nodes[1].m_entry == 1);
  CHECK(net.nodes[2].points == std::vector<int>{1});
  CHECK(net.nodes[2].sigma == 2);
  CHECK(val_labelled(net, h) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("greedy ball partition: uniform three points") {
  auto h = ChainingFunctional::exponential(1.0);
  MetricSpace X = uniform_metric(3);
  LabelledNet net = greedy_ball_partition(X, Measure::uniform(3));
  validate_labelled(net, X);
  REQUIRE(net.nodes[0].children.size() == 3);
  for (int c = 1; c <= 3; ++c) {
    CHECK(net.nodes[static_cast<std::size_t>(c)].sigma == c);
    CHECK(net.nodes[static_cast<std::size_t>(c)].points == std::vector<int>{c - 1});
  }
  CHECK(val_labelled(net, h) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("labelled net per-path inequality and value bound") {
  const double alpha = 0.1;
  for (unsigned seed = 0; seed < 25; ++seed) {
    int n = 2 + static_cast<int>(seed * 7 % 60);
    MetricSpace X = testsupport::mixed_random_metric(n, seed + 40);
    Measure rho = testsupport::random_measure(n, seed + 41);
    auto h = seed % 2 == 0 ? ChainingFunctional::exponential(1.0) : ChainingFunctional::gaussian();
    LabelledNet net = greedy_ball_partition(X, rho, alpha);
    validate_labelled(net, X);
    std::vector<int> leaves;
    auto paths = labelled_path_values(net, h, &leaves);
    double gamma = gamma_value(h, X, rho);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      double lhs = 0.5 * alpha * alpha * (1.0 - alpha) * paths[i];
      CHECK(lhs <= H_point(h, X, rho, leaves[i]) + 1e-9);
    }
    CHECK(val_labelled(net, h) <= 2.0 / (alpha * alpha * (1.0 - alpha)) * gamma + 1e-6);
  }
}

TEST_CASE("labelled to chaining: two point edge formula") {
  auto h = ChainingFunctional::exponential(1.0);
  MetricSpace X = metric_from("2\n0 1\n1 0\n");
  Measure rho;
  rho.weights = {0.6, 0.4};
  LabelledNet net = greedy_ball_partition(X, rho);
  ChainingTree tree = labelled_to_chaining(net, X, h);
  validate_chaining(tree, X, h);
  CHECK(tree.root == 0);
  // the root anchor sits in the sigma=1 child, so the single edge goes to
  // the sigma=2 child: p = (3/2) pi^-2 * 2^-1 * (2*2)^-2
  double expect_p = 1.5 / (M_PI * M_PI) * 0.5 / 16.0;
  CHECK(tree.parent[1] == 0);
  CHECK(tree.edge_p[1] == doctest::Approx(expect_p).epsilon(1e-15));
  CHECK(tree.edge_len[1] == doctest::Approx(std::log(1.0 / expect_p)));
  CHECK(val_chaining(tree) == doctest::Approx(std::log(1.0 / expect_p)));
  // 8x conversion bound, nearly tight here
  CHECK(val_chaining(tree) <= 8.0 * val_labelled(net, h) + 1e-6);
}

TEST_CASE("chaining conversion keeps the 8x bound and probability budget") {
  for (unsigned seed = 0; seed < 25; ++seed) {
    int n = 2 + static_cast<int>((seed * 13) % 60);
    MetricSpace X = testsupport::mixed_random_metric(n, seed + 600);
    Measure rho = testsupport::random_measure(n, seed + 601);
    auto h = seed % 2 == 0 ? ChainingFunctional::exponential(1.0) : ChainingFunctional::gaussian();
    LabelledNet net = greedy_ball_partition(X, rho);
    ChainingTree tree = labelled_to_chaining(net, X, h);
    validate_chaining(tree, X, h);
    CHECK(val_chaining(tree) <= 8.0 * val_labelled(net, h) + 1e-6);
    // trivial lower bound for any chaining tree
    CHECK(val_chaining(tree) >= 0.5 * X.diameter() * h.value(0.5) - 1e-9);
  }
}

TEST_CASE("single point conversions") {
  auto h = ChainingFunctional::exponential(1.0);
  MetricSpace X = single_point();
  LabelledNet net = greedy_ball_partition(X, Measure::uniform(1));
  ChainingTree tree = labelled_to_chaining(net, X, h);
  CHECK(tree.n == 1);
  CHECK(val_chaining(tree) == 0.0);
  Measure mu = chaining_to_measure(tree);
  CHECK(mu.weights == std::vector<double>{1.0});
  AdmissibleNet anet = labelled_to_admissible(net);
  validate_admissible(anet);
  CHECK(anet.partitions.size() == 1);
  CHECK(val_admissible(anet, X) == 0.0);
}

TEST_CASE("chaining to measure: examples and the 3x bound") {
  auto h = ChainingFunctional::exponential(1.0);
  {
    // hand-built 2-point tree with p = 1/2
    ChainingTree tree;
    tree.n = 2;
    tree.root = 0;
    tree.parent = {-1, 0};
    tree.edge_p = {0.0, 0.5};
    MetricSpace X = metric_from("2\n0 1\n1 0\n");
    tree.edge_len = {0.0, X.dist(0, 1) * h.value(0.5)};
    Measure mu = chaining_to_measure(tree);
    CHECK(mu.weights[0] == 0.5);
    CHECK(mu.weights[1] == 0.5);
    CHECK(gamma_value(h, X, mu) == doctest::Approx(std::log(2.0)));
    CHECK(gamma_value(h, X, mu) <= 3.0 * val_chaining(tree) + 1e-9);
  }
  for (unsigned seed = 0; seed < 20; ++seed) {
    int n = 2 + static_cast<int>((seed * 5) % 31);
    MetricSpace X = testsupport::mixed_random_metric(n, seed + 700);
    Measure rho = testsupport::random_measure(n, seed + 701);
    auto h2 = seed % 2 == 0 ? ChainingFunctional::exponential(1.0) : ChainingFunctional::gaussian();
    ChainingTree tree = labelled_to_chaining(greedy_ball_partition(X, rho), X, h2);
    Measure mu = chaining_to_measure(tree);
    CHECK_NOTHROW(mu.validate());
    CHECK(mu.weights[static_cast<std::size_t>(tree.root)] == 0.5);
    CHECK(gamma_value(h2, X, mu) <= 3.0 * val_chaining(tree) + 1e-9);
  }
}

TEST_CASE("dudley tree: single and two points") {
  auto h = ChainingFunctional::exponential(1.0);
  CHECK(val_chaining(dudley_tree(single_point(), h)) == 0.0);

  MetricSpace X = metric_from("2\n0 1\n1 0\n");
  ChainingTree tree = dudley_tree(X, h);
  validate_chaining(tree, X, h);
  CHECK(tree.root == 0);
  CHECK(tree.edge_p[1] == doctest::Approx(0.125));
  CHECK(tree.edge_len[1] == doctest::Approx(std::log(8.0)));
}

TEST_CASE("dudley tree on random instances stays within the probability budget") {
  for (unsigned seed = 0; seed < 15; ++seed) {
    int n = 2 + static_cast<int>((seed * 11) % 50);
    MetricSpace X = testsupport::mixed_random_metric(n, seed + 800);
    auto h = ChainingFunctional::gaussian();
    ChainingTree tree = dudley_tree(X, h);
    validate_chaining(tree, X, h);
    double sum = 0.0;
    for (int v = 0; v < n; ++v)
      if (v != tree.root) sum += tree.edge_p[static_cast<std::size_t>(v)];
    CHECK(sum <= 0.5 + 1e-12);
  }
}

TEST_CASE("separated partition: two points") {
  auto h = ChainingFunctional::exponential(1.0);
  MetricSpace X = metric_from("2\n0 1\n1 0\n");
  auto res = greedy_separated_partition(X, Measure::uniform(2), h);
  CHECK_FALSE(res.trivial_branch);
  validate_packing(res.tree, X);
  REQUIRE(res.tree.nodes.size() == 3);
  CHECK(res.tree.nodes[0].chi == 0);
  CHECK(res.tree.nodes[0].children.size() == 2);
  CHECK(val_packing(res.tree, h) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("separated partition: single point") {
  auto h = ChainingFunctional::exponential(1.0);
  auto res = greedy_separated_partition(single_point(), Measure::uniform(1), h);
  CHECK(res.tree.nodes.size() == 1);
  CHECK(val_packing(res.tree, h) == 0.0);
}

TEST_CASE("packing value cases") {
  auto h = ChainingFunctional::exponential(1.0);
  PackingTree t;
  t.alpha = 0.1;
  t.diam = 2.0;
  t.n = 4;
  t.nodes.push_back({{0, 1, 2, 3}, 0, -1, {1, 2, 3}});
  t.nodes.push_back({{0}, 1, 0, {}});
  t.nodes.push_back({{1}, 1, 0, {}});
  t.nodes.push_back({{2}, 1, 0, {}});
  // root with 3 leaf children: diam * h(1/3). (Not a full partition of the
  // points; the value only walks the tree.)
  CHECK(val_packing(t, h) == doctest::Approx(2.0 * std::log(3.0)));

  PackingTree chain;
  chain.alpha = 0.1;
  chain.diam = 1.0;
  chain.n = 1;
  chain.nodes.push_back({{0}, 0, -1, {1}});
  chain.nodes.push_back({{0}, 1, 0, {2}});
  chain.nodes.push_back({{0}, 2, 1, {}});
  CHECK(val_packing(chain, h) == 0.0);
}

TEST_CASE("separated partition invariants and the dual value bound") {
  const double alpha = 0.1;
  const double C_alpha = 40.0 / (3.0 * alpha * alpha);
  for (unsigned seed = 0; seed < 25; ++seed) {
    int n = 2 + static_cast<int>((seed * 17) % 63);
    MetricSpace X = testsupport::mixed_random_metric(n, seed + 900);
    Measure rho = testsupport::random_measure(n, seed + 901, seed % 3 == 0 ? 0.4 : 0.0);
    auto h = seed % 2 == 0 ? ChainingFunctional::exponential(1.0) : ChainingFunctional::gaussian();
    auto res = greedy_separated_partition(X, rho, h, alpha);
    CHECK_FALSE(res.trivial_branch);  // unreachable at sane scales
    validate_packing(res.tree, X);
    double raw_val = val_packing(res.raw_tree, h);
    double delta = simplified_dual_value(h, X, rho).aggregate;
    CHECK(delta <= 4.0 * C_alpha * (raw_val + X.diameter() * h.value(0.5)) + 1e-6);
  }
}

TEST_CASE("weak duality for constructed packing trees") {
  auto h = ChainingFunctional::exponential(1.0);
  for (unsigned seed = 0; seed < 10; ++seed) {
    int n = 2 + static_cast<int>((seed * 23) % 40);
    MetricSpace X = testsupport::mixed_random_metric(n, seed + 950);
    Measure rho = testsupport::random_measure(n, seed + 951);
    auto res = greedy_separated_partition(X, rho, h);
    for (unsigned m = 0; m < 20; ++m) {
      Measure mu = testsupport::random_measure(n, seed * 100 + m);
      auto wd = verify_weak_duality(h, X, res.tree, mu);
      CHECK(wd.holds);
    }
  }
}

TEST_CASE("admissible value on a hand-built net") {
  MetricSpace X = metric_from("2\n0 1\n1 0\n");
  AdmissibleNet anet;
  anet.n = 2;
  anet.partitions = {{{0, 1}}, {{0}, {1}}};
  validate_admissible(anet);
  CHECK(val_admissible(anet, X) == doctest::Approx(std::sqrt(std::log(2.0))));
  // never refining to singletons is rejected
  AdmissibleNet bad;
  bad.n = 2;
  bad.partitions = {{{0, 1}}, {{0, 1}}};
  CHECK_THROWS_AS(validate_admissible(bad), ValidationError);
}

TEST_CASE("admissible nets from labelled nets follow the cut potentials") {
  MetricSpace X = metric_from("2\n0 1\n1 0\n");
  LabelledNet net = greedy_ball_partition(X, Measure::uniform(2));
  AdmissibleNet anet = labelled_to_admissible(net);
  validate_admissible(anet);
  // The sigma = 2 child has potential (2*2)^2 = 16, so its own node clears
  // the cut only once 2^{2^i} > 16; the partition splits it off earlier,
  // at level 2, as the complement of the sigma = 1 cell.
  REQUIRE(anet.partitions.size() == 3);
  CHECK(anet.partitions[0].size() == 1);
  CHECK(anet.partitions[1].size() == 1);
  CHECK(anet.partitions[2].size() == 2);
  CHECK(val_admissible(anet, X) ==
        doctest::Approx(std::sqrt(std::log(2.0)) + std::sqrt(std::log(4.0))));
}

TEST_CASE("admissible net conversion bound on random instances") {
  // val_2(A) <= K val_2(L): the conversion chain loses (2(1-a)/a)/(C-1)
  // from the cut potentials (C = sqrt(2)) times the sub-multiplicativity
  // expansion sqrt(2)(1/(1-a) + 1/(1-a)^2).
  const double alpha = 0.1;
  const double C = std::sqrt(2.0);
  const double K = (2.0 * (1.0 - alpha) / alpha) / (C - 1.0) * std::sqrt(2.0) *
                   (1.0 / (1.0 - alpha) + 1.0 / ((1.0 - alpha) * (1.0 - alpha)));
  auto g = ChainingFunctional::gaussian_approx();
  double max_ratio = 0.0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    int n = 2 + static_cast<int>((seed * 19) % 48);
    MetricSpace X = testsupport::mixed_random_metric(n, seed + 1200);
    Measure rho = testsupport::random_measure(n, seed + 1201);
    LabelledNet net = greedy_ball_partition(X, rho, alpha);
    AdmissibleNet anet = labelled_to_admissible(net);
    validate_admissible(anet);
    double va = val_admissible(anet, X);
    double vl = val_labelled(net, g);
    if (vl > 0.0) max_ratio = std::max(max_ratio, va / vl);
    CHECK(va <= K * vl + 1e-9);
  }
  MESSAGE("max observed val_2 ratio: " << max_ratio << " (bound " << K << ")");
}

TEST_CASE("json round trips re-validate and re-score identically") {
  auto h = ChainingFunctional::gaussian();
  MetricSpace X = testsupport::random_point_metric(14, 2, 77);
  Measure rho = testsupport::random_measure(14, 78);

  LabelledNet net = greedy_ball_partition(X, rho);
  std::string s1 = labelled_to_json(net);
  LabelledNet net2 = labelled_from_json(s1);
  CHECK(labelled_to_json(net2) == s1);
  validate_labelled(net2, X);
  CHECK(val_labelled(net2, h) == val_labelled(net, h));

  ChainingTree tree = labelled_to_chaining(net, X, h);
  std::string s2 = chaining_to_json(tree);
  ChainingTree tree2 = chaining_from_json(s2);
  CHECK(chaining_to_json(tree2) == s2);
  validate_chaining(tree2, X, h);
  CHECK(val_chaining(tree2) == val_chaining(tree));

  auto sep = greedy_separated_partition(X, rho, h);
  std::string s3 = packing_to_json(sep.tree);
  PackingTree pt = packing_from_json(s3);
  CHECK(packing_to_json(pt) == s3);
  validate_packing(pt, X);
  CHECK(val_packing(pt, h) == val_packing(sep.tree, h));

  AdmissibleNet anet = labelled_to_admissible(net);
  std::string s4 = admissible_to_json(anet);
  AdmissibleNet anet2 = admissible_from_json(s4);
  CHECK(admissible_to_json(anet2) == s4);
  CHECK(val_admissible(anet2, X) == val_admissible(anet, X));
}

TEST_CASE("pseudo-metric clusters need deduplication") {
  LoadOptions opts;
  opts.allow_pseudo = true;
  std::istringstream in("3\n0 0 1\n0 0 1\n1 1 0\n");
  MetricSpace X = MetricSpace::load(in, opts);
  auto h = ChainingFunctional::exponential(1.0);
  CHECK_THROWS_AS(greedy_ball_partition(X, Measure::uniform(3)), ValidationError);
  MetricSpace D = X.deduplicated();
  CHECK(D.n() == 2);
  CHECK_NOTHROW(greedy_ball_partition(D, Measure::uniform(2)));
}

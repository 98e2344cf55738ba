#include "chaining/treeio.hpp"

#include <sstream>

#include <json.hpp>

#include "chaining/errors.hpp"
#include "chaining/util.hpp"

namespace chaining {

using nlohmann::json;

namespace {

json labelled_node_json(const LabelledNet::Node& n) {
  return json{{"points", n.points}, {"m_entry", n.m_entry}, {"m", n.m},
              {"sigma", n.sigma},   {"parent", n.parent},   {"children", n.children}};
}

json packing_node_json(const PackingTree::Node& n) {
  return json{{"points", n.points}, {"chi", n.chi}, {"parent", n.parent},
              {"children", n.children}};
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError("malformed JSON");
  return j;
}

void expect_type(const json& j, const char* type) {
  if (!j.contains("type") || j["type"] != type)
    throw FormatError(std::string("expected a ") + type + " JSON document");
}

}  // namespace

std::string labelled_to_json(const LabelledNet& net) {
  json nodes = json::array();
  for (const auto& n : net.nodes) nodes.push_back(labelled_node_json(n));
  json j{{"type", "labelled_net"},
         {"alpha", net.alpha},
         {"diam", net.diam},
         {"n", net.n},
         {"nodes", nodes}};
  return j.dump(2) + "\n";
}

LabelledNet labelled_from_json(const std::string& text) {
  json j = parse(text);
  expect_type(j, "labelled_net");
  LabelledNet net;
  net.alpha = j.at("alpha").get<double>();
  net.diam = j.at("diam").get<double>();
  net.n = j.at("n").get<int>();
  for (const auto& nj : j.at("nodes")) {
    LabelledNet::Node n;
    n.points = nj.at("points").get<std::vector<int>>();
    n.m_entry = nj.at("m_entry").get<int>();
    n.m = nj.at("m").get<int>();
    n.sigma = nj.at("sigma").get<int>();
    n.parent = nj.at("parent").get<int>();
    n.children = nj.at("children").get<std::vector<int>>();
    net.nodes.push_back(std::move(n));
  }
  if (net.nodes.empty()) throw FormatError("labelled net JSON has no nodes");
  return net;
}

std::string chaining_to_json(const ChainingTree& tree) {
  json edges = json::array();
  for (int v = 0; v < tree.n; ++v) {
    if (v == tree.root) continue;
    edges.push_back(json{{"child", v},
                         {"parent", tree.parent[static_cast<std::size_t>(v)]},
                         {"p", tree.edge_p[static_cast<std::size_t>(v)]},
                         {"l", tree.edge_len[static_cast<std::size_t>(v)]}});
  }
  json j{{"type", "chaining_tree"}, {"n", tree.n}, {"root", tree.root}, {"edges", edges}};
  return j.dump(2) + "\n";
}

ChainingTree chaining_from_json(const std::string& text) {
  json j = parse(text);
  expect_type(j, "chaining_tree");
  ChainingTree tree;
  tree.n = j.at("n").get<int>();
  tree.root = j.at("root").get<int>();
  tree.parent.assign(static_cast<std::size_t>(tree.n), -1);
  tree.edge_p.assign(static_cast<std::size_t>(tree.n), 0.0);
  tree.edge_len.assign(static_cast<std::size_t>(tree.n), 0.0);
  for (const auto& ej : j.at("edges")) {
    int v = ej.at("child").get<int>();
    if (v < 0 || v >= tree.n || v == tree.root) throw FormatError("bad chaining tree edge");
    tree.parent[static_cast<std::size_t>(v)] = ej.at("parent").get<int>();
    tree.edge_p[static_cast<std::size_t>(v)] = ej.at("p").get<double>();
    tree.edge_len[static_cast<std::size_t>(v)] = ej.at("l").get<double>();
  }
  return tree;
}

std::string packing_to_json(const PackingTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) nodes.push_back(packing_node_json(n));
  json j{{"type", "packing_tree"},
         {"alpha", tree.alpha},
         {"diam", tree.diam},
         {"n", tree.n},
         {"nodes", nodes}};
  return j.dump(2) + "\n";
}

PackingTree packing_from_json(const std::string& text) {
  json j = parse(text);
  expect_type(j, "packing_tree");
  PackingTree tree;
  tree.alpha = j.at("alpha").get<double>();
  tree.diam = j.at("diam").get<double>();
  tree.n = j.at("n").get<int>();
  for (const auto& nj : j.at("nodes")) {
    PackingTree::Node n;
    n.points = nj.at("points").get<std::vector<int>>();
    n.chi = nj.at("chi").get<int>();
    n.parent = nj.at("parent").get<int>();
    n.children = nj.at("children").get<std::vector<int>>();
    tree.nodes.push_back(std::move(n));
  }
  if (tree.nodes.empty()) throw FormatError("packing tree JSON has no nodes");
  return tree;
}

std::string admissible_to_json(const AdmissibleNet& anet) {
  json j{{"type", "admissible_net"}, {"n", anet.n}, {"partitions", anet.partitions}};
  return j.dump(2) + "\n";
}

AdmissibleNet admissible_from_json(const std::string& text) {
  json j = parse(text);
  expect_type(j, "admissible_net");
  AdmissibleNet anet;
  anet.n = j.at("n").get<int>();
  anet.partitions = j.at("partitions").get<std::vector<std::vector<std::vector<int>>>>();
  return anet;
}

std::string labelled_to_dot(const LabelledNet& net) {
  std::ostringstream os;
  os << "digraph labelled_net {\n  node [shape=box];\n";
  for (std::size_t v = 0; v < net.nodes.size(); ++v) {
    const auto& n = net.nodes[v];
    os << "  n" << v << " [label=\"m=" << n.m << " |V|=" << n.points.size() << "\"];\n";
    if (n.parent >= 0)
      os << "  n" << n.parent << " -> n" << v << " [label=\"s=" << n.sigma << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string packing_to_dot(const PackingTree& tree) {
  std::ostringstream os;
  os << "digraph packing_tree {\n  node [shape=box];\n";
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const auto& n = tree.nodes[v];
    os << "  n" << v << " [label=\"chi=" << n.chi << " |V|=" << n.points.size() << "\"];\n";
    if (n.parent >= 0) os << "  n" << n.parent << " -> n" << v << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string chaining_to_dot(const ChainingTree& tree, const MetricSpace& X) {
  (void)X;
  std::ostringstream os;
  os << "digraph chaining_tree {\n";
  for (int v = 0; v < tree.n; ++v) {
    os << "  p" << v << ";\n";
    if (v == tree.root) continue;
    os << "  p" << tree.parent[static_cast<std::size_t>(v)] << " -> p" << v << " [label=\"p="
       << format_sig9(tree.edge_p[static_cast<std::size_t>(v)]) << " l="
       << format_sig9(tree.edge_len[static_cast<std::size_t>(v)]) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace chaining

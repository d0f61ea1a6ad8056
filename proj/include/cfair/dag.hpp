#pragma once

// Weighted directed acyclic graphs over named variables.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cfair/csv.hpp"
#include "cfair/error.hpp"

namespace cfair {

struct Edge {
  std::string from;
  std::string to;
  double weight = 1.0;

  bool operator==(const Edge&) const = default;
};

/// Returns `nodes` ordered so every parent precedes its children. Among
/// nodes that are ready at the same time the smallest name goes first.
inline std::vector<std::string> topological_order(const std::vector<std::string>& nodes,
                                                  const std::vector<Edge>& edges) {
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& n : nodes) indegree[n] = 0;
  for (const auto& e : edges) {
    if (!indegree.count(e.from) || !indegree.count(e.to))
      throw ConfigError("edge " + e.from + " -> " + e.to + " references an unknown node");
    ++indegree[e.to];
    children[e.from].push_back(e.to);
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [n, d] : indegree)
    if (d == 0) ready.push(n);
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto n = ready.top();
    ready.pop();
    order.push_back(n);
    for (const auto& c : children[n])
      if (--indegree[c] == 0) ready.push(c);
  }
  if (order.size() != indegree.size()) throw ConfigError("graph contains a cycle");
  return order;
}

class WeightedDag {
 public:
  WeightedDag() = default;

  /// Validates the graph: known endpoints, no self-loops, no duplicate
  /// edges, acyclic. Edges are stored sorted by (from, to).
  WeightedDag(std::vector<std::string> nodes, std::vector<Edge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::set<std::string> uniq(nodes_.begin(), nodes_.end());
    if (uniq.size() != nodes_.size()) throw ConfigError("graph has duplicate node names");
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : edges_) {
      if (e.from == e.to) throw ConfigError("graph has a self-loop on '" + e.from + "'");
      if (!std::isfinite(e.weight)) throw ConfigError("edge " + e.from + " -> " + e.to + " has a non-finite weight");
      if (!seen.insert({e.from, e.to}).second)
        throw ConfigError("graph has a duplicate edge " + e.from + " -> " + e.to);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    order_ = cfair::topological_order(nodes_, edges_);
  }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& order() const { return order_; }

  bool has_node(const std::string& n) const { return std::find(nodes_.begin(), nodes_.end(), n) != nodes_.end(); }

  std::size_t index_of(const std::string& n) const {
    const auto it = std::find(nodes_.begin(), nodes_.end(), n);
    if (it == nodes_.end()) throw ConfigError("graph has no node '" + n + "'");
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  /// Parents of `n` sorted by name.
  std::vector<std::string> parents(const std::string& n) const {
    std::vector<std::string> out;
    for (const auto& e : edges_)
      if (e.to == n) out.push_back(e.from);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::string> children(const std::string& n) const {
    std::vector<std::string> out;
    for (const auto& e : edges_)
      if (e.from == n) out.push_back(e.to);
    return out;
  }

  std::optional<double> weight(const std::string& from, const std::string& to) const {
    for (const auto& e : edges_)
      if (e.from == from && e.to == to) return e.weight;
    return std::nullopt;
  }

  bool operator==(const WeightedDag& o) const { return nodes_ == o.nodes_ && edges_ == o.edges_; }

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::string> order_;
};

inline std::vector<std::string> topological_order(const WeightedDag& dag) { return dag.order(); }

/// Drops edges with |weight| < tau. Nodes are kept.
inline WeightedDag threshold_edges(const WeightedDag& dag, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("threshold must be non-negative");
  std::vector<Edge> kept;
  for (const auto& e : dag.edges())
    if (std::abs(e.weight) >= tau) kept.push_back(e);
  return WeightedDag(dag.nodes(), std::move(kept));
}

/// All nodes reachable from `node` along directed edges, excluding itself.
inline std::set<std::string> descendants(const WeightedDag& dag, const std::string& node) {
  if (!dag.has_node(node)) throw ConfigError("graph has no node '" + node + "'");
  std::set<std::string> out;
  std::vector<std::string> stack{node};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    for (const auto& c : dag.children(n))
      if (out.insert(c).second) stack.push_back(c);
  }
  out.erase(node);
  return out;
}

/// Nodes connected to `node` ignoring edge direction, including itself.
inline std::set<std::string> weak_component(const WeightedDag& dag, const std::string& node) {
  if (!dag.has_node(node)) throw ConfigError("graph has no node '" + node + "'");
  std::set<std::string> out{node};
  std::vector<std::string> stack{node};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    for (const auto& e : dag.edges()) {
      const std::string* other = e.from == n ? &e.to : e.to == n ? &e.from : nullptr;
      if (other && out.insert(*other).second) stack.push_back(*other);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json dag_to_json(const WeightedDag& dag) {
  nlohmann::json j;
  j["nodes"] = dag.nodes();
  auto edges = nlohmann::json::array();
  for (const auto& e : dag.edges()) edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
  j["edges"] = std::move(edges);
  return j;
}

/// Edges without a "weight" field get weight 1.
inline WeightedDag dag_from_json(const nlohmann::json& j) {
  try {
    auto nodes = j.at("nodes").get<std::vector<std::string>>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges"))
      edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(), e.value("weight", 1.0)});
    return WeightedDag(std::move(nodes), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("graph json: ") + e.what());
  }
}

inline WeightedDag read_dag(const std::string& path) {
  try {
    return dag_from_json(nlohmann::json::parse(csv::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("graph '" + path + "': " + e.what());
  }
}

/// Graphviz rendering; sensitive nodes are filled gray.
inline std::string dag_to_dot(const WeightedDag& dag, const std::set<std::string>& sensitive = {}) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q.push_back('\\');
      q.push_back(c);
    }
    return q + "\"";
  };
  std::string out = "digraph scm {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  for (const auto& n : dag.nodes()) {
    out += "  " + quote(n);
    if (sensitive.count(n)) out += " [style=filled, fillcolor=gray85]";
    out += ";\n";
  }
  for (const auto& e : dag.edges()) {
    char w[32];
    std::snprintf(w, sizeof w, "%.3f", e.weight);
    out += "  " + quote(e.from) + " -> " + quote(e.to) + " [label=\"" + w + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace cfair

#pragma once

// Linear structural causal models with additive noise. Counterfactuals
// follow abduction (recover residuals), action (overwrite the intervened
// node) and prediction (re-propagate its descendants).

#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfair/dag.hpp"
#include "cfair/dataset.hpp"
#include "cfair/error.hpp"
#include "cfair/lingam.hpp"

namespace cfair {

/// Values keyed by variable name.
using NamedRow = std::map<std::string, double>;

struct Equation {
  double intercept = 0.0;
  std::map<std::string, double> coef;  // keyed by parent

  bool operator==(const Equation&) const = default;
};

struct Intervention {
  std::string node;
  double value = 0.0;
};

/// Residuals u_i, aligned with `Scm::graph().nodes()`.
using NoiseVector = std::vector<double>;

class Scm {
 public:
  Scm() = default;

  Scm(WeightedDag graph, std::map<std::string, Equation> equations, std::map<std::string, double> noise_scale)
      : graph_(std::move(graph)), equations_(std::move(equations)), noise_scale_(std::move(noise_scale)) {
    for (const auto& n : graph_.nodes()) {
      const auto parents = graph_.parents(n);
      const auto it = equations_.find(n);
      if (parents.empty()) {
        if (it != equations_.end()) throw ConfigError("scm: root '" + n + "' must not carry an equation");
      } else {
        if (it == equations_.end()) throw ConfigError("scm: missing equation for '" + n + "'");
        std::vector<std::string> keys;
        for (const auto& [k, v] : it->second.coef) keys.push_back(k);
        if (keys != parents) throw ConfigError("scm: equation for '" + n + "' does not match its parent set");
      }
      if (noise_scale_.count(n) && noise_scale_.at(n) < 0) throw ConfigError("scm: negative noise scale");
    }
    build_plan();
  }

  const WeightedDag& graph() const { return graph_; }
  const std::map<std::string, Equation>& equations() const { return equations_; }
  const std::map<std::string, double>& noise_scale() const { return noise_scale_; }

  std::size_t size() const { return graph_.nodes().size(); }

  /// Structural value of node `k` given the other values in `x` and the
  /// residual `u`. Roots return `u` unchanged.
  double evaluate(std::size_t k, std::span<const double> x, double u) const {
    const auto& terms = plan_[k];
    if (!terms.has_equation) return u;
    double v = terms.intercept;
    for (const auto& [parent, w] : terms.parents) v += w * x[parent];
    return v + u;
  }

  /// u_i = x_i - f_i(parents(x)); roots keep their own value.
  NoiseVector abduct(std::span<const double> x) const {
    check_width(x.size());
    NoiseVector u(size());
    for (std::size_t k = 0; k < size(); ++k) u[k] = x[k] - evaluate(k, x, 0.0);
    return u;
  }

  NoiseVector abduct(const NamedRow& x) const { return abduct(to_vector(x)); }

  /// Rebuilds all values from the residuals in topological order.
  std::vector<double> predict(const NoiseVector& u) const {
    check_width(u.size());
    std::vector<double> x(size(), 0.0);
    for (auto k : topo_) x[k] = evaluate(k, x, u[k]);
    return x;
  }

  /// Point counterfactual under do(node <- value). Coordinates outside the
  /// strict descendants of the intervened node are copied unchanged.
  std::vector<double> counterfactual(std::span<const double> x, const Intervention& iv) const {
    check_width(x.size());
    const auto target = graph_.index_of(iv.node);
    std::vector<double> out(x.begin(), x.end());
    if (out[target] == iv.value) return out;
    out[target] = iv.value;
    for (auto k : descendants_order_[target]) {
      const double u = x[k] - evaluate(k, x, 0.0);
      out[k] = evaluate(k, out, u);
    }
    return out;
  }

  NamedRow counterfactual(const NamedRow& x, const Intervention& iv) const {
    const auto cf = counterfactual(to_vector(x), iv);
    NamedRow out = x;
    for (std::size_t k = 0; k < size(); ++k) out[graph_.nodes()[k]] = cf[k];
    return out;
  }

  std::vector<double> to_vector(const NamedRow& x) const {
    std::vector<double> v(size());
    for (std::size_t k = 0; k < size(); ++k) {
      const auto it = x.find(graph_.nodes()[k]);
      if (it == x.end()) throw DataError("instance has no value for node '" + graph_.nodes()[k] + "'");
      v[k] = it->second;
    }
    return v;
  }

 private:
  struct Terms {
    bool has_equation = false;
    double intercept = 0.0;
    std::vector<std::pair<std::size_t, double>> parents;
  };

  void check_width(std::size_t w) const {
    if (w != size()) throw DataError("instance width does not match the model's node count");
  }

  void build_plan() {
    const auto& nodes = graph_.nodes();
    plan_.assign(nodes.size(), {});
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto it = equations_.find(nodes[k]);
      if (it == equations_.end()) continue;
      plan_[k].has_equation = true;
      plan_[k].intercept = it->second.intercept;
      for (const auto& [p, w] : it->second.coef) plan_[k].parents.emplace_back(graph_.index_of(p), w);
    }
    topo_.clear();
    for (const auto& n : graph_.order()) topo_.push_back(graph_.index_of(n));
    descendants_order_.assign(nodes.size(), {});
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto desc = descendants(graph_, nodes[k]);
      for (auto t : topo_)
        if (desc.count(nodes[t])) descendants_order_[k].push_back(t);
    }
  }

  WeightedDag graph_;
  std::map<std::string, Equation> equations_;
  std::map<std::string, double> noise_scale_;
  std::vector<Terms> plan_;
  std::vector<std::size_t> topo_;
  std::vector<std::vector<std::size_t>> descendants_order_;
};

/// Least-squares refit of every non-root node on its parents (with
/// intercept). Noise scale is the root-mean-square residual; for roots it
/// is the standard deviation of the node itself.
inline Scm fit_scm(const WeightedDag& dag, const Eigen::MatrixXd& data, const std::vector<std::string>& columns) {
  auto col = [&](const std::string& name) -> Eigen::Index {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<Eigen::Index>(i);
    throw DataError("fit_scm: data has no column '" + name + "'");
  };
  const Eigen::Index n = data.rows();
  std::map<std::string, Equation> equations;
  std::map<std::string, double> noise;
  for (const auto& node : dag.nodes()) {
    const Eigen::VectorXd y = data.col(col(node));
    const auto parents = dag.parents(node);
    if (parents.empty()) {
      noise[node] = std::sqrt((y.array() - y.mean()).square().sum() / static_cast<double>(n));
      continue;
    }
    if (n <= static_cast<Eigen::Index>(parents.size()) + 1)
      throw DataError("fit_scm: too few rows to fit '" + node + "'");
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(parents.size()) + 1);
    design.col(0).setOnes();
    std::string set;
    for (std::size_t m = 0; m < parents.size(); ++m) {
      design.col(static_cast<Eigen::Index>(m) + 1) = data.col(col(parents[m]));
      set += (m ? ", " : "") + parents[m];
    }
    const Eigen::VectorXd beta = least_squares(design, y, "parents of '" + node + "' {" + set + "}");
    Equation eq;
    eq.intercept = beta[0];
    for (std::size_t m = 0; m < parents.size(); ++m) eq.coef[parents[m]] = beta[static_cast<Eigen::Index>(m) + 1];
    noise[node] = std::sqrt((y - design * beta).squaredNorm() / static_cast<double>(n));
    equations[node] = std::move(eq);
  }
  return Scm(dag, std::move(equations), std::move(noise));
}

inline Scm fit_scm(const WeightedDag& dag, const EncodedMatrix& data) {
  return fit_scm(dag, data.values, data.column_map);
}

inline NoiseVector abduct(const Scm& m, const NamedRow& x) { return m.abduct(x); }

inline NamedRow counterfactual(const Scm& m, const NamedRow& x, const Intervention& iv) {
  return m.counterfactual(x, iv);
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json scm_to_json(const Scm& m) {
  nlohmann::json eqs = nlohmann::json::object();
  for (const auto& [node, eq] : m.equations()) {
    nlohmann::json coef = nlohmann::json::object();
    for (const auto& [p, w] : eq.coef) coef[p] = w;
    eqs[node] = {{"intercept", eq.intercept}, {"coef", std::move(coef)}};
  }
  nlohmann::json noise = nlohmann::json::object();
  for (const auto& [node, s] : m.noise_scale()) noise[node] = s;
  return {{"graph", dag_to_json(m.graph())}, {"equations", std::move(eqs)}, {"noise", std::move(noise)}};
}

inline Scm scm_from_json(const nlohmann::json& j) {
  try {
    auto graph = dag_from_json(j.at("graph"));
    std::map<std::string, Equation> eqs;
    for (const auto& [node, e] : j.at("equations").items()) {
      Equation eq;
      eq.intercept = e.at("intercept").get<double>();
      for (const auto& [p, w] : e.at("coef").items()) eq.coef[p] = w.get<double>();
      eqs[node] = std::move(eq);
    }
    std::map<std::string, double> noise;
    for (const auto& [node, s] : j.value("noise", nlohmann::json::object()).items()) noise[node] = s.get<double>();
    return Scm(std::move(graph), std::move(eqs), std::move(noise));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scm json: ") + e.what());
  }
}

}  // namespace cfair

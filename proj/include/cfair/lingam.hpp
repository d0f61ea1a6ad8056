#pragma once

// DirectLiNGAM causal ordering with the pairwise likelihood-ratio
// exogeneity measure, followed by least-squares edge weights.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfair/dag.hpp"
#include "cfair/dataset.hpp"
#include "cfair/error.hpp"

namespace cfair {

struct DiscoveryDiagnostics {
  std::vector<std::size_t> causal_order;  // node indices, most exogenous first
  Eigen::MatrixXd raw_weights;            // (child, parent) least-squares weights
  double threshold = 0.0;                 // set by the caller that prunes the graph
};

struct DiscoveryResult {
  WeightedDag dag;
  DiscoveryDiagnostics diagnostics;
};

namespace lingam_detail {

/// Maximum-entropy approximation of differential entropy for a unit-variance
/// sample (log-cosh and Gaussian-derivative contrast functions).
inline double entropy(const Eigen::VectorXd& u) {
  constexpr double k1 = 79.047;
  constexpr double k2 = 7.4129;
  constexpr double gamma = 0.37457;
  const double n = static_cast<double>(u.size());
  double logcosh = 0.0;
  double gauss = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double x = u[i];
    const double ax = std::abs(x);
    // log(cosh(x)) without overflow for large |x|
    logcosh += ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
    gauss += x * std::exp(-0.5 * x * x);
  }
  logcosh /= n;
  gauss /= n;
  return (1.0 + std::log(2.0 * std::numbers::pi)) / 2.0 - k1 * (logcosh - gamma) * (logcosh - gamma) -
         k2 * gauss * gauss;
}

inline Eigen::VectorXd standardize(const Eigen::VectorXd& x) {
  const double mean = x.mean();
  Eigen::VectorXd c = x.array() - mean;
  const double sd = std::sqrt(c.squaredNorm() / static_cast<double>(x.size()));
  return c / sd;
}

/// Residual of regressing xi on xj (both centred).
inline Eigen::VectorXd residual(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
  const double mi = xi.mean();
  const double mj = xj.mean();
  const Eigen::VectorXd ci = xi.array() - mi;
  const Eigen::VectorXd cj = xj.array() - mj;
  return xi - (ci.dot(cj) / cj.squaredNorm()) * xj;
}

/// Log-likelihood-ratio difference between "xi -> xj" and "xj -> xi".
/// Positive values favour xi being the cause.
inline double pairwise_score(const Eigen::VectorXd& xi_std, const Eigen::VectorXd& xj_std) {
  const Eigen::VectorXd ri_j = residual(xi_std, xj_std);
  const Eigen::VectorXd rj_i = residual(xj_std, xi_std);
  const double n = static_cast<double>(xi_std.size());
  const double sd_ij = std::sqrt((ri_j.array() - ri_j.mean()).square().sum() / n);
  const double sd_ji = std::sqrt((rj_i.array() - rj_i.mean()).square().sum() / n);
  return (entropy(xj_std) + entropy(ri_j / sd_ij)) - (entropy(xi_std) + entropy(rj_i / sd_ji));
}

}  // namespace lingam_detail

/// Ordinary least squares of y on the columns of x (no intercept); throws
/// RankError naming `what` if x is rank deficient.
inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::string& what) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) throw RankError("rank-deficient regression on " + what);
  return qr.solve(y);
}

/// Full (unpruned) DirectLiNGAM estimate over the columns of `x`.
inline DiscoveryResult direct_lingam(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (static_cast<std::size_t>(p) != names.size()) throw ConfigError("direct_lingam: name count mismatch");
  if (p < 2) throw ConfigError("direct_lingam: need at least 2 variables");
  if (n <= p) throw DataError("direct_lingam: need more rows than variables");
  for (Eigen::Index j = 0; j < p; ++j) {
    if ((x.col(j).array() == x(0, j)).all())
      throw DataError("direct_lingam: column '" + names[static_cast<std::size_t>(j)] + "' is constant");
  }
  const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
  // An exactly collinear column would make the pairwise residuals vanish.
  for (Eigen::Index k = 1; k < p; ++k) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(centred.leftCols(k + 1));
    qr.setThreshold(1e-10);
    if (qr.rank() > k) continue;
    const Eigen::VectorXd c = centred.leftCols(k).colPivHouseholderQr().solve(centred.col(k));
    std::string set;
    for (Eigen::Index j = 0; j < k; ++j)
      if (std::abs(c[j]) > 1e-8) set += names[static_cast<std::size_t>(j)] + ", ";
    throw RankError("direct_lingam: collinear variables {" + set + names[static_cast<std::size_t>(k)] + "}");
  }

  Eigen::MatrixXd work = x;
  std::vector<std::size_t> remaining(static_cast<std::size_t>(p));
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<std::size_t> order;

  while (!remaining.empty()) {
    std::size_t best = remaining.front();
    if (remaining.size() > 1) {
      std::vector<Eigen::VectorXd> std_cols(static_cast<std::size_t>(p));
      for (auto i : remaining) std_cols[i] = lingam_detail::standardize(work.col(static_cast<Eigen::Index>(i)));
      double best_score = -std::numeric_limits<double>::infinity();
      for (auto i : remaining) {
        double penalty = 0.0;
        for (auto j : remaining) {
          if (i == j) continue;
          const double d = lingam_detail::pairwise_score(std_cols[i], std_cols[j]);
          penalty += std::min(0.0, d) * std::min(0.0, d);
        }
        // strict comparison keeps the lowest index on ties
        if (-penalty > best_score) {
          best_score = -penalty;
          best = i;
        }
      }
    }
    order.push_back(best);
    std::erase(remaining, best);
    const Eigen::VectorXd cause = work.col(static_cast<Eigen::Index>(best));
    for (auto i : remaining) {
      const auto c = static_cast<Eigen::Index>(i);
      work.col(c) = lingam_detail::residual(work.col(c), cause);
    }
  }

  // Weights: regress each variable on all of its causal predecessors.
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto child = static_cast<Eigen::Index>(order[k]);
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(k));
    std::string set;
    for (std::size_t m = 0; m < k; ++m) {
      design.col(static_cast<Eigen::Index>(m)) = centred.col(static_cast<Eigen::Index>(order[m]));
      set += (m ? ", " : "") + names[order[m]];
    }
    const Eigen::VectorXd coef =
        least_squares(design, centred.col(child), "'" + names[order[k]] + "' given {" + set + "}");
    for (std::size_t m = 0; m < k; ++m) weights(child, static_cast<Eigen::Index>(order[m])) = coef[static_cast<Eigen::Index>(m)];
  }

  std::vector<Edge> edges;
  for (Eigen::Index c = 0; c < p; ++c)
    for (Eigen::Index q = 0; q < p; ++q)
      if (weights(c, q) != 0.0)
        edges.push_back({names[static_cast<std::size_t>(q)], names[static_cast<std::size_t>(c)], weights(c, q)});

  return {WeightedDag(names, std::move(edges)), {std::move(order), std::move(weights), 0.0}};
}

inline DiscoveryResult direct_lingam(const EncodedMatrix& x) { return direct_lingam(x.values, x.column_map); }

}  // namespace cfair

#pragma once

/**
 * One-factor linear-Gaussian model with observed covariates.
 *
 *   y_j = b_j + lambda_j * K + sum_s beta_js * s + e_j,
 *   K ~ N(0, 1),  e_j ~ N(0, psi_j)  independent.
 *
 * The sensitive attributes s are treated as fixed covariates, K as an
 * unobserved factor shared by all outcomes. Parameters are fitted by EM;
 * the posterior of K given any subset of outcomes is Gaussian and available
 * in closed form.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfair/dataset.hpp"
#include "cfair/error.hpp"
#include "cfair/scm.hpp"

namespace cfair {

struct LatentScm {
  std::string latent_name = "K";
  std::vector<std::string> outcomes;
  std::vector<std::string> sensitives;
  Eigen::VectorXd intercepts;  // b, one per outcome
  Eigen::VectorXd loadings;    // lambda
  Eigen::MatrixXd betas;       // outcome x sensitive
  Eigen::VectorXd noise_var;   // psi

  std::vector<double> loglik_trace;  // per-observation average, one per iteration
  int iterations = 0;
  bool converged = false;

  Eigen::Index outcome_index(const std::string& name) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i] == name) return static_cast<Eigen::Index>(i);
    throw ConfigError("latent model has no outcome '" + name + "'");
  }
};

struct EmOptions {
  int max_iterations = 500;
  double tolerance = 1e-8;  // relative log-likelihood improvement
};

namespace latent_detail {

/// Average log-likelihood of the outcomes given the covariates, with K
/// integrated out: y | s ~ N(b + B s, lambda lambda^T + diag(psi)).
inline double average_loglik(const Eigen::MatrixXd& y, const Eigen::MatrixXd& s, const LatentScm& m) {
  const Eigen::Index n = y.rows();
  const Eigen::Index q = y.cols();
  Eigen::MatrixXd cov = m.loadings * m.loadings.transpose();
  cov.diagonal() += m.noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  Eigen::MatrixXd resid = y - s * m.betas.transpose();
  resid.rowwise() -= m.intercepts.transpose();
  const Eigen::MatrixXd solved = llt.solve(resid.transpose());
  const double quad = (resid.transpose().array() * solved.array()).sum();
  return -0.5 * (static_cast<double>(q) * std::log(2.0 * std::numbers::pi) + logdet) -
         0.5 * quad / static_cast<double>(n);
}

}  // namespace latent_detail

/// EM fit of the one-factor model. The returned model always carries the
/// best iterate; `converged` is false if the iteration cap was hit first.
inline LatentScm fit_latent_scm(const Eigen::MatrixXd& data, const std::vector<std::string>& columns,
                                const std::vector<std::string>& outcomes, const std::vector<std::string>& sensitives,
                                const EmOptions& opts = {}) {
  if (outcomes.size() < 2) throw ConfigError("fit_latent_scm: at least two outcomes are needed to identify the factor");
  for (const auto& o : outcomes)
    if (std::find(sensitives.begin(), sensitives.end(), o) != sensitives.end())
      throw ConfigError("fit_latent_scm: '" + o + "' is both outcome and sensitive");
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<Eigen::Index>(i);
    throw DataError("fit_latent_scm: data has no column '" + name + "'");
  };

  const Eigen::Index n = data.rows();
  const auto q = static_cast<Eigen::Index>(outcomes.size());
  const auto r = static_cast<Eigen::Index>(sensitives.size());
  Eigen::MatrixXd y(n, q), s(n, r);
  for (Eigen::Index j = 0; j < q; ++j) y.col(j) = data.col(col(outcomes[static_cast<std::size_t>(j)]));
  for (Eigen::Index j = 0; j < r; ++j) s.col(j) = data.col(col(sensitives[static_cast<std::size_t>(j)]));
  for (Eigen::Index j = 0; j < q; ++j) {
    if ((y.col(j).array() == y(0, j)).all())
      throw DataError("fit_latent_scm: outcome '" + outcomes[static_cast<std::size_t>(j)] + "' has zero variance");
  }

  LatentScm m;
  m.outcomes = outcomes;
  m.sensitives = sensitives;

  // Start from the regression on covariates and the leading eigenvector of
  // the residual covariance.
  Eigen::MatrixXd design(n, r + 1);
  design.col(0).setOnes();
  design.rightCols(r) = s;
  Eigen::MatrixXd coef(r + 1, q);
  for (Eigen::Index j = 0; j < q; ++j)
    coef.col(j) = least_squares(design, y.col(j), "covariates of '" + outcomes[static_cast<std::size_t>(j)] + "'");
  const Eigen::MatrixXd resid = y - design * coef;
  const Eigen::MatrixXd rcov = resid.transpose() * resid / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rcov);
  const double top = std::max(eig.eigenvalues()[q - 1], 1e-12);
  m.intercepts = coef.row(0).transpose();
  m.betas = coef.bottomRows(r).transpose();
  m.loadings = eig.eigenvectors().col(q - 1) * std::sqrt(0.5 * top);
  m.noise_var = (rcov.diagonal() - m.loadings.array().square().matrix()).cwiseMax(0.1 * rcov.diagonal());

  double ll = latent_detail::average_loglik(y, s, m);
  m.loglik_trace.push_back(ll);

  for (int it = 1; it <= opts.max_iterations; ++it) {
    // E-step: K_i | y_i ~ N(mean_i, v) with a shared posterior variance.
    const Eigen::VectorXd prec_w = m.loadings.array() / m.noise_var.array();
    const double v = 1.0 / (1.0 + m.loadings.dot(prec_w));
    Eigen::MatrixXd centred = y - s * m.betas.transpose();
    centred.rowwise() -= m.intercepts.transpose();
    const Eigen::VectorXd ek = v * (centred * prec_w);
    const double ekk_sum = static_cast<double>(n) * v + ek.squaredNorm();

    // M-step: per outcome regression on z = [1, K, s] with expected moments.
    const Eigen::Index d = r + 2;
    Eigen::MatrixXd zz = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd ez(n, d);
    ez.col(0).setOnes();
    ez.col(1) = ek;
    ez.rightCols(r) = s;
    zz = ez.transpose() * ez;
    zz(1, 1) = ekk_sum;
    const Eigen::LDLT<Eigen::MatrixXd> solver(zz);
    const Eigen::MatrixXd zy = ez.transpose() * y;
    const Eigen::MatrixXd theta = solver.solve(zy);  // d x q
    for (Eigen::Index j = 0; j < q; ++j) {
      const Eigen::VectorXd t = theta.col(j);
      const double psi =
          (y.col(j).squaredNorm() - 2.0 * t.dot(zy.col(j)) + t.dot(zz * t)) / static_cast<double>(n);
      m.intercepts[j] = t[0];
      m.loadings[j] = t[1];
      m.betas.row(j) = t.tail(r).transpose();
      m.noise_var[j] = std::max(psi, 1e-12);
    }

    const double next = latent_detail::average_loglik(y, s, m);
    m.loglik_trace.push_back(next);
    m.iterations = it;
    const double gain = next - ll;
    if (gain < -1e-10 * std::max(1.0, std::abs(ll)))
      throw TrainingError("fit_latent_scm: EM log-likelihood decreased at iteration " + std::to_string(it));
    ll = next;
    if (gain <= opts.tolerance * std::abs(ll)) {
      m.converged = true;
      break;
    }
  }

  if (m.loadings[0] < 0) m.loadings = -m.loadings;
  return m;
}

inline LatentScm fit_latent_scm(const EncodedMatrix& data, const std::vector<std::string>& outcomes,
                                const std::vector<std::string>& sensitives, const EmOptions& opts = {}) {
  return fit_latent_scm(data.values, data.column_map, outcomes, sensitives, opts);
}

/// E[K | observed outcomes, sensitives] for one instance.
inline double posterior_latent(const LatentScm& m, const NamedRow& x, const std::vector<std::string>& observed) {
  if (observed.empty()) throw ConfigError("posterior_latent: no observed outcomes");
  auto value = [&](const std::string& name) {
    const auto it = x.find(name);
    if (it == x.end()) throw DataError("posterior_latent: instance has no value for '" + name + "'");
    return it->second;
  };
  double num = 0.0;
  double prec = 1.0;
  for (const auto& o : observed) {
    const auto j = m.outcome_index(o);
    double resid = value(o) - m.intercepts[j];
    for (std::size_t k = 0; k < m.sensitives.size(); ++k)
      resid -= m.betas(j, static_cast<Eigen::Index>(k)) * value(m.sensitives[k]);
    num += m.loadings[j] * resid / m.noise_var[j];
    prec += m.loadings[j] * m.loadings[j] / m.noise_var[j];
  }
  return num / prec;
}

/// Counterfactual outcomes under do(sensitive <- value): the factor and the
/// outcome residuals are held fixed, so each outcome moves by beta * delta.
inline NamedRow counterfactual(const LatentScm& m, const NamedRow& x, const Intervention& iv) {
  const auto it = std::find(m.sensitives.begin(), m.sensitives.end(), iv.node);
  if (it == m.sensitives.end()) throw ConfigError("latent model cannot intervene on '" + iv.node + "'");
  const auto k = static_cast<Eigen::Index>(it - m.sensitives.begin());
  NamedRow out = x;
  const auto cur = x.find(iv.node);
  if (cur == x.end()) throw DataError("instance has no value for '" + iv.node + "'");
  if (cur->second == iv.value) return out;
  const double delta = iv.value - cur->second;
  out[iv.node] = iv.value;
  for (std::size_t j = 0; j < m.outcomes.size(); ++j) {
    auto o = out.find(m.outcomes[j]);
    if (o == out.end()) throw DataError("instance has no value for '" + m.outcomes[j] + "'");
    o->second += m.betas(static_cast<Eigen::Index>(j), k) * delta;
  }
  return out;
}

inline nlohmann::json latent_to_json(const LatentScm& m) {
  nlohmann::json outs = nlohmann::json::object();
  for (std::size_t j = 0; j < m.outcomes.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    nlohmann::json beta = nlohmann::json::object();
    for (std::size_t k = 0; k < m.sensitives.size(); ++k) beta[m.sensitives[k]] = m.betas(jj, static_cast<Eigen::Index>(k));
    outs[m.outcomes[j]] = {{"intercept", m.intercepts[jj]},
                           {"loading", m.loadings[jj]},
                           {"beta", std::move(beta)},
                           {"noise_variance", m.noise_var[jj]}};
  }
  return {{"latent", m.latent_name},
          {"outcomes", std::move(outs)},
          {"iterations", m.iterations},
          {"converged", m.converged},
          {"final_loglik", m.loglik_trace.empty() ? 0.0 : m.loglik_trace.back()}};
}

}  // namespace cfair

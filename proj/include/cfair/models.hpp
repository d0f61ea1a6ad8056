#pragma once

// Feature regimes and the predictors trained under them: least-squares
// linear regression, L2-regularized logistic regression (Newton) and a
// one-hidden-layer tanh MLP trained by full-batch gradient descent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfair/csv.hpp"
#include "cfair/dag.hpp"
#include "cfair/dataset.hpp"
#include "cfair/error.hpp"
#include "cfair/latent.hpp"
#include "cfair/lingam.hpp"
#include "cfair/rng.hpp"
#include "cfair/scm.hpp"

namespace cfair {

enum class RegimeKind { unfair, unaware, counterfactual };

inline std::string to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::unfair: return "unfair";
    case RegimeKind::unaware: return "unaware";
    case RegimeKind::counterfactual: return "counterfactual";
  }
  return "?";
}

inline RegimeKind parse_regime_kind(const std::string& s) {
  if (s == "unfair") return RegimeKind::unfair;
  if (s == "unaware") return RegimeKind::unaware;
  if (s == "counterfactual") return RegimeKind::counterfactual;
  throw ConfigError("unknown regime '" + s + "'");
}

struct Regime {
  RegimeKind kind = RegimeKind::unfair;
  std::set<std::string> excluded;
  int level = 1;
};

/// unfair: nothing excluded; unaware: the sensitive attributes;
/// counterfactual: sensitive attributes and all of their descendants.
inline Regime make_regime(RegimeKind kind, int level, const std::vector<std::string>& sensitives,
                          const WeightedDag* dag) {
  if (level != 1 && level != 2) throw ConfigError("regime level must be 1 or 2");
  Regime r{kind, {}, level};
  if (kind == RegimeKind::unfair) return r;
  r.excluded.insert(sensitives.begin(), sensitives.end());
  if (kind == RegimeKind::unaware) return r;
  if (!dag) throw ConfigError("counterfactual regime requires a causal graph");
  for (const auto& s : sensitives) {
    if (!dag->has_node(s)) throw ConfigError("sensitive attribute '" + s + "' is not a graph node");
    const auto d = descendants(*dag, s);
    r.excluded.insert(d.begin(), d.end());
  }
  return r;
}

struct FeatureTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;
};

/// Which encoded columns (and, at level 2, which latent posterior) feed a
/// predictor.
struct FeaturePlan {
  Regime regime;
  std::vector<std::string> names;
  std::optional<LatentScm> latent;             // level-2 counterfactual only
  std::vector<std::string> latent_observed;    // outcomes used for E[K | ...]

  FeatureTable apply(const Eigen::MatrixXd& values, const std::vector<std::string>& columns) const {
    FeatureTable t{names, Eigen::MatrixXd(values.rows(), static_cast<Eigen::Index>(names.size()))};
    NamedRow row;
    for (std::size_t f = 0; f < names.size(); ++f) {
      const auto fc = static_cast<Eigen::Index>(f);
      if (latent && names[f] == latent->latent_name) {
        for (Eigen::Index r = 0; r < values.rows(); ++r) {
          for (std::size_t c = 0; c < columns.size(); ++c) row[columns[c]] = values(r, static_cast<Eigen::Index>(c));
          t.values(r, fc) = posterior_latent(*latent, row, latent_observed);
        }
        continue;
      }
      const auto it = std::find(columns.begin(), columns.end(), names[f]);
      if (it == columns.end()) throw DataError("feature '" + names[f] + "' is missing from the input");
      t.values.col(fc) = values.col(static_cast<Eigen::Index>(it - columns.begin()));
    }
    return t;
  }

  FeatureTable apply(const EncodedMatrix& x) const { return apply(x.values, x.column_map); }

  Eigen::RowVectorXd apply(const NamedRow& row) const {
    Eigen::RowVectorXd out(static_cast<Eigen::Index>(names.size()));
    for (std::size_t f = 0; f < names.size(); ++f) {
      const auto fc = static_cast<Eigen::Index>(f);
      if (latent && names[f] == latent->latent_name) {
        out[fc] = posterior_latent(*latent, row, latent_observed);
        continue;
      }
      const auto it = row.find(names[f]);
      if (it == row.end()) throw DataError("feature '" + names[f] + "' is missing from the instance");
      out[fc] = it->second;
    }
    return out;
  }
};

/// Decides the predictor inputs for a regime. `columns` are the encoded
/// (non-ignored) dataset columns in order.
///
/// Level-1 counterfactual keeps the non-excluded columns that lie in the
/// target's weakly connected component of the graph. Level 2 replaces the
/// excluded block with the posterior mean of the latent factor, inferred
/// from every latent outcome except the target.
inline FeaturePlan select_features(const Schema& columns, const Regime& regime, const WeightedDag* dag,
                                   const LatentScm* latent) {
  std::string target;
  for (const auto& c : columns)
    if (c.role == ColumnRole::target) target = c.name;
  if (target.empty()) throw ConfigError("select_features: no target column");

  FeaturePlan plan{regime, {}, std::nullopt, {}};
  std::vector<std::string> candidates;
  for (const auto& c : columns)
    if (c.role == ColumnRole::feature || c.role == ColumnRole::sensitive)
      if (!regime.excluded.count(c.name)) candidates.push_back(c.name);

  if (regime.kind == RegimeKind::counterfactual && regime.level == 1) {
    if (!dag) throw ConfigError("select_features: counterfactual regime requires a causal graph");
    const auto component = dag->has_node(target) ? weak_component(*dag, target) : std::set<std::string>{};
    for (const auto& c : candidates)
      if (component.count(c)) plan.names.push_back(c);
  } else if (regime.kind == RegimeKind::counterfactual && regime.level == 2) {
    if (!latent) throw ConfigError("select_features: level-2 counterfactual regime requires a latent model");
    plan.latent = *latent;
    for (const auto& o : latent->outcomes)
      if (o != target) plan.latent_observed.push_back(o);
    if (plan.latent_observed.empty()) throw ConfigError("select_features: latent model observes only the target");
    plan.names.push_back(latent->latent_name);
    for (const auto& c : candidates) {
      const bool is_outcome = std::find(latent->outcomes.begin(), latent->outcomes.end(), c) != latent->outcomes.end();
      if (!is_outcome) plan.names.push_back(c);
    }
  } else {
    plan.names = candidates;
  }
  if (plan.names.empty())
    throw ConfigError("select_features: regime '" + to_string(regime.kind) + "' leaves no features");
  return plan;
}

// ---------------------------------------------------------------------------
// Predictors

enum class ModelKind { linear, logistic, mlp };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::linear: return "linear";
    case ModelKind::logistic: return "logistic";
    case ModelKind::mlp: return "mlp";
  }
  return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "linear") return ModelKind::linear;
  if (s == "logistic") return ModelKind::logistic;
  if (s == "mlp") return ModelKind::mlp;
  throw ConfigError("unknown model kind '" + s + "'");
}

struct ModelSpec {
  ModelKind kind = ModelKind::linear;
  int hidden = 32;
  double learning_rate = 1e-2;
  int epochs = 2000;
  double l2 = 1e-4;
  std::uint64_t seed = 42;

  void validate(Task task) const {
    if (hidden <= 0 || epochs <= 0 || !(learning_rate > 0)) throw ConfigError("model: width, epochs and rate must be positive");
    if (!(l2 >= 0)) throw ConfigError("model: l2 must be non-negative");
    if (kind == ModelKind::linear && task != Task::regression)
      throw ConfigError("model: linear regression requires a regression task");
    if (kind == ModelKind::logistic && task != Task::classification)
      throw ConfigError("model: logistic regression requires a classification task");
  }
};

/// Parameter layout. linear/logistic: [intercept, w...].
/// mlp: [W1 (hidden x inputs, column-major), b1, w2, b2].
struct Predictor {
  ModelSpec spec;
  Regime regime;
  Task task = Task::regression;
  std::vector<std::string> feature_names;
  Eigen::VectorXd params;
};

namespace model_detail {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct MlpView {
  Eigen::Map<const Eigen::MatrixXd> w1;
  Eigen::Map<const Eigen::VectorXd> b1;
  Eigen::Map<const Eigen::VectorXd> w2;
  double b2;

  MlpView(const Eigen::VectorXd& p, Eigen::Index inputs, Eigen::Index hidden)
      : w1(p.data(), hidden, inputs),
        b1(p.data() + hidden * inputs, hidden),
        w2(p.data() + hidden * inputs + hidden, hidden),
        b2(p[hidden * inputs + 2 * hidden]) {}
};

/// tanh through the vectorised exp; saturates cleanly to +-1.
template <class A>
void tanh_inplace(A&& a) {
  a = 1.0 - 2.0 / ((2.0 * a).exp() + 1.0);
}

inline Eigen::Index mlp_size(Eigen::Index inputs, Eigen::Index hidden) { return hidden * inputs + 2 * hidden + 1; }

inline Eigen::VectorXd mlp_output(const Eigen::VectorXd& p, const Eigen::MatrixXd& x, Eigen::Index hidden) {
  const MlpView v(p, x.cols(), hidden);
  Eigen::MatrixXd h = x * v.w1.transpose();
  h.rowwise() += v.b1.transpose();
  tanh_inplace(h.array());
  return (h * v.w2).array() + v.b2;
}

/// Loss and gradient of the MLP objective:
/// regression 1/(2n) sum (f - y)^2, classification mean cross-entropy on
/// logits; both plus l2/2 * (|W1|^2 + |w2|^2).
struct MlpWorkspace {
  Eigen::MatrixXd h, dh;
  Eigen::VectorXd out, delta;
};

inline double mlp_loss_grad(const Eigen::VectorXd& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            Eigen::Index hidden, double l2, Task task, Eigen::VectorXd* grad,
                            MlpWorkspace* work = nullptr) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const MlpView v(p, d, hidden);
  MlpWorkspace local;
  MlpWorkspace& w = work ? *work : local;
  auto& h = w.h;
  h.noalias() = x * v.w1.transpose();
  h.rowwise() += v.b1.transpose();
  tanh_inplace(h.array());
  auto& out = w.out;
  out.noalias() = h * v.w2;
  out.array() += v.b2;

  double loss = 0.0;
  auto& delta = w.delta;
  delta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (task == Task::regression) {
      const double e = out[i] - y[i];
      loss += 0.5 * e * e;
      delta[i] = e;
    } else {
      loss += softplus(out[i]) - y[i] * out[i];
      delta[i] = sigmoid(out[i]) - y[i];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss = loss * inv_n + 0.5 * l2 * (v.w1.squaredNorm() + v.w2.squaredNorm());
  if (!grad) return loss;

  delta *= inv_n;
  grad->resize(p.size());
  auto& dh = w.dh;
  dh.noalias() = delta * v.w2.transpose();
  dh.array() *= 1.0 - h.array().square();
  Eigen::Map<Eigen::MatrixXd> g_w1(grad->data(), hidden, d);
  g_w1.noalias() = dh.transpose() * x;
  g_w1 += l2 * v.w1;
  grad->segment(hidden * d, hidden) = dh.colwise().sum().transpose();
  grad->segment(hidden * d + hidden, hidden) = h.transpose() * delta + l2 * v.w2;
  (*grad)[hidden * d + 2 * hidden] = delta.sum();
  return loss;
}

inline Eigen::VectorXd mlp_init(Eigen::Index inputs, Eigen::Index hidden, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(mlp_size(inputs, hidden));
  const double s1 = std::sqrt(1.0 / static_cast<double>(inputs));
  const double s2 = std::sqrt(1.0 / static_cast<double>(hidden));
  for (Eigen::Index i = 0; i < hidden * inputs; ++i) p[i] = s1 * rng.normal();
  for (Eigen::Index i = 0; i < hidden; ++i) p[hidden * inputs + hidden + i] = s2 * rng.normal();
  return p;
}

inline Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

inline Eigen::VectorXd fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(with_intercept(x));
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols() + 1) throw RankError("linear regression: singular normal equations");
  return qr.solve(y);
}

/// Newton's method with backtracking on the penalized mean log-loss.
inline Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double l2) {
  const Eigen::MatrixXd a = with_intercept(x);
  const Eigen::Index n = a.rows();
  const Eigen::Index k = a.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(k, l2);
  penalty[0] = 0.0;

  auto objective = [&](const Eigen::VectorXd& t) {
    const Eigen::VectorXd z = a * t;
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) f += softplus(z[i]) - y[i] * z[i];
    return f * inv_n + 0.5 * (penalty.array() * t.array().square()).sum();
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
  double f = objective(theta);
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd z = a * theta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(z[i]);
      w[i] = p[i] * (1.0 - p[i]);
    }
    const Eigen::VectorXd g = a.transpose() * (p - y) * inv_n + penalty.cwiseProduct(theta);
    if (g.norm() < 1e-8) return theta;
    Eigen::MatrixXd hess = a.transpose() * w.asDiagonal() * a * inv_n;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(g);
    double t = 1.0;
    Eigen::VectorXd next = theta - step;
    double fn = objective(next);
    while (fn > f - 1e-4 * t * g.dot(step) && t > 1e-10) {
      t *= 0.5;
      next = theta - t * step;
      fn = objective(next);
    }
    if (fn > f) break;
    theta = next;
    f = fn;
  }
  const Eigen::VectorXd z = a * theta;
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p[i] = sigmoid(z[i]);
  const Eigen::VectorXd g = a.transpose() * (p - y) * inv_n + penalty.cwiseProduct(theta);
  if (g.norm() < 1e-8) return theta;
  throw TrainingError("logistic regression: Newton iterations did not reach gradient norm 1e-8 (got " +
                      csv::format_double(g.norm()) + ")");
}

inline Eigen::VectorXd fit_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const ModelSpec& spec, Task task) {
  const Eigen::Index hidden = spec.hidden;
  Eigen::VectorXd p = mlp_init(x.cols(), hidden, spec.seed);
  Eigen::VectorXd grad;
  MlpWorkspace work;
  double prev = std::numeric_limits<double>::infinity();
  int rising = 0;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    const double loss = mlp_loss_grad(p, x, y, hidden, spec.l2, task, &grad, &work);
    if (!std::isfinite(loss)) throw TrainingError("mlp: loss became non-finite at epoch " + std::to_string(epoch));
    rising = loss > prev ? rising + 1 : 0;
    if (rising >= 20) throw TrainingError("mlp: loss increased for 20 consecutive epochs (diverged)");
    prev = loss;
    p -= spec.learning_rate * grad;
  }
  return p;
}

}  // namespace model_detail

/// Fits `spec` to (x, y). Classification targets must be 0/1 with both
/// classes present. Training is deterministic given spec.seed.
inline Predictor train(const ModelSpec& spec, const FeatureTable& x, const Eigen::VectorXd& y, Task task,
                       const Regime& regime = {}) {
  spec.validate(task);
  if (x.values.rows() != y.size()) throw DataError("train: feature and target lengths differ");
  if (x.values.rows() < 10) throw DataError("train: need at least 10 rows");
  if (static_cast<std::size_t>(x.values.cols()) != x.names.size()) throw DataError("train: feature name count mismatch");
  if (task == Task::classification) {
    bool zero = false, one = false;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) throw DataError("train: classification targets must be 0 or 1");
      zero |= y[i] == 0.0;
      one |= y[i] == 1.0;
    }
    if (!(zero && one)) throw DataError("train: classification target has a single class");
  }
  Predictor p{spec, regime, task, x.names, {}};
  switch (spec.kind) {
    case ModelKind::linear: p.params = model_detail::fit_linear(x.values, y); break;
    case ModelKind::logistic: p.params = model_detail::fit_logistic(x.values, y, spec.l2); break;
    case ModelKind::mlp: p.params = model_detail::fit_mlp(x.values, y, spec, task); break;
  }
  return p;
}

/// Raw model output for an already-checked matrix (regression value or
/// probability).
inline Eigen::VectorXd predict_matrix(const Predictor& p, const Eigen::MatrixXd& x) {
  if (x.cols() != static_cast<Eigen::Index>(p.feature_names.size())) throw DataError("predict: feature count mismatch");
  Eigen::VectorXd out;
  if (p.spec.kind == ModelKind::mlp) {
    out = model_detail::mlp_output(p.params, x, p.spec.hidden);
  } else {
    out = (x * p.params.tail(x.cols())).array() + p.params[0];
  }
  if (p.task == Task::classification) out = out.unaryExpr([](double z) { return model_detail::sigmoid(z); });
  return out;
}

/// Rejects inputs whose columns differ from the training features in name
/// or order.
inline Eigen::VectorXd predict(const Predictor& p, const FeatureTable& x) {
  if (x.names != p.feature_names) {
    std::string want, got;
    for (const auto& n : p.feature_names) want += " " + n;
    for (const auto& n : x.names) got += " " + n;
    throw DataError("predict: column mismatch; expected [" + want + " ] got [" + got + " ]");
  }
  return predict_matrix(p, x.values);
}

/// Max relative error between the analytic MLP gradient at `params` and
/// central finite differences with step h.
inline double grad_check(const ModelSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Task task,
                         const Eigen::VectorXd& params, double h = 1e-5) {
  if (spec.kind != ModelKind::mlp) throw ConfigError("grad_check: only defined for mlp");
  Eigen::VectorXd analytic;
  model_detail::mlp_loss_grad(params, x, y, spec.hidden, spec.l2, task, &analytic);
  double worst = 0.0;
  Eigen::VectorXd probe = params;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    probe[i] = params[i] + h;
    const double up = model_detail::mlp_loss_grad(probe, x, y, spec.hidden, spec.l2, task, nullptr);
    probe[i] = params[i] - h;
    const double down = model_detail::mlp_loss_grad(probe, x, y, spec.hidden, spec.l2, task, nullptr);
    probe[i] = params[i];
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

/// Same check at the initial parameters drawn from spec.seed.
inline double grad_check(const ModelSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         Task task = Task::regression, double h = 1e-5) {
  return grad_check(spec, x, y, task, model_detail::mlp_init(x.cols(), spec.hidden, spec.seed), h);
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json spec_to_json(const ModelSpec& s) {
  nlohmann::json j{{"kind", to_string(s.kind)}};
  if (s.kind == ModelKind::mlp) {
    j["hidden"] = s.hidden;
    j["learning_rate"] = s.learning_rate;
    j["epochs"] = s.epochs;
    j["seed"] = s.seed;
  }
  if (s.kind != ModelKind::linear) j["l2"] = s.l2;
  return j;
}

inline ModelSpec spec_from_json(const nlohmann::json& j) {
  try {
    ModelSpec s;
    s.kind = parse_model_kind(j.at("kind").get<std::string>());
    s.hidden = j.value("hidden", s.hidden);
    s.learning_rate = j.value("learning_rate", s.learning_rate);
    s.epochs = j.value("epochs", s.epochs);
    s.l2 = j.value("l2", s.l2);
    s.seed = j.value("seed", s.seed);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model spec: ") + e.what());
  }
}

inline nlohmann::json predictor_to_json(const Predictor& p) {
  return {{"spec", spec_to_json(p.spec)},
          {"regime", {{"kind", to_string(p.regime.kind)}, {"level", p.regime.level}, {"excluded", p.regime.excluded}}},
          {"task", to_string(p.task)},
          {"feature_names", p.feature_names},
          {"params", std::vector<double>(p.params.data(), p.params.data() + p.params.size())}};
}

inline Predictor predictor_from_json(const nlohmann::json& j) {
  try {
    Predictor p;
    p.spec = spec_from_json(j.at("spec"));
    const auto& r = j.at("regime");
    p.regime.kind = parse_regime_kind(r.at("kind").get<std::string>());
    p.regime.level = r.at("level").get<int>();
    p.regime.excluded = r.at("excluded").get<std::set<std::string>>();
    p.task = j.at("task").get<std::string>() == "classification" ? Task::classification : Task::regression;
    p.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto params = j.at("params").get<std::vector<double>>();
    p.params = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("predictor json: ") + e.what());
  }
}

/// Predictions as "row_id,score" CSV for exchange with external models.
inline std::string predictions_to_csv(const std::vector<std::size_t>& row_ids, const Eigen::VectorXd& scores) {
  if (row_ids.size() != static_cast<std::size_t>(scores.size())) throw DataError("predictions: length mismatch");
  std::string out = "row_id,score\n";
  for (std::size_t i = 0; i < row_ids.size(); ++i)
    out += std::to_string(row_ids[i]) + "," + csv::format_double(scores[static_cast<Eigen::Index>(i)]) + "\n";
  return out;
}

inline std::pair<std::vector<std::size_t>, Eigen::VectorXd> predictions_from_csv(std::string_view text) {
  const auto t = csv::parse(text);
  if (t.header != csv::Record{"row_id", "score"}) throw DataError("predictions csv: expected header row_id,score");
  std::vector<std::size_t> ids;
  Eigen::VectorXd scores(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    double id = 0, s = 0;
    if (!detail::parse_number(t.rows[i][0], id) || id < 0 || id != std::floor(id) ||
        !detail::parse_number(t.rows[i][1], s))
      throw DataError("predictions csv: bad row " + std::to_string(i + 1));
    ids.push_back(static_cast<std::size_t>(id));
    scores[static_cast<Eigen::Index>(i)] = s;
  }
  return {std::move(ids), std::move(scores)};
}

}  // namespace cfair

#pragma once

// End-to-end audit: config -> data -> graph -> SCM -> regimes x models ->
// metrics -> report files.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
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
#include "cfair/metrics.hpp"
#include "cfair/models.hpp"
#include "cfair/scm.hpp"
#include "cfair/svg.hpp"

namespace cfair {

struct NamedModel {
  std::string name;
  ModelSpec spec;
};

struct AuditConfig {
  std::string name;
  std::string data_path;
  std::string schema_path;
  std::string recipe = "identity";
  std::vector<std::string> sensitive;  // empty: keep the roles set by schema and recipe
  std::string graph_source = "discover";
  std::string graph_path;
  double tau = 0.1;
  int level = 1;
  std::vector<RegimeKind> regimes;
  std::vector<NamedModel> models;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  std::vector<std::string> latent_outcomes;
  EmOptions em;
  bool parallel = true;
  std::string output;
  nlohmann::json echo;  // as written, paths unresolved
};

namespace audit_detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace audit_detail

/// Parses and validates a config object. Relative paths are resolved
/// against `base_dir`.
inline AuditConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using audit_detail::resolve;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> known{"name",   "dataset", "sensitive", "graph", "threshold", "level",
                                           "regimes", "models", "split",     "latent", "parallel", "output"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");

  AuditConfig c;
  c.echo = j;
  try {
    c.name = j.value("name", std::string("audit"));
    const auto& ds = j.at("dataset");
    c.data_path = resolve(base_dir, ds.at("path").get<std::string>());
    c.schema_path = resolve(base_dir, ds.at("schema").get<std::string>());
    c.recipe = ds.value("recipe", c.recipe);
    c.sensitive = j.value("sensitive", std::vector<std::string>{});

    const auto graph = j.value("graph", nlohmann::json{{"source", "discover"}});
    c.graph_source = graph.at("source").get<std::string>();
    if (c.graph_source == "file") {
      if (!graph.contains("path")) throw ConfigError("config: graph source 'file' needs a path");
      c.graph_path = resolve(base_dir, graph.at("path").get<std::string>());
    } else if (c.graph_source != "discover") {
      throw ConfigError("config: graph source must be 'discover' or 'file'");
    }
    c.tau = j.value("threshold", c.tau);
    c.level = j.value("level", c.level);

    if (!j.contains("regimes")) throw ConfigError("config: 'regimes' is required");
    for (const auto& r : j.at("regimes")) c.regimes.push_back(parse_regime_kind(r.get<std::string>()));
    if (!j.contains("models")) throw ConfigError("config: 'models' is required");
    for (const auto& m : j.at("models")) {
      NamedModel nm{m.value("name", m.value("kind", std::string())), spec_from_json(m)};
      c.models.push_back(std::move(nm));
    }

    if (j.contains("split")) {
      const auto& s = j.at("split");
      c.test_fraction = s.value("test_fraction", c.test_fraction);
      c.seed = s.value("seed", c.seed);
    }
    if (j.contains("latent")) {
      const auto& l = j.at("latent");
      c.latent_outcomes = l.value("outcomes", std::vector<std::string>{});
      c.em.max_iterations = l.value("max_iterations", c.em.max_iterations);
      c.em.tolerance = l.value("tolerance", c.em.tolerance);
    }
    c.parallel = j.value("parallel", c.parallel);
    c.output = j.value("output", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (c.data_path.empty() || c.schema_path.empty()) throw ConfigError("config: dataset path and schema are required");
  if (!(c.tau >= 0.0) || !std::isfinite(c.tau)) throw ConfigError("config: threshold must be >= 0");
  if (c.level != 1 && c.level != 2) throw ConfigError("config: level must be 1 or 2");
  if (c.level == 2 && c.recipe != "law_school") throw ConfigError("config: level 2 is only available with recipe law_school");
  if (c.regimes.empty()) throw ConfigError("config: at least one regime is required");
  if (c.models.empty()) throw ConfigError("config: at least one model is required");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) throw ConfigError("config: split.test_fraction must lie in (0, 1)");
  if (c.em.max_iterations <= 0 || !(c.em.tolerance > 0)) throw ConfigError("config: invalid latent EM settings");
  std::set<RegimeKind> seen_r(c.regimes.begin(), c.regimes.end());
  if (seen_r.size() != c.regimes.size()) throw ConfigError("config: duplicate regime");
  std::set<std::string> seen_m;
  for (const auto& m : c.models) {
    if (m.name.empty()) throw ConfigError("config: model name is empty");
    if (!seen_m.insert(m.name).second) throw ConfigError("config: duplicate model name '" + m.name + "'");
  }
  if (c.level == 2 && c.latent_outcomes.empty()) c.latent_outcomes = {"lsat", "ugpa", "zfygpa"};
  return c;
}

inline AuditConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = csv::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------------------

struct TableRow {
  std::string dataset, regime, model, metric;
  std::optional<double> value;
  std::string status = "ok";
  std::string reason;
};

struct PlotFile {
  std::string file;
  std::string svg;
};

struct FairnessReport {
  nlohmann::json json;
  std::vector<TableRow> rows;
  WeightedDag dag;
  std::set<std::string> sensitive;
  std::vector<PlotFile> plots;
};

using AuditLog = std::function<void(const std::string&)>;

namespace audit_detail {

/// Runs `f`, tagging any failure with `stage`.
template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

inline std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
  return out;
}

struct CfRow {
  std::size_t test_row;
  std::size_t attribute;  // index into sensitives
  double alt_code;
  NamedRow values;
};

struct Context {
  const AuditConfig* cfg = nullptr;
  Dataset data, train, test;
  EncodedMatrix em_train, em_test;
  std::vector<std::string> sensitives;
  std::string target;
  Task task = Task::regression;
  Eigen::Index target_col = 0;
  WeightedDag dag;
  std::optional<Scm> scm;
  std::optional<LatentScm> latent;
  std::vector<NamedRow> factual;
  std::vector<CfRow> cf;
};

struct PairResult {
  std::string a, b;
  std::size_t na = 0, nb = 0;
  double wd = 0, mmd = 0;
  std::optional<double> abroca, madd;
  std::string abroca_reason;
};

struct AttributeResult {
  std::string attribute;
  std::vector<PairResult> pairs;
  std::size_t headline = 0;
  double cf_consistency = 0;
};

struct Cell {
  std::string regime, model;
  FeaturePlan plan;
  std::vector<AttributeResult> attributes;
  double cf_consistency = 0;
  std::map<std::string, double> performance;
  Eigen::VectorXd predictions;
  nlohmann::json predictor;
};

inline NamedRow row_of(const EncodedMatrix& em, Eigen::Index r) {
  NamedRow row;
  for (std::size_t c = 0; c < em.column_map.size(); ++c) row[em.column_map[c]] = em.values(r, static_cast<Eigen::Index>(c));
  return row;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Model output in reporting units: target units for regression,
/// probability for classification.
inline Eigen::VectorXd output(const Context& ctx, const Predictor& p, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out = predict_matrix(p, x);
  if (ctx.task == Task::regression)
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = ctx.em_train.decode(ctx.target_col, out[i]);
  return out;
}

inline Cell run_cell(const Context& ctx, RegimeKind kind, const NamedModel& model) {
  const auto& cfg = *ctx.cfg;
  Cell cell;
  cell.regime = to_string(kind);
  cell.model = model.name;
  const Regime regime = make_regime(kind, cfg.level, ctx.sensitives, &ctx.dag);
  cell.plan = select_features(ctx.data.columns, regime, &ctx.dag, ctx.latent ? &*ctx.latent : nullptr);

  const auto x_train = cell.plan.apply(ctx.em_train);
  Eigen::VectorXd y(static_cast<Eigen::Index>(ctx.train.rows()));
  const auto& raw_target = ctx.train.values(ctx.target);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    y[i] = ctx.task == Task::classification ? raw_target[static_cast<std::size_t>(i)] : ctx.em_train.values(i, ctx.target_col);
  const Predictor p = train(model.spec, x_train, y, ctx.task, regime);
  cell.predictor = predictor_to_json(p);

  const auto x_test = cell.plan.apply(ctx.em_test);
  cell.predictions = output(ctx, p, x_test.values);

  // Counterfactual flips of every test instance to every other value of
  // every sensitive attribute.
  Eigen::MatrixXd x_cf(static_cast<Eigen::Index>(ctx.cf.size()), static_cast<Eigen::Index>(cell.plan.names.size()));
  for (std::size_t i = 0; i < ctx.cf.size(); ++i) x_cf.row(static_cast<Eigen::Index>(i)) = cell.plan.apply(ctx.cf[i].values);
  const Eigen::VectorXd cf_pred = output(ctx, p, x_cf);
  std::vector<std::vector<double>> fact_by_attr(ctx.sensitives.size()), cf_by_attr(ctx.sensitives.size());
  std::vector<double> fact_all, cf_all;
  for (std::size_t i = 0; i < ctx.cf.size(); ++i) {
    const double f = cell.predictions[static_cast<Eigen::Index>(ctx.cf[i].test_row)];
    const double c = cf_pred[static_cast<Eigen::Index>(i)];
    fact_by_attr[ctx.cf[i].attribute].push_back(f);
    cf_by_attr[ctx.cf[i].attribute].push_back(c);
    fact_all.push_back(f);
    cf_all.push_back(c);
  }
  cell.cf_consistency = cf_consistency(fact_all, cf_all);

  std::vector<double> truth;
  const auto& test_target = ctx.test.values(ctx.target);
  truth.assign(test_target.begin(), test_target.end());
  const auto preds = to_std(cell.predictions);
  cell.performance = performance(preds, truth, ctx.task == Task::classification);

  for (std::size_t a = 0; a < ctx.sensitives.size(); ++a) {
    const auto& spec = ctx.test.column(ctx.sensitives[a]);
    const auto& codes = ctx.test.values(ctx.sensitives[a]);
    std::vector<std::vector<double>> scores(spec.categories.size()), labels(spec.categories.size());
    for (std::size_t r = 0; r < codes.size(); ++r) {
      scores[static_cast<std::size_t>(codes[r])].push_back(preds[r]);
      labels[static_cast<std::size_t>(codes[r])].push_back(truth[r]);
    }
    AttributeResult ar;
    ar.attribute = ctx.sensitives[a];
    ar.cf_consistency = fact_by_attr[a].empty() ? 0.0 : cf_consistency(fact_by_attr[a], cf_by_attr[a]);
    for (std::size_t u = 0; u < scores.size(); ++u) {
      for (std::size_t v = u + 1; v < scores.size(); ++v) {
        if (scores[u].empty() || scores[v].empty()) continue;
        PairResult pr;
        pr.a = spec.categories[u];
        pr.b = spec.categories[v];
        pr.na = scores[u].size();
        pr.nb = scores[v].size();
        pr.wd = wasserstein1(scores[u], scores[v]);
        pr.mmd = mmd_rbf(scores[u], scores[v]);
        if (ctx.task == Task::classification) {
          pr.madd = madd(scores[u], scores[v]);
          try {
            pr.abroca = abroca(scores[u], labels[u], scores[v], labels[v]);
          } catch (const MetricUndefined& e) {
            pr.abroca_reason = e.what();
          }
        }
        ar.pairs.push_back(std::move(pr));
      }
    }
    if (ar.pairs.empty())
      throw MetricUndefined("attribute '" + ar.attribute + "' has fewer than two groups in the test split");
    for (std::size_t k = 1; k < ar.pairs.size(); ++k)
      if (ar.pairs[k].wd > ar.pairs[ar.headline].wd) ar.headline = k;
    cell.attributes.push_back(std::move(ar));
  }
  return cell;
}

/// The attribute whose headline pair has the largest WD.
inline const AttributeResult& headline_attribute(const Cell& cell) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < cell.attributes.size(); ++a)
    if (cell.attributes[a].pairs[cell.attributes[a].headline].wd >
        cell.attributes[best].pairs[cell.attributes[best].headline].wd)
      best = a;
  return cell.attributes[best];
}

inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

inline nlohmann::json cell_json(const Cell& c, const std::string& skip_reason) {
  nlohmann::json attrs = nlohmann::json::object();
  for (const auto& a : c.attributes) {
    auto pairs = nlohmann::json::array();
    for (const auto& p : a.pairs) {
      nlohmann::json pj{{"a", p.a}, {"b", p.b}, {"n_a", p.na}, {"n_b", p.nb}, {"wd", p.wd}, {"mmd", p.mmd}};
      if (!skip_reason.empty()) {
        pj["abroca"] = nullptr;
        pj["madd"] = nullptr;
      } else {
        pj["abroca"] = opt_json(p.abroca);
        pj["madd"] = opt_json(p.madd);
        if (!p.abroca) pj["abroca_reason"] = p.abroca_reason;
      }
      pairs.push_back(std::move(pj));
    }
    const auto& h = a.pairs[a.headline];
    attrs[a.attribute] = {{"pairs", std::move(pairs)},
                          {"headline_pair", {h.a, h.b}},
                          {"cf_consistency", a.cf_consistency}};
  }
  const auto& ha = headline_attribute(c);
  const auto& hp = ha.pairs[ha.headline];
  nlohmann::json metrics{{"wd", hp.wd}, {"mmd", hp.mmd}, {"cf_consistency", c.cf_consistency}};
  if (skip_reason.empty()) {
    metrics["abroca"] = opt_json(hp.abroca);
    metrics["madd"] = opt_json(hp.madd);
  }
  for (const auto& [k, v] : c.performance) metrics[k] = v;
  nlohmann::json skipped = nlohmann::json::object();
  if (!skip_reason.empty()) {
    skipped["abroca"] = skip_reason;
    skipped["madd"] = skip_reason;
  } else if (!hp.abroca) {
    skipped["abroca"] = hp.abroca_reason;
  }
  return {{"regime", c.regime},
          {"model", c.model},
          {"status", "ok"},
          {"features", c.plan.names},
          {"headline", {{"attribute", ha.attribute}, {"pair", {hp.a, hp.b}}}},
          {"metrics", std::move(metrics)},
          {"skipped", std::move(skipped)},
          {"groups", std::move(attrs)},
          {"predictor", c.predictor}};
}

inline void check_finite(const nlohmann::json& j, const std::string& where) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) throw Error("non-finite number at " + where);
  if (j.is_object())
    for (const auto& [k, v] : j.items()) check_finite(v, where + "/" + k);
  if (j.is_array())
    for (std::size_t i = 0; i < j.size(); ++i) check_finite(j[i], where + "/" + std::to_string(i));
}

inline std::string headline_model(const AuditConfig& cfg, Task task) {
  const auto want = task == Task::regression ? ModelKind::linear : ModelKind::mlp;
  for (const auto& m : cfg.models)
    if (m.spec.kind == want) return m.name;
  std::vector<std::string> names;
  for (const auto& m : cfg.models) names.push_back(m.name);
  return *std::min_element(names.begin(), names.end());
}

}  // namespace audit_detail

/// Runs the full pipeline in memory. Nothing is written; any failure
/// surfaces as a StageError naming the stage.
inline FairnessReport run_audit(const AuditConfig& cfg, const AuditLog& log = {}) {
  using namespace audit_detail;
  auto say = [&](const std::string& m) {
    if (log) log(m);
  };
  Context ctx;
  ctx.cfg = &cfg;
  std::vector<std::string> warnings;

  const Schema schema = staged("dataset/schema", [&] { return read_schema(cfg.schema_path); });
  const Dataset raw = staged("dataset/load", [&] { return load_dataset(cfg.data_path, schema); });
  say("loaded " + std::to_string(raw.rows()) + " rows (" + std::to_string(raw.dropped_rows) + " dropped)");
  ctx.data = staged("dataset/apply_recipe", [&] { return apply_recipe(raw, cfg.recipe); });
  staged("dataset/roles", [&] {
    if (!cfg.sensitive.empty()) {
      for (const auto& s : cfg.sensitive)
        if (!ctx.data.has(s)) throw ConfigError("sensitive attribute '" + s + "' is not a column");
      for (auto& c : ctx.data.columns) {
        const bool listed = std::find(cfg.sensitive.begin(), cfg.sensitive.end(), c.name) != cfg.sensitive.end();
        if (listed) {
          if (c.role == ColumnRole::target) throw ConfigError("sensitive attribute '" + c.name + "' is the target");
          if (c.kind == ColumnKind::numerical) throw ConfigError("sensitive attribute '" + c.name + "' must be categorical");
          c.role = ColumnRole::sensitive;
        } else if (c.role == ColumnRole::sensitive) {
          c.role = ColumnRole::feature;
        }
      }
    }
    validate_schema(ctx.data.columns);
    ctx.data.task = infer_task(ctx.data.columns);
    for (const auto& s : ctx.data.sensitives())
      if (ctx.data.column(s).kind == ColumnKind::numerical)
        throw ConfigError("sensitive attribute '" + s + "' must be categorical");
    return 0;
  });
  ctx.sensitives = ctx.data.sensitives();
  ctx.target = ctx.data.target();
  ctx.task = ctx.data.task;

  staged("dataset/split", [&] {
    std::tie(ctx.train, ctx.test) = split(ctx.data, cfg.test_fraction, cfg.seed);
    return 0;
  });
  staged("dataset/encode", [&] {
    ctx.em_train = encode(ctx.train);
    ctx.em_test = encode(ctx.test, ctx.em_train);
    ctx.target_col = ctx.em_train.column(ctx.target);
    return 0;
  });
  say("split " + std::to_string(ctx.train.rows()) + " train / " + std::to_string(ctx.test.rows()) + " test");

  nlohmann::json graph_json;
  if (cfg.graph_source == "discover") {
    const auto found = staged("graph/discover", [&] { return direct_lingam(ctx.em_train); });
    ctx.dag = staged("graph/threshold", [&] { return threshold_edges(found.dag, cfg.tau); });
    std::vector<std::string> order;
    for (auto k : found.diagnostics.causal_order) order.push_back(ctx.em_train.column_map[k]);
    auto pruned = nlohmann::json::array();
    for (const auto& e : found.dag.edges())
      if (!ctx.dag.weight(e.from, e.to)) pruned.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
    graph_json = {{"source", "discover"},
                  {"threshold", cfg.tau},
                  {"causal_order", order},
                  {"edges_discovered", found.dag.edges().size()},
                  {"edges_kept", ctx.dag.edges().size()},
                  {"edges_pruned", pruned.size()},
                  {"pruned", std::move(pruned)}};
  } else {
    ctx.dag = staged("graph/load", [&] {
      auto g = read_dag(cfg.graph_path);
      for (const auto& n : g.nodes())
        if (!ctx.em_train.has(n)) throw ConfigError("graph node '" + n + "' is not a dataset column");
      return g;
    });
    graph_json = {{"source", "file"},
                  {"threshold", nullptr},
                  {"causal_order", ctx.dag.order()},
                  {"edges_discovered", nullptr},
                  {"edges_kept", ctx.dag.edges().size()},
                  {"edges_pruned", 0},
                  {"pruned", nlohmann::json::array()}};
  }
  graph_json["dag"] = dag_to_json(ctx.dag);
  say("graph: " + std::to_string(ctx.dag.edges().size()) + " edges");

  ctx.scm = staged("scm/fit", [&] { return fit_scm(ctx.dag, ctx.em_train); });
  if (cfg.level == 2) {
    ctx.latent = staged("scm/latent", [&] {
      return fit_latent_scm(ctx.em_train, cfg.latent_outcomes, ctx.sensitives, cfg.em);
    });
    if (!ctx.latent->converged)
      warnings.push_back("latent EM stopped at the iteration cap without meeting the tolerance");
    say("latent model: " + std::to_string(ctx.latent->iterations) + " EM iterations");
  }

  staged("scm/counterfactuals", [&] {
    for (Eigen::Index r = 0; r < ctx.em_test.rows(); ++r) ctx.factual.push_back(row_of(ctx.em_test, r));
    for (std::size_t r = 0; r < ctx.factual.size(); ++r) {
      for (std::size_t a = 0; a < ctx.sensitives.size(); ++a) {
        const auto& name = ctx.sensitives[a];
        const auto col = ctx.em_test.column(name);
        const double factual_code = ctx.test.values(name)[r];
        const auto n_cat = ctx.test.column(name).categories.size();
        for (std::size_t code = 0; code < n_cat; ++code) {
          if (static_cast<double>(code) == factual_code) continue;
          const Intervention iv{name, ctx.em_test.encode_value(col, static_cast<double>(code))};
          NamedRow x = ctx.latent ? counterfactual(*ctx.latent, ctx.factual[r], iv)
                                  : counterfactual(*ctx.scm, ctx.factual[r], iv);
          ctx.cf.push_back({r, a, static_cast<double>(code), std::move(x)});
        }
      }
    }
    if (ctx.cf.empty()) throw DataError("no attainable counterfactual values");
    return 0;
  });

  // Regime x model grid. Each cell is independent; results are reduced in
  // (regime, model) name order.
  std::vector<std::pair<RegimeKind, const NamedModel*>> grid;
  for (auto r : cfg.regimes)
    for (const auto& m : cfg.models) grid.emplace_back(r, &m);
  std::sort(grid.begin(), grid.end(), [](const auto& x, const auto& y) {
    return std::make_pair(to_string(x.first), x.second->name) < std::make_pair(to_string(y.first), y.second->name);
  });
  for (const auto& [r, m] : grid)
    staged("models/" + to_string(r) + "/" + m->name, [&] {
      m->spec.validate(ctx.task);
      return 0;
    });

  auto job = [&ctx](RegimeKind r, const NamedModel* m) {
    return staged("models/" + to_string(r) + "/" + m->name, [&] { return run_cell(ctx, r, *m); });
  };
  std::vector<Cell> cells;
  if (cfg.parallel) {
    std::vector<std::future<Cell>> futures;
    for (const auto& [r, m] : grid) futures.push_back(std::async(std::launch::async, job, r, m));
    std::optional<StageError> first;
    for (auto& f : futures) {
      try {
        cells.push_back(f.get());
      } catch (const StageError& e) {
        if (!first) first = e;
      }
    }
    if (first) throw *first;
  } else {
    for (const auto& [r, m] : grid) cells.push_back(job(r, m));
  }
  for (const auto& c : cells) say("cell " + c.regime + " x " + c.model + " done");

  // Assembly.
  FairnessReport report;
  report.dag = ctx.dag;
  report.sensitive = {ctx.sensitives.begin(), ctx.sensitives.end()};
  const std::string skip = ctx.task == Task::regression ? "regression task" : "";
  const std::string hmodel = headline_model(cfg, ctx.task);

  return staged("report/assemble", [&] {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& s : ctx.sensitives) {
      nlohmann::json all = nlohmann::json::object(), test = nlohmann::json::object();
      const auto& spec = ctx.data.column(s);
      for (const auto& cat : spec.categories) {
        all[cat] = 0;
        test[cat] = 0;
      }
      for (double v : ctx.data.values(s)) all[spec.categories[static_cast<std::size_t>(v)]] = all[spec.categories[static_cast<std::size_t>(v)]].get<int>() + 1;
      for (double v : ctx.test.values(s)) test[spec.categories[static_cast<std::size_t>(v)]] = test[spec.categories[static_cast<std::size_t>(v)]].get<int>() + 1;
      groups[s] = {{"all", std::move(all)}, {"test", std::move(test)}};
    }
    if (raw.dropped_rows > 0)
      warnings.push_back(std::to_string(raw.dropped_rows) + " rows dropped for missing values");

    nlohmann::json dataset{{"name", cfg.name},
                           {"recipe", cfg.recipe},
                           {"task", to_string(ctx.task)},
                           {"target", ctx.target},
                           {"sensitive", ctx.sensitives},
                           {"rows_loaded", raw.rows() + raw.dropped_rows},
                           {"rows_dropped", raw.dropped_rows},
                           {"rows", ctx.data.rows()},
                           {"train_rows", ctx.train.rows()},
                           {"test_rows", ctx.test.rows()},
                           {"group_frequencies", std::move(groups)}};
    if (cfg.recipe == "oulad_bbb")
      dataset["target_encoding"] = {{"0", "Fail|Withdrawn"}, {"1", "Pass|Distinction"}};

    nlohmann::json hyper = nlohmann::json::object();
    for (const auto& m : cfg.models) hyper[m.name] = spec_to_json(m.spec);

    auto cell_list = nlohmann::json::array();
    for (const auto& c : cells) cell_list.push_back(cell_json(c, skip));

    std::vector<std::string> kde_files;
    for (const auto& c : cells) {
      if (c.model != hmodel) continue;
      for (const auto& a : c.attributes) {
        const auto& hp = a.pairs[a.headline];
        const auto& spec = ctx.test.column(a.attribute);
        const auto& codes = ctx.test.values(a.attribute);
        std::vector<double> ga, gb;
        for (std::size_t r = 0; r < codes.size(); ++r) {
          const auto& lab = spec.categories[static_cast<std::size_t>(codes[r])];
          if (lab == hp.a) ga.push_back(c.predictions[static_cast<Eigen::Index>(r)]);
          if (lab == hp.b) gb.push_back(c.predictions[static_cast<Eigen::Index>(r)]);
        }
        std::vector<double> grid_pts;
        if (ctx.task == Task::classification) {
          grid_pts = linspace(0.0, 1.0, 512);
        } else {
          const double h = std::max(silverman_bandwidth(ga), silverman_bandwidth(gb));
          double lo = std::min(*std::min_element(ga.begin(), ga.end()), *std::min_element(gb.begin(), gb.end()));
          double hi = std::max(*std::max_element(ga.begin(), ga.end()), *std::max_element(gb.begin(), gb.end()));
          grid_pts = linspace(lo - 4 * h, hi + 4 * h, 512);
        }
        std::vector<LabeledCurve> curves{{kde(ga, grid_pts), a.attribute + " = " + hp.a},
                                         {kde(gb, grid_pts), a.attribute + " = " + hp.b}};
        const std::string file =
            "kde_" + c.regime + "_" + slug(a.attribute) + "_" + slug(hp.a) + "_vs_" + slug(hp.b) + ".svg";
        report.plots.push_back({file, render_kde_svg(curves, c.regime + " (" + c.model + "): " + a.attribute)});
        kde_files.push_back(file);
      }
    }

    for (const auto& c : cells) {
      const auto& ha = headline_attribute(c);
      const auto& hp = ha.pairs[ha.headline];
      auto add = [&](const std::string& metric, std::optional<double> v, const std::string& reason = "") {
        TableRow row{cfg.name, c.regime, c.model, metric, v, v ? "ok" : "skipped", v ? "" : reason};
        report.rows.push_back(std::move(row));
      };
      add("wd", hp.wd);
      add("mmd", hp.mmd);
      add("abroca", skip.empty() ? hp.abroca : std::nullopt, skip.empty() ? hp.abroca_reason : skip);
      add("madd", skip.empty() ? hp.madd : std::nullopt, skip);
      add("cf_consistency", c.cf_consistency);
      for (const auto& [k, v] : c.performance) add(k, v);
    }

    nlohmann::json metadata{
        {"mmd", "square root of the biased V-statistic; RBF kernel; median-heuristic bandwidth on pooled pairwise distances"},
        {"wd", "exact one-dimensional Wasserstein-1 between test-split prediction groups"},
        {"madd", "Gaussian KDE on 512 points over [0,1], each density renormalized, trapezoid of the absolute difference"},
        {"abroca", "linear interpolation in ROC space on the merged FPR grid"},
        {"grouping", "test predictions partitioned by the factual sensitive value; headline = pair with the largest WD"},
        {"units", ctx.task == Task::regression ? "target units" : "predicted probability"},
        {"scm", "equations refit by least squares on the train split; noise = RMS residual"},
        {"counterfactuals", cfg.level == 2 ? "one-factor linear-Gaussian model fitted by EM (approximation of full Bayesian inference)"
                                           : "abduction-action-prediction on the linear SCM"},
        {"accuracy_threshold", 0.5},
        {"headline_model", hmodel},
        {"hyperparameters", std::move(hyper)}};

    nlohmann::json j{{"schema_version", "1"},
                     {"config", cfg.echo},
                     {"dataset", std::move(dataset)},
                     {"graph", std::move(graph_json)},
                     {"scm", scm_to_json(*ctx.scm)},
                     {"cells", std::move(cell_list)},
                     {"kde_files", kde_files},
                     {"metadata", std::move(metadata)},
                     {"warnings", warnings}};
    if (ctx.latent) j["latent"] = latent_to_json(*ctx.latent);
    check_finite(j, "report");
    report.json = std::move(j);
    return report;
  });
}

/// Writes report.json, tables.csv, dag.dot, dag.json and the KDE plots
/// into `dir` (created if needed). Returns the file names written.
inline std::vector<std::string> emit_report(const FairnessReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory '" + dir + "'");

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("report.json", r.json.dump(2) + "\n");
  std::string table = csv::format_record({"dataset", "regime", "model", "metric", "value", "status", "reason"});
  for (const auto& row : r.rows)
    table += csv::format_record({row.dataset, row.regime, row.model, row.metric,
                                 row.value ? csv::format_double(*row.value) : "", row.status, row.reason});
  files.emplace_back("tables.csv", table);
  files.emplace_back("dag.dot", dag_to_dot(r.dag, r.sensitive));
  files.emplace_back("dag.json", dag_to_json(r.dag).dump(2) + "\n");
  for (const auto& p : r.plots) files.emplace_back(p.file, p.svg);

  std::vector<std::string> names;
  for (const auto& [name, body] : files) {
    const auto path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw Error("cannot write '" + path.string() + "'");
    names.push_back(name);
  }
  return names;
}

}  // namespace cfair

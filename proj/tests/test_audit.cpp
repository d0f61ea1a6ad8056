#include <cstdlib>
#include <set>

#include <gtest/gtest.h>

#include "cfair/audit.hpp"
#include "helpers.hpp"

using namespace cfair;
using testing_util::scratch;
using testing_util::slurp;
using testing_util::source;
using testing_util::write_file;

namespace {

AuditConfig fixture(const std::string& name) { return load_config(source("configs/fixture_" + name + ".json").string()); }

const nlohmann::json& cell(const nlohmann::json& report, const std::string& regime, const std::string& model) {
  for (const auto& c : report.at("cells"))
    if (c.at("regime") == regime && c.at("model") == model) return c;
  throw std::runtime_error("no cell " + regime + "/" + model);
}

nlohmann::json minimal_config() {
  return {{"dataset", {{"path", "x.csv"}, {"schema", "x.schema.json"}}},
          {"regimes", {"unfair"}},
          {"models", {{{"kind", "linear"}}}}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CFAIR_AUDIT_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

class FixtureAudit : public ::testing::TestWithParam<std::string> {};

TEST_P(FixtureAudit, ProducesFullGridAndDeclaredFiles) {
  const auto report = run_audit(fixture(GetParam()));
  ASSERT_EQ(report.json.at("cells").size(), 6u);
  const auto dir = scratch();
  const auto files = emit_report(report, dir.string());
  std::set<std::string> on_disk;
  for (const auto& e : std::filesystem::directory_iterator(dir)) on_disk.insert(e.path().filename().string());
  EXPECT_EQ(on_disk, std::set<std::string>(files.begin(), files.end()));
  for (const auto* f : {"report.json", "tables.csv", "dag.dot", "dag.json"}) EXPECT_TRUE(on_disk.count(f)) << f;
  EXPECT_EQ(report.json.at("kde_files").size(), report.plots.size());
  EXPECT_EQ(report.plots.size(), 3u * report.json.at("dataset").at("sensitive").size());
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "report.json")), report.json);
}

TEST_P(FixtureAudit, CounterfactualRegimeIsInvariantAndFairer) {
  const auto report = run_audit(fixture(GetParam()));
  const auto& j = report.json;
  const std::string headline = j.at("metadata").at("headline_model");
  for (const auto& c : j.at("cells")) {
    if (c.at("regime") != "counterfactual") continue;
    // Level 2 flips change the latent-adjusted inputs only through the
    // posterior, which stays put, so the invariance holds there too.
    EXPECT_LE(c.at("metrics").at("cf_consistency").get<double>(), 1e-12) << c.at("model");
  }
  EXPECT_GT(cell(j, "unfair", headline).at("metrics").at("cf_consistency").get<double>(), 0.0);
  EXPECT_LT(cell(j, "counterfactual", headline).at("metrics").at("wd").get<double>(),
            cell(j, "unfair", headline).at("metrics").at("wd").get<double>());
}

TEST_P(FixtureAudit, RerunAndSerialExecutionAreByteIdentical) {
  auto cfg = fixture(GetParam());
  const auto a = run_audit(cfg).json.dump(2);
  EXPECT_EQ(run_audit(cfg).json.dump(2), a);
  cfg.parallel = false;
  EXPECT_EQ(run_audit(cfg).json.dump(2), a);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, FixtureAudit, ::testing::Values("law", "oulad", "student"));

TEST(Audit, RegressionSkipsClassificationMetrics) {
  const auto report = run_audit(fixture("student"));
  std::size_t skipped = 0;
  for (const auto& r : report.rows) {
    if (r.metric == "abroca" || r.metric == "madd") {
      EXPECT_EQ(r.status, "skipped");
      EXPECT_FALSE(r.value);
      EXPECT_EQ(r.reason, "regression task");
      ++skipped;
    }
  }
  EXPECT_EQ(skipped, 12u);
  EXPECT_EQ(cell(report.json, "unfair", "linear").at("skipped").at("abroca"), "regression task");
}

TEST(Audit, ClassificationReportsEveryMetric) {
  const auto report = run_audit(fixture("oulad"));
  EXPECT_EQ(report.json.at("dataset").at("task"), "classification");
  for (const auto& c : report.json.at("cells"))
    for (const auto* m : {"wd", "mmd", "abroca", "madd", "accuracy", "auroc"})
      EXPECT_TRUE(c.at("metrics").at(m).is_number()) << m;
}

TEST(Audit, UnknownRecipeFailsInItsStage) {
  auto cfg = fixture("student");
  cfg.recipe = "nope";
  try {
    run_audit(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "dataset/apply_recipe");
  }
}

TEST(Audit, ModelTaskMismatchFailsInModelStage) {
  auto cfg = fixture("student");
  cfg.models = {{"logistic", {ModelKind::logistic}}};
  try {
    run_audit(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage().rfind("models/", 0), 0u) << e.stage();
  }
}

TEST(Audit, UnfairRegimeDependsOnSensitiveAttribute) {
  const auto report = run_audit(fixture("student"));
  const auto& c = cell(report.json, "unfair", "linear");
  const auto& features = c.at("features");
  EXPECT_NE(std::find(features.begin(), features.end(), "gender"), features.end());
  EXPECT_GT(c.at("metrics").at("cf_consistency").get<double>(), 0.01);
  const auto& cf = cell(report.json, "counterfactual", "linear").at("features");
  EXPECT_EQ(std::find(cf.begin(), cf.end(), "gender"), cf.end());
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_NO_THROW(config_from_json(minimal_config()));
  auto bad = [](auto mutate) {
    auto j = minimal_config();
    mutate(j);
    return j;
  };
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["bogus"] = 1; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["threshold"] = -0.1; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["level"] = 3; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["level"] = 2; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["regimes"] = nlohmann::json::array(); })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["regimes"] = {"unfair", "unfair"}; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["regimes"] = {"fair"}; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["models"] = {{{"kind", "linear"}}, {{"kind", "linear"}}}; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["models"] = {{{"kind", "forest"}}}; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["split"] = {{"test_fraction", 1.0}}; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["graph"] = {{"source", "file"}}; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j["graph"] = {{"source", "oracle"}}; })), ConfigError);
  EXPECT_THROW(config_from_json(bad([](auto& j) { j.erase("dataset"); })), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::array()), ConfigError);

  const auto c = config_from_json(minimal_config(), "/base");
  EXPECT_EQ(c.data_path, "/base/x.csv");
  EXPECT_EQ(c.echo, minimal_config());
  EXPECT_EQ(c.models.at(0).name, "linear");
}

TEST(Config, LoadConfigReportsUnreadableAndInvalidFiles) {
  const auto dir = scratch();
  EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
  EXPECT_THROW(load_config(write_file(dir / "broken.json", "{ not json")), ConfigError);
}

TEST(Svg, RendersCurvesAndRejectsEmptyInput) {
  const auto grid = linspace(0, 1, 64);
  const auto a = kde(std::vector<double>{0.2, 0.3, 0.35}, grid);
  const auto svg = render_kde_svg({{a, "F"}, {a, "M & <other>"}}, "unfair: gender");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("M &amp; &lt;other&gt;"), std::string::npos);
  std::size_t paths = 0;
  for (auto pos = svg.find("<path"); pos != std::string::npos; pos = svg.find("<path", pos + 1)) ++paths;
  EXPECT_EQ(paths, 2u);
  EXPECT_NO_THROW(render_kde_svg({{a, "only"}}, "single"));
  EXPECT_THROW(render_kde_svg({}, "empty"), Error);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch();
  EXPECT_EQ(run_cli("run --config " + source("configs/fixture_student.json").string() + " --out " + (dir / "ok").string()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "ok" / "report.json"));
  EXPECT_EQ(run_cli("run --config " + (dir / "missing.json").string() + " --out " + (dir / "x").string()), 1);
  EXPECT_EQ(run_cli("run --out " + (dir / "x").string()), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);

  auto j = nlohmann::json::parse(slurp(source("configs/fixture_student.json")));
  j["dataset"]["path"] = source("data/fixtures/student.csv").string();
  j["dataset"]["schema"] = source("data/fixtures/student.schema.json").string();
  j["dataset"]["recipe"] = "nope";
  const auto cfg = write_file(dir / "bad_recipe.json", j.dump());
  EXPECT_EQ(run_cli("run --config " + cfg + " --out " + (dir / "y").string()), 2);
  j["dataset"]["recipe"] = "student_por";
  j["dataset"]["path"] = (dir / "absent.csv").string();
  EXPECT_EQ(run_cli("run --config " + write_file(dir / "bad_data.json", j.dump()) + " --out " + (dir / "z").string()), 2);
}

// Writes the synthetic mini-datasets, schemas and configs under
// data/fixtures and configs/ of the given root (default: current dir).
//
// Every dataset comes from a known SCM in which the sensitive attribute
// reaches the target both directly and through mediators.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfair/csv.hpp"
#include "cfair/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write(const fs::path& p, const std::string& body) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out) throw std::runtime_error("cannot write " + p.string());
  std::printf("wrote %s\n", p.string().c_str());
}

std::string rows_to_csv(const std::vector<cfair::csv::Record>& rows) {
  std::string s;
  for (const auto& r : rows) s += cfair::csv::format_record(r);
  return s;
}

json column(const std::string& name, const std::string& kind, const std::string& role,
            std::vector<std::string> categories = {}) {
  json c{{"name", name}, {"kind", kind}, {"role", role}};
  if (!categories.empty()) c["categories"] = std::move(categories);
  return c;
}

json models(const std::string& first) {
  return json::array({{{"kind", first}}, {{"kind", "mlp"}}});
}

// Law-School-like: a latent ability K drives all three scores; race and
// gender shift each of them.
void law(const fs::path& root) {
  cfair::Rng rng(101);
  std::vector<cfair::csv::Record> rows{{"race", "gender", "lsat", "ugpa", "zfygpa", "first_pf"}};
  for (int i = 0; i < 300; ++i) {
    const double r = rng.uniform() < 0.3 ? 1.0 : 0.0;
    const double g = rng.uniform() < 0.55 ? 1.0 : 0.0;
    const double k = rng.normal();
    const double ugpa = 3.2 + 0.25 * k - 0.35 * r + 0.05 * g + rng.normal(0, 0.2);
    const double lsat = 36.0 + 4.0 * k - 8.0 * r + 1.0 * g + rng.normal(0, 2.0);
    const double fya = 0.8 * k - 1.0 * r + 0.1 * g + rng.normal(0, 0.4);
    rows.push_back({r > 0 ? "Non-White" : "White", g > 0 ? "Male" : "Female", fixed(lsat, 1), fixed(ugpa, 2),
                    fixed(fya, 3), rng.uniform() < 0.9 ? "1" : "0"});
  }
  write(root / "data/fixtures/law.csv", rows_to_csv(rows));

  json schema = json::array({column("race", "binary", "sensitive", {"White", "Non-White"}),
                             column("gender", "binary", "sensitive", {"Female", "Male"}),
                             column("lsat", "numerical", "feature"), column("ugpa", "numerical", "feature"),
                             column("zfygpa", "numerical", "target"),
                             column("first_pf", "binary", "ignore", {"0", "1"})});
  write(root / "data/fixtures/law.schema.json", schema.dump(2) + "\n");

  json edges = json::array();
  for (const std::string a : {"race", "gender"})
    for (const std::string b : {"ugpa", "lsat", "zfygpa"}) edges.push_back({{"from", a}, {"to", b}});
  json graph{{"nodes", {"race", "gender", "ugpa", "lsat", "zfygpa"}}, {"edges", edges}};
  write(root / "data/fixtures/law_graph.json", graph.dump(2) + "\n");

  json cfg{{"name", "fixture_law"},
           {"dataset", {{"path", "../data/fixtures/law.csv"}, {"schema", "../data/fixtures/law.schema.json"}, {"recipe", "law_school"}}},
           {"graph", {{"source", "file"}, {"path", "../data/fixtures/law_graph.json"}}},
           {"level", 2},
           {"regimes", {"unfair", "unaware", "counterfactual"}},
           {"models", models("linear")},
           {"split", {{"test_fraction", 0.2}, {"seed", 7}}}};
  write(root / "configs/fixture_law.json", cfg.dump(2) + "\n");
}

// OULAD-like studentInfo table with three modules; only BBB survives the
// recipe. Disability lowers credits and the pass probability directly.
void oulad(const fs::path& root) {
  cfair::Rng rng(202);
  const std::vector<std::string> edu{"No Formal quals", "Lower Than A Level", "A Level or Equivalent",
                                     "HE Qualification", "Post Graduate Qualification"};
  const std::vector<std::string> imd{"0-10%",  "10-20",  "20-30%", "30-40%", "40-50%",
                                     "50-60%", "60-70%", "70-80%", "80-90%", "90-100%"};
  const std::vector<std::string> age{"0-35", "35-55", "55<="};
  std::vector<cfair::csv::Record> rows{{"code_module", "code_presentation", "id_student", "gender", "highest_education",
                                        "imd_band", "age_band", "studied_credits", "disability", "final_result"}};
  for (int i = 0; i < 460; ++i) {
    const double m = rng.uniform();
    const std::string module = m < 0.2 ? "AAA" : m < 0.85 ? "BBB" : "CCC";
    const bool male = rng.uniform() < 0.5;
    const bool disabled = rng.uniform() < 0.15;
    const double a = rng.uniform();
    const int age_code = a < 0.7 ? 0 : a < 0.98 ? 1 : 2;
    const int imd_code = static_cast<int>(rng.below(10));
    const int edu_code = std::clamp(static_cast<int>(std::lround(0.8 + 0.25 * imd_code + rng.uniform(-1.5, 1.5))), 0, 4);
    const double credits = 60.0 + 30.0 * static_cast<double>(rng.below(3)) + 30.0 * (age_code > 0) - 30.0 * disabled;
    const double u = rng.uniform(1e-12, 1.0 - 1e-12);
    const double logit = 0.1 + 0.45 * (edu_code - 2) + 0.1 * (imd_code - 4.5) - 1.6 * disabled -
                         0.012 * (credits - 90.0) + 0.3 * (age_code > 0) + std::log(u / (1.0 - u));
    std::string result;
    if (logit > 0)
      result = rng.uniform() < 0.8 ? "Pass" : "Distinction";
    else
      result = rng.uniform() < 0.45 ? "Fail" : "Withdrawn";
    const std::string band = i % 97 == 13 ? "" : imd[static_cast<std::size_t>(imd_code)];
    rows.push_back({module, rng.uniform() < 0.5 ? "2013J" : "2014J", std::to_string(100000 + i * 37), male ? "M" : "F",
                    edu[static_cast<std::size_t>(edu_code)], band, age[static_cast<std::size_t>(age_code)],
                    fixed(credits, 0), disabled ? "Y" : "N", result});
  }
  write(root / "data/fixtures/oulad.csv", rows_to_csv(rows));

  json schema = json::array({column("code_module", "categorical", "feature", {"AAA", "BBB", "CCC"}),
                             column("code_presentation", "categorical", "feature", {"2013J", "2014J"}),
                             column("id_student", "numerical", "ignore"),
                             column("gender", "binary", "feature", {"F", "M"}),
                             column("highest_education", "categorical", "feature", edu),
                             column("imd_band", "categorical", "feature", imd),
                             column("age_band", "categorical", "feature", age),
                             column("studied_credits", "numerical", "feature"),
                             column("disability", "binary", "sensitive", {"N", "Y"}),
                             column("final_result", "categorical", "target", {"Distinction", "Fail", "Pass", "Withdrawn"})});
  write(root / "data/fixtures/oulad.schema.json", schema.dump(2) + "\n");

  json cfg{{"name", "fixture_oulad"},
           {"dataset", {{"path", "../data/fixtures/oulad.csv"}, {"schema", "../data/fixtures/oulad.schema.json"}, {"recipe", "oulad_bbb"}}},
           {"graph", {{"source", "discover"}}},
           {"threshold", 0.1},
           {"regimes", {"unfair", "unaware", "counterfactual"}},
           {"models", models("logistic")},
           {"split", {{"test_fraction", 0.2}, {"seed", 7}}}};
  write(root / "configs/fixture_oulad.json", cfg.dump(2) + "\n");
}

// Student-Performance-like, semicolon separated with quoted strings as in
// the UCI files. Sex affects study time and every grade.
void student(const fs::path& root) {
  cfair::Rng rng(303);
  std::vector<std::string> lines{"school;sex;age;address;studytime;failures;absences;G1;G2;G3"};
  auto q = [](const std::string& s) { return "\"" + s + "\""; };
  for (int i = 0; i < 300; ++i) {
    const bool female = rng.uniform() < 0.53;
    const bool gp = rng.uniform() < 0.85;
    const bool urban = rng.uniform() < 0.75;
    const double age = 15.0 + static_cast<double>(rng.below(5));
    const double fu = rng.uniform();
    const double failures = fu < 0.8 ? 0 : fu < 0.92 ? 1 : fu < 0.97 ? 2 : 3;
    const double studytime = 1.0 + static_cast<double>(rng.below(2)) + (female && rng.uniform() < 0.6 ? 1.0 : 0.0);
    const double absences = std::floor(-4.0 * std::log(rng.uniform(1e-12, 1.0)));
    const double g1 = 8.0 + 0.9 * studytime - 1.6 * failures + 1.5 * female + 0.4 * urban + rng.uniform(-3.0, 3.0);
    const double g2 = 1.2 + 0.9 * g1 + rng.uniform(-1.5, 1.5);
    const double g3 = 0.5 + 0.95 * g2 - 0.05 * absences + 0.8 * female + rng.uniform(-1.0, 1.0);
    std::string line = q(gp ? "GP" : "MS") + ";" + q(female ? "F" : "M") + ";" + fixed(age, 0) + ";" +
                       q(urban ? "U" : "R") + ";" + fixed(studytime, 0) + ";" + fixed(failures, 0) + ";" +
                       fixed(absences, 0) + ";" + fixed(g1, 2) + ";" + fixed(g2, 2) + ";" + fixed(g3, 2);
    lines.push_back(line);
  }
  std::string body;
  for (const auto& l : lines) body += l + "\n";
  write(root / "data/fixtures/student.csv", body);

  json schema = json::array({column("school", "binary", "feature", {"GP", "MS"}),
                             column("sex", "binary", "sensitive", {"F", "M"}),
                             column("age", "numerical", "feature"),
                             column("address", "binary", "feature", {"U", "R"}),
                             column("studytime", "numerical", "feature"),
                             column("failures", "numerical", "feature"),
                             column("absences", "numerical", "feature"),
                             column("G1", "numerical", "feature"),
                             column("G2", "numerical", "feature"),
                             column("G3", "numerical", "target")});
  write(root / "data/fixtures/student.schema.json", schema.dump(2) + "\n");

  json cfg{{"name", "fixture_student"},
           {"dataset", {{"path", "../data/fixtures/student.csv"}, {"schema", "../data/fixtures/student.schema.json"}, {"recipe", "student_por"}}},
           {"graph", {{"source", "discover"}}},
           {"threshold", 0.1},
           {"regimes", {"unfair", "unaware", "counterfactual"}},
           {"models", models("linear")},
           {"split", {{"test_fraction", 0.2}, {"seed", 7}}}};
  write(root / "configs/fixture_student.json", cfg.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::current_path();
  try {
    law(root);
    oulad(root);
    student(root);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "make_fixtures: %s\n", e.what());
    return 1;
  }
  return 0;
}

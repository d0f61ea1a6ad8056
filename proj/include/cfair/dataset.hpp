#pragma once

// Schema-typed tabular datasets: loading, benchmark recipes, numeric
// encoding and train/test splitting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfair/csv.hpp"
#include "cfair/error.hpp"
#include "cfair/rng.hpp"

namespace cfair {

enum class ColumnKind { binary, categorical, numerical };
enum class ColumnRole { feature, sensitive, target, ignore };
enum class Task { regression, classification };

inline std::string to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::binary: return "binary";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::numerical: return "numerical";
  }
  return "?";
}

inline std::string to_string(ColumnRole r) {
  switch (r) {
    case ColumnRole::feature: return "feature";
    case ColumnRole::sensitive: return "sensitive";
    case ColumnRole::target: return "target";
    case ColumnRole::ignore: return "ignore";
  }
  return "?";
}

inline std::string to_string(Task t) { return t == Task::regression ? "regression" : "classification"; }

inline ColumnKind parse_column_kind(const std::string& s) {
  if (s == "binary") return ColumnKind::binary;
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "numerical") return ColumnKind::numerical;
  throw ConfigError("unknown column kind '" + s + "'");
}

inline ColumnRole parse_column_role(const std::string& s) {
  if (s == "feature") return ColumnRole::feature;
  if (s == "sensitive") return ColumnRole::sensitive;
  if (s == "target") return ColumnRole::target;
  if (s == "ignore") return ColumnRole::ignore;
  throw ConfigError("unknown column role '" + s + "'");
}

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numerical;
  ColumnRole role = ColumnRole::feature;
  std::vector<std::string> categories;  // declared order defines the codes

  bool operator==(const ColumnSpec&) const = default;
};

using Schema = std::vector<ColumnSpec>;

/// Checks per-column invariants and, when `require_roles`, the dataset-level
/// ones (exactly one target, at least one sensitive attribute).
inline void validate_schema(const Schema& schema, bool require_roles = true) {
  std::set<std::string> names;
  int targets = 0;
  int sensitives = 0;
  for (const auto& c : schema) {
    if (c.name.empty()) throw ConfigError("schema: empty column name");
    if (!names.insert(c.name).second) throw ConfigError("schema: duplicate column '" + c.name + "'");
    if (c.kind != ColumnKind::numerical) {
      if (c.categories.empty()) throw ConfigError("schema: column '" + c.name + "' needs categories");
      std::set<std::string> uniq(c.categories.begin(), c.categories.end());
      if (uniq.size() != c.categories.size())
        throw ConfigError("schema: column '" + c.name + "' has duplicate categories");
      if (c.kind == ColumnKind::binary && c.categories.size() != 2)
        throw ConfigError("schema: binary column '" + c.name + "' must declare exactly 2 categories");
    }
    targets += c.role == ColumnRole::target;
    sensitives += c.role == ColumnRole::sensitive;
  }
  if (!require_roles) return;
  if (targets != 1) throw ConfigError("schema: expected exactly one target column, found " + std::to_string(targets));
  if (sensitives < 1) throw ConfigError("schema: at least one sensitive column is required");
}

inline Schema schema_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("schema: expected a JSON array of column objects");
  Schema schema;
  for (const auto& col : j) {
    try {
      ColumnSpec c;
      c.name = col.at("name").get<std::string>();
      c.kind = parse_column_kind(col.at("kind").get<std::string>());
      c.role = parse_column_role(col.value("role", std::string("feature")));
      if (col.contains("categories")) c.categories = col.at("categories").get<std::vector<std::string>>();
      schema.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("schema: ") + e.what());
    }
  }
  validate_schema(schema);
  return schema;
}

inline nlohmann::json schema_to_json(const Schema& schema) {
  auto j = nlohmann::json::array();
  for (const auto& c : schema) {
    nlohmann::json o{{"name", c.name}, {"kind", to_string(c.kind)}, {"role", to_string(c.role)}};
    if (c.kind != ColumnKind::numerical) o["categories"] = c.categories;
    j.push_back(std::move(o));
  }
  return j;
}

inline Schema read_schema(const std::string& path) {
  const auto text = csv::read_file(path);
  try {
    return schema_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("schema '" + path + "': " + e.what());
  }
}

inline Task infer_task(const Schema& schema) {
  for (const auto& c : schema) {
    if (c.role != ColumnRole::target) continue;
    if (c.kind == ColumnKind::numerical) return Task::regression;
    if (c.kind == ColumnKind::binary) return Task::classification;
    throw ConfigError("target '" + c.name + "' is multi-class; only binary classification is supported");
  }
  throw ConfigError("schema has no target column");
}

inline bool schema_target_is_numeric(const Schema& schema) {
  for (const auto& c : schema)
    if (c.role == ColumnRole::target) return c.kind == ColumnKind::numerical;
  return false;
}

/// Column-major table. Non-numerical cells hold their category code;
/// NaN marks a missing value, which only ignored columns may carry.
struct Dataset {
  Schema columns;
  std::vector<std::vector<double>> cells;
  Task task = Task::regression;
  std::size_t dropped_rows = 0;

  std::size_t rows() const { return cells.empty() ? 0 : cells.front().size(); }
  std::size_t cols() const { return columns.size(); }

  bool has(const std::string& name) const {
    return std::any_of(columns.begin(), columns.end(), [&](const auto& c) { return c.name == name; });
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].name == name) return i;
    throw DataError("unknown column '" + name + "'");
  }

  const ColumnSpec& column(const std::string& name) const { return columns[index_of(name)]; }
  const std::vector<double>& values(const std::string& name) const { return cells[index_of(name)]; }

  std::vector<std::string> names_with_role(ColumnRole role) const {
    std::vector<std::string> out;
    for (const auto& c : columns)
      if (c.role == role) out.push_back(c.name);
    return out;
  }

  std::string target() const {
    auto t = names_with_role(ColumnRole::target);
    if (t.size() != 1) throw DataError("dataset must have exactly one target");
    return t.front();
  }

  std::vector<std::string> sensitives() const { return names_with_role(ColumnRole::sensitive); }

  /// Human-readable cell text (category label or number).
  std::string label(std::size_t col, std::size_t row) const {
    const double v = cells[col][row];
    if (std::isnan(v)) return "";
    if (columns[col].kind == ColumnKind::numerical) return csv::format_double(v);
    return columns[col].categories[static_cast<std::size_t>(v)];
  }

  Dataset select_rows(const std::vector<std::size_t>& idx) const {
    Dataset out{columns, {}, task, 0};
    out.cells.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out.cells[c].reserve(idx.size());
      for (auto r : idx) out.cells[c].push_back(cells[c][r]);
    }
    return out;
  }

  bool operator==(const Dataset& o) const {
    if (columns != o.columns || task != o.task || cells.size() != o.cells.size()) return false;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].size() != o.cells[c].size()) return false;
      for (std::size_t r = 0; r < cells[c].size(); ++r) {
        const double a = cells[c][r], b = o.cells[c][r];
        if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
      }
    }
    return true;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline bool is_missing_token(const std::string& s) {
  static const std::set<std::string> tokens{"", "NA", "N/A", "?", "nan", "NaN", "null", "NULL"};
  return tokens.count(s) > 0;
}

inline bool parse_number(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses an in-memory CSV table against `schema`. Rows with a missing
/// value in a non-ignored column are dropped and counted.
inline Dataset dataset_from_table(const csv::Table& table, const Schema& schema) {
  validate_schema(schema);
  if (table.header.empty() && table.rows.empty()) throw DataError("zero rows: empty file");

  std::set<std::string> header_names;
  for (const auto& h : table.header) header_names.insert(detail::trim(h));
  std::set<std::string> schema_names;
  for (const auto& c : schema) schema_names.insert(c.name);
  if (header_names != schema_names || header_names.size() != table.header.size()) {
    std::string missing, extra;
    for (const auto& n : schema_names)
      if (!header_names.count(n)) missing += " " + n;
    for (const auto& n : header_names)
      if (!schema_names.count(n)) extra += " " + n;
    throw DataError("header/schema mismatch; missing:" + (missing.empty() ? " none" : missing) +
                    "; unexpected:" + (extra.empty() ? " none" : extra));
  }

  std::vector<std::size_t> source(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c)
    for (std::size_t h = 0; h < table.header.size(); ++h)
      if (detail::trim(table.header[h]) == schema[c].name) source[c] = h;

  Dataset ds;
  ds.columns = schema;
  // A multi-class target is allowed on load; recipes may binarize it.
  ds.task = schema_target_is_numeric(schema) ? Task::regression : Task::classification;
  ds.cells.assign(schema.size(), {});
  std::vector<double> row_values(schema.size());

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool drop = false;
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& spec = schema[c];
      const std::string text = detail::trim(table.rows[r][source[c]]);
      if (detail::is_missing_token(text)) {
        if (spec.role != ColumnRole::ignore) drop = true;
        row_values[c] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto where = [&] {
        return "row " + std::to_string(r + 1) + ", column '" + spec.name + "': ";
      };
      if (spec.kind == ColumnKind::numerical) {
        if (!detail::parse_number(text, row_values[c]))
          throw DataError(where() + "cannot parse '" + text + "' as a number");
      } else {
        auto it = std::find(spec.categories.begin(), spec.categories.end(), text);
        // "1.0" in the file matches a declared "1"
        double as_number = 0.0, cat_number = 0.0;
        if (it == spec.categories.end() && detail::parse_number(text, as_number))
          it = std::find_if(spec.categories.begin(), spec.categories.end(), [&](const std::string& cat) {
            return detail::parse_number(cat, cat_number) && cat_number == as_number;
          });
        if (it == spec.categories.end())
          throw DataError(where() + "value '" + text + "' is not a declared category");
        row_values[c] = static_cast<double>(it - spec.categories.begin());
      }
    }
    if (drop) {
      ++ds.dropped_rows;
      continue;
    }
    for (std::size_t c = 0; c < schema.size(); ++c) ds.cells[c].push_back(row_values[c]);
  }
  if (ds.rows() == 0) throw DataError("zero rows after validation");
  return ds;
}

inline Dataset load_dataset(const std::string& path, const Schema& schema) {
  return dataset_from_table(csv::read(path), schema);
}

// ---------------------------------------------------------------------------
// Recipes

inline const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names{"identity", "law_school", "oulad_bbb", "student_mat", "student_por"};
  return names;
}

namespace detail {

inline void rename_alias(Dataset& ds, const std::string& alias, const std::string& canonical) {
  if (ds.has(canonical) || !ds.has(alias)) return;
  ds.columns[ds.index_of(alias)].name = canonical;
}

inline void require_columns(const Dataset& ds, const std::string& recipe,
                            const std::vector<std::pair<std::string, std::vector<ColumnKind>>>& required) {
  for (const auto& [name, kinds] : required) {
    if (!ds.has(name)) throw DataError("recipe '" + recipe + "' requires column '" + name + "'");
    const auto kind = ds.column(name).kind;
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
      throw DataError("recipe '" + recipe + "': column '" + name + "' has kind " + to_string(kind));
  }
}

inline Dataset keep_columns(const Dataset& ds, const std::vector<std::string>& names) {
  Dataset out{{}, {}, ds.task, ds.dropped_rows};
  for (const auto& n : names) {
    out.columns.push_back(ds.column(n));
    out.cells.push_back(ds.values(n));
  }
  return out;
}

inline void assign_roles(Dataset& ds, const std::set<std::string>& sensitive, const std::string& target) {
  for (auto& c : ds.columns) {
    if (c.role == ColumnRole::ignore && !sensitive.count(c.name) && c.name != target) continue;
    c.role = sensitive.count(c.name) ? ColumnRole::sensitive
             : c.name == target      ? ColumnRole::target
                                     : ColumnRole::feature;
  }
  validate_schema(ds.columns);
  ds.task = infer_task(ds.columns);
}

inline const std::vector<ColumnKind> kNumeric{ColumnKind::numerical};
inline const std::vector<ColumnKind> kBinary{ColumnKind::binary};
inline const std::vector<ColumnKind> kCoded{ColumnKind::binary, ColumnKind::categorical};
inline const std::vector<ColumnKind> kAny{ColumnKind::binary, ColumnKind::categorical, ColumnKind::numerical};

inline Dataset law_school(const Dataset& raw) {
  Dataset ds = raw;
  rename_alias(ds, "sex", "gender");
  rename_alias(ds, "male", "gender");
  require_columns(ds, "law_school",
                  {{"race", kBinary}, {"gender", kBinary}, {"lsat", kNumeric}, {"ugpa", kNumeric}, {"zfygpa", kNumeric}});
  ds = keep_columns(ds, {"race", "gender", "lsat", "ugpa", "zfygpa"});
  for (auto& c : ds.columns) c.role = ColumnRole::feature;
  assign_roles(ds, {"race", "gender"}, "zfygpa");
  return ds;
}

/// Pass and Distinction count as success (1); Fail and Withdrawn as 0.
inline Dataset oulad_bbb(const Dataset& raw) {
  require_columns(raw, "oulad_bbb",
                  {{"code_module", kCoded},
                   {"gender", kBinary},
                   {"disability", kBinary},
                   {"highest_education", kCoded},
                   {"imd_band", kCoded},
                   {"age_band", kCoded},
                   {"studied_credits", kNumeric},
                   {"final_result", kCoded}});
  const auto& module = raw.column("code_module");
  const auto bbb = std::find(module.categories.begin(), module.categories.end(), "BBB");
  std::vector<std::size_t> keep;
  if (bbb != module.categories.end()) {
    const double code = static_cast<double>(bbb - module.categories.begin());
    const auto& m = raw.values("code_module");
    for (std::size_t r = 0; r < raw.rows(); ++r)
      if (m[r] == code) keep.push_back(r);
  }
  if (keep.empty()) throw DataError("recipe 'oulad_bbb': no rows with code_module = BBB");

  Dataset ds = keep_columns(raw.select_rows(keep), {"gender", "disability", "highest_education", "imd_band",
                                                    "age_band", "studied_credits", "final_result"});
  auto& result_spec = ds.columns[ds.index_of("final_result")];
  auto& result = ds.cells[ds.index_of("final_result")];
  std::vector<double> recode(result_spec.categories.size());
  for (std::size_t k = 0; k < recode.size(); ++k) {
    const auto& lab = result_spec.categories[k];
    if (lab == "Pass" || lab == "Distinction")
      recode[k] = 1.0;
    else if (lab == "Fail" || lab == "Withdrawn")
      recode[k] = 0.0;
    else
      throw DataError("recipe 'oulad_bbb': unexpected final_result label '" + lab + "'");
  }
  for (auto& v : result) v = recode[static_cast<std::size_t>(v)];
  result_spec.kind = ColumnKind::binary;
  result_spec.categories = {"Fail|Withdrawn", "Pass|Distinction"};

  for (auto& c : ds.columns) c.role = ColumnRole::feature;
  assign_roles(ds, {"disability"}, "final_result");
  return ds;
}

inline Dataset student(const Dataset& raw, const std::string& recipe) {
  Dataset ds = raw;
  rename_alias(ds, "sex", "gender");
  require_columns(ds, recipe, {{"gender", kBinary}, {"G3", kNumeric}});
  for (auto& c : ds.columns)
    if (c.role != ColumnRole::ignore) c.role = ColumnRole::feature;
  assign_roles(ds, {"gender"}, "G3");
  return ds;
}

}  // namespace detail

/// Applies one of the benchmark preparations (see `recipe_names()`).
/// Recipes check for the columns they need, not for file provenance.
inline Dataset apply_recipe(const Dataset& raw, const std::string& recipe) {
  if (recipe == "identity") return raw;
  if (recipe == "law_school") return detail::law_school(raw);
  if (recipe == "oulad_bbb") return detail::oulad_bbb(raw);
  if (recipe == "student_mat" || recipe == "student_por") return detail::student(raw, recipe);
  throw ConfigError("unknown recipe '" + recipe + "'");
}

// ---------------------------------------------------------------------------
// Encoding

struct ColumnScaling {
  double mean = 0.0;
  double stddev = 1.0;
  bool constant = false;

  bool operator==(const ColumnScaling&) const = default;
};

/// Real-valued view of the non-ignored columns. Non-constant columns are
/// z-scored; constant columns keep their raw code/value.
struct EncodedMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_map;
  std::vector<ColumnScaling> standardization;

  Eigen::Index cols() const { return values.cols(); }
  Eigen::Index rows() const { return values.rows(); }

  Eigen::Index column(const std::string& name) const {
    for (std::size_t i = 0; i < column_map.size(); ++i)
      if (column_map[i] == name) return static_cast<Eigen::Index>(i);
    throw DataError("encoded matrix has no column '" + name + "'");
  }

  bool has(const std::string& name) const {
    return std::find(column_map.begin(), column_map.end(), name) != column_map.end();
  }

  std::vector<std::string> constant_columns() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < column_map.size(); ++i)
      if (standardization[i].constant) out.push_back(column_map[i]);
    return out;
  }

  /// Maps an encoded value back to the raw code/number.
  double decode(Eigen::Index col, double v) const {
    const auto& s = standardization[static_cast<std::size_t>(col)];
    return s.constant ? v : v * s.stddev + s.mean;
  }

  double encode_value(Eigen::Index col, double raw) const {
    const auto& s = standardization[static_cast<std::size_t>(col)];
    return s.constant ? raw : (raw - s.mean) / s.stddev;
  }
};

namespace detail {

inline std::vector<std::size_t> encoded_columns(const Dataset& ds) {
  std::vector<std::size_t> idx;
  for (std::size_t c = 0; c < ds.cols(); ++c)
    if (ds.columns[c].role != ColumnRole::ignore) idx.push_back(c);
  return idx;
}

inline void check_codes(const Dataset& ds, std::size_t c) {
  const auto& spec = ds.columns[c];
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double v = ds.cells[c][r];
    if (std::isnan(v)) throw DataError("encode: missing value in column '" + spec.name + "'");
    if (spec.kind != ColumnKind::numerical &&
        (v < 0 || v >= static_cast<double>(spec.categories.size()) || v != std::floor(v)))
      throw DataError("encode: column '" + spec.name + "' has a value outside its category list");
  }
}

}  // namespace detail

/// Encodes with scaling statistics taken from `reference` (e.g. the train
/// split), matched by column name.
inline EncodedMatrix encode(const Dataset& ds, const EncodedMatrix& reference) {
  const auto idx = detail::encoded_columns(ds);
  EncodedMatrix em;
  em.values.resize(static_cast<Eigen::Index>(ds.rows()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto c = idx[j];
    detail::check_codes(ds, c);
    const auto& name = ds.columns[c].name;
    const auto scaling = reference.standardization[static_cast<std::size_t>(reference.column(name))];
    em.column_map.push_back(name);
    em.standardization.push_back(scaling);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      const double raw = ds.cells[c][r];
      em.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          scaling.constant ? raw : (raw - scaling.mean) / scaling.stddev;
    }
  }
  return em;
}

/// Codes binary/categorical cells by declared category order, passes
/// numbers through, then z-scores every non-constant column (sample sd).
inline EncodedMatrix encode(const Dataset& ds) {
  const auto idx = detail::encoded_columns(ds);
  const double n = static_cast<double>(ds.rows());
  EncodedMatrix ref;
  for (auto c : idx) {
    detail::check_codes(ds, c);
    const auto& v = ds.cells[c];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    const bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    ref.column_map.push_back(ds.columns[c].name);
    ref.standardization.push_back(constant ? ColumnScaling{0.0, 1.0, true} : ColumnScaling{mean, sd, false});
  }
  return encode(ds, ref);
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded permutation; the first round(n * test_fraction) rows form the test
/// part. Both parts keep the original row order.
inline SplitIndices split_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("split: test fraction must lie in (0, 1)");
  if (n < 5) throw DataError("split: need at least 5 rows, got " + std::to_string(n));
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  if (n_test == 0 || n_test == n) throw DataError("split: test fraction leaves an empty part");
  Rng rng(seed);
  auto perm = rng.permutation(n);
  SplitIndices s;
  s.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

inline std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  const auto s = split_indices(ds.rows(), test_fraction, seed);
  return {ds.select_rows(s.train), ds.select_rows(s.test)};
}

}  // namespace cfair

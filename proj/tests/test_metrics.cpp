#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cfair/metrics.hpp"
#include "cfair/rng.hpp"

using namespace cfair;

namespace {

std::vector<double> normals(std::size_t n, double mean, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(mean, 1.0);
  return v;
}

std::vector<double> uniforms(std::size_t n, double lo, double hi, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

double sorted_pairing(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double naive_mmd(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> d;
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = i + 1; j < pooled.size(); ++j) d.push_back(std::abs(pooled[i] - pooled[j]));
  std::sort(d.begin(), d.end());
  const double sigma = d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
  auto k = [&](double x, double y) { return std::exp(-(x - y) * (x - y) / (2 * sigma * sigma)); };
  double kaa = 0, kbb = 0, kab = 0;
  for (double x : a)
    for (double y : a) kaa += k(x, y);
  for (double x : b)
    for (double y : b) kbb += k(x, y);
  for (double x : a)
    for (double y : b) kab += k(x, y);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  return std::sqrt(std::max(0.0, kaa / (na * na) + kbb / (nb * nb) - 2 * kab / (na * nb)));
}

double all_pairs_auc(const std::vector<double>& s, const std::vector<double>& y) {
  double num = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        num += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return num / pairs;
}

}  // namespace

TEST(Wasserstein, BasicCases) {
  EXPECT_EQ(wasserstein1(std::vector<double>{0, 1}, std::vector<double>{1, 2}), 1.0);
  const auto a = normals(100, 0, 1);
  EXPECT_EQ(wasserstein1(a, a), 0.0);
  EXPECT_THROW(wasserstein1(a, std::vector<double>{}), MetricUndefined);
  // unequal sizes: {0} vs {0, 1} -> half the mass moves by 1
  EXPECT_DOUBLE_EQ(wasserstein1(std::vector<double>{0}, std::vector<double>{0, 1}), 0.5);
}

TEST(Wasserstein, MatchesSortedPairingExactly) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = normals(237, 0, seed), b = normals(237, 0.4, seed + 100);
    EXPECT_EQ(wasserstein1(a, b), sorted_pairing(a, b));
  }
}

TEST(Wasserstein, TranslationAndSymmetry) {
  const auto a = normals(200, 0, 7);
  std::vector<double> shifted(a);
  for (auto& x : shifted) x += 2.75;
  EXPECT_NEAR(wasserstein1(a, shifted), 2.75, 1e-12);
  const auto b = normals(150, 1, 8);
  EXPECT_DOUBLE_EQ(wasserstein1(a, b), wasserstein1(b, a));
  std::vector<double> bs(b);
  for (auto& x : bs) x += 0.3;
  EXPECT_LE(std::abs(wasserstein1(a, bs) - wasserstein1(a, b)), 0.3 + 1e-12);
}

TEST(Wasserstein, UnequalSizesMatchQuantileIntegral) {
  const auto a = normals(13, 0, 9), b = normals(7, 0.5, 10);
  // integrate |Fa^-1(q) - Fb^-1(q)| on a fine midpoint grid
  auto sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const int m = 13 * 7 * 200;
  double s = 0;
  for (int i = 0; i < m; ++i) {
    const double q = (i + 0.5) / m;
    s += std::abs(sa[static_cast<std::size_t>(q * 13)] - sb[static_cast<std::size_t>(q * 7)]);
  }
  EXPECT_NEAR(wasserstein1(a, b), s / m, 1e-12);
}

TEST(Mmd, MatchesNaiveDoubleSum) {
  const auto a = normals(500, 0, 21), b = normals(500, 3, 22);
  EXPECT_NEAR(mmd_rbf(a, b), naive_mmd(a, b), 1e-10);
  const auto c = normals(120, 0.5, 23);
  EXPECT_NEAR(mmd_rbf(a, c), naive_mmd(a, c), 1e-10);
}

TEST(Mmd, IdentityConstantsAndSymmetry) {
  const auto a = normals(300, 0, 24);
  EXPECT_LE(mmd_rbf(a, a), 1e-12);
  std::vector<double> shuffled(a.rbegin(), a.rend());
  EXPECT_LE(mmd_rbf(a, shuffled), 1e-9);
  const std::vector<double> k(10, 4.0);
  EXPECT_EQ(median_heuristic_bandwidth(k, k), 1.0);
  EXPECT_EQ(mmd_rbf(k, k), 0.0);
  const auto b = normals(200, 1, 25);
  EXPECT_NEAR(mmd_rbf(a, b), mmd_rbf(b, a), 1e-12);
  EXPECT_GT(mmd_rbf(a, b), 0.0);
}

TEST(Kde, ApproximatesNormalPdf) {
  const auto s = normals(1000, 0, 31);
  const auto grid = linspace(-3, 3, 121);
  const auto c = kde(s, grid);
  double worst = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(c.density[i] - std::exp(-0.5 * grid[i] * grid[i]) / std::sqrt(2 * std::numbers::pi)));
  EXPECT_LT(worst, 0.05);
}

TEST(Kde, SymmetryAndNormalization) {
  const auto grid = linspace(-1, 1, 201);
  const auto one = kde(std::vector<double>{0.0}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(one.density[i], one.density[grid.size() - 1 - i], 1e-15);
  EXPECT_EQ(std::max_element(one.density.begin(), one.density.end()) - one.density.begin(), 100);
  EXPECT_DOUBLE_EQ(one.bandwidth, 1e-3);

  const auto s = uniforms(400, 2, 5, 32);
  const double h = silverman_bandwidth(s);
  const auto wide = linspace(2 - 4 * h, 5 + 4 * h, 2001);
  const auto c = kde(s, wide);
  EXPECT_NEAR(trapezoid(c.grid, c.density), 1.0, 0.02);
  EXPECT_THROW(kde(std::vector<double>{}, wide), MetricUndefined);
  EXPECT_EQ(kde_to_csv(c).substr(0, 13), "grid,density\n");
}

TEST(Abroca, IdentityAndExtremes) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8, 0.7, 0.2};
  const std::vector<double> y{0, 0, 1, 1, 1, 0};
  EXPECT_EQ(abroca(s, y, s, y), 0.0);
  const std::vector<double> perfect{0.1, 0.2, 0.8, 0.9}, lab{0, 0, 1, 1}, anti{0.9, 0.8, 0.2, 0.1};
  EXPECT_DOUBLE_EQ(abroca(perfect, lab, anti, lab), 1.0);
  EXPECT_THROW(abroca(s, std::vector<double>(6, 1.0), s, y), MetricUndefined);
}

TEST(Abroca, CrossingCurvesIntegrateAbsoluteDifference) {
  // group a ROC: (0,0)->(0,1/2)->(1/2,1/2)->(1/2,1)->(1,1)
  // group b ROC: (0,0)->(1/2,1)->(1,1) is not reachable with ties; use a diagonal
  const std::vector<double> sa{0.9, 0.8, 0.7, 0.6}, ya{1, 0, 1, 0};
  const std::vector<double> sb{0.5, 0.5}, yb{1, 0};
  // b is the diagonal TPR = FPR; a is a staircase with TPR - FPR = +1/2, 0, +1/2 ... compute by hand:
  // on [0, 1/2]: a = 1/2 (after first step), b = f -> area of |1/2 - f| = 1/8
  // on [1/2, 1]: a = 1, b = f -> area = 1/8
  EXPECT_NEAR(abroca(sa, ya, sb, yb), 0.25, 1e-15);
}

TEST(Madd, IdentityAndDisjoint) {
  const auto a = uniforms(300, 0.2, 0.8, 41);
  EXPECT_EQ(madd(a, a), 0.0);
  const auto lo = uniforms(300, 0.0, 0.05, 42), hi = uniforms(300, 0.95, 1.0, 43);
  EXPECT_NEAR(madd(lo, hi), 2.0, 0.05);
}

TEST(Madd, MatchesFineGridOracle) {
  const auto a = uniforms(400, 0.2, 0.5, 44), b = uniforms(400, 0.35, 0.65, 45);
  // oracle: exact KDEs with the same bandwidths on a 10^6-point grid over [0,1]
  const double ha = silverman_bandwidth(a), hb = silverman_bandwidth(b);
  const int m = 1000000;
  auto density = [](const std::vector<double>& s, double h, double x) {
    double acc = 0;
    for (double v : s) acc += std::exp(-0.5 * (x - v) * (x - v) / (h * h));
    return acc / (static_cast<double>(s.size()) * h * std::sqrt(2 * std::numbers::pi));
  };
  // the sample mass lies well inside [0,1], so normalization is ~1 for both
  const std::size_t stride = 50;  // evaluate every 50th point, the density is smooth at this scale
  double sum = 0;
  std::size_t count = 0;
  for (int i = 0; i < m; i += static_cast<int>(stride)) {
    const double x = (i + 0.5) / m;
    sum += std::abs(density(a, ha, x) - density(b, hb, x));
    ++count;
  }
  const double oracle = sum / static_cast<double>(count);
  EXPECT_NEAR(madd(a, b), oracle, 1e-3);
}

TEST(Performance, RegressionAndClassification) {
  const std::vector<double> t{1, 2, 3};
  const auto perfect = performance(t, t, false);
  EXPECT_EQ(perfect.at("mse"), 0.0);
  EXPECT_EQ(perfect.at("rmse"), 0.0);
  const auto r = performance(std::vector<double>{1, 2, 5}, t, false);
  EXPECT_NEAR(r.at("rmse") * r.at("rmse"), r.at("mse"), 1e-12);

  const std::vector<double> y{0, 0, 1, 1};
  const auto c = performance(std::vector<double>{0.1, 0.6, 0.7, 0.9}, y, true);
  EXPECT_EQ(c.at("accuracy"), 0.75);
  EXPECT_EQ(c.at("auroc"), 1.0);
  EXPECT_THROW(performance(t, std::vector<double>{1, 2}, false), MetricUndefined);
  EXPECT_THROW(auroc(std::vector<double>{0.2, 0.3}, std::vector<double>{1, 1}), MetricUndefined);
}

TEST(Performance, AurocMatchesAllPairs) {
  Rng rng(51);
  std::vector<double> s(100), y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    y[i] = rng.uniform() < 0.4 ? 1.0 : 0.0;
    s[i] = std::round(rng.uniform() * 20) / 20 + 0.1 * y[i];  // plenty of ties
  }
  EXPECT_NEAR(auroc(s, y), all_pairs_auc(s, y), 1e-12);
}

TEST(CfConsistency, ClosedFormForPureSensitiveModel) {
  // prediction = w * a with w = -1.7; flipping a from 0 to 1 changes it by |w|
  const double w = -1.7;
  std::vector<double> f, c;
  for (int i = 0; i < 10; ++i) {
    const double a = i % 2;
    f.push_back(w * a);
    c.push_back(w * (1 - a));
  }
  EXPECT_DOUBLE_EQ(cf_consistency(f, c), 1.7);
  EXPECT_EQ(cf_consistency(f, f), 0.0);
  EXPECT_THROW(cf_consistency(f, std::vector<double>{1.0}), MetricUndefined);
}

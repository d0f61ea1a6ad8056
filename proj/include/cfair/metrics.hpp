#pragma once

// Distributional and education-specific fairness metrics, performance
// metrics and Gaussian KDE curves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cfair/error.hpp"

namespace cfair {

/// Two prediction groups split by one sensitive attribute.
struct SampleSplit {
  std::vector<double> group_a;
  std::vector<double> group_b;
  std::string attribute;
  std::string value_a;
  std::string value_b;
};

namespace metric_detail {

inline void require_nonempty(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.empty() || b.empty()) throw MetricUndefined(std::string(what) + ": empty group");
}

inline std::vector<double> sorted(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

/// Linear-interpolation quantile (type 7) of a sorted sample.
inline double quantile(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace metric_detail

/// Exact 1-D Wasserstein-1 distance between two empirical distributions:
/// the integral over q in [0,1] of |F_a^-1(q) - F_b^-1(q)|.
inline double wasserstein1(std::span<const double> a, std::span<const double> b) {
  metric_detail::require_nonempty(a, b, "wasserstein1");
  const auto sa = metric_detail::sorted(a);
  const auto sb = metric_detail::sorted(b);
  if (sa.size() == sb.size()) {
    double total = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
    return total / static_cast<double>(sa.size());
  }
  // Walk the merged quantile breakpoints k/na and l/nb, measured in exact
  // integer units of 1/(na*nb).
  const std::uint64_t na = sa.size(), nb = sb.size();
  std::uint64_t i = 0, j = 0, q = 0;
  double total = 0.0;
  while (i < na && j < nb) {
    const std::uint64_t next_a = (i + 1) * nb;
    const std::uint64_t next_b = (j + 1) * na;
    const std::uint64_t next = std::min(next_a, next_b);
    total += static_cast<double>(next - q) * std::abs(sa[i] - sb[j]);
    q = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return total / (static_cast<double>(na) * static_cast<double>(nb));
}

inline double wasserstein1(const SampleSplit& s) { return wasserstein1(s.group_a, s.group_b); }

/// Median of all pooled pairwise distances; 1.0 when that median is zero.
inline double median_heuristic_bandwidth(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> d;
  d.reserve(pooled.size() * (pooled.size() - 1) / 2);
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = i + 1; j < pooled.size(); ++j) d.push_back(std::abs(pooled[i] - pooled[j]));
  if (d.empty()) return 1.0;
  const auto mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double median = d[mid];
  if (d.size() % 2 == 0) {
    const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return median > 0.0 ? median : 1.0;
}

/// MMD with kernel exp(-(x-y)^2 / (2 sigma^2)); square root of the biased
/// (V-statistic) estimate of MMD^2. Bandwidth by the median heuristic
/// unless given.
inline double mmd_rbf(std::span<const double> a, std::span<const double> b, double bandwidth = 0.0) {
  metric_detail::require_nonempty(a, b, "mmd_rbf");
  const double sigma = bandwidth > 0.0 ? bandwidth : median_heuristic_bandwidth(a, b);
  const double c = -0.5 / (sigma * sigma);
  // Sorted inputs and identical loop structure for all three terms make
  // equal multisets cancel exactly.
  const auto sa = metric_detail::sorted(a);
  const auto sb = metric_detail::sorted(b);
  auto mean_kernel = [c](const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (double xi : x)
      for (double yj : y) {
        const double d = xi - yj;
        sum += std::exp(c * d * d);
      }
    return sum / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
  };
  const double mmd2 = mean_kernel(sa, sa) + mean_kernel(sb, sb) - 2.0 * mean_kernel(sa, sb);
  return std::sqrt(std::max(0.0, mmd2));
}

inline double mmd_rbf(const SampleSplit& s) { return mmd_rbf(s.group_a, s.group_b); }

// ---------------------------------------------------------------------------
// Kernel density estimation

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 1.0;
};

/// Silverman's rule 0.9 * min(sd, IQR/1.34) * n^(-1/5). When the IQR is
/// zero the sd alone is used; the result is floored at 1e-3.
inline double silverman_bandwidth(std::span<const double> sample) {
  const auto s = metric_detail::sorted(sample);
  const double sd = metric_detail::sample_sd(sample);
  const double iqr = s.size() > 1 ? metric_detail::quantile(s, 0.75) - metric_detail::quantile(s, 0.25) : 0.0;
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = sd;
  const double h = 0.9 * spread * std::pow(static_cast<double>(s.size()), -0.2);
  return std::max(h, 1e-3);
}

inline KdeCurve kde(std::span<const double> sample, std::span<const double> grid, double bandwidth = 0.0) {
  if (sample.empty()) throw MetricUndefined("kde: empty sample");
  if (!std::is_sorted(grid.begin(), grid.end())) throw MetricUndefined("kde: grid must be ascending");
  KdeCurve c;
  c.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(sample);
  c.grid.assign(grid.begin(), grid.end());
  c.density.resize(grid.size());
  const double norm = 1.0 / (static_cast<double>(sample.size()) * c.bandwidth * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double x : sample) {
      const double z = (grid[g] - x) / c.bandwidth;
      acc += std::exp(-0.5 * z * z);
    }
    c.density[g] = acc * norm;
  }
  return c;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

inline std::string kde_to_csv(const KdeCurve& c) {
  std::string out = "grid,density\n";
  char buf[64];
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", c.grid[i], c.density[i]);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ROC-based metrics

/// ROC polyline from a threshold sweep over distinct scores, descending.
/// Points are (FPR, TPR), starting at (0,0) and ending at (1,1).
inline std::vector<std::pair<double, double>> roc_curve(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw MetricUndefined("roc: length mismatch");
  double pos = 0, neg = 0;
  for (double l : labels) (l > 0.5 ? pos : neg) += 1;
  if (pos == 0 || neg == 0) throw MetricUndefined("roc: group has a single class");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  double tp = 0, fp = 0;
  for (std::size_t k = 0; k < idx.size();) {
    const double s = scores[idx[k]];
    while (k < idx.size() && scores[idx[k]] == s) {
      (labels[idx[k]] > 0.5 ? tp : fp) += 1;
      ++k;
    }
    pts.emplace_back(fp / neg, tp / pos);
  }
  return pts;
}

namespace metric_detail {

/// TPR of a ROC polyline on the open interval just right of `f` (side=+1)
/// or just left of it (side=-1); vertical segments are skipped.
inline double roc_at(const std::vector<std::pair<double, double>>& roc, double f, int side) {
  for (std::size_t k = 1; k < roc.size(); ++k) {
    const auto [x0, y0] = roc[k - 1];
    const auto [x1, y1] = roc[k];
    if (x1 == x0) continue;
    const bool inside = side > 0 ? (f >= x0 && f < x1) : (f > x0 && f <= x1);
    if (inside) return y0 + (y1 - y0) * (f - x0) / (x1 - x0);
  }
  return side > 0 ? 1.0 : roc.back().second;
}

}  // namespace metric_detail

/// Absolute area between the two groups' ROC curves over FPR in [0,1].
inline double abroca(std::span<const double> scores_a, std::span<const double> labels_a,
                     std::span<const double> scores_b, std::span<const double> labels_b) {
  const auto ra = roc_curve(scores_a, labels_a);
  const auto rb = roc_curve(scores_b, labels_b);
  std::vector<double> grid;
  for (const auto& p : ra) grid.push_back(p.first);
  for (const auto& p : rb) grid.push_back(p.first);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double area = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double x0 = grid[k - 1], x1 = grid[k];
    const double d0 = metric_detail::roc_at(ra, x0, +1) - metric_detail::roc_at(rb, x0, +1);
    const double d1 = metric_detail::roc_at(ra, x1, -1) - metric_detail::roc_at(rb, x1, -1);
    const double w = x1 - x0;
    if (d0 * d1 >= 0) {
      area += 0.5 * w * (std::abs(d0) + std::abs(d1));
    } else {
      // The difference is linear on the interval and changes sign once.
      const double t = std::abs(d0) / (std::abs(d0) + std::abs(d1));
      area += 0.5 * w * (t * std::abs(d0) + (1.0 - t) * std::abs(d1));
    }
  }
  return area;
}

/// Area between the groups' predicted-probability densities: Gaussian KDEs
/// on a 512-point grid over [0,1], each rescaled so sum * step = 1, then
/// the trapezoid integral of |f_a - f_b|.
inline double madd(std::span<const double> scores_a, std::span<const double> scores_b) {
  metric_detail::require_nonempty(scores_a, scores_b, "madd");
  constexpr std::size_t points = 512;
  const auto grid = linspace(0.0, 1.0, points);
  const double step = 1.0 / static_cast<double>(points - 1);
  auto normalized = [&](std::span<const double> s) {
    auto d = kde(s, grid).density;
    const double mass = std::accumulate(d.begin(), d.end(), 0.0) * step;
    if (mass > 0)
      for (auto& v : d) v /= mass;
    return d;
  };
  const auto fa = normalized(scores_a);
  const auto fb = normalized(scores_b);
  std::vector<double> diff(points);
  for (std::size_t i = 0; i < points; ++i) diff[i] = std::abs(fa[i] - fb[i]);
  return trapezoid(grid, diff);
}

/// Mean absolute change between paired factual and counterfactual outputs.
inline double cf_consistency(std::span<const double> factual, std::span<const double> counterfactual) {
  if (factual.size() != counterfactual.size()) throw MetricUndefined("cf_consistency: length mismatch");
  if (factual.empty()) throw MetricUndefined("cf_consistency: no pairs");
  double s = 0.0;
  for (std::size_t i = 0; i < factual.size(); ++i) s += std::abs(factual[i] - counterfactual[i]);
  return s / static_cast<double>(factual.size());
}

// ---------------------------------------------------------------------------
// Performance

/// AUROC via the Mann-Whitney rank statistic with mid-ranks for ties.
inline double auroc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw MetricUndefined("auroc: length mismatch");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  std::vector<double> rank(scores.size());
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t e = k;
    while (e < idx.size() && scores[idx[e]] == scores[idx[k]]) ++e;
    const double mid = 0.5 * static_cast<double>(k + 1 + e);  // average of ranks k+1..e
    for (std::size_t m = k; m < e; ++m) rank[idx[m]] = mid;
    k = e;
  }
  double pos = 0, rank_sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] > 0.5) {
      pos += 1;
      rank_sum += rank[i];
    }
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0 || neg == 0) throw MetricUndefined("auroc: truth has a single class");
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

/// regression: mse, rmse; classification: accuracy (threshold 0.5), auroc.
inline std::map<std::string, double> performance(std::span<const double> preds, std::span<const double> truth,
                                                 bool classification) {
  if (preds.size() != truth.size()) throw MetricUndefined("performance: length mismatch");
  if (preds.empty()) throw MetricUndefined("performance: no predictions");
  std::map<std::string, double> out;
  const double n = static_cast<double>(preds.size());
  if (!classification) {
    double mse = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) mse += (preds[i] - truth[i]) * (preds[i] - truth[i]);
    mse /= n;
    out["mse"] = mse;
    out["rmse"] = std::sqrt(mse);
  } else {
    double correct = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) correct += ((preds[i] >= 0.5 ? 1.0 : 0.0) == truth[i]);
    out["accuracy"] = correct / n;
    out["auroc"] = auroc(preds, truth);
  }
  return out;
}

}  // namespace cfair

#include "csufs/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "csufs/diagnostics.hpp"
#include "csufs/errors.hpp"
#include "csufs/preprocess.hpp"
#include "parallel.hpp"

namespace csufs {
namespace {

void check_knn_args(std::size_t n, std::size_t k) {
  if (n < 2) throw TooFewSamples(n, 2);
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (k >= n) throw KTooLarge(k, n);
}

void record(KernelStats* stats, std::size_t candidates) {
  if (stats == nullptr) return;
  stats->total_candidates += candidates;
  stats->max_candidates_per_sample = std::max(stats->max_candidates_per_sample, candidates);
}

}  // namespace

std::vector<double> knn_sample_sums_naive(std::span<const double> f, std::size_t k,
                                          KernelStats* stats) {
  const std::size_t n = f.size();
  check_knn_args(n, k);

  std::vector<double> sums(n);
  std::vector<double> dist;
  dist.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist.push_back(std::abs(f[i] - f[j]));
    }
    record(stats, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double s = 0.0;
    for (std::size_t t = 0; t < k; ++t) s += dist[t];
    sums[i] = s;
  }
  return sums;
}

std::vector<double> knn_sample_sums_window(std::span<const double> sorted, std::size_t k,
                                           KernelStats* stats) {
  const std::size_t n = sorted.size();
  check_knn_args(n, k);

  std::vector<double> sums(n);
  std::vector<double> cand;
  cand.reserve(2 * k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= k ? i - k : 0;
    const std::size_t hi = std::min(n - 1, i + k);
    cand.clear();
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) cand.push_back(std::abs(sorted[i] - sorted[j]));
    }
    record(stats, cand.size());
    std::sort(cand.begin(), cand.end());
    double s = 0.0;
    for (std::size_t t = 0; t < k; ++t) s += cand[t];
    sums[i] = s;
  }
  return sums;
}

double knn_distance_sum_naive(std::span<const double> f, std::size_t k, KernelStats* stats) {
  const auto sums = knn_sample_sums_naive(f, k, stats);
  return std::accumulate(sums.begin(), sums.end(), 0.0);
}

double knn_distance_sum_sorted(std::span<const double> f, std::size_t k, KernelStats* stats,
                               SortOrder order) {
  check_knn_args(f.size(), k);
  std::vector<double> sorted(f.begin(), f.end());
  if (order == SortOrder::descending) {
    std::sort(sorted.begin(), sorted.end(), std::greater<>{});
  } else {
    std::sort(sorted.begin(), sorted.end());
  }
  const auto sums = knn_sample_sums_window(sorted, k, stats);
  return std::accumulate(sums.begin(), sums.end(), 0.0);
}

VarianceResult feature_variance(std::span<const double> f) {
  if (f.empty()) throw TooFewSamples(0, 1);
  const double n = static_cast<double>(f.size());
  double sum = 0.0;
  for (double x : f) sum += x;
  const double mean = sum / n;
  double sq = 0.0;
  for (double x : f) sq += (x - mean) * (x - mean);
  return {sq / n, mean};
}

double compactness_score(double d, double v, double variance_tol) {
  if (v > variance_tol) return d / v;
  return std::numeric_limits<double>::infinity();
}

FeatureScores score_all_features(const Dataset& x, const ScoringConfig& cfg) {
  check_knn_args(x.n_samples(), cfg.k);
  const std::size_t m = x.n_features();

  FeatureScores out;
  out.d.resize(m);
  out.v.resize(m);
  out.cs.resize(m);
  out.mu.resize(m);
  out.k_used = cfg.k;
  out.has_knn = true;

  detail::parallel_for(m, cfg.threads, [&](std::size_t r) {
    auto f = x.feature(r);
    out.d[r] = cfg.mode == KernelMode::naive ? knn_distance_sum_naive(f, cfg.k)
                                             : knn_distance_sum_sorted(f, cfg.k);
    const auto [v, mu] = feature_variance(f);
    out.v[r] = v;
    out.mu[r] = mu;
    out.cs[r] = compactness_score(out.d[r], v, cfg.variance_tol);
  });
  return out;
}

std::vector<std::size_t> rank_features(const FeatureScores& scores, Method method) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  switch (method) {
    case Method::csufs_optimized:
    case Method::csufs_naive:
      if (scores.cs.size() != order.size()) throw LengthMismatch(scores.cs.size(), order.size());
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return scores.cs[a] < scores.cs[b]; });
      break;
    case Method::max_variance:
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return scores.v[a] > scores.v[b]; });
      break;
    case Method::all_features:
      break;
  }
  return order;
}

SelectionResult select_features(const FeatureScores& scores, std::size_t d, Method method) {
  if (d == 0) throw InvalidArgument("d must be at least 1");
  const std::size_t m = scores.size();
  if (d > m) {
    warn("requested d=" + std::to_string(d) + " exceeds the " + std::to_string(m) +
         " available features; selecting all of them");
  }
  auto order = rank_features(scores, method);
  order.resize(std::min(d, m));

  SelectionResult res;
  res.selected = std::move(order);
  res.scores = scores;
  res.method = method;
  res.d_requested = d;
  return res;
}

Method method_for(KernelMode mode) {
  return mode == KernelMode::naive ? Method::csufs_naive : Method::csufs_optimized;
}

SelectionResult run_csufs(const Dataset& x_raw, std::size_t d, const ScoringConfig& cfg) {
  if (auto bad = degenerate_rows(x_raw); !bad.empty()) {
    warn(std::to_string(bad.size()) + " sample(s) have near-zero norm and were not normalized");
  }
  const Dataset x = normalize_samples(x_raw);
  return select_features(score_all_features(x, cfg), d, method_for(cfg.mode));
}

}  // namespace csufs

#include "csufs/cluster_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "csufs/baselines.hpp"
#include "csufs/compactness.hpp"
#include "csufs/diagnostics.hpp"
#include "csufs/errors.hpp"
#include "csufs/preprocess.hpp"
#include "parallel.hpp"

namespace csufs {
namespace {

// 53-bit uniform in [0, 1). Avoids std::uniform_real_distribution, whose
// output is implementation-defined.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

std::vector<double> to_row_major(const Dataset& x) {
  const std::size_t n = x.n_samples(), dim = x.n_features();
  std::vector<double> out(n * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    auto col = x.feature(r);
    for (std::size_t i = 0; i < n; ++i) out[i * dim + r] = col[i];
  }
  return out;
}

std::vector<double> kmeanspp_init(const std::vector<double>& pts, std::size_t n, std::size_t dim,
                                  std::size_t n_clusters, std::mt19937_64& rng) {
  std::vector<double> centers;
  centers.reserve(n_clusters * dim);
  auto pick = [&](std::size_t i) {
    centers.insert(centers.end(), pts.begin() + static_cast<std::ptrdiff_t>(i * dim),
                   pts.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
  };

  auto uniform_index = [&] { return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n)); };
  std::size_t first = uniform_index();
  pick(first);

  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = sq_dist(&pts[i * dim], centers.data(), dim);

  for (std::size_t c = 1; c < n_clusters; ++c) {
    double total = 0.0;
    for (double d : closest) total += d;
    std::size_t chosen = n - 1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += closest[i];
        if (acc > target && closest[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      // Rounding can leave target beyond the running sum; fall back to the last positive weight.
      if (acc <= target) {
        for (std::size_t i = n; i-- > 0;) {
          if (closest[i] > 0.0) {
            chosen = i;
            break;
          }
        }
      }
    } else {
      chosen = uniform_index();
    }
    pick(chosen);
    const double* cptr = &centers[c * dim];
    for (std::size_t i = 0; i < n; ++i) {
      closest[i] = std::min(closest[i], sq_dist(&pts[i * dim], cptr, dim));
    }
  }
  return centers;
}

}  // namespace

KMeansResult kmeans_fit(const Dataset& x, std::size_t n_clusters, std::uint64_t seed,
                        std::size_t max_iter, double conv_tol) {
  if (n_clusters == 0) throw InvalidArgument("n_clusters must be at least 1");
  if (max_iter == 0) throw InvalidArgument("max_iter must be at least 1");
  const std::size_t n = x.n_samples(), dim = x.n_features();
  if (n < n_clusters) throw TooFewSamples(n, n_clusters);

  const auto pts = to_row_major(x);
  std::mt19937_64 rng(seed);
  std::vector<double> centers = kmeanspp_init(pts, n, dim, n_clusters, rng);

  std::vector<int> labels(n, -1);
  KMeansResult res;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = &pts[i * dim];
      int best = 0;
      double best_d = sq_dist(p, centers.data(), dim);
      for (std::size_t c = 1; c < n_clusters; ++c) {
        const double d = sq_dist(p, &centers[c * dim], dim);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
      objective += best_d;
    }
    res.iterations = iter + 1;
    res.objective_history.push_back(objective);
    if (!changed) break;
    if (iter > 0) {
      const double prev = res.objective_history[iter - 1];
      if (prev <= 0.0 || (prev - objective) / prev < conv_tol) break;
    }

    // Update step.
    std::vector<double> sums(n_clusters * dim, 0.0);
    std::vector<std::size_t> counts(n_clusters, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += pts[i * dim + j];
    }
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        centers[c * dim + j] = sums[c * dim + j] / static_cast<double>(counts[c]);
      }
    }

    std::vector<bool> used(n, false);
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const double d =
            sq_dist(&pts[i * dim], &centers[static_cast<std::size_t>(labels[i]) * dim], dim);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      used[far] = true;
      std::copy_n(&pts[far * dim], dim, &centers[c * dim]);
    }
  }

  res.labels = LabelVector::from_dense(std::move(labels));
  res.centers = std::move(centers);
  return res;
}

LabelVector kmeans(const Dataset& x, std::size_t n_clusters, std::uint64_t seed,
                   std::size_t max_iter, double conv_tol) {
  return kmeans_fit(x, n_clusters, seed, max_iter, conv_tol).labels;
}

std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<long long>>& weight) {
  const std::size_t n = weight.size();
  for (const auto& row : weight) {
    if (row.size() != n) throw InvalidArgument("assignment matrix must be square");
  }
  if (n == 0) return {};

  long long max_w = std::numeric_limits<long long>::min();
  for (const auto& row : weight) {
    for (long long w : row) max_w = std::max(max_w, w);
  }
  // Minimize cost = max_w - weight with the O(n^3) potentials formulation.
  // Rows and columns are 1-based; column 0 is a virtual start.
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> done(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(done.begin(), done.end(), false);
    do {
      done[j0] = true;
      const std::size_t i0 = p[j0];
      long long delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (done[j]) continue;
        const long long cur = (max_w - weight[i0 - 1][j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (done[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

double clustering_accuracy(const LabelVector& truth, const LabelVector& pred) {
  if (truth.size() != pred.size()) throw LengthMismatch(truth.size(), pred.size());
  if (truth.size() == 0) throw TooFewSamples(0, 1);

  const std::size_t c = std::max(truth.n_classes(), pred.n_classes());
  std::vector<std::vector<long long>> counts(c, std::vector<long long>(c, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++counts[static_cast<std::size_t>(pred[i])][static_cast<std::size_t>(truth[i])];
  }
  const auto mapping = max_weight_assignment(counts);
  long long hits = 0;
  for (std::size_t r = 0; r < c; ++r) hits += counts[r][mapping[r]];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

namespace {

std::vector<double> class_counts(const LabelVector& labels) {
  std::vector<double> counts(labels.n_classes(), 0.0);
  for (int l : labels.labels()) counts[static_cast<std::size_t>(l)] += 1.0;
  return counts;
}

}  // namespace

double entropy(const LabelVector& labels) {
  if (labels.size() == 0) throw TooFewSamples(0, 1);
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (double c : class_counts(labels)) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

double mutual_information(const LabelVector& s, const LabelVector& r) {
  if (s.size() != r.size()) throw LengthMismatch(s.size(), r.size());
  if (s.size() == 0) throw TooFewSamples(0, 1);
  const double n = static_cast<double>(s.size());
  const std::size_t cs = s.n_classes(), cr = r.n_classes();
  std::vector<double> joint(cs * cr, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    joint[static_cast<std::size_t>(s[i]) * cr + static_cast<std::size_t>(r[i])] += 1.0;
  }
  const auto ps = class_counts(s), pr = class_counts(r);
  double mi = 0.0;
  for (std::size_t a = 0; a < cs; ++a) {
    for (std::size_t b = 0; b < cr; ++b) {
      const double nab = joint[a * cr + b];
      if (nab > 0.0) mi += (nab / n) * std::log(n * nab / (ps[a] * pr[b]));
    }
  }
  return std::max(0.0, mi);
}

double normalized_mutual_information(const LabelVector& s, const LabelVector& r) {
  if (s.size() != r.size()) throw LengthMismatch(s.size(), r.size());
  const double hs = entropy(s), hr = entropy(r);
  const double denom = std::max(hs, hr);
  if (denom == 0.0) return 1.0;
  if (hs == 0.0 || hr == 0.0) return 0.0;
  return std::clamp(mutual_information(s, r) / denom, 0.0, 1.0);
}

namespace {

EvalReport evaluate_normalized(const Dataset& x_norm, std::span<const std::size_t> selected,
                               const LabelVector& truth, const EvalConfig& cfg, Method method) {
  if (selected.empty()) throw InvalidArgument("selected feature list is empty");
  if (cfg.seeds.empty()) throw InvalidArgument("seed list is empty");
  if (truth.size() != x_norm.n_samples()) throw LengthMismatch(truth.size(), x_norm.n_samples());

  std::vector<std::size_t> columns(selected.begin(), selected.end());
  std::sort(columns.begin(), columns.end());
  const Dataset sub = x_norm.select_columns(columns);
  const std::size_t n_clusters = cfg.n_clusters != 0 ? cfg.n_clusters : truth.n_classes();

  EvalReport rep;
  rep.method = method;
  rep.n_features_used = columns.size();
  rep.per_seed.resize(cfg.seeds.size());
  detail::parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t s) {
    const auto pred = kmeans(sub, n_clusters, cfg.seeds[s], cfg.max_iter, cfg.conv_tol);
    rep.per_seed[s] = {cfg.seeds[s], clustering_accuracy(truth, pred),
                       normalized_mutual_information(truth, pred)};
  });

  double acc = 0.0, nmi = 0.0;
  for (const auto& r : rep.per_seed) {
    acc += r.acc;
    nmi += r.nmi;
  }
  rep.mean_acc = acc / static_cast<double>(rep.per_seed.size());
  rep.mean_nmi = nmi / static_cast<double>(rep.per_seed.size());
  return rep;
}

}  // namespace

EvalReport evaluate_selection(const Dataset& x_raw, std::span<const std::size_t> selected,
                              const LabelVector& truth, const EvalConfig& cfg, Method method) {
  return evaluate_normalized(normalize_samples(x_raw), selected, truth, cfg, method);
}

SweepReport sweep(const Dataset& x_raw, const LabelVector& truth, Method method,
                  std::span<const std::size_t> d_values, std::span<const std::size_t> k_values,
                  const EvalConfig& cfg, unsigned scoring_threads) {
  if (d_values.empty() || k_values.empty()) throw InvalidArgument("sweep grid is empty");
  const Dataset x = normalize_samples(x_raw);

  SweepReport out;
  out.method = method;
  for (std::size_t k : k_values) {
    FeatureScores scores;
    if (method == Method::csufs_naive || method == Method::csufs_optimized) {
      ScoringConfig sc;
      sc.k = k;
      sc.mode = method == Method::csufs_naive ? KernelMode::naive : KernelMode::optimized;
      sc.threads = scoring_threads;
      scores = score_all_features(x, sc);
    } else {
      scores = variance_scores(x);
    }
    const auto ranking = rank_features(scores, method);
    for (std::size_t d : d_values) {
      if (d == 0) throw InvalidArgument("d must be at least 1");
      if (d > ranking.size() && k == k_values.front()) {
        warn("sweep d=" + std::to_string(d) + " exceeds the " + std::to_string(ranking.size()) +
             " available features; using all of them");
      }
      const std::size_t take = std::min(d, ranking.size());
      std::span<const std::size_t> prefix(ranking.data(), take);
      out.cells.push_back({d, k, evaluate_normalized(x, prefix, truth, cfg, method)});
    }
  }
  return out;
}

}  // namespace csufs

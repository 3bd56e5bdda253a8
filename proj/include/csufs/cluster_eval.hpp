#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "csufs/data_model.hpp"

namespace csufs {

// ---- k-means -------------------------------------------------------------

struct KMeansResult {
  LabelVector labels;
  std::vector<double> centers;  // row-major, n_clusters x n_features
  std::vector<double> objective_history;  // WCSS after each assignment step
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. The only randomness is a
/// mt19937_64 seeded with `seed`, so results are reproducible bit for bit.
/// Stops on an assignment fixpoint, after max_iter assignment steps, or when
/// the relative WCSS change drops below conv_tol. Empty clusters are moved
/// to the point farthest from its own centroid.
KMeansResult kmeans_fit(const Dataset& x, std::size_t n_clusters, std::uint64_t seed,
                        std::size_t max_iter = 300, double conv_tol = 1e-4);

LabelVector kmeans(const Dataset& x, std::size_t n_clusters, std::uint64_t seed,
                   std::size_t max_iter = 300, double conv_tol = 1e-4);

// ---- metrics ---------------------------------------------------------------

/// Maximum-weight perfect matching on a square matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<long long>>& weight);

/// Fraction of samples whose predicted label, after the best one-to-one
/// relabeling of `pred`, matches `truth`.
double clustering_accuracy(const LabelVector& truth, const LabelVector& pred);

/// Shannon entropy in nats of the empirical label distribution.
double entropy(const LabelVector& labels);

double mutual_information(const LabelVector& s, const LabelVector& r);

/// MI / max(H(s), H(r)). 1 when both partitions are a single cluster, 0 when
/// exactly one is.
double normalized_mutual_information(const LabelVector& s, const LabelVector& r);

// ---- evaluation harness -------------------------------------------------

struct EvalConfig {
  std::size_t n_clusters = 0;  // 0: use the class count of the truth labels
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t max_iter = 300;
  double conv_tol = 1e-4;
  unsigned threads = 1;
};

struct SeedResult {
  std::uint64_t seed = 0;
  double acc = 0.0;
  double nmi = 0.0;
  bool operator==(const SeedResult&) const = default;
};

struct EvalReport {
  std::vector<SeedResult> per_seed;
  double mean_acc = 0.0;
  double mean_nmi = 0.0;
  std::size_t n_features_used = 0;
  Method method = Method::csufs_optimized;
  bool operator==(const EvalReport&) const = default;
};

/// Normalizes x_raw, keeps the selected columns and clusters once per seed.
/// Column order of `selected` does not affect the result.
EvalReport evaluate_selection(const Dataset& x_raw, std::span<const std::size_t> selected,
                              const LabelVector& truth, const EvalConfig& cfg,
                              Method method = Method::csufs_optimized);

struct SweepCell {
  std::size_t d = 0;
  std::size_t k = 0;
  EvalReport report;
  bool operator==(const SweepCell&) const = default;
};

struct SweepReport {
  Method method = Method::csufs_optimized;
  std::vector<SweepCell> cells;  // k outer, d inner, both in the given order
  bool operator==(const SweepReport&) const = default;
};

/// One EvalReport per (d, k). Scores are computed once per k; each d takes a
/// prefix of the ranking. k is ignored for the baselines' rankings but still
/// indexes the grid.
SweepReport sweep(const Dataset& x_raw, const LabelVector& truth, Method method,
                  std::span<const std::size_t> d_values, std::span<const std::size_t> k_values,
                  const EvalConfig& cfg, unsigned scoring_threads = 1);

}  // namespace csufs

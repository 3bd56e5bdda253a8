#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csufs/data_model.hpp"

namespace csufs {

enum class KernelMode { naive, optimized };

struct ScoringConfig {
  std::size_t k = 5;
  KernelMode mode = KernelMode::optimized;
  double variance_tol = 1e-12;
  // Number of worker threads for per-feature scoring; results do not depend on it.
  unsigned threads = 1;
};

/// Distance-evaluation counters for one kernel call.
struct KernelStats {
  std::size_t total_candidates = 0;
  std::size_t max_candidates_per_sample = 0;
};

// ---- per-sample k-NN distance sums -------------------------------------

/// For every sample i, the sum of its k smallest distances |f_i - f_j|,
/// j != i. Forms all n-1 distances per sample and sums the k smallest in
/// ascending order.
std::vector<double> knn_sample_sums_naive(std::span<const double> f, std::size_t k,
                                          KernelStats* stats = nullptr);

/// Same per-position sums for an already sorted (ascending or descending)
/// vector, examining only the k positions before and the k positions after
/// each entry.
std::vector<double> knn_sample_sums_window(std::span<const double> sorted, std::size_t k,
                                           KernelStats* stats = nullptr);

// ---- feature-level kernels ---------------------------------------------

/// d_r over all samples, accumulated in original sample order.
double knn_distance_sum_naive(std::span<const double> f, std::size_t k,
                              KernelStats* stats = nullptr);

enum class SortOrder { descending, ascending };

/// d_r via sort + window. Accumulates per-sample sums in sorted-position order.
double knn_distance_sum_sorted(std::span<const double> f, std::size_t k,
                               KernelStats* stats = nullptr,
                               SortOrder order = SortOrder::descending);

struct VarianceResult {
  double variance = 0.0;
  double mean = 0.0;
};

/// Population variance (divisor n) and mean.
VarianceResult feature_variance(std::span<const double> f);

/// d / v, or +infinity when v <= variance_tol.
double compactness_score(double d, double v, double variance_tol = 1e-12);

// ---- whole-matrix scoring and selection --------------------------------

/// Scores every column of an already normalized matrix.
FeatureScores score_all_features(const Dataset& x, const ScoringConfig& cfg);

/// Full feature ranking: ascending cs for the CSUFS methods, descending
/// variance for max_variance, identity for all_features. Ties go to the
/// lower index; +infinity scores rank last.
std::vector<std::size_t> rank_features(const FeatureScores& scores, Method method);

/// The first min(d, m) entries of rank_features. Warns when d > m.
SelectionResult select_features(const FeatureScores& scores, std::size_t d, Method method);

/// normalize_samples -> score_all_features -> select_features.
SelectionResult run_csufs(const Dataset& x_raw, std::size_t d, const ScoringConfig& cfg);

Method method_for(KernelMode mode);

}  // namespace csufs

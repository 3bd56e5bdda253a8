#pragma once

#include <cstddef>

#include "csufs/data_model.hpp"

namespace csufs {

/// Variance and mean of every column; d and cs are zero-filled and
/// has_knn is false.
FeatureScores variance_scores(const Dataset& x);

/// Keeps every feature in index order. Scores carry the variances of the
/// sample-normalized matrix.
SelectionResult select_all(const Dataset& x_raw);

/// The min(d, m) features of largest variance after sample normalization,
/// ties to the lower index.
SelectionResult select_max_variance(const Dataset& x_raw, std::size_t d);

}  // namespace csufs

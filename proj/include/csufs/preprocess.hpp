#pragma once

#include <cstddef>
#include <vector>

#include "csufs/data_model.hpp"

namespace csufs {

inline constexpr double kDefaultZeroTol = 1e-12;

/// Euclidean norm of sample i.
double sample_l2_norm(const Dataset& x, std::size_t i);

/// Scales every sample to unit l2 norm. Rows whose norm is <= zero_tol are
/// copied through unchanged.
Dataset normalize_samples(const Dataset& x, double zero_tol = kDefaultZeroTol);

/// Indices of rows that normalize_samples would leave untouched.
std::vector<std::size_t> degenerate_rows(const Dataset& x, double zero_tol = kDefaultZeroTol);

}  // namespace csufs

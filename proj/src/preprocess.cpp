#include "csufs/preprocess.hpp"

#include <cmath>

namespace csufs {
namespace {

std::vector<double> row_norms(const Dataset& x) {
  const std::size_t n = x.n_samples();
  std::vector<double> sq(n, 0.0);
  for (std::size_t r = 0; r < x.n_features(); ++r) {
    auto col = x.feature(r);
    for (std::size_t i = 0; i < n; ++i) sq[i] += col[i] * col[i];
  }
  for (double& s : sq) s = std::sqrt(s);
  return sq;
}

}  // namespace

double sample_l2_norm(const Dataset& x, std::size_t i) {
  double sq = 0.0;
  for (std::size_t r = 0; r < x.n_features(); ++r) sq += x.at(i, r) * x.at(i, r);
  return std::sqrt(sq);
}

Dataset normalize_samples(const Dataset& x, double zero_tol) {
  const std::size_t n = x.n_samples();
  const auto norms = row_norms(x);
  std::vector<double> out(x.column_major().begin(), x.column_major().end());
  for (std::size_t r = 0; r < x.n_features(); ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      if (norms[i] > zero_tol) out[r * n + i] /= norms[i];
    }
  }
  return Dataset::from_columns(n, x.n_features(), std::move(out), x.feature_names());
}

std::vector<std::size_t> degenerate_rows(const Dataset& x, double zero_tol) {
  const auto norms = row_norms(x);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (!(norms[i] > zero_tol)) out.push_back(i);
  }
  return out;
}

}  // namespace csufs

#include "csufs/baselines.hpp"

#include "csufs/compactness.hpp"
#include "csufs/preprocess.hpp"

namespace csufs {

FeatureScores variance_scores(const Dataset& x) {
  const std::size_t m = x.n_features();
  FeatureScores s;
  s.d.assign(m, 0.0);
  s.cs.assign(m, 0.0);
  s.v.resize(m);
  s.mu.resize(m);
  s.k_used = 0;
  s.has_knn = false;
  for (std::size_t r = 0; r < m; ++r) {
    const auto [v, mu] = feature_variance(x.feature(r));
    s.v[r] = v;
    s.mu[r] = mu;
  }
  return s;
}

SelectionResult select_all(const Dataset& x_raw) {
  const auto scores = variance_scores(normalize_samples(x_raw));
  return select_features(scores, x_raw.n_features(), Method::all_features);
}

SelectionResult select_max_variance(const Dataset& x_raw, std::size_t d) {
  const auto scores = variance_scores(normalize_samples(x_raw));
  return select_features(scores, d, Method::max_variance);
}

}  // namespace csufs

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csufs {

/// Dense n x m matrix of samples (rows) by features (columns).
///
/// Values are stored column-major so every feature is a contiguous span,
/// which is what the per-feature scoring loops iterate over. A Dataset is
/// immutable once constructed and always holds finite values with n, m >= 1.
class Dataset {
 public:
  /// Builds from row-major rows. Throws EmptyMatrix, NonFiniteEntry, or
  /// InvalidArgument for a ragged input.
  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::vector<std::string> feature_names = {});

  /// Builds from a column-major buffer of n_samples * n_features values.
  static Dataset from_columns(std::size_t n_samples, std::size_t n_features,
                              std::vector<double> column_major,
                              std::vector<std::string> feature_names = {});

  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_features() const noexcept { return n_features_; }

  std::span<const double> feature(std::size_t r) const {
    return {values_.data() + r * n_samples_, n_samples_};
  }
  double at(std::size_t i, std::size_t r) const { return values_[r * n_samples_ + i]; }
  std::vector<double> row(std::size_t i) const;

  std::span<const double> column_major() const noexcept { return values_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  /// New dataset holding the given columns in the given order.
  Dataset select_columns(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  Dataset() = default;
  std::size_t n_samples_ = 0;
  std::size_t n_features_ = 0;
  std::vector<double> values_;
  std::vector<std::string> feature_names_;
};

/// validate_dataset: checks a raw row-major matrix and wraps it.
Dataset validate_dataset(const std::vector<std::vector<double>>& rows);

/// Class or cluster assignments canonicalized to 0..n_classes-1.
class LabelVector {
 public:
  LabelVector() = default;

  /// Canonicalizes arbitrary non-negative integer labels. Distinct raw values
  /// map to dense ids in ascending raw order.
  static LabelVector canonicalize(std::span<const long long> raw);

  /// Canonicalizes textual labels. When every label parses as a number the
  /// ids follow ascending numeric order, otherwise lexicographic order.
  static LabelVector canonicalize(std::span<const std::string> raw);

  /// Wraps labels that are already in 0..n_classes-1 (e.g. k-means output).
  /// n_classes is max+1 so empty clusters still count as classes.
  static LabelVector from_dense(std::vector<int> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t n_classes() const noexcept { return n_classes_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int operator[](std::size_t i) const { return labels_[i]; }

  bool operator==(const LabelVector&) const = default;

 private:
  std::vector<int> labels_;
  std::size_t n_classes_ = 0;
};

enum class Method { csufs_optimized, csufs_naive, max_variance, all_features };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

/// Per-feature scoring output. cs holds +infinity for degenerate
/// (near-zero variance) features. has_knn is false for selectors that only
/// compute variances, in which case d and cs are zero-filled.
struct FeatureScores {
  std::vector<double> d;
  std::vector<double> v;
  std::vector<double> cs;
  std::vector<double> mu;
  std::size_t k_used = 0;
  bool has_knn = true;

  std::size_t size() const noexcept { return v.size(); }
  bool operator==(const FeatureScores&) const = default;
};

struct SelectionResult {
  std::vector<std::size_t> selected;
  FeatureScores scores;
  Method method = Method::csufs_optimized;
  std::size_t d_requested = 0;

  bool operator==(const SelectionResult&) const = default;
};

}  // namespace csufs

#include "csufs/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <utility>

#include "csufs/errors.hpp"

namespace csufs {

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows,
                           std::vector<std::string> feature_names) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.front().size();
  if (n == 0 || m == 0) throw EmptyMatrix(n, m);

  std::vector<double> values(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m) {
      throw InvalidArgument("row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " columns, expected " +
                            std::to_string(m));
    }
    for (std::size_t r = 0; r < m; ++r) values[r * n + i] = rows[i][r];
  }
  return from_columns(n, m, std::move(values), std::move(feature_names));
}

Dataset Dataset::from_columns(std::size_t n_samples, std::size_t n_features,
                              std::vector<double> column_major,
                              std::vector<std::string> feature_names) {
  if (n_samples == 0 || n_features == 0) throw EmptyMatrix(n_samples, n_features);
  if (column_major.size() != n_samples * n_features) {
    throw LengthMismatch(column_major.size(), n_samples * n_features);
  }
  if (!feature_names.empty() && feature_names.size() != n_features) {
    throw LengthMismatch(feature_names.size(), n_features);
  }
  // Report the first offender in row-major reading order.
  std::optional<std::pair<std::size_t, std::size_t>> bad;
  for (std::size_t r = 0; r < n_features; ++r) {
    for (std::size_t i = 0; i < n_samples; ++i) {
      if (!std::isfinite(column_major[r * n_samples + i])) {
        if (!bad || std::pair{i, r} < *bad) bad = std::pair{i, r};
        break;
      }
    }
  }
  if (bad) throw NonFiniteEntry(bad->first, bad->second);

  Dataset ds;
  ds.n_samples_ = n_samples;
  ds.n_features_ = n_features;
  ds.values_ = std::move(column_major);
  ds.feature_names_ = std::move(feature_names);
  return ds;
}

std::vector<double> Dataset::row(std::size_t i) const {
  std::vector<double> out(n_features_);
  for (std::size_t r = 0; r < n_features_; ++r) out[r] = at(i, r);
  return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> indices) const {
  std::vector<double> values;
  values.reserve(indices.size() * n_samples_);
  std::vector<std::string> names;
  for (std::size_t r : indices) {
    if (r >= n_features_) {
      throw InvalidArgument("feature index " + std::to_string(r) + " out of range");
    }
    auto col = feature(r);
    values.insert(values.end(), col.begin(), col.end());
    if (!feature_names_.empty()) names.push_back(feature_names_[r]);
  }
  return from_columns(n_samples_, indices.size(), std::move(values), std::move(names));
}

Dataset validate_dataset(const std::vector<std::vector<double>>& rows) {
  return Dataset::from_rows(rows);
}

LabelVector LabelVector::canonicalize(std::span<const long long> raw) {
  std::map<long long, int> ids;
  for (long long x : raw) {
    if (x < 0) throw InvalidArgument("negative label " + std::to_string(x));
    ids.emplace(x, 0);
  }
  int next = 0;
  for (auto& [value, id] : ids) id = next++;

  LabelVector out;
  out.labels_.reserve(raw.size());
  for (long long x : raw) out.labels_.push_back(ids.at(x));
  out.n_classes_ = ids.size();
  return out;
}

namespace {

std::optional<double> parse_number(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

LabelVector LabelVector::canonicalize(std::span<const std::string> raw) {
  std::vector<double> numeric;
  numeric.reserve(raw.size());
  for (const auto& s : raw) {
    auto v = parse_number(s);
    if (!v) {
      numeric.clear();
      break;
    }
    numeric.push_back(*v);
  }

  LabelVector out;
  out.labels_.reserve(raw.size());
  if (!raw.empty() && numeric.size() == raw.size()) {
    std::map<double, int> ids;
    for (double x : numeric) ids.emplace(x, 0);
    int next = 0;
    for (auto& [value, id] : ids) id = next++;
    for (double x : numeric) out.labels_.push_back(ids.at(x));
    out.n_classes_ = ids.size();
  } else {
    std::map<std::string, int> ids;
    for (const auto& s : raw) ids.emplace(s, 0);
    int next = 0;
    for (auto& [value, id] : ids) id = next++;
    for (const auto& s : raw) out.labels_.push_back(ids.at(s));
    out.n_classes_ = ids.size();
  }
  return out;
}

LabelVector LabelVector::from_dense(std::vector<int> labels) {
  LabelVector out;
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("negative label " + std::to_string(l));
    max_label = std::max(max_label, l);
  }
  out.labels_ = std::move(labels);
  out.n_classes_ = static_cast<std::size_t>(max_label + 1);
  return out;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::csufs_optimized: return "csufs_optimized";
    case Method::csufs_naive: return "csufs_naive";
    case Method::max_variance: return "max_variance";
    case Method::all_features: return "all_features";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::csufs_optimized, Method::csufs_naive, Method::max_variance,
                   Method::all_features}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

}  // namespace csufs

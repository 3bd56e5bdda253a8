#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "csufs/data_model.hpp"
#include "csufs/errors.hpp"

using namespace csufs;

TEST_CASE("validate_dataset accepts a well-formed matrix") {
  const auto ds = validate_dataset({{1, 2}, {3, 4}});
  CHECK(ds.n_samples() == 2);
  CHECK(ds.n_features() == 2);
  CHECK(ds.at(1, 0) == 3);
  CHECK(ds.feature(1)[0] == 2);
  CHECK(ds.feature(1)[1] == 4);
  CHECK(ds.row(1) == std::vector<double>{3, 4});
}

TEST_CASE("validate_dataset rejects empty matrices") {
  CHECK_THROWS_AS(validate_dataset({}), EmptyMatrix);
  CHECK_THROWS_AS(validate_dataset({{}, {}}), EmptyMatrix);
  CHECK_THROWS_AS(Dataset::from_columns(0, 5, {}), EmptyMatrix);
}

TEST_CASE("validate_dataset reports the non-finite entry position") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    validate_dataset({{1, nan}});
    FAIL("expected NonFiniteEntry");
  } catch (const NonFiniteEntry& e) {
    CHECK(e.row() == 0);
    CHECK(e.col() == 1);
  }
  try {
    validate_dataset({{1, 2}, {3, 4}, {std::numeric_limits<double>::infinity(), 0}});
    FAIL("expected NonFiniteEntry");
  } catch (const NonFiniteEntry& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 0);
  }
}

TEST_CASE("ragged rows are rejected") {
  CHECK_THROWS_AS(validate_dataset({{1, 2}, {3}}), InvalidArgument);
}

TEST_CASE("construction preserves values bit-exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::vector<std::vector<double>> rows(13, std::vector<double>(9));
  for (auto& r : rows)
    for (auto& x : r) x = u(rng);
  const auto ds = validate_dataset(rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      const double got = ds.at(i, j);
      CHECK(std::memcmp(&got, &rows[i][j], sizeof got) == 0);
    }
  }
}

TEST_CASE("select_columns keeps requested order and names") {
  const auto ds = Dataset::from_rows({{1, 2, 3}, {4, 5, 6}}, {"a", "b", "c"});
  const std::vector<std::size_t> idx = {2, 0};
  const auto sub = ds.select_columns(idx);
  CHECK(sub.n_features() == 2);
  CHECK(sub.row(1) == std::vector<double>{6, 4});
  CHECK(sub.feature_names() == std::vector<std::string>{"c", "a"});
  const std::vector<std::size_t> bad = {3};
  CHECK_THROWS_AS(ds.select_columns(bad), InvalidArgument);
}

TEST_CASE("label canonicalization is a dense bijection") {
  SUBCASE("gapped integers") {
    const std::vector<long long> raw = {7, 3, 7, 10, 3};
    const auto lv = LabelVector::canonicalize(raw);
    CHECK(lv.n_classes() == 3);
    CHECK(lv.labels() == std::vector<int>{1, 0, 1, 2, 0});
  }
  SUBCASE("numeric text sorts numerically") {
    const std::vector<std::string> raw = {"10", "2", "2", "1.0"};
    const auto lv = LabelVector::canonicalize(raw);
    CHECK(lv.labels() == std::vector<int>{2, 1, 1, 0});
  }
  SUBCASE("names") {
    const std::vector<std::string> raw = {"ALL", "AML", "ALL"};
    const auto lv = LabelVector::canonicalize(raw);
    CHECK(lv.n_classes() == 2);
    CHECK(lv.labels() == std::vector<int>{0, 1, 0});
  }
  SUBCASE("property: same canonical label iff same raw label") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long long> pick(0, 40);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<long long> raw(30);
      for (auto& x : raw) x = pick(rng) * 3;
      const auto lv = LabelVector::canonicalize(raw);
      for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(lv[i] >= 0);
        CHECK(static_cast<std::size_t>(lv[i]) < lv.n_classes());
        for (std::size_t j = 0; j < raw.size(); ++j) {
          CHECK((raw[i] == raw[j]) == (lv[i] == lv[j]));
        }
      }
    }
  }
  CHECK_THROWS_AS(LabelVector::canonicalize(std::vector<long long>{-1}), InvalidArgument);
}

TEST_CASE("method names round-trip") {
  for (Method m : {Method::csufs_optimized, Method::csufs_naive, Method::max_variance,
                   Method::all_features}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_FALSE(parse_method("laplacian").has_value());
}

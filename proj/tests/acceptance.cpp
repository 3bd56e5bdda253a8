// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance --cli <path to csufs binary> [--only A3]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "csufs/cli.hpp"
#include "csufs/cluster_eval.hpp"
#include "csufs/compactness.hpp"
#include "csufs/preprocess.hpp"
#include "oracles.hpp"

using namespace csufs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures without stopping at the first one.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_ < 5) notes_ += (notes_.empty() ? "" : "; ") + what;
    if (!ok) ++failures_;
  }
  Outcome done(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    return {false, std::to_string(failures_) + " failure(s): " + notes_};
  }

 private:
  std::size_t failures_ = 0;
  std::string notes_;
};

std::string fmt(double x, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

struct RandomCase {
  std::size_t n, m, k;
  bool integer;
  std::vector<std::vector<double>> cols;
};

RandomCase random_case(std::mt19937_64& rng, bool integer) {
  RandomCase c;
  c.n = 5 + rng() % 196;  // [5, 200]
  c.m = 1 + rng() % 50;   // [1, 50]
  c.k = 1 + rng() % std::min<std::size_t>(10, c.n - 1);
  c.integer = integer;
  for (std::size_t r = 0; r < c.m; ++r) {
    c.cols.push_back(integer ? oracle::random_integers(rng, c.n, -100, 100)
                             : oracle::random_reals(rng, c.n, -10, 10));
  }
  return c;
}

Dataset to_dataset(const RandomCase& c) {
  std::vector<double> flat;
  for (const auto& col : c.cols) flat.insert(flat.end(), col.begin(), col.end());
  return Dataset::from_columns(c.n, c.m, flat);
}

bool same(double a, double b, bool exact) { return exact ? a == b : oracle::rel_close(a, b, 1e-9); }

// ---- A1 ----------------------------------------------------------------------
Outcome kernel_equivalence() {
  std::mt19937_64 rng(101);
  Check check;
  std::size_t features = 0;
  for (int t = 0; t < 120; ++t) {
    const auto c = random_case(rng, t % 2 == 0);
    for (const auto& f : c.cols) {
      const double ref = oracle::knn_sum(f, c.k);
      const double naive = knn_distance_sum_naive(f, c.k);
      const double sorted = knn_distance_sum_sorted(f, c.k);
      ++features;
      check.require(same(naive, ref, c.integer) && same(sorted, ref, c.integer) &&
                        same(sorted, naive, c.integer),
                    "case " + std::to_string(t) + " n=" + std::to_string(c.n) + " k=" +
                        std::to_string(c.k));
    }
  }
  return check.done("120 cases, " + std::to_string(features) + " features, integer cases exact");
}

// ---- A2 ----------------------------------------------------------------------
Outcome mode_equivalence() {
  std::mt19937_64 rng(202);
  Check check;
  for (int t = 0; t < 20; ++t) {
    const auto c = random_case(rng, t % 2 == 0);
    const auto x = to_dataset(c);
    const std::size_t d = 1 + rng() % c.m;
    ScoringConfig cfg;
    cfg.k = c.k;
    cfg.mode = KernelMode::naive;
    const auto a = run_csufs(x, d, cfg);
    cfg.mode = KernelMode::optimized;
    const auto b = run_csufs(x, d, cfg);
    check.require(a.selected == b.selected, "dataset " + std::to_string(t));
  }
  return check.done("20 datasets, identical selections");
}

// ---- A3 ----------------------------------------------------------------------
Outcome speedup() {
  Check check;
  cli::BenchOptions big;
  big.n_list = {20000};
  big.m = 50;
  big.k = 5;
  big.reps = 1;
  big.min_time = 0.0;
  const auto large = cli::run_bench(big).grid.at(0);
  check.require(large.agree, "d vectors disagree at n=20000");
  check.require(large.speedup >= 10.0, "speedup " + fmt(large.speedup) + " < 10 at n=20000");

  cli::BenchOptions scaling;
  scaling.n_list = {1000, 2000, 4000};
  scaling.m = 50;
  scaling.k = 5;
  scaling.reps = 5;
  scaling.min_time = 0.2;
  const auto grid = cli::run_bench(scaling).grid;
  const double opt_ratio = grid[2].optimized_seconds / grid[1].optimized_seconds;
  const double naive_ratio = grid[2].naive_seconds / grid[1].naive_seconds;
  for (const auto& cell : grid) check.require(cell.agree, "disagreement at n=" + std::to_string(cell.n));
  check.require(opt_ratio >= 1.5 && opt_ratio <= 3.0, "optimized ratio " + fmt(opt_ratio));
  check.require(naive_ratio >= 3.0 && naive_ratio <= 6.0, "naive ratio " + fmt(naive_ratio));

  return check.done("n=20000: naive " + fmt(large.naive_seconds) + " s, optimized " +
                    fmt(large.optimized_seconds) + " s, speedup " + fmt(large.speedup) +
                    "x; 4000/2000 ratios optimized " + fmt(opt_ratio) + ", naive " +
                    fmt(naive_ratio));
}

// ---- A4 ----------------------------------------------------------------------
struct Synthetic {
  Dataset x;
  LabelVector truth;
};

Synthetic synthetic_recovery_data(std::uint64_t seed) {
  const std::size_t n = 300, informative = 10, m = 100;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> flat(n * m);
  std::vector<long long> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<long long>(i % 2);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      flat[r * n + i] = r < informative ? (labels[i] ? 1.0 : -1.0) + noise(rng) : uniform(rng);
    }
  }
  return {Dataset::from_columns(n, m, flat), LabelVector::canonicalize(labels)};
}

Outcome synthetic_recovery() {
  const auto data = synthetic_recovery_data(404);
  Check check;

  ScoringConfig cfg;
  cfg.k = 5;
  const auto sel = run_csufs(data.x, 10, cfg);
  const std::size_t hits = static_cast<std::size_t>(
      std::count_if(sel.selected.begin(), sel.selected.end(), [](std::size_t r) { return r < 10; }));
  check.require(hits >= 9, "only " + std::to_string(hits) + " informative features selected");

  // Brute-force scores on the normalized matrix.
  const auto xn = normalize_samples(data.x);
  std::vector<std::pair<double, std::size_t>> ref;
  for (std::size_t r = 0; r < xn.n_features(); ++r) {
    const std::vector<double> f(xn.feature(r).begin(), xn.feature(r).end());
    ref.emplace_back(oracle::knn_sum(f, 5) / oracle::variance(f), r);
  }
  std::sort(ref.begin(), ref.end());
  std::vector<std::size_t> ref_top;
  for (std::size_t t = 0; t < 10; ++t) ref_top.push_back(ref[t].second);
  check.require(ref_top == sel.selected, "selection differs from brute-force ranking");

  EvalConfig ecfg;
  const auto rep = evaluate_selection(data.x, sel.selected, data.truth, ecfg);
  check.require(rep.per_seed.size() == 10, "expected 10 seeds");
  check.require(rep.mean_acc >= 0.95, "mean ACC " + fmt(rep.mean_acc));
  check.require(rep.mean_nmi >= 0.8, "mean NMI " + fmt(rep.mean_nmi));
  return check.done(std::to_string(hits) + "/10 informative selected, mean ACC " +
                    fmt(rep.mean_acc, 4) + ", mean NMI " + fmt(rep.mean_nmi, 4));
}

// ---- A5 ----------------------------------------------------------------------
Outcome metric_correctness() {
  std::mt19937_64 rng(505);
  Check check;
  auto dense = [](std::vector<int> v) { return LabelVector::from_dense(std::move(v)); };

  for (int t = 0; t < 50; ++t) {
    const int c = 1 + static_cast<int>(rng() % 5);
    const std::size_t n = 1 + rng() % 30;
    std::vector<int> s(n), r(n);
    for (auto& v : s) v = static_cast<int>(rng() % c);
    for (auto& v : r) v = static_cast<int>(rng() % c);
    check.require(clustering_accuracy(dense(s), dense(r)) == oracle::accuracy(s, r),
                  "ACC mismatch on pair " + std::to_string(t));
  }

  const auto a = dense({0, 0, 1, 1}), b = dense({0, 1, 0, 1});
  check.require(normalized_mutual_information(a, b) == 0.0, "independent case is not 0");
  check.require(std::abs(normalized_mutual_information(a, a) - 1.0) <= 1e-12, "identical is not 1");
  const auto p = dense({0, 1, 2, 2, 1, 0, 3}), q = dense({3, 2, 1, 1, 2, 3, 0});
  check.require(std::abs(normalized_mutual_information(p, q) - 1.0) <= 1e-12,
                "relabelled identical partition is not 1");

  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 60;
    const int cs = 1 + static_cast<int>(rng() % 6), cr = 1 + static_cast<int>(rng() % 6);
    std::vector<int> s(n), r(n);
    for (auto& v : s) v = static_cast<int>(rng() % cs);
    for (auto& v : r) v = static_cast<int>(rng() % cr);
    const double nmi = normalized_mutual_information(dense(s), dense(r));
    check.require(nmi >= 0.0 && nmi <= 1.0, "NMI out of range on pair " + std::to_string(t));
  }
  return check.done("50 ACC pairs exact vs enumeration, NMI examples, 200 range checks");
}

// ---- A6 ----------------------------------------------------------------------
bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Outcome invariance_suite() {
  std::mt19937_64 rng(606);
  Check check;
  for (int t = 0; t < 50; ++t) {
    const bool integer = t % 2 == 0;
    // Every fourth case uses a power-of-two length so the mean is exact.
    std::size_t n = 5 + rng() % 196;
    if (t % 4 == 0) n = std::size_t{8} << (rng() % 5);
    const std::size_t k = 1 + rng() % std::min<std::size_t>(10, n - 1);
    const auto f = integer ? oracle::random_integers(rng, n, -500, 500)
                           : oracle::random_reals(rng, n, -5, 5);
    const double shift = integer ? static_cast<double>(static_cast<int>(rng() % 201) - 100)
                                 : oracle::random_reals(rng, 1, -3, 3)[0];
    int int_scale = static_cast<int>(rng() % 19) - 9;
    if (int_scale == 0) int_scale = 4;
    const double scale = integer ? static_cast<double>(int_scale)
                                 : oracle::random_reals(rng, 1, 0.1, 4)[0] * (t % 3 ? 1 : -1);
    const std::string tag = "case " + std::to_string(t);

    auto perm = f, shifted = f, scaled = f;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (double& v : shifted) v += shift;
    for (double& v : scaled) v *= scale;

    KernelStats stats;
    const double d = knn_distance_sum_sorted(f, k, &stats);
    check.require(stats.max_candidates_per_sample <= 2 * k, tag + " candidate bound");
    check.require(same(knn_distance_sum_naive(perm, k), d, integer), tag + " naive permutation");
    check.require(same(knn_distance_sum_naive(shifted, k), d, integer), tag + " naive translation");
    check.require(same(knn_distance_sum_naive(scaled, k), std::abs(scale) * d, integer),
                  tag + " naive scale");
    check.require(same(knn_distance_sum_sorted(perm, k), d, integer), tag + " permutation");
    check.require(same(knn_distance_sum_sorted(shifted, k), d, integer), tag + " translation");
    check.require(same(knn_distance_sum_sorted(scaled, k), std::abs(scale) * d, integer), tag + " scale");

    // Variance and score: exact when every intermediate is representable
    // (integer data, power-of-two n); 1e-12 for other integer data.
    const bool exact_var = integer && power_of_two(n);
    const double tol = integer ? 1e-12 : 1e-9;
    auto near = [&](double a, double b) { return exact_var ? a == b : oracle::rel_close(a, b, tol); };
    const double v = feature_variance(f).variance;
    check.require(near(feature_variance(perm).variance, v), tag + " variance permutation");
    check.require(near(feature_variance(shifted).variance, v), tag + " variance translation");
    check.require(near(feature_variance(scaled).variance, scale * scale * v), tag + " variance scale");
    // The score is a quotient of the above, so it carries one more rounding.
    const double cs = compactness_score(d, v);
    const double cs_scaled =
        compactness_score(knn_distance_sum_sorted(scaled, k), feature_variance(scaled).variance);
    check.require(oracle::rel_close(cs_scaled, cs / std::abs(scale), tol), tag + " score scale");
  }

  // Ten distinct integers, k = 2.
  const std::vector<double> fig = {10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  KernelStats window, naive;
  knn_distance_sum_sorted(fig, 2, &window);
  knn_distance_sum_naive(fig, 2, &naive);
  check.require(window.max_candidates_per_sample == 4, "window count at n=10, k=2");
  check.require(naive.max_candidates_per_sample == 9, "naive count at n=10, k=2");

  // Selection invariant under a common positive scale of a normalized matrix.
  std::vector<double> flat = oracle::random_reals(rng, 60 * 15, -1, 1);
  const auto xn = normalize_samples(Dataset::from_columns(60, 15, flat));
  std::vector<double> scaled(xn.column_major().begin(), xn.column_major().end());
  for (double& v : scaled) v *= 3.5;
  ScoringConfig cfg;
  const auto a = select_features(score_all_features(xn, cfg), 6, Method::csufs_optimized).selected;
  const auto b = select_features(score_all_features(Dataset::from_columns(60, 15, scaled), cfg), 6,
                                 Method::csufs_optimized)
                     .selected;
  check.require(a == b, "selection changed under common scaling");

  return check.done("50 cases; window 4 vs naive 9 distances at n=10, k=2");
}

// ---- A7 ----------------------------------------------------------------------
std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string payload_without_timestamp(const fs::path& p, bool strip_timings) {
  auto j = nlohmann::json::parse(read_file(p));
  j.erase("timestamp");
  if (strip_timings) {
    for (auto& cell : j["payload"]["grid"]) {
      cell.erase("naive_seconds");
      cell.erase("optimized_seconds");
      cell.erase("speedup");
    }
  }
  return j.dump();
}

Outcome determinism(const std::string& cli) {
  Check check;
  if (cli.empty()) return {false, "no --cli binary given"};
  const fs::path dir = fs::temp_directory_path() / ("csufs_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const auto data = synthetic_recovery_data(707);
  {
    std::ofstream out(dir / "data.csv");
    for (std::size_t r = 0; r < data.x.n_features(); ++r) out << 'f' << r << ',';
    out << "label\n";
    for (std::size_t i = 0; i < data.x.n_samples(); ++i) {
      for (std::size_t r = 0; r < data.x.n_features(); ++r) out << format_real(data.x.at(i, r)) << ',';
      out << data.truth[i] << '\n';
    }
  }
  const std::string in = "--input " + (dir / "data.csv").string() + " --label-col label";
  struct Cmd {
    std::string name, args;
    bool bench;
  };
  const std::vector<Cmd> cmds = {
      {"select_opt", "select " + in + " --d 10 --k 5", false},
      {"select_naive", "select " + in + " --d 10 --k 5 --mode naive", false},
      {"select_maxvar", "select " + in + " --method maxvar --d 10", false},
      {"select_all", "select " + in + " --method all", false},
      {"evaluate", "evaluate " + in + " --d 10 --k 5 --seeds 0..9", false},
      {"evaluate_threads", "evaluate " + in + " --d 10 --k 5 --threads 3", false},
      {"sweep", "sweep " + in + " --d-grid 10:30:10 --k-grid 5,10 --seeds 0..4", false},
      {"bench", "bench --n 300,600 --m 10 --k 5 --reps 1 --min-time 0", true},
  };
  for (const auto& c : cmds) {
    std::string payload[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / (c.name + std::to_string(rep) + ".json");
      const std::string cmd = cli + " " + c.args + " --output " + out.string() + " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      check.require(rc == 0, c.name + " exited with " + std::to_string(rc));
      if (rc != 0) break;
      payload[rep] = payload_without_timestamp(out, c.bench);
    }
    check.require(!payload[0].empty() && payload[0] == payload[1], c.name + " payload differs");
  }
  check.require(read_file(dir / "sweep0.csv") == read_file(dir / "sweep1.csv"), "sweep CSV differs");
  fs::remove_all(dir);
  return check.done(std::to_string(cmds.size()) + " commands byte-identical modulo timestamp");
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) cli = argv[++i];
    else if (a == "--only" && i + 1 < argc) only = argv[++i];
  }

  struct Criterion {
    std::string id;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"A1", 60, kernel_equivalence},
      {"A2", 60, mode_equivalence},
      {"A3", 300, speedup},
      {"A4", 30, synthetic_recovery},
      {"A5", 30, metric_correctness},
      {"A6", 30, invariance_suite},
      {"A7", 60, [&] { return determinism(cli); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.id) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.budget_seconds) {
      o.pass = false;
      o.detail += " (runtime " + fmt(secs) + " s exceeds " + fmt(c.budget_seconds) + " s)";
    }
    std::printf("%s %s [%.1f s] %s\n", c.id.c_str(), o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}

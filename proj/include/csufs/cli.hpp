#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csufs/compactness.hpp"
#include "csufs/io_formats.hpp"

namespace csufs::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// "start:stop:step" (stop included when aligned), "a..b" (step 1),
/// a comma list, or a single value. Throws InvalidArgument on empty or
/// malformed input.
std::vector<std::size_t> parse_grid(std::string_view spec);
std::vector<std::uint64_t> parse_seeds(std::string_view spec);

struct InputOptions {
  std::filesystem::path input;
  std::optional<std::string> label_col;
  HeaderMode header = HeaderMode::detect;
};

struct SelectOptions {
  InputOptions in;
  std::string method = "csufs";  // csufs | maxvar | all
  std::size_t d = 10;
  std::size_t k = 5;
  std::string mode = "optimized";  // optimized | naive
  unsigned threads = 1;
  std::optional<std::filesystem::path> write_matrix;
  std::optional<std::filesystem::path> output;
};

struct EvaluateOptions {
  SelectOptions sel;
  std::string seeds = "0..9";
  std::optional<std::size_t> clusters;
};

struct SweepOptions {
  SelectOptions sel;
  std::string d_grid;
  std::string k_grid = "5";
  std::string seeds = "0..9";
  std::optional<std::size_t> clusters;
  std::optional<std::filesystem::path> csv;
};

struct BenchOptions {
  std::vector<std::size_t> n_list = {1000, 2000, 4000};
  std::size_t m = 50;
  std::size_t k = 5;
  std::size_t reps = 3;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double min_time = 0.05;  // seconds per timing sample
  std::optional<std::filesystem::path> output;
};

/// Uniform [0, 1) matrix driven only by (seed, n, m).
Dataset bench_matrix(std::size_t n, std::size_t m, std::uint64_t seed);

/// Times naive and optimized d-vector computation per n. Throws Error when
/// the two kernels disagree beyond 1e-9 relative.
BenchReport run_bench(const BenchOptions& opts);

// Each command returns an ExitCode. Diagnostics go to `err`; the report goes
// to --output or, when absent, to `out`.
int cmd_select(const SelectOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

/// Runs the full command line (argv[0] included).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace csufs::cli

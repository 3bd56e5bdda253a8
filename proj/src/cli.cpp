#include "csufs/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "csufs/baselines.hpp"
#include "csufs/cluster_eval.hpp"
#include "csufs/errors.hpp"
#include "csufs/preprocess.hpp"

namespace csufs::cli {
namespace {

std::uint64_t parse_uint(std::string_view s, std::string_view spec) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidArgument("bad grid spec '" + std::string(spec) + "'");
  }
  return v;
}

std::vector<std::uint64_t> parse_range(std::string_view spec) {
  if (spec.find_first_not_of(" \t") == std::string_view::npos) {
    throw InvalidArgument("empty grid spec");
  }
  std::vector<std::uint64_t> out;
  if (auto dots = spec.find(".."); dots != std::string_view::npos) {
    const auto a = parse_uint(spec.substr(0, dots), spec);
    const auto b = parse_uint(spec.substr(dots + 2), spec);
    if (b < a) throw InvalidArgument("bad grid spec '" + std::string(spec) + "'");
    for (auto v = a; v <= b; ++v) out.push_back(v);
  } else if (spec.find(':') != std::string_view::npos) {
    std::vector<std::uint64_t> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = spec.find(':', start);
      parts.push_back(parse_uint(spec.substr(start, colon - start), spec));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3 || parts[2] == 0 || parts[1] < parts[0]) {
      throw InvalidArgument("bad grid spec '" + std::string(spec) + "', expected start:stop:step");
    }
    for (auto v = parts[0]; v <= parts[1]; v += parts[2]) out.push_back(v);
  } else {
    std::size_t start = 0;
    while (true) {
      const auto comma = spec.find(',', start);
      out.push_back(parse_uint(spec.substr(start, comma - start), spec));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

Method resolve_method(const SelectOptions& o) {
  if (o.method == "csufs") {
    if (o.mode == "optimized") return Method::csufs_optimized;
    if (o.mode == "naive") return Method::csufs_naive;
    throw InvalidArgument("unknown mode '" + o.mode + "'");
  }
  if (o.method == "maxvar") return Method::max_variance;
  if (o.method == "all") return Method::all_features;
  throw InvalidArgument("unknown method '" + o.method + "'");
}

LoadedData load(const InputOptions& in) {
  std::optional<LabelSelector> sel;
  if (in.label_col) sel = parse_label_selector(*in.label_col);
  return load_csv(in.input, in.header, sel);
}

SelectionResult run_selection(const Dataset& x, const SelectOptions& o) {
  switch (resolve_method(o)) {
    case Method::csufs_optimized:
    case Method::csufs_naive: {
      ScoringConfig cfg;
      cfg.k = o.k;
      cfg.mode = o.mode == "naive" ? KernelMode::naive : KernelMode::optimized;
      cfg.threads = o.threads;
      return run_csufs(x, o.d, cfg);
    }
    case Method::max_variance:
      return select_max_variance(x, o.d);
    case Method::all_features:
      return select_all(x);
  }
  throw InvalidArgument("unreachable method");
}

nlohmann::json selection_invocation(std::string_view command, const SelectOptions& o) {
  nlohmann::json j = {{"command", command},
                      {"input", o.in.input.string()},
                      {"method", o.method},
                      {"d", o.d},
                      {"k", o.k},
                      {"mode", o.mode}};
  j["label_col"] = o.in.label_col ? nlohmann::json(*o.in.label_col) : nlohmann::json(nullptr);
  return j;
}

ReportDocument make_doc(nlohmann::json invocation, ReportPayload payload) {
  return {std::string(kToolVersion), std::move(invocation), std::move(payload), iso8601_now()};
}

// Writes the report to --output or to `out`. Returns the stream that should
// receive human-readable summaries.
std::ostream& emit(const ReportDocument& doc, const std::optional<std::filesystem::path>& output,
                   std::ostream& out, std::ostream& err) {
  if (output) {
    write_report(doc, *output);
    return out;
  }
  out << serialize_report(doc);
  return err;
}

std::string percent(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * x << '%';
  return s.str();
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

// Seconds per call, repeating the call until at least min_time has elapsed.
template <class Fn>
double time_call(double min_time, Fn&& fn) {
  using clock = std::chrono::steady_clock;
  std::size_t iters = 0;
  const auto start = clock::now();
  double elapsed = 0.0;
  do {
    fn();
    ++iters;
    elapsed = std::chrono::duration<double>(clock::now() - start).count();
  } while (elapsed < min_time);
  return elapsed / static_cast<double>(iters);
}

}  // namespace

std::vector<std::size_t> parse_grid(std::string_view spec) {
  std::vector<std::size_t> out;
  for (auto v : parse_range(spec)) {
    if (v == 0) throw InvalidArgument("grid values must be positive in '" + std::string(spec) + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(std::string_view spec) { return parse_range(spec); }

Dataset bench_matrix(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m)};
  std::mt19937_64 rng(seq);
  std::vector<double> values(n * m);
  for (double& v : values) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return Dataset::from_columns(n, m, std::move(values));
}

BenchReport run_bench(const BenchOptions& o) {
  if (o.n_list.empty() || o.m == 0 || o.k == 0 || o.reps == 0) {
    throw InvalidArgument("bench sizes must be positive");
  }
  BenchReport rep;
  rep.repetitions = o.reps;
  rep.seed = o.seed;
  for (std::size_t n : o.n_list) {
    const Dataset x = bench_matrix(n, o.m, o.seed);
    ScoringConfig naive_cfg;
    naive_cfg.k = o.k;
    naive_cfg.mode = KernelMode::naive;
    naive_cfg.threads = o.threads;
    ScoringConfig opt_cfg = naive_cfg;
    opt_cfg.mode = KernelMode::optimized;

    std::vector<double> d_naive, d_opt;
    std::vector<double> t_naive, t_opt;
    for (std::size_t r = 0; r < o.reps; ++r) {
      t_naive.push_back(time_call(o.min_time, [&] { d_naive = score_all_features(x, naive_cfg).d; }));
      t_opt.push_back(time_call(o.min_time, [&] { d_opt = score_all_features(x, opt_cfg).d; }));
    }

    double max_rel = 0.0, checksum = 0.0;
    for (std::size_t j = 0; j < d_naive.size(); ++j) {
      const double scale = std::max({std::abs(d_naive[j]), std::abs(d_opt[j]), 1e-300});
      max_rel = std::max(max_rel, std::abs(d_naive[j] - d_opt[j]) / scale);
      checksum += d_opt[j];
    }
    if (!(max_rel <= 1e-9)) {
      throw Error("AgreementFailure: naive and optimized d vectors differ by " +
                  format_real(max_rel) + " relative at n=" + std::to_string(n));
    }
    BenchCell cell;
    cell.n = n;
    cell.m = o.m;
    cell.k = o.k;
    cell.naive_seconds = median(t_naive);
    cell.optimized_seconds = median(t_opt);
    cell.speedup = cell.naive_seconds / cell.optimized_seconds;
    cell.agree = true;
    cell.max_rel_diff = max_rel;
    cell.d_checksum = checksum;
    rep.grid.push_back(cell);
  }
  return rep;
}

int cmd_select(const SelectOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto loaded = load(o.in);
    auto result = run_selection(loaded.data, o);
    if (o.write_matrix) write_matrix_csv(loaded.data.select_columns(result.selected), *o.write_matrix);

    auto& summary = emit(make_doc(selection_invocation("select", o), result), o.output, out, err);
    summary << "selected " << result.selected.size() << " of " << loaded.data.n_features()
            << " features:";
    for (std::size_t r : result.selected) summary << ' ' << r;
    summary << '\n';
    return kOk;
  });
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  EvalConfig cfg;
  try {
    cfg.seeds = parse_seeds(o.seeds);
    resolve_method(o.sel);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return guarded(err, [&] {
    const auto loaded = load(o.sel.in);
    if (!loaded.labels) throw InvalidArgument("evaluate requires labels; pass --label-col");
    const auto selection = run_selection(loaded.data, o.sel);
    cfg.n_clusters = o.clusters.value_or(0);
    cfg.threads = o.sel.threads;
    const auto report =
        evaluate_selection(loaded.data, selection.selected, *loaded.labels, cfg, selection.method);

    auto inv = selection_invocation("evaluate", o.sel);
    inv["seeds"] = cfg.seeds;
    inv["clusters"] = o.clusters ? nlohmann::json(*o.clusters) : nlohmann::json(nullptr);
    auto& summary = emit(make_doc(std::move(inv), report), o.sel.output, out, err);
    summary << "ACC " << percent(report.mean_acc) << "  NMI " << percent(report.mean_nmi) << '\n';
    return kOk;
  });
}

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<std::size_t> d_values, k_values;
  EvalConfig cfg;
  Method method{};
  try {
    d_values = parse_grid(o.d_grid);
    k_values = parse_grid(o.k_grid);
    cfg.seeds = parse_seeds(o.seeds);
    method = resolve_method(o.sel);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return guarded(err, [&] {
    const auto loaded = load(o.sel.in);
    if (!loaded.labels) throw InvalidArgument("sweep requires labels; pass --label-col");
    cfg.n_clusters = o.clusters.value_or(0);
    cfg.threads = o.sel.threads;
    const auto report =
        sweep(loaded.data, *loaded.labels, method, d_values, k_values, cfg, o.sel.threads);

    std::string csv = "d,k,mean_acc,mean_nmi\n";
    for (const auto& c : report.cells) {
      csv += std::to_string(c.d) + ',' + std::to_string(c.k) + ',' + format_real(c.report.mean_acc) +
             ',' + format_real(c.report.mean_nmi) + '\n';
    }
    std::optional<std::filesystem::path> csv_path = o.csv;
    if (!csv_path && o.sel.output) csv_path = std::filesystem::path(*o.sel.output).replace_extension(".csv");
    if (csv_path) write_text_atomic(*csv_path, csv);

    auto inv = selection_invocation("sweep", o.sel);
    inv.erase("d");
    inv.erase("k");
    inv["d_grid"] = d_values;
    inv["k_grid"] = k_values;
    inv["seeds"] = cfg.seeds;
    inv["clusters"] = o.clusters ? nlohmann::json(*o.clusters) : nlohmann::json(nullptr);
    auto& summary = emit(make_doc(std::move(inv), report), o.sel.output, out, err);
    summary << "d,k,ACC,NMI\n";
    for (const auto& c : report.cells) {
      summary << c.d << ',' << c.k << ',' << percent(c.report.mean_acc) << ','
              << percent(c.report.mean_nmi) << '\n';
    }
    return kOk;
  });
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto report = run_bench(o);
    nlohmann::json inv = {{"command", "bench"}, {"n_list", o.n_list}, {"m", o.m},
                          {"k", o.k},           {"reps", o.reps},     {"seed", o.seed},
                          {"threads", o.threads}};
    auto& summary = emit(make_doc(std::move(inv), report), o.output, out, err);
    summary << "n,m,k,naive_s,optimized_s,speedup\n";
    for (const auto& c : report.grid) {
      std::ostringstream speedup;
      speedup << std::fixed << std::setprecision(1) << c.speedup;
      summary << c.n << ',' << c.m << ',' << c.k << ',' << c.naive_seconds << ','
              << c.optimized_seconds << ',' << speedup.str() << '\n';
    }
    return kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compactness Score unsupervised feature selection"};
  app.require_subcommand(1);

  const std::vector<std::string> methods = {"csufs", "maxvar", "all"};
  const std::vector<std::string> modes = {"optimized", "naive"};

  std::string header = "auto";
  auto add_input = [&](CLI::App* sub, InputOptions& in) {
    sub->add_option("--input", in.input, "CSV file, one sample per line")->required();
    sub->add_option("--label-col", in.label_col, "label column (index or header name)");
    sub->add_option("--header", header, "header line: auto, yes or no")
        ->check(CLI::IsMember({"auto", "yes", "no"}));
  };
  auto add_selection = [&](CLI::App* sub, SelectOptions& s) {
    sub->add_option("--method", s.method, "csufs, maxvar or all")->check(CLI::IsMember(methods));
    sub->add_option("--k", s.k, "nearest neighbours per sample")->check(CLI::PositiveNumber);
    sub->add_option("--mode", s.mode, "k-NN kernel: optimized or naive")->check(CLI::IsMember(modes));
    sub->add_option("--threads", s.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--output", s.output, "report path (stdout when omitted)");
  };

  SelectOptions sel;
  auto* select = app.add_subcommand("select", "score features and write the selection");
  add_input(select, sel.in);
  add_selection(select, sel);
  select->add_option("--d", sel.d, "number of features to keep")->check(CLI::PositiveNumber);
  select->add_option("--write-matrix", sel.write_matrix, "also write the reduced matrix as CSV");

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "select, then cluster with k-means per seed");
  add_input(evaluate, ev.sel.in);
  add_selection(evaluate, ev.sel);
  evaluate->add_option("--d", ev.sel.d, "number of features to keep")->check(CLI::PositiveNumber);
  evaluate->add_option("--seeds", ev.seeds, "seed range, e.g. 0..9");
  evaluate->add_option("--clusters", ev.clusters, "k-means clusters (default: class count)")
      ->check(CLI::PositiveNumber);

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate over a (d, k) grid");
  add_input(sweep_cmd, sw.sel.in);
  add_selection(sweep_cmd, sw.sel);
  sweep_cmd->add_option("--d-grid", sw.d_grid, "feature counts, e.g. 20:200:20")->required();
  sweep_cmd->add_option("--k-grid", sw.k_grid, "neighbour counts, e.g. 5:30:5");
  sweep_cmd->add_option("--seeds", sw.seeds, "seed range, e.g. 0..9");
  sweep_cmd->add_option("--clusters", sw.clusters, "k-means clusters (default: class count)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--csv", sw.csv, "flat d,k,mean_acc,mean_nmi table (default: next to --output)");

  BenchOptions bench;
  std::string n_list = "1000,2000,4000";
  auto* bench_cmd = app.add_subcommand("bench", "time naive vs optimized k-NN distance sums");
  bench_cmd->add_option("--n", n_list, "sample counts, grid syntax");
  bench_cmd->add_option("--m", bench.m, "features")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--k", bench.k, "nearest neighbours")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", bench.reps, "repetitions (median reported)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "matrix seed");
  bench_cmd->add_option("--threads", bench.threads, "scoring threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--min-time", bench.min_time, "minimum seconds per timing sample")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--output", bench.output, "report path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsageError;
  }

  const HeaderMode hm =
      header == "yes" ? HeaderMode::present : header == "no" ? HeaderMode::absent : HeaderMode::detect;
  if (*select) {
    sel.in.header = hm;
    return cmd_select(sel, out, err);
  }
  if (*evaluate) {
    ev.sel.in.header = hm;
    return cmd_evaluate(ev, out, err);
  }
  if (*sweep_cmd) {
    sw.sel.in.header = hm;
    return cmd_sweep(sw, out, err);
  }
  try {
    bench.n_list = parse_grid(n_list);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return cmd_bench(bench, out, err);
}

}  // namespace csufs::cli

#include "csufs/io_formats.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "csufs/errors.hpp"

namespace csufs {

using nlohmann::json;

// ---- CSV -------------------------------------------------------------------

LabelSelector parse_label_selector(std::string_view text) {
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), idx);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return idx;
  }
  return std::string(text);
}

namespace {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

std::vector<CsvRecord> split_records(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<CsvRecord> records;
  CsvRecord cur;
  std::string field;
  std::size_t line = 1;
  cur.line = 1;
  bool in_quotes = false;
  bool record_has_content = false;

  auto end_record = [&] {
    cur.fields.push_back(std::move(field));
    field.clear();
    const bool blank = !record_has_content && cur.fields.size() == 1 && cur.fields[0].empty();
    if (!blank) records.push_back(std::move(cur));
    cur = CsvRecord{};
    cur.line = line;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        record_has_content = true;
        break;
      case ',':
        cur.fields.push_back(std::move(field));
        field.clear();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        ++line;
        end_record();
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        record_has_content = true;
    }
  }
  if (in_quotes) throw ParseError(line, cur.fields.size() + 1, "unterminated quoted field");
  if (record_has_content || !field.empty()) end_record();
  return records;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.starts_with('+')) s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

LoadedData parse_csv(std::string_view text, HeaderMode header,
                     const std::optional<LabelSelector>& label_column) {
  auto records = split_records(text);
  if (records.empty()) throw EmptyMatrix(0, 0);

  const std::size_t width = records.front().fields.size();
  for (const auto& rec : records) {
    if (rec.fields.size() != width) throw RaggedRows(rec.line, width, rec.fields.size());
  }

  bool has_header = header == HeaderMode::present;
  if (header == HeaderMode::detect) {
    has_header = std::any_of(records.front().fields.begin(), records.front().fields.end(),
                             [](const std::string& f) { return !parse_real(f).has_value(); });
  }
  std::vector<std::string> names;
  if (has_header) {
    for (const auto& f : records.front().fields) names.emplace_back(trim(f));
    records.erase(records.begin());
  }

  std::optional<std::size_t> label_idx;
  if (label_column) {
    if (const auto* idx = std::get_if<std::size_t>(&*label_column)) {
      if (*idx >= width) throw LabelColumnMissing(std::to_string(*idx));
      label_idx = *idx;
    } else {
      const auto& name = std::get<std::string>(*label_column);
      auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw LabelColumnMissing(name);
      label_idx = static_cast<std::size_t>(it - names.begin());
    }
  }

  const std::size_t n = records.size();
  const std::size_t m = width - (label_idx ? 1 : 0);
  if (n == 0 || m == 0) throw EmptyMatrix(n, m);

  std::vector<double> values(n * m);
  std::vector<std::string> raw_labels;
  if (label_idx) raw_labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[i];
    std::size_t r = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (label_idx && c == *label_idx) {
        raw_labels.emplace_back(trim(rec.fields[c]));
        continue;
      }
      auto v = parse_real(rec.fields[c]);
      if (!v) throw ParseError(rec.line, c + 1, "'" + rec.fields[c] + "' is not a real number");
      values[r * n + i] = *v;
      ++r;
    }
  }

  std::vector<std::string> feature_names;
  if (has_header) {
    for (std::size_t c = 0; c < width; ++c) {
      if (!label_idx || c != *label_idx) feature_names.push_back(names[c]);
    }
  }

  LoadedData out{Dataset::from_columns(n, m, std::move(values), std::move(feature_names)),
                 std::nullopt, names};
  if (label_idx) out.labels = LabelVector::canonicalize(std::span<const std::string>(raw_labels));
  return out;
}

LoadedData load_csv(const std::filesystem::path& path, HeaderMode header,
                    const std::optional<LabelSelector>& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), header, label_column);
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

namespace {

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_matrix_csv(const Dataset& x, const std::filesystem::path& path) {
  std::string out;
  const auto& names = x.feature_names();
  if (!names.empty()) {
    for (std::size_t r = 0; r < names.size(); ++r) {
      if (r) out.push_back(',');
      out += quote_csv(names[r]);
    }
    out.push_back('\n');
  }
  for (std::size_t i = 0; i < x.n_samples(); ++i) {
    for (std::size_t r = 0; r < x.n_features(); ++r) {
      if (r) out.push_back(',');
      out += format_real(x.at(i, r));
    }
    out.push_back('\n');
  }
  write_text_atomic(path, out);
}

// ---- JSON report -------------------------------------------------------------

namespace {

json real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double get_real(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw InvalidArgument("unexpected real token '" + s + "'");
  }
  return j.get<double>();
}

json reals(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(real(x));
  return a;
}

std::vector<double> get_reals(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(get_real(x));
  return out;
}

Method get_method(const json& j) {
  const auto s = j.get<std::string>();
  auto m = parse_method(s);
  if (!m) throw InvalidArgument("unknown method '" + s + "'");
  return *m;
}

json scores_json(const FeatureScores& s) {
  return {{"d", reals(s.d)},   {"v", reals(s.v)},         {"cs", reals(s.cs)},
          {"mu", reals(s.mu)}, {"k_used", s.k_used},      {"has_knn", s.has_knn}};
}

FeatureScores scores_from(const json& j) {
  FeatureScores s;
  s.d = get_reals(j.at("d"));
  s.v = get_reals(j.at("v"));
  s.cs = get_reals(j.at("cs"));
  s.mu = get_reals(j.at("mu"));
  s.k_used = j.at("k_used").get<std::size_t>();
  s.has_knn = j.at("has_knn").get<bool>();
  return s;
}

json eval_json(const EvalReport& r) {
  json seeds = json::array();
  for (const auto& s : r.per_seed) {
    seeds.push_back({{"seed", s.seed}, {"acc", real(s.acc)}, {"nmi", real(s.nmi)}});
  }
  return {{"method", to_string(r.method)},
          {"n_features_used", r.n_features_used},
          {"mean_acc", real(r.mean_acc)},
          {"mean_nmi", real(r.mean_nmi)},
          {"per_seed", seeds}};
}

EvalReport eval_from(const json& j) {
  EvalReport r;
  r.method = get_method(j.at("method"));
  r.n_features_used = j.at("n_features_used").get<std::size_t>();
  r.mean_acc = get_real(j.at("mean_acc"));
  r.mean_nmi = get_real(j.at("mean_nmi"));
  for (const auto& s : j.at("per_seed")) {
    r.per_seed.push_back(
        {s.at("seed").get<std::uint64_t>(), get_real(s.at("acc")), get_real(s.at("nmi"))});
  }
  return r;
}

struct PayloadToJson {
  json operator()(const SelectionResult& s) const {
    return {{"kind", "selection"},
            {"method", to_string(s.method)},
            {"d_requested", s.d_requested},
            {"selected", s.selected},
            {"scores", scores_json(s.scores)}};
  }
  json operator()(const EvalReport& r) const {
    json j = eval_json(r);
    j["kind"] = "evaluation";
    return j;
  }
  json operator()(const SweepReport& r) const {
    json cells = json::array();
    for (const auto& c : r.cells) cells.push_back({{"d", c.d}, {"k", c.k}, {"report", eval_json(c.report)}});
    return {{"kind", "sweep"}, {"method", to_string(r.method)}, {"cells", cells}};
  }
  json operator()(const BenchReport& r) const {
    json grid = json::array();
    for (const auto& c : r.grid) {
      grid.push_back({{"n", c.n},
                      {"m", c.m},
                      {"k", c.k},
                      {"naive_seconds", real(c.naive_seconds)},
                      {"optimized_seconds", real(c.optimized_seconds)},
                      {"speedup", real(c.speedup)},
                      {"agree", c.agree},
                      {"max_rel_diff", real(c.max_rel_diff)},
                      {"d_checksum", real(c.d_checksum)}});
    }
    return {{"kind", "bench"}, {"repetitions", r.repetitions}, {"seed", r.seed}, {"grid", grid}};
  }
};

ReportPayload payload_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "selection") {
    SelectionResult s;
    s.method = get_method(j.at("method"));
    s.d_requested = j.at("d_requested").get<std::size_t>();
    s.selected = j.at("selected").get<std::vector<std::size_t>>();
    s.scores = scores_from(j.at("scores"));
    return s;
  }
  if (kind == "evaluation") return eval_from(j);
  if (kind == "sweep") {
    SweepReport r;
    r.method = get_method(j.at("method"));
    for (const auto& c : j.at("cells")) {
      r.cells.push_back({c.at("d").get<std::size_t>(), c.at("k").get<std::size_t>(),
                         eval_from(c.at("report"))});
    }
    return r;
  }
  if (kind == "bench") {
    BenchReport r;
    r.repetitions = j.at("repetitions").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("grid")) {
      r.grid.push_back({c.at("n").get<std::size_t>(), c.at("m").get<std::size_t>(),
                        c.at("k").get<std::size_t>(), get_real(c.at("naive_seconds")),
                        get_real(c.at("optimized_seconds")), get_real(c.at("speedup")),
                        c.at("agree").get<bool>(), get_real(c.at("max_rel_diff")),
                        get_real(c.at("d_checksum"))});
    }
    return r;
  }
  throw InvalidArgument("unknown payload kind '" + kind + "'");
}

}  // namespace

std::string iso8601_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const ReportDocument& doc) {
  return {{"tool_version", doc.tool_version},
          {"timestamp", doc.timestamp},
          {"invocation", doc.invocation},
          {"payload", std::visit(PayloadToJson{}, doc.payload)}};
}

ReportDocument from_json(const json& j) {
  ReportDocument doc;
  doc.tool_version = j.at("tool_version").get<std::string>();
  doc.timestamp = j.at("timestamp").get<std::string>();
  doc.invocation = j.at("invocation");
  doc.payload = payload_from(j.at("payload"));
  return doc;
}

std::string serialize_report(const ReportDocument& doc) { return to_json(doc).dump(2) + "\n"; }

ReportDocument parse_report(std::string_view text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(0, 0, std::string("malformed report: ") + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

void write_report(const ReportDocument& doc, const std::filesystem::path& path) {
  write_text_atomic(path, serialize_report(doc));
}

ReportDocument read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report(buf.str());
}

}  // namespace csufs

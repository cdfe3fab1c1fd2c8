#include "blowup/artifacts.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "blowup/error.hpp"

#ifndef BLOWUP_VERSION_STRING
#define BLOWUP_VERSION_STRING "0.0.0"
#endif

namespace blowup {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const std::string& msg) { throw Error(ErrorCode::Io, msg); }

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) io_error("write to " + path.string() + " failed");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string quote_field(std::string_view value) {
  if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

// key,value line with optional RFC 4180 quoting on the value.
std::pair<std::string, std::string> split_key_value(std::string_view line) {
  const std::size_t comma = line.find(',');
  if (comma == std::string_view::npos) return {std::string(trim(line)), {}};
  std::string key(trim(line.substr(0, comma)));
  std::string_view rest = line.substr(comma + 1);
  if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
  if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"') {
    std::string value;
    for (std::size_t i = 1; i + 1 < rest.size(); ++i) {
      value += rest[i];
      if (rest[i] == '"' && i + 2 < rest.size() && rest[i + 1] == '"') ++i;
    }
    return {key, value};
  }
  return {key, std::string(rest)};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view tool_version() noexcept { return BLOWUP_VERSION_STRING; }

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view context) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    std::string msg = "malformed number '" + std::string(s) + "'";
    if (!context.empty()) msg += " in " + std::string(context);
    io_error(msg);
  }
  return value;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  io_error("missing column '" + std::string(name) + "'");
}

void write_csv(const fs::path& path, std::span<const std::string> header,
               std::span<const std::vector<double>> rows) {
  std::ofstream out = open_for_write(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  std::string line;
  for (const auto& row : rows) {
    line.clear();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += ',';
      line += format_double(row[i]);
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(trim(f));
      continue;
    }
    if (fields.size() != table.header.size()) {
      io_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
               std::to_string(table.header.size()) + " fields, found " +
               std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    const std::string where = path.string() + ":" + std::to_string(line_no);
    for (auto f : fields) row.push_back(parse_double(f, where));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) io_error(path.string() + " has no header row");
  return table;
}

void write_trace_csv(const fs::path& path, const OriginTrace& trace) {
  const std::vector<std::string> header{"t", "f_origin"};
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.size());
  for (const auto& s : trace.samples) rows.push_back({s.t, s.f_origin});
  write_csv(path, header, rows);
}

OriginTrace read_trace_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t ct = table.column("t");
  const std::size_t cf = table.column("f_origin");
  OriginTrace trace;
  trace.samples.reserve(table.rows.size());
  for (const auto& row : table.rows) trace.samples.push_back({row[ct], row[cf]});
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (!(trace.samples[i].t > trace.samples[i - 1].t)) {
      io_error(path.string() + ": trace times must be strictly increasing");
    }
  }
  return trace;
}

void write_slices_csv(const fs::path& path, std::span<const TimeSlice> slices, const RadialGrid& grid) {
  std::ofstream out = open_for_write(path);
  out << "t,r,f\n";
  std::string line;
  for (const auto& slice : slices) {
    if (slice.values.size() != grid.size()) {
      throw Error(ErrorCode::ContractViolation, "write_slices_csv: slice does not match the grid");
    }
    const std::string t = format_double(slice.t);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      line = t;
      line += ',';
      line += format_double(grid.r(j));
      line += ',';
      line += format_double(slice.values[j]);
      line += '\n';
      out << line;
    }
  }
  finish(out, path);
}

std::vector<StoredSlice> read_slices_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t ct = table.column("t");
  const std::size_t cr = table.column("r");
  const std::size_t cf = table.column("f");
  std::vector<StoredSlice> slices;
  for (const auto& row : table.rows) {
    if (slices.empty() || slices.back().t != row[ct]) slices.push_back({row[ct], {}, {}});
    slices.back().r.push_back(row[cr]);
    slices.back().f.push_back(row[cf]);
  }
  return slices;
}

void write_fit_csv(const fs::path& path, const CutoffExtraction& fit, double f0) {
  const std::vector<std::string> header{"m", "b", "rms", "n_points", "c", "R",
                                        "window_lo", "window_hi", "f0"};
  const std::vector<std::vector<double>> rows{{fit.fit.slope, fit.fit.intercept,
                                               fit.fit.rms_residual,
                                               static_cast<double>(fit.fit.n_points), fit.c,
                                               fit.R, fit.window.lo, fit.window.hi, f0}};
  write_csv(path, header, rows);
}

StoredFit read_fit_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  if (table.rows.size() != 1) io_error(path.string() + ": expected exactly one fit row");
  const auto& row = table.rows.front();
  StoredFit stored{};
  stored.extraction.fit.slope = row[table.column("m")];
  stored.extraction.fit.intercept = row[table.column("b")];
  stored.extraction.fit.rms_residual = row[table.column("rms")];
  stored.extraction.fit.n_points = static_cast<std::size_t>(row[table.column("n_points")]);
  stored.extraction.c = row[table.column("c")];
  stored.extraction.R = row[table.column("R")];
  stored.extraction.window = {row[table.column("window_lo")], row[table.column("window_hi")]};
  stored.f0 = row[table.column("f0")];
  return stored;
}

void write_hyperbola_csv(const fs::path& path, std::span<const HyperbolaSeriesRow> rows) {
  const std::vector<std::string> header{"T", "a", "b", "k", "minus_b_over_a", "rms"};
  std::vector<std::vector<double>> body;
  body.reserve(rows.size());
  for (const auto& r : rows) {
    body.push_back({r.t, r.fit.a, r.fit.b, r.fit.k, r.fit.minus_b_over_a(), r.fit.rms_residual});
  }
  write_csv(path, header, body);
}

void write_manifest(const fs::path& dir, const RunResult& result) {
  const SimConfig& cfg = result.config;
  std::string slice_times;
  for (double t : cfg.slice_times) {
    if (!slice_times.empty()) slice_times += ' ';
    slice_times += format_double(t);
  }
  const std::vector<std::pair<std::string, std::string>> entries{
      {"f0", format_double(cfg.f0)},
      {"v0", format_double(cfg.v0)},
      {"dr", format_double(cfg.dr)},
      {"dt", format_double(cfg.dt)},
      {"r_max", format_double(result.grid.r_max())},
      {"n_points", std::to_string(result.grid.size())},
      {"corrector_iters", std::to_string(cfg.corrector_iters)},
      {"stop_height", format_double(cfg.effective_stop_height())},
      {"max_steps", std::to_string(cfg.max_steps)},
      {"sample_every", std::to_string(cfg.sample_every)},
      {"slice_times", slice_times},
      {"halt_reason", std::string(halt_reason_name(result.halt_reason))},
      {"halt_time", format_double(result.halt_time)},
      {"steps", std::to_string(result.steps)},
      {"output_dir", fs::absolute(dir).lexically_normal().string()},
      {"created_at", utc_timestamp()},
      {"tool_version", std::string(tool_version())},
  };
  const fs::path final_path = dir / "manifest.csv";
  const fs::path tmp_path = dir / "manifest.csv.tmp";
  {
    std::ofstream out = open_for_write(tmp_path);
    out << "key,value\n";
    for (const auto& [k, v] : entries) out << k << ',' << quote_field(v) << '\n';
    finish(out, tmp_path);
  }
  std::error_code ec;
  fs::rename(tmp_path, final_path, ec);
  if (ec) io_error("cannot finalize " + final_path.string() + ": " + ec.message());
}

std::map<std::string, std::string> read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.csv";
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    out.insert(split_key_value(line));
  }
  return out;
}

void write_run_artifacts(const fs::path& dir, const RunResult& result,
                         const std::optional<CutoffExtraction>& fit) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) io_error("cannot create " + dir.string() + ": " + ec.message());
  fs::remove(dir / "manifest.csv", ec);
  write_trace_csv(dir / "trace.csv", result.trace);
  write_slices_csv(dir / "slices.csv", result.slices, result.grid);
  if (fit) write_fit_csv(dir / "fit.csv", *fit, result.config.f0);
  write_manifest(dir, result);
}

}  // namespace blowup

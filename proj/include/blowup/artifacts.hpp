#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/analysis.hpp"
#include "blowup/solver.hpp"

namespace blowup {

// Shortest-free, locale-independent rendering with 17 significant digits, so
// every double survives a write/read round trip bit for bit.
std::string format_double(double value);

// Parses a double written by format_double (or any plain decimal form).
// Throws Error(Io) naming `context` on malformed input.
double parse_double(std::string_view text, std::string_view context = {});

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a header column; throws Error(Io) when absent.
  std::size_t column(std::string_view name) const;
};

// One header row, then numeric rows. Throws Error(Io) on failure.
void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               std::span<const std::vector<double>> rows);
CsvTable read_csv(const std::filesystem::path& path);

// trace.csv: t,f_origin
void write_trace_csv(const std::filesystem::path& path, const OriginTrace& trace);
OriginTrace read_trace_csv(const std::filesystem::path& path);

// slices.csv: t,r,f (one row per grid point per slice)
void write_slices_csv(const std::filesystem::path& path, std::span<const TimeSlice> slices,
                      const RadialGrid& grid);

struct StoredSlice {
  double t;
  std::vector<double> r;
  std::vector<double> f;
};
std::vector<StoredSlice> read_slices_csv(const std::filesystem::path& path);

// fit.csv: m,b,rms,n_points,c,R,window_lo,window_hi,f0
void write_fit_csv(const std::filesystem::path& path, const CutoffExtraction& fit, double f0);

struct StoredFit {
  CutoffExtraction extraction;
  double f0;
};
StoredFit read_fit_csv(const std::filesystem::path& path);

struct HyperbolaSeriesRow {
  double t;
  HyperbolaFit fit;
};

// hyperbola.csv: T,a,b,k,minus_b_over_a,rms
void write_hyperbola_csv(const std::filesystem::path& path, std::span<const HyperbolaSeriesRow> rows);

// manifest.csv: key,value rows. Written through a temporary file and renamed
// so its presence means the directory is complete.
void write_manifest(const std::filesystem::path& dir, const RunResult& result);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& dir);

// trace.csv, slices.csv, optionally fit.csv, then manifest.csv.
void write_run_artifacts(const std::filesystem::path& dir, const RunResult& result,
                         const std::optional<CutoffExtraction>& fit = {});

std::string_view tool_version() noexcept;

}  // namespace blowup

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup/analysis.hpp"
#include "blowup/solver.hpp"

namespace blowup {

struct SweepRow {
  SimConfig config;
  HaltReason halt_reason = HaltReason::MaxSteps;
  std::optional<CutoffExtraction> extraction;
  // Empty on success; otherwise the error that stopped this row.
  std::string error;

  bool ok() const noexcept { return extraction.has_value(); }
};

// Called from the worker that finished row `index`, before the row is stored.
using SweepObserver = std::function<void(std::size_t index, const RunResult&, const SweepRow&)>;

// Runs every config, extracts (c, R) with the given window rule, and returns
// rows in input order. Runs are independent and use up to `jobs` threads.
// A failing row records its error and does not stop the sweep.
std::vector<SweepRow> sweep_table(std::span<const SimConfig> configs, const WindowRule& rule,
                                  unsigned jobs, const SweepObserver& observer = {});

// sweep.csv: v0,f0,dr,dt,r_max,c,R,fit_rms,window_lo,window_hi,status
// Failed rows carry nan in the numeric fit columns and the error name in status.
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

// Column-aligned text rendering of the same table.
std::string format_sweep_table(std::span<const SweepRow> rows);

}  // namespace blowup

#include "blowup/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "blowup/artifacts.hpp"
#include "blowup/error.hpp"

namespace blowup {

namespace {

SweepRow run_row(const SimConfig& cfg, const WindowRule& rule, std::size_t index,
                 const SweepObserver& observer) {
  SweepRow row;
  row.config = cfg;
  try {
    const RunResult result = run(cfg);
    row.halt_reason = result.halt_reason;
    try {
      const TimeWindow window = extraction_window(result.trace, cfg.effective_stop_height(), rule);
      row.extraction = extract_cutoff(result.trace, window);
    } catch (const Error& e) {
      row.error = error_code_name(e.code());
      row.error += ": ";
      row.error += e.what();
    }
    if (observer) observer(index, result, row);
  } catch (const Error& e) {
    row.extraction.reset();
    row.error = std::string(error_code_name(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    row.extraction.reset();
    row.error = std::string("internal: ") + e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_table(std::span<const SimConfig> configs, const WindowRule& rule,
                                  unsigned jobs, const SweepObserver& observer) {
  std::vector<SweepRow> rows(configs.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(jobs == 0 ? 1u : jobs, static_cast<unsigned>(configs.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      rows[i] = run_row(configs[i], rule, i, observer);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << "v0,f0,dr,dt,r_max,c,R,fit_rms,window_lo,window_hi,status\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    const SimConfig& c = row.config;
    const auto* e = row.extraction ? &*row.extraction : nullptr;
    const double r_max = c.make_grid().r_max();
    out << format_double(c.v0) << ',' << format_double(c.f0) << ',' << format_double(c.dr) << ','
        << format_double(c.dt) << ',' << format_double(r_max) << ','
        << format_double(e ? e->c : nan) << ',' << format_double(e ? e->R : nan) << ','
        << format_double(e ? e->fit.rms_residual : nan) << ','
        << format_double(e ? e->window.lo : nan) << ',' << format_double(e ? e->window.hi : nan)
        << ',';
    if (row.ok()) {
      out << "ok";
    } else {
      // Status is the error name only; the message may contain commas.
      out << row.error.substr(0, row.error.find(':'));
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
}

std::string format_sweep_table(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << std::setw(10) << "v0" << std::setw(8) << "f0" << std::setw(10) << "r_max" << std::setw(12)
      << "c" << std::setw(10) << "R" << "  status\n";
  for (const auto& row : rows) {
    out << std::setw(10) << std::setprecision(4) << row.config.v0 << std::setw(8)
        << row.config.f0 << std::setw(10) << std::setprecision(5) << row.config.r_max;
    if (row.ok()) {
      out << std::setw(12) << std::setprecision(4) << row.extraction->c << std::setw(10)
          << std::setprecision(4) << row.extraction->R << "  ok\n";
    } else {
      out << std::setw(12) << "-" << std::setw(10) << "-" << "  " << row.error << '\n';
    }
  }
  return out.str();
}

}  // namespace blowup

// blowup: command-line driver for soliton collapse runs.
//
//   blowup run     evolve one configuration, write trace/slices/manifest
//   blowup predict adiabatic trajectory for given (c, R, f0), optional overlay
//   blowup fit     (c, R) extraction from a trace, hyperbola fits to slices
//   blowup sweep   one run per v0 or f0 value plus the aggregate table
//
// Exit codes: 0 ok, 1 other failure, 2 bad flags, 3 blow-up before the first
// sample, 4 I/O failure, 5 extraction undefined, 6 every sweep row failed.
// Everything here goes through the C API in blowup.h.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blowup/blowup.h"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadFlags = 2,
  kBlowUpBeforeSample = 3,
  kIoFailure = 4,
  kExtractionUndefined = 5,
  kSweepAllFailed = 6,
};

struct CliFailure {
  int code;
  std::string message;
};

int exit_code_for(blowup_status st) {
  switch (st) {
    case BLOWUP_ERR_INVALID_ARGUMENT: return kBadFlags;
    case BLOWUP_ERR_IO: return kIoFailure;
    case BLOWUP_ERR_EXTRACTION_UNDEFINED:
    case BLOWUP_ERR_INSUFFICIENT_DATA: return kExtractionUndefined;
    default: return kFailure;
  }
}

void check(blowup_status st, const std::string& what) {
  if (st != BLOWUP_OK) {
    throw CliFailure{exit_code_for(st), what + ": " + blowup_status_name(st) + ": " + blowup_last_error()};
  }
}

struct RunDeleter {
  void operator()(blowup_run* p) const { blowup_run_free(p); }
};
struct TraceDeleter {
  void operator()(blowup_trace* p) const { blowup_trace_free(p); }
};
struct SlicesDeleter {
  void operator()(blowup_slices* p) const { blowup_slices_free(p); }
};
struct SweepDeleter {
  void operator()(blowup_sweep* p) const { blowup_sweep_free(p); }
};
using RunPtr = std::unique_ptr<blowup_run, RunDeleter>;
using TracePtr = std::unique_ptr<blowup_trace, TraceDeleter>;
using SlicesPtr = std::unique_ptr<blowup_slices, SlicesDeleter>;
using SweepPtr = std::unique_ptr<blowup_sweep, SweepDeleter>;

std::string fmt(double v) {
  char buf[40];
  blowup_format_double(v, buf, sizeof buf);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

fs::path output_root() {
  const char* env = std::getenv("BLOWUP_OUTPUT_ROOT");
  return (env && *env) ? fs::path(env) : fs::path(".");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliFailure{kIoFailure, "cannot create " + dir.string() + ": " + ec.message()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw CliFailure{kIoFailure, "cannot write " + path.string()};
}

void save_csv(const fs::path& path, const std::vector<std::string>& header,
              const std::vector<double>& values) {
  std::vector<const char*> names;
  for (const auto& h : header) names.push_back(h.c_str());
  const size_t rows = header.empty() ? 0 : values.size() / header.size();
  check(blowup_csv_save(path.string().c_str(), names.data(), names.size(), values.data(), rows),
        "write " + path.string());
}

struct TraceData {
  std::vector<double> t;
  std::vector<double> f;
};

TraceData copy_trace(const blowup_trace* trace) {
  TraceData d;
  const size_t n = blowup_trace_size(trace);
  d.t.resize(n);
  d.f.resize(n);
  blowup_trace_copy(trace, d.t.data(), d.f.data(), n);
  return d;
}

// Linear interpolation of the trace at time t (exact at sample times).
std::optional<double> trace_at(const TraceData& d, double t) {
  if (d.t.empty() || t < d.t.front() || t > d.t.back()) return std::nullopt;
  const auto it = std::lower_bound(d.t.begin(), d.t.end(), t);
  const size_t i = static_cast<size_t>(it - d.t.begin());
  if (d.t[i] == t) return d.f[i];
  const double w = (t - d.t[i - 1]) / (d.t[i] - d.t[i - 1]);
  return d.f[i - 1] + w * (d.f[i] - d.f[i - 1]);
}

// Reads a key from manifest.csv next to `file`, if there is one.
std::optional<std::string> manifest_value(const fs::path& file, const std::string& key) {
  std::ifstream in(file.parent_path() / "manifest.csv");
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma != std::string::npos && line.substr(0, comma) == key) return line.substr(comma + 1);
  }
  return std::nullopt;
}

std::optional<double> manifest_number(const fs::path& file, const std::string& key) {
  const auto v = manifest_value(file, key);
  if (!v) return std::nullopt;
  try {
    return std::stod(*v);
  } catch (...) {
    return std::nullopt;
  }
}

// ---- run -------------------------------------------------------------------

struct RunOptions {
  double f0 = 1.0;
  double v0 = -0.01;
  double dr = 0.01;
  double dt = 0.001;
  double r_max = 100.0;
  int iters = 4;
  double stop_height = 0.0;
  long long max_steps = 10'000'000;
  int sample_every = 1;
  std::vector<double> slice_times;
  std::string out;
  bool gnuplot = false;
};

int cmd_run(const RunOptions& o) {
  blowup_sim_config cfg;
  blowup_sim_config_default(&cfg);
  cfg.f0 = o.f0;
  cfg.v0 = o.v0;
  cfg.dr = o.dr;
  cfg.dt = o.dt;
  cfg.r_max = o.r_max;
  cfg.corrector_iters = o.iters;
  cfg.stop_height = o.stop_height;
  cfg.max_steps = o.max_steps;
  cfg.sample_every = o.sample_every;
  cfg.slice_times = o.slice_times.data();
  cfg.n_slice_times = o.slice_times.size();
  check(blowup_sim_config_validate(&cfg), "run");

  blowup_run* raw = nullptr;
  check(blowup_run_simulation(&cfg, &raw), "run");
  RunPtr run(raw);

  blowup_trace* traw = nullptr;
  check(blowup_trace_from_run(run.get(), &traw), "run");
  TracePtr trace(traw);
  const TraceData data = copy_trace(trace.get());
  const blowup_halt_reason halt = blowup_run_halt_reason(run.get());
  if (halt == BLOWUP_HALT_BLOW_UP_PASSED && data.t.size() <= 1) {
    throw CliFailure{kBlowUpBeforeSample, "run: blow-up passed before the first sample was recorded"};
  }

  const fs::path dir = o.out.empty() ? output_root() / "run" : fs::path(o.out);
  check(blowup_run_write_artifacts(run.get(), dir.string().c_str()), "run");
  if (o.gnuplot) {
    write_text(dir / "trace.gp",
               "set xlabel 't'\nset ylabel 'f(0,t)'\nset datafile separator ','\n"
               "plot 'trace.csv' using 1:2 every ::1 with lines title 'f(0,t)'\n");
    write_text(dir / "slices.gp",
               "set xlabel 'r'\nset ylabel 'f(r,T)'\nset datafile separator ','\n"
               "plot 'slices.csv' using 2:3 every ::1 with dots title 'time slices'\n");
  }

  std::cout << "run: halt=" << blowup_halt_reason_name(halt) << " steps=" << blowup_run_steps(run.get())
            << " t=" << short_fmt(blowup_run_halt_time(run.get()))
            << " f(0)=" << short_fmt(data.f.empty() ? o.f0 : data.f.back())
            << " r_max=" << short_fmt(blowup_run_r_max(run.get())) << " out=" << dir.string() << '\n';
  return kOk;
}

// ---- predict ---------------------------------------------------------------

struct PredictOptions {
  std::optional<double> c;
  std::optional<double> R;
  std::optional<double> f0;
  std::string from_fit;
  std::vector<double> times;
  int num_points = 0;
  std::optional<double> t_end;
  std::string compare;
  int compare_points = 500;
  std::string out;
  bool gnuplot = false;
};

int cmd_predict(const PredictOptions& o) {
  blowup_geodesic_model model{};
  std::optional<blowup_window> fit_window;
  if (!o.from_fit.empty()) {
    blowup_cutoff stored{};
    check(blowup_cutoff_load(o.from_fit.c_str(), &stored), "predict --from-fit");
    model = {stored.c, stored.R, stored.f0};
    fit_window = stored.window;
  }
  if (o.c) model.c = *o.c;
  if (o.R) model.R = *o.R;
  if (o.f0) model.f0 = *o.f0;
  if (!(model.c > 0.0) || !(model.R > 0.0) || !(model.f0 > 0.0)) {
    throw CliFailure{kBadFlags, "predict: need --c, --R and --f0 (or --from-fit FILE)"};
  }

  TracePtr trace;
  TraceData sim;
  if (!o.compare.empty()) {
    blowup_trace* raw = nullptr;
    check(blowup_trace_load(o.compare.c_str(), &raw), "predict --compare");
    trace.reset(raw);
    sim = copy_trace(trace.get());
  }

  double t_max = 0.0;
  check(blowup_max_predictable_time(&model, &t_max), "predict");

  std::vector<double> times = o.times;
  if (times.empty()) {
    if (!sim.t.empty()) {
      const double lo = fit_window ? fit_window->t_lo : sim.t.front();
      const double hi = fit_window ? fit_window->t_hi : sim.t.back();
      std::vector<double> inside;
      for (double t : sim.t) {
        if (t >= lo && t <= hi) inside.push_back(t);
      }
      const size_t cap = static_cast<size_t>(std::max(2, o.compare_points));
      const size_t stride = std::max<size_t>(1, (inside.size() + cap - 1) / cap);
      for (size_t i = 0; i < inside.size(); i += stride) times.push_back(inside[i]);
      if (!inside.empty() && times.back() != inside.back()) times.push_back(inside.back());
    } else {
      double t_end = 0.0;
      if (o.t_end) {
        t_end = *o.t_end;
      } else {
        check(blowup_collapse_time(&model, 0.05 * model.f0, &t_end), "predict");
      }
      const int n = o.num_points > 0 ? o.num_points : 100;
      for (int i = 0; i < n; ++i) times.push_back(n == 1 ? 0.0 : t_end * i / (n - 1));
    }
  }

  const bool overlay = !sim.t.empty();
  std::vector<double> rows;
  double max_gap = 0.0;
  size_t compared = 0;
  size_t out_of_range = 0;
  for (double t : times) {
    double f = 0.0;
    const blowup_status st = blowup_predict_height(&model, t, &f);
    if (st == BLOWUP_ERR_OUT_OF_RANGE) {
      std::cerr << "predict: t=" << fmt(t) << ": " << blowup_last_error() << '\n';
      ++out_of_range;
      continue;
    }
    check(st, "predict");
    if (!overlay) {
      rows.insert(rows.end(), {t, f});
      continue;
    }
    const auto f_sim = trace_at(sim, t);
    if (!f_sim) {
      std::cerr << "predict: t=" << fmt(t) << ": outside the compared trace\n";
      continue;
    }
    const double gap = std::abs(f - *f_sim);
    max_gap = std::max(max_gap, gap);
    ++compared;
    rows.insert(rows.end(), {t, f, *f_sim, gap});
  }

  const fs::path dir = o.out.empty() ? output_root() : fs::path(o.out);
  ensure_dir(dir);
  if (overlay) {
    save_csv(dir / "predicted.csv", {"t", "f_predicted", "f_simulated", "abs_gap"}, rows);
    save_csv(dir / "overlay_summary.csv", {"max_abs_gap", "n_points", "c", "R", "f0"},
             {max_gap, static_cast<double>(compared), model.c, model.R, model.f0});
  } else {
    save_csv(dir / "predicted.csv", {"t", "f_predicted"}, rows);
  }
  if (o.gnuplot) {
    std::string gp = "set xlabel 't'\nset ylabel 'f(0,t)'\nset datafile separator ','\n"
                     "plot 'predicted.csv' using 1:2 every ::1 with lines title 'adiabatic prediction'";
    if (overlay) gp += ", '' using 1:3 every ::1 with points pt 7 ps 0.3 title 'simulation'";
    write_text(dir / "predicted.gp", gp + "\n");
  }

  std::cout << "predict: c=" << short_fmt(model.c) << " R=" << short_fmt(model.R)
            << " f0=" << short_fmt(model.f0) << " points=" << rows.size() / (overlay ? 4 : 2)
            << " t_max=" << short_fmt(t_max);
  if (overlay) std::cout << " max_abs_gap=" << fmt(max_gap);
  if (out_of_range) std::cout << " out_of_range=" << out_of_range;
  std::cout << '\n';
  return kOk;
}

// ---- fit -------------------------------------------------------------------

struct FitOptions {
  std::string trace;
  std::string slices;
  std::optional<double> stop_height;
  std::optional<double> t_lo;
  std::optional<double> t_hi;
  bool whole_trace = false;
  std::optional<double> window_r;
  std::optional<double> f0;
  std::string out;
  bool gnuplot = false;
};

void fit_trace(const FitOptions& o, const fs::path& dir) {
  blowup_trace* raw = nullptr;
  check(blowup_trace_load(o.trace.c_str(), &raw), "fit --trace");
  TracePtr trace(raw);
  const TraceData data = copy_trace(trace.get());
  if (data.t.empty()) throw CliFailure{kExtractionUndefined, "fit: trace " + o.trace + " is empty"};

  double stop = 0.0;
  if (o.stop_height) {
    stop = *o.stop_height;
  } else if (const auto m = manifest_number(o.trace, "stop_height")) {
    stop = *m;
  } else {
    stop = 0.05 * data.f.front();
  }

  blowup_window window{};
  check(blowup_extraction_window(trace.get(), stop, o.whole_trace ? 1 : 0, &window), "fit");
  if (o.t_lo) window.t_lo = *o.t_lo;
  if (o.t_hi) window.t_hi = *o.t_hi;

  blowup_cutoff cutoff{};
  const blowup_status st = blowup_extract_cutoff(trace.get(), &window, &cutoff);
  if (st != BLOWUP_OK) {
    throw CliFailure{exit_code_for(st), std::string("fit: extraction failed for window [") + fmt(window.t_lo) +
                                            ", " + fmt(window.t_hi) + "]: " + blowup_last_error()};
  }
  check(blowup_cutoff_save(&cutoff, (dir / "fit.csv").string().c_str()), "fit");

  if (o.gnuplot) {
    const size_t n = data.t.size() >= 3 ? data.t.size() - 2 : 0;
    std::vector<double> vt(n), vf(n), vd(n);
    blowup_trace_velocity_copy(trace.get(), vt.data(), vf.data(), vd.data(), n);
    std::vector<double> rows;
    for (size_t i = 0; i < n; ++i) {
      if (vt[i] < window.t_lo || vt[i] > window.t_hi || vd[i] == 0.0 || !(vf[i] > 0.0)) continue;
      rows.insert(rows.end(), {std::log(vf[i]), 1.0 / (vd[i] * vd[i])});
    }
    save_csv(dir / "lnffdot.csv", {"ln_f", "inv_dfdt_sq"}, rows);
    write_text(dir / "lnffdot.gp",
               "set xlabel 'ln f(0,t)'\nset ylabel '1/(df/dt)^2'\nset datafile separator ','\n"
               "m = " + fmt(cutoff.fit.slope) + "\nb = " + fmt(cutoff.fit.intercept) +
                   "\nplot 'lnffdot.csv' using 1:2 every ::1 with dots title 'simulation', "
                   "m*x + b title 'least-squares line'\n");
  }

  std::cout << "fit: m=" << short_fmt(cutoff.fit.slope) << " b=" << short_fmt(cutoff.fit.intercept)
            << " rms=" << short_fmt(cutoff.fit.rms_residual) << " c=" << short_fmt(cutoff.c)
            << " R=" << short_fmt(cutoff.R) << " window=[" << short_fmt(window.t_lo) << ", "
            << short_fmt(window.t_hi) << "] n=" << cutoff.fit.n_points << '\n';
}

void fit_slices(const FitOptions& o, const fs::path& dir) {
  blowup_slices* raw = nullptr;
  check(blowup_slices_load(o.slices.c_str(), &raw), "fit --slices");
  SlicesPtr slices(raw);

  double f0 = 0.0;
  if (o.f0) {
    f0 = *o.f0;
  } else if (const auto m = manifest_number(o.slices, "f0")) {
    f0 = *m;
  }
  double window_r = 0.0;
  if (o.window_r) {
    window_r = *o.window_r;
  } else if (f0 > 0.0) {
    window_r = 2.0 * f0;
  } else {
    throw CliFailure{kBadFlags, "fit: --window-r or --f0 is required when no manifest is present"};
  }

  std::vector<double> times;
  std::vector<blowup_hyperbola> fits;
  for (size_t i = 0; i < blowup_slices_count(slices.get()); ++i) {
    const double T = blowup_slices_time(slices.get(), i);
    blowup_hyperbola h{};
    const blowup_status st = blowup_hyperbola_fit_slice(slices.get(), i, window_r, nullptr, &h);
    if (st != BLOWUP_OK) {
      std::cerr << "fit: slice T=" << fmt(T) << ": " << blowup_status_name(st) << ": " << blowup_last_error()
                << '\n';
      continue;
    }
    times.push_back(T);
    fits.push_back(h);
    std::cout << "hyperbola: T=" << short_fmt(T) << " a=" << short_fmt(h.a) << " b=" << short_fmt(h.b)
              << " k=" << short_fmt(h.k) << " -b/a=" << short_fmt(h.minus_b_over_a)
              << " rms=" << short_fmt(h.rms_residual) << '\n';
  }
  check(blowup_hyperbola_series_save(times.data(), fits.data(), fits.size(),
                                     (dir / "hyperbola.csv").string().c_str()),
        "fit");
  if (fits.size() >= 2) {
    std::vector<double> slope(fits.size());
    for (size_t i = 0; i < fits.size(); ++i) slope[i] = fits[i].minus_b_over_a;
    blowup_linear_fit line{};
    if (blowup_linear_fit_points(times.data(), slope.data(), times.size(), &line) == BLOWUP_OK) {
      const auto [lo, hi] = std::minmax_element(slope.begin(), slope.end());
      const double range = *hi - *lo;
      std::cout << "hyperbola trend: -b/a = " << short_fmt(line.slope) << "*T + " << short_fmt(line.intercept)
                << " rms=" << short_fmt(line.rms_residual);
      if (range > 0.0) std::cout << " (" << short_fmt(100.0 * line.rms_residual / range) << "% of range)";
      std::cout << '\n';
    }
  }
  if (o.gnuplot) {
    write_text(dir / "hyperbola.gp",
               "set xlabel 'T'\nset ylabel '-b/a'\nset datafile separator ','\n"
               "plot 'hyperbola.csv' using 1:5 every ::1 with linespoints title '-b/a'\n");
  }
}

int cmd_fit(const FitOptions& o) {
  if (o.trace.empty() && o.slices.empty()) throw CliFailure{kBadFlags, "fit: give --trace and/or --slices"};
  fs::path dir;
  if (!o.out.empty()) {
    dir = o.out;
  } else {
    dir = fs::path(o.trace.empty() ? o.slices : o.trace).parent_path();
    if (dir.empty()) dir = ".";
  }
  ensure_dir(dir);
  if (!o.trace.empty()) fit_trace(o, dir);
  if (!o.slices.empty()) fit_slices(o, dir);
  return kOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepOptions {
  std::string vary;
  std::vector<double> values;
  double f0 = 1.0;
  double v0 = -0.01;
  double dr = 0.01;
  double dt = 0.001;
  double r_max = 100.0;
  bool r_max_sqrt_f0 = false;
  int iters = 4;
  long long max_steps = 10'000'000;
  std::vector<double> slice_times;
  unsigned jobs = 1;
  std::string out;
  bool gnuplot = false;
};

int cmd_sweep(const SweepOptions& o) {
  if (o.vary != "v0" && o.vary != "f0") throw CliFailure{kBadFlags, "sweep: --vary must be v0 or f0"};
  if (o.values.empty()) throw CliFailure{kBadFlags, "sweep: --values is empty"};

  std::vector<blowup_sim_config> configs;
  for (double value : o.values) {
    blowup_sim_config cfg;
    blowup_sim_config_default(&cfg);
    cfg.f0 = o.vary == "f0" ? value : o.f0;
    cfg.v0 = o.vary == "v0" ? value : o.v0;
    cfg.dr = o.dr;
    cfg.dt = o.dt;
    cfg.r_max = o.r_max_sqrt_f0 ? o.r_max * std::sqrt(cfg.f0) : o.r_max;
    cfg.corrector_iters = o.iters;
    cfg.max_steps = o.max_steps;
    cfg.slice_times = o.slice_times.data();
    cfg.n_slice_times = o.slice_times.size();
    check(blowup_sim_config_validate(&cfg), "sweep (" + o.vary + "=" + fmt(value) + ")");
    configs.push_back(cfg);
  }

  const fs::path dir = o.out.empty() ? output_root() / "sweep" : fs::path(o.out);
  ensure_dir(dir);
  blowup_sweep* raw = nullptr;
  check(blowup_sweep_run(configs.data(), configs.size(), o.jobs, dir.string().c_str(), &raw), "sweep");
  SweepPtr sweep(raw);
  check(blowup_sweep_save(sweep.get(), (dir / "sweep.csv").string().c_str()), "sweep");

  std::string table(blowup_sweep_format(sweep.get(), nullptr, 0) + 1, '\0');
  blowup_sweep_format(sweep.get(), table.data(), table.size());
  table.pop_back();
  std::cout << table;

  size_t ok = 0;
  std::vector<double> rinv;
  for (size_t i = 0; i < blowup_sweep_size(sweep.get()); ++i) {
    blowup_sweep_row row{};
    check(blowup_sweep_row_get(sweep.get(), i, &row), "sweep");
    if (row.status != BLOWUP_OK) {
      std::cerr << "sweep: row " << i << ": " << blowup_sweep_row_error(sweep.get(), i) << '\n';
      continue;
    }
    ++ok;
    if (o.vary == "v0" && row.v0 != 0.0) rinv.insert(rinv.end(), {1.0 / std::abs(row.v0), row.cutoff.R});
  }

  if (o.vary == "v0") {
    save_csv(dir / "rinv.csv", {"inv_abs_v0", "R"}, rinv);
    const size_t n = rinv.size() / 2;
    if (n >= 2) {
      std::vector<double> x(n), y(n);
      for (size_t i = 0; i < n; ++i) {
        x[i] = rinv[2 * i];
        y[i] = rinv[2 * i + 1];
      }
      blowup_linear_fit line{};
      check(blowup_linear_fit_points(x.data(), y.data(), n, &line), "sweep R vs 1/|v0|");
      save_csv(dir / "rinv_fit.csv", {"slope", "intercept", "rms", "n_points"},
               {line.slope, line.intercept, line.rms_residual, static_cast<double>(line.n_points)});
      std::cout << "R vs 1/|v0|: slope=" << short_fmt(line.slope) << " intercept=" << short_fmt(line.intercept)
                << " rms=" << short_fmt(line.rms_residual) << '\n';
      if (o.gnuplot) {
        write_text(dir / "rinv.gp", "set xlabel '1/|v0|'\nset ylabel 'R'\nset datafile separator ','\n"
                                    "plot 'rinv.csv' using 1:2 every ::1 with points pt 7 title 'R', " +
                                        fmt(line.slope) + "*x + " + fmt(line.intercept) +
                                        " title 'least-squares line'\n");
      }
    }
  }
  if (ok == 0) throw CliFailure{kSweepAllFailed, "sweep: every row failed"};
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collapse runs, adiabatic predictions and fits for charge-one sigma-model solitons"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(blowup_version()));

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Evolve f(r,t) from a flat profile and record the collapse");
  run->add_option("--f0", run_opts.f0, "Initial height")->required();
  run->add_option("--v0", run_opts.v0, "Initial velocity")->required();
  run->add_option("--dr", run_opts.dr, "Radial spacing")->capture_default_str();
  run->add_option("--dt", run_opts.dt, "Time step")->capture_default_str();
  run->add_option("--rmax", run_opts.r_max, "Outer radius")->capture_default_str();
  run->add_option("--iters", run_opts.iters, "Corrector passes per step")->capture_default_str();
  run->add_option("--stop-height", run_opts.stop_height, "Halt when f(0,t) <= this (default 0.05*f0)");
  run->add_option("--max-steps", run_opts.max_steps, "Step limit")->capture_default_str();
  run->add_option("--sample-every", run_opts.sample_every, "Record the origin every N steps")
      ->capture_default_str();
  run->add_option("--slice-times", run_opts.slice_times, "Times at which to store f(r,T)")->delimiter(',');
  run->add_option("--out", run_opts.out, "Output directory (default $BLOWUP_OUTPUT_ROOT/run)");
  run->add_flag("--gnuplot", run_opts.gnuplot, "Also write gnuplot scripts");

  PredictOptions pred_opts;
  auto* predict = app.add_subcommand("predict", "Adiabatic (cutoff-Lagrangian) trajectory f(0,t)");
  predict->add_option("--c", pred_opts.c, "Kinetic constant");
  predict->add_option("--R", pred_opts.R, "Cutoff radius");
  predict->add_option("--f0", pred_opts.f0, "Initial height");
  predict->add_option("--from-fit", pred_opts.from_fit, "Take c, R, f0 and the window from fit.csv");
  predict->add_option("--times", pred_opts.times, "Times to predict")->delimiter(',');
  predict->add_option("--num-points", pred_opts.num_points, "Uniform times on [0, t_end]");
  predict->add_option("--t-end", pred_opts.t_end, "End time for --num-points (default: time to 0.05*f0)");
  predict->add_option("--compare", pred_opts.compare, "trace.csv to overlay");
  predict->add_option("--compare-points", pred_opts.compare_points, "Max overlay points")->capture_default_str();
  predict->add_option("--out", pred_opts.out, "Output directory (default $BLOWUP_OUTPUT_ROOT)");
  predict->add_flag("--gnuplot", pred_opts.gnuplot, "Also write a gnuplot script");

  FitOptions fit_opts;
  auto* fit = app.add_subcommand("fit", "Extract (c, R) from a trace and/or fit hyperbolas to slices");
  fit->add_option("--trace", fit_opts.trace, "trace.csv from a run");
  fit->add_option("--slices", fit_opts.slices, "slices.csv from a run");
  fit->add_option("--stop-height", fit_opts.stop_height, "Stop height of the run (default: manifest or 0.05*f0)");
  fit->add_option("--t-lo", fit_opts.t_lo, "Window start");
  fit->add_option("--t-hi", fit_opts.t_hi, "Window end");
  fit->add_flag("--whole-trace", fit_opts.whole_trace, "Fit the entire trace");
  fit->add_option("--window-r", fit_opts.window_r, "Hyperbola fit radius (default 2*f0)");
  fit->add_option("--f0", fit_opts.f0, "Initial height (default: manifest)");
  fit->add_option("--out", fit_opts.out, "Output directory (default: beside the input)");
  fit->add_flag("--gnuplot", fit_opts.gnuplot, "Also write plot data and gnuplot scripts");

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "One run per value of v0 or f0, with (c, R) per row");
  sweep->add_option("--vary", sweep_opts.vary, "Parameter to vary")->required()->check(CLI::IsMember({"v0", "f0"}));
  sweep->add_option("--values", sweep_opts.values, "Values of the varied parameter")->required()->delimiter(',');
  sweep->add_option("--f0", sweep_opts.f0, "Fixed f0 when varying v0")->capture_default_str();
  sweep->add_option("--v0", sweep_opts.v0, "Fixed v0 when varying f0")->capture_default_str();
  sweep->add_option("--dr", sweep_opts.dr, "Radial spacing")->capture_default_str();
  sweep->add_option("--dt", sweep_opts.dt, "Time step")->capture_default_str();
  sweep->add_option("--rmax", sweep_opts.r_max, "Outer radius")->capture_default_str();
  sweep->add_flag("--rmax-sqrt-f0", sweep_opts.r_max_sqrt_f0, "Scale the outer radius as rmax*sqrt(f0)");
  sweep->add_option("--iters", sweep_opts.iters, "Corrector passes per step")->capture_default_str();
  sweep->add_option("--max-steps", sweep_opts.max_steps, "Step limit per run")->capture_default_str();
  sweep->add_option("--slice-times", sweep_opts.slice_times, "Slice times per run")->delimiter(',');
  sweep->add_option("--jobs", sweep_opts.jobs, "Concurrent runs")->capture_default_str();
  sweep->add_option("--out", sweep_opts.out, "Output directory (default $BLOWUP_OUTPUT_ROOT/sweep)");
  sweep->add_flag("--gnuplot", sweep_opts.gnuplot, "Also write a gnuplot script");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadFlags;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*predict) return cmd_predict(pred_opts);
    if (*fit) return cmd_fit(fit_opts);
    if (*sweep) return cmd_sweep(sweep_opts);
  } catch (const CliFailure& f) {
    std::cerr << "blowup: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "blowup: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

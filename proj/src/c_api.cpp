#include "blowup/blowup.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "blowup/analysis.hpp"
#include "blowup/artifacts.hpp"
#include "blowup/error.hpp"
#include "blowup/geodesic.hpp"
#include "blowup/solver.hpp"
#include "blowup/sweep.hpp"

struct blowup_run {
  blowup::RunResult result;
};

struct blowup_trace {
  blowup::OriginTrace trace;
};

struct blowup_slices {
  std::vector<blowup::StoredSlice> slices;
};

struct blowup_sweep {
  std::vector<blowup::SweepRow> rows;
  std::vector<blowup_status> status;
};

namespace {

thread_local std::string last_error;

blowup_status to_status(blowup::ErrorCode code) {
  using blowup::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return BLOWUP_ERR_INVALID_ARGUMENT;
    case ErrorCode::ContractViolation: return BLOWUP_ERR_CONTRACT;
    case ErrorCode::BlowUpPassed: return BLOWUP_ERR_BLOW_UP_PASSED;
    case ErrorCode::Domain: return BLOWUP_ERR_DOMAIN;
    case ErrorCode::Numerical: return BLOWUP_ERR_NUMERICAL;
    case ErrorCode::InsufficientData: return BLOWUP_ERR_INSUFFICIENT_DATA;
    case ErrorCode::SingularFit: return BLOWUP_ERR_SINGULAR_FIT;
    case ErrorCode::ExtractionUndefined: return BLOWUP_ERR_EXTRACTION_UNDEFINED;
    case ErrorCode::FitFailed: return BLOWUP_ERR_FIT_FAILED;
    case ErrorCode::OutOfRange: return BLOWUP_ERR_OUT_OF_RANGE;
    case ErrorCode::Io: return BLOWUP_ERR_IO;
  }
  return BLOWUP_ERR_INTERNAL;
}

blowup_status fail(blowup_status status, const std::string& msg) {
  last_error = msg;
  return status;
}

// Runs `body`, translating exceptions into a status and the thread-local
// error message.
template <class F>
blowup_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return BLOWUP_OK;
  } catch (const blowup::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BLOWUP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BLOWUP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BLOWUP_ERR_INTERNAL, "unknown exception");
  }
}

#define BLOWUP_REQUIRE(ptr)                                                        \
  do {                                                                             \
    if ((ptr) == nullptr) return fail(BLOWUP_ERR_INVALID_ARGUMENT, #ptr " is null"); \
  } while (0)

blowup::SimConfig to_config(const blowup_sim_config& c) {
  blowup::SimConfig cfg;
  cfg.f0 = c.f0;
  cfg.v0 = c.v0;
  cfg.dr = c.dr;
  cfg.dt = c.dt;
  cfg.r_max = c.r_max;
  cfg.corrector_iters = c.corrector_iters;
  if (c.stop_height > 0.0) cfg.stop_height = c.stop_height;
  cfg.max_steps = c.max_steps;
  cfg.sample_every = c.sample_every;
  if (c.n_slice_times > 0) {
    if (c.slice_times == nullptr) {
      throw blowup::Error(blowup::ErrorCode::InvalidArgument, "slice_times is null but n_slice_times > 0");
    }
    cfg.slice_times.assign(c.slice_times, c.slice_times + c.n_slice_times);
  }
  return cfg;
}

blowup_halt_reason to_c(blowup::HaltReason r) {
  switch (r) {
    case blowup::HaltReason::ReachedStopHeight: return BLOWUP_HALT_REACHED_STOP_HEIGHT;
    case blowup::HaltReason::MaxSteps: return BLOWUP_HALT_MAX_STEPS;
    case blowup::HaltReason::BlowUpPassed: return BLOWUP_HALT_BLOW_UP_PASSED;
  }
  return BLOWUP_HALT_MAX_STEPS;
}

blowup_linear_fit to_c(const blowup::LinearFit& f) {
  return {f.slope, f.intercept, f.rms_residual, f.n_points};
}

blowup_cutoff to_c(const blowup::CutoffExtraction& e, double f0) {
  return {e.c, e.R, to_c(e.fit), {e.window.lo, e.window.hi}, f0};
}

blowup::CutoffExtraction from_c(const blowup_cutoff& c) {
  blowup::CutoffExtraction e;
  e.c = c.c;
  e.R = c.R;
  e.fit = {c.fit.slope, c.fit.intercept, c.fit.rms_residual, c.fit.n_points};
  e.window = {c.window.t_lo, c.window.t_hi};
  return e;
}

blowup_hyperbola to_c(const blowup::HyperbolaFit& h) {
  return {h.a, h.b, h.k, h.rms_residual, h.window_r, h.minus_b_over_a(), h.iterations};
}

std::optional<blowup::HyperbolaFit> from_c(const blowup_hyperbola* init) {
  if (init == nullptr) return std::nullopt;
  blowup::HyperbolaFit h;
  h.a = init->a;
  h.b = init->b;
  h.k = init->k;
  return h;
}

blowup::GeodesicModel from_c(const blowup_geodesic_model& m) { return {m.c, m.R, m.f0}; }

}  // namespace

extern "C" {

const char* blowup_version(void) { return blowup::tool_version().data(); }

const char* blowup_status_name(blowup_status status) {
  switch (status) {
    case BLOWUP_OK: return "ok";
    case BLOWUP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case BLOWUP_ERR_CONTRACT: return "contract_violation";
    case BLOWUP_ERR_BLOW_UP_PASSED: return "blow_up_passed";
    case BLOWUP_ERR_DOMAIN: return "domain_error";
    case BLOWUP_ERR_NUMERICAL: return "numerical_error";
    case BLOWUP_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case BLOWUP_ERR_SINGULAR_FIT: return "singular_fit";
    case BLOWUP_ERR_EXTRACTION_UNDEFINED: return "extraction_undefined";
    case BLOWUP_ERR_FIT_FAILED: return "fit_failed";
    case BLOWUP_ERR_OUT_OF_RANGE: return "out_of_range";
    case BLOWUP_ERR_IO: return "io_error";
    case BLOWUP_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* blowup_halt_reason_name(blowup_halt_reason reason) {
  switch (reason) {
    case BLOWUP_HALT_REACHED_STOP_HEIGHT: return "reached_stop_height";
    case BLOWUP_HALT_MAX_STEPS: return "max_steps";
    case BLOWUP_HALT_BLOW_UP_PASSED: return "blow_up_passed";
  }
  return "unknown";
}

const char* blowup_last_error(void) { return last_error.c_str(); }

void blowup_sim_config_default(blowup_sim_config* cfg) {
  if (cfg == nullptr) return;
  const blowup::SimConfig d;
  *cfg = blowup_sim_config{d.f0, d.v0, d.dr, d.dt, d.r_max, d.corrector_iters, 0.0,
                           static_cast<long long>(d.max_steps), d.sample_every, nullptr, 0};
}

blowup_status blowup_sim_config_validate(const blowup_sim_config* cfg) {
  BLOWUP_REQUIRE(cfg);
  return guarded([&] { to_config(*cfg).validate(); });
}

blowup_status blowup_run_simulation(const blowup_sim_config* cfg, blowup_run** out) {
  BLOWUP_REQUIRE(cfg);
  BLOWUP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new blowup_run{blowup::run(to_config(*cfg))}; });
}

void blowup_run_free(blowup_run* run) { delete run; }

blowup_halt_reason blowup_run_halt_reason(const blowup_run* run) {
  return run ? to_c(run->result.halt_reason) : BLOWUP_HALT_MAX_STEPS;
}

long long blowup_run_steps(const blowup_run* run) { return run ? run->result.steps : 0; }
double blowup_run_halt_time(const blowup_run* run) { return run ? run->result.halt_time : 0.0; }
size_t blowup_run_grid_size(const blowup_run* run) { return run ? run->result.grid.size() : 0; }
double blowup_run_r_max(const blowup_run* run) { return run ? run->result.grid.r_max() : 0.0; }

blowup_status blowup_run_write_artifacts(const blowup_run* run, const char* dir) {
  BLOWUP_REQUIRE(run);
  BLOWUP_REQUIRE(dir);
  return guarded([&] { blowup::write_run_artifacts(dir, run->result); });
}

blowup_status blowup_trace_from_run(const blowup_run* run, blowup_trace** out) {
  BLOWUP_REQUIRE(run);
  BLOWUP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new blowup_trace{run->result.trace}; });
}

blowup_status blowup_trace_from_arrays(const double* t, const double* f, size_t n, blowup_trace** out) {
  BLOWUP_REQUIRE(out);
  *out = nullptr;
  if (n > 0) {
    BLOWUP_REQUIRE(t);
    BLOWUP_REQUIRE(f);
  }
  return guarded([&] {
    blowup::OriginTrace trace;
    trace.samples.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      if (i > 0 && !(t[i] > t[i - 1])) {
        throw blowup::Error(blowup::ErrorCode::InvalidArgument, "trace times must be strictly increasing");
      }
      trace.samples.push_back({t[i], f[i]});
    }
    *out = new blowup_trace{std::move(trace)};
  });
}

blowup_status blowup_trace_load(const char* path, blowup_trace** out) {
  BLOWUP_REQUIRE(path);
  BLOWUP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new blowup_trace{blowup::read_trace_csv(path)}; });
}

blowup_status blowup_trace_save(const blowup_trace* trace, const char* path) {
  BLOWUP_REQUIRE(trace);
  BLOWUP_REQUIRE(path);
  return guarded([&] { blowup::write_trace_csv(path, trace->trace); });
}

void blowup_trace_free(blowup_trace* trace) { delete trace; }

size_t blowup_trace_size(const blowup_trace* trace) { return trace ? trace->trace.size() : 0; }

size_t blowup_trace_copy(const blowup_trace* trace, double* t, double* f, size_t capacity) {
  if (trace == nullptr) return 0;
  const size_t n = std::min(capacity, trace->trace.size());
  for (size_t i = 0; i < n; ++i) {
    if (t) t[i] = trace->trace.samples[i].t;
    if (f) f[i] = trace->trace.samples[i].f_origin;
  }
  return n;
}

size_t blowup_trace_velocity_copy(const blowup_trace* trace, double* t, double* f, double* dfdt,
                                   size_t capacity) {
  if (trace == nullptr || trace->trace.size() < 3) return 0;
  const auto v = blowup::trace_velocity(trace->trace);
  const size_t n = std::min(capacity, v.size());
  for (size_t i = 0; i < n; ++i) {
    if (t) t[i] = v[i].t;
    if (f) f[i] = v[i].f;
    if (dfdt) dfdt[i] = v[i].dfdt;
  }
  return n;
}

blowup_status blowup_linear_fit_points(const double* x, const double* y, size_t n, blowup_linear_fit* out) {
  BLOWUP_REQUIRE(out);
  if (n > 0) {
    BLOWUP_REQUIRE(x);
    BLOWUP_REQUIRE(y);
  }
  return guarded([&] {
    *out = to_c(blowup::linear_fit(std::span<const double>(x, n), std::span<const double>(y, n)));
  });
}

blowup_status blowup_extraction_window(const blowup_trace* trace, double stop_height, int whole_trace,
                                       blowup_window* out) {
  BLOWUP_REQUIRE(trace);
  BLOWUP_REQUIRE(out);
  return guarded([&] {
    blowup::WindowRule rule;
    rule.whole_trace = whole_trace != 0;
    const auto w = blowup::extraction_window(trace->trace, stop_height, rule);
    *out = {w.lo, w.hi};
  });
}

blowup_status blowup_extract_cutoff(const blowup_trace* trace, const blowup_window* window,
                                    blowup_cutoff* out) {
  BLOWUP_REQUIRE(trace);
  BLOWUP_REQUIRE(window);
  BLOWUP_REQUIRE(out);
  return guarded([&] {
    const auto e = blowup::extract_cutoff(trace->trace, {window->t_lo, window->t_hi});
    const double f0 = trace->trace.empty() ? 0.0 : trace->trace.samples.front().f_origin;
    *out = to_c(e, f0);
  });
}

blowup_status blowup_cutoff_from_line(double slope, double intercept, blowup_cutoff* out) {
  BLOWUP_REQUIRE(out);
  return guarded([&] {
    blowup::LinearFit line;
    line.slope = slope;
    line.intercept = intercept;
    *out = to_c(blowup::cutoff_from_line(line, {0.0, 0.0}), 0.0);
  });
}

blowup_status blowup_cutoff_save(const blowup_cutoff* fit, const char* path) {
  BLOWUP_REQUIRE(fit);
  BLOWUP_REQUIRE(path);
  return guarded([&] { blowup::write_fit_csv(path, from_c(*fit), fit->f0); });
}

blowup_status blowup_cutoff_load(const char* path, blowup_cutoff* out) {
  BLOWUP_REQUIRE(path);
  BLOWUP_REQUIRE(out);
  return guarded([&] {
    const auto stored = blowup::read_fit_csv(path);
    *out = to_c(stored.extraction, stored.f0);
  });
}

blowup_status blowup_geodesic_integrand(double f, double R, double* out) {
  BLOWUP_REQUIRE(out);
  return guarded([&] { *out = blowup::integrand(f, R); });
}

blowup_status blowup_collapse_time(const blowup_geodesic_model* model, double f_target, double* t_out) {
  BLOWUP_REQUIRE(model);
  BLOWUP_REQUIRE(t_out);
  return guarded([&] { *t_out = blowup::collapse_time_integral(f_target, from_c(*model)); });
}

blowup_status blowup_max_predictable_time(const blowup_geodesic_model* model, double* t_out) {
  BLOWUP_REQUIRE(model);
  BLOWUP_REQUIRE(t_out);
  return guarded([&] { *t_out = blowup::max_predictable_time(from_c(*model)); });
}

blowup_status blowup_predict_height(const blowup_geodesic_model* model, double t, double* f_out) {
  BLOWUP_REQUIRE(model);
  BLOWUP_REQUIRE(f_out);
  return guarded([&] { *f_out = blowup::predict_height(from_c(*model), t); });
}

blowup_status blowup_predicted_velocity(const blowup_geodesic_model* model, double f, double* v_out) {
  BLOWUP_REQUIRE(model);
  BLOWUP_REQUIRE(v_out);
  return guarded([&] { *v_out = blowup::predicted_velocity(f, from_c(*model)); });
}

blowup_status blowup_slices_from_run(const blowup_run* run, blowup_slices** out) {
  BLOWUP_REQUIRE(run);
  BLOWUP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto* s = new blowup_slices;
    const auto& grid = run->result.grid;
    std::vector<double> r(grid.size());
    for (size_t j = 0; j < r.size(); ++j) r[j] = grid.r(j);
    for (const auto& slice : run->result.slices) s->slices.push_back({slice.t, r, slice.values.values});
    *out = s;
  });
}

blowup_status blowup_slices_load(const char* path, blowup_slices** out) {
  BLOWUP_REQUIRE(path);
  BLOWUP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new blowup_slices{blowup::read_slices_csv(path)}; });
}

void blowup_slices_free(blowup_slices* slices) { delete slices; }

size_t blowup_slices_count(const blowup_slices* slices) { return slices ? slices->slices.size() : 0; }

double blowup_slices_time(const blowup_slices* slices, size_t index) {
  if (slices == nullptr || index >= slices->slices.size()) return std::nan("");
  return slices->slices[index].t;
}

size_t blowup_slices_length(const blowup_slices* slices, size_t index) {
  if (slices == nullptr || index >= slices->slices.size()) return 0;
  return slices->slices[index].r.size();
}

size_t blowup_slices_copy(const blowup_slices* slices, size_t index, double* r, double* f, size_t capacity) {
  if (slices == nullptr || index >= slices->slices.size()) return 0;
  const auto& s = slices->slices[index];
  const size_t n = std::min(capacity, s.r.size());
  for (size_t i = 0; i < n; ++i) {
    if (r) r[i] = s.r[i];
    if (f) f[i] = s.f[i];
  }
  return n;
}

blowup_status blowup_hyperbola_fit(const double* r, const double* f, size_t n, double window_r,
                                   const blowup_hyperbola* init, blowup_hyperbola* out) {
  BLOWUP_REQUIRE(out);
  if (n > 0) {
    BLOWUP_REQUIRE(r);
    BLOWUP_REQUIRE(f);
  }
  return guarded([&] {
    *out = to_c(blowup::hyperbola_fit(std::span<const double>(r, n), std::span<const double>(f, n),
                                      window_r, from_c(init)));
  });
}

blowup_status blowup_hyperbola_fit_slice(const blowup_slices* slices, size_t index, double window_r,
                                         const blowup_hyperbola* init, blowup_hyperbola* out) {
  BLOWUP_REQUIRE(slices);
  BLOWUP_REQUIRE(out);
  if (index >= slices->slices.size()) return fail(BLOWUP_ERR_INVALID_ARGUMENT, "slice index out of range");
  const auto& s = slices->slices[index];
  return guarded([&] { *out = to_c(blowup::hyperbola_fit(s.r, s.f, window_r, from_c(init))); });
}

blowup_status blowup_hyperbola_series_save(const double* times, const blowup_hyperbola* fits, size_t n,
                                           const char* path) {
  BLOWUP_REQUIRE(path);
  if (n > 0) {
    BLOWUP_REQUIRE(times);
    BLOWUP_REQUIRE(fits);
  }
  return guarded([&] {
    std::vector<blowup::HyperbolaSeriesRow> rows;
    rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      blowup::HyperbolaFit h;
      h.a = fits[i].a;
      h.b = fits[i].b;
      h.k = fits[i].k;
      h.rms_residual = fits[i].rms_residual;
      h.window_r = fits[i].window_r;
      rows.push_back({times[i], h});
    }
    blowup::write_hyperbola_csv(path, rows);
  });
}

blowup_status blowup_sweep_run(const blowup_sim_config* configs, size_t n, unsigned jobs,
                               const char* out_root, blowup_sweep** out) {
  BLOWUP_REQUIRE(out);
  *out = nullptr;
  if (n > 0) BLOWUP_REQUIRE(configs);
  return guarded([&] {
    std::vector<blowup::SimConfig> cfgs;
    cfgs.reserve(n);
    for (size_t i = 0; i < n; ++i) cfgs.push_back(to_config(configs[i]));

    blowup::SweepObserver observer;
    if (out_root != nullptr) {
      const std::filesystem::path root(out_root);
      observer = [root](std::size_t index, const blowup::RunResult& result, const blowup::SweepRow& row) {
        char name[32];
        std::snprintf(name, sizeof name, "row_%03zu", index);
        blowup::write_run_artifacts(root / name, result, row.extraction);
      };
    }
    auto* sweep = new blowup_sweep;
    sweep->rows = blowup::sweep_table(cfgs, blowup::WindowRule{}, jobs, observer);
    for (const auto& row : sweep->rows) {
      blowup_status st = BLOWUP_OK;
      if (!row.ok()) {
        st = BLOWUP_ERR_INTERNAL;
        for (int c = 0; c <= static_cast<int>(blowup::ErrorCode::Io); ++c) {
          const auto code = static_cast<blowup::ErrorCode>(c);
          if (row.error.rfind(blowup::error_code_name(code), 0) == 0) st = to_status(code);
        }
      }
      sweep->status.push_back(st);
    }
    *out = sweep;
  });
}

void blowup_sweep_free(blowup_sweep* sweep) { delete sweep; }

size_t blowup_sweep_size(const blowup_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

blowup_status blowup_sweep_row_get(const blowup_sweep* sweep, size_t index, blowup_sweep_row* out) {
  BLOWUP_REQUIRE(sweep);
  BLOWUP_REQUIRE(out);
  if (index >= sweep->rows.size()) return fail(BLOWUP_ERR_INVALID_ARGUMENT, "sweep row index out of range");
  return guarded([&] {
    const auto& row = sweep->rows[index];
    const auto& c = row.config;
    blowup_sweep_row r{};
    r.f0 = c.f0;
    r.v0 = c.v0;
    r.dr = c.dr;
    r.dt = c.dt;
    r.r_max = c.make_grid().r_max();
    r.halt_reason = to_c(row.halt_reason);
    r.status = sweep->status[index];
    if (row.extraction) r.cutoff = to_c(*row.extraction, c.f0);
    *out = r;
  });
}

const char* blowup_sweep_row_error(const blowup_sweep* sweep, size_t index) {
  if (sweep == nullptr || index >= sweep->rows.size()) return "";
  return sweep->rows[index].error.c_str();
}

blowup_status blowup_sweep_save(const blowup_sweep* sweep, const char* path) {
  BLOWUP_REQUIRE(sweep);
  BLOWUP_REQUIRE(path);
  return guarded([&] { blowup::write_sweep_csv(path, sweep->rows); });
}

size_t blowup_sweep_format(const blowup_sweep* sweep, char* buffer, size_t capacity) {
  if (sweep == nullptr) return 0;
  const std::string text = blowup::format_sweep_table(sweep->rows);
  if (buffer != nullptr && capacity > 0) {
    const size_t n = std::min(capacity - 1, text.size());
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
  }
  return text.size();
}

blowup_status blowup_csv_save(const char* path, const char* const* header, size_t n_cols,
                              const double* values, size_t n_rows) {
  BLOWUP_REQUIRE(path);
  BLOWUP_REQUIRE(header);
  if (n_rows > 0) BLOWUP_REQUIRE(values);
  return guarded([&] {
    std::vector<std::string> head;
    for (size_t i = 0; i < n_cols; ++i) {
      if (header[i] == nullptr) throw blowup::Error(blowup::ErrorCode::InvalidArgument, "null header entry");
      head.emplace_back(header[i]);
    }
    std::vector<std::vector<double>> rows(n_rows);
    for (size_t i = 0; i < n_rows; ++i) rows[i].assign(values + i * n_cols, values + (i + 1) * n_cols);
    blowup::write_csv(path, head, rows);
  });
}

void blowup_format_double(double value, char* buffer, size_t capacity) {
  if (buffer == nullptr || capacity == 0) return;
  const std::string s = blowup::format_double(value);
  const size_t n = std::min(capacity - 1, s.size());
  std::memcpy(buffer, s.data(), n);
  buffer[n] = '\0';
}

}  // extern "C"

#include "blowup/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blowup/error.hpp"

namespace blowup {

namespace {

[[noreturn]] void bad_config(const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, "invalid simulation config: " + msg);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void SimConfig::validate() const {
  if (!positive_finite(f0)) bad_config("f0 must be positive");
  if (!std::isfinite(v0)) bad_config("v0 must be finite");
  if (!positive_finite(dr)) bad_config("dr must be positive");
  if (!positive_finite(dt)) bad_config("dt must be positive");
  if (dt > dr) bad_config("dt must not exceed dr");
  if (!positive_finite(r_max)) bad_config("r_max must be positive");
  if (std::llround(r_max / dr) < 4) bad_config("r_max must span at least 4 intervals of dr");
  if (corrector_iters < 1) bad_config("corrector_iters must be at least 1");
  const double stop = effective_stop_height();
  if (!(stop > 0.0 && stop < f0)) bad_config("stop_height must lie in (0, f0)");
  if (max_steps < 1) bad_config("max_steps must be at least 1");
  if (sample_every < 1) bad_config("sample_every must be at least 1");
  for (double t : slice_times) {
    if (!std::isfinite(t) || t < 0.0) bad_config("slice times must be finite and non-negative");
  }
}

std::string_view halt_reason_name(HaltReason reason) noexcept {
  switch (reason) {
    case HaltReason::ReachedStopHeight: return "reached_stop_height";
    case HaltReason::MaxSteps: return "max_steps";
    case HaltReason::BlowUpPassed: return "blow_up_passed";
  }
  return "unknown";
}

void apply_boundaries(std::span<double> f) {
  const std::size_t n = f.size();
  if (n < 5) {
    throw Error(ErrorCode::ContractViolation, "apply_boundaries needs at least 5 samples");
  }
  f[0] = (4.0 / 3.0) * f[1] - (1.0 / 3.0) * f[2];
  f[n - 1] = f[n - 2];
}

RadialField apply_boundaries(RadialField f, const RadialGrid& grid) {
  if (f.size() != grid.size()) {
    throw Error(ErrorCode::ContractViolation, "apply_boundaries: field/grid size mismatch");
  }
  apply_boundaries(f.view());
  return f;
}

FieldState initialize(const SimConfig& cfg, const RadialGrid& grid) {
  cfg.validate();
  FieldState s;
  s.f_cur = RadialField(grid.size(), cfg.f0);
  s.f_prev = RadialField(grid.size(), cfg.f0 - cfg.v0 * cfg.dt);
  return s;
}

Stepper::Stepper(const SimConfig& cfg, const RadialGrid& grid)
    : grid_(&grid),
      dt_(cfg.dt),
      iters_(cfg.corrector_iters),
      spatial_(grid.size()),
      coeff_(grid.size()),
      next_(grid.size()) {}

void Stepper::advance(FieldState& state) {
  const std::size_t n = grid_->size();
  if (state.f_cur.size() != n || state.f_prev.size() != n) {
    throw Error(ErrorCode::ContractViolation, "Stepper: state does not match the grid");
  }
  const std::span<const double> cur = state.f_cur.values;
  const std::span<const double> prev = state.f_prev.values;
  split_rhs(cur, *grid_, spatial_, coeff_);

  const double dt2 = dt_ * dt_;
  const double inv_2dt = 0.5 / dt_;
  double delta = 0.0;
  bool finite = true;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double base = 2.0 * cur[j] - prev[j] + dt2 * spatial_[j];
    const double c = dt2 * coeff_[j];
    double g = 2.0 * cur[j] - prev[j];
    double last = 0.0;
    for (int it = 0; it < iters_; ++it) {
      const double ft = (g - prev[j]) * inv_2dt;
      const double updated = base + c * ft * ft;
      last = std::abs(updated - g);
      g = updated;
    }
    finite = finite && std::isfinite(g);
    delta = std::max(delta, last);
    next_[j] = g;
  }
  apply_boundaries(std::span<double>(next_));

  const std::int64_t index = state.step_index + 1;
  if (!finite || !std::isfinite(next_[0]) || !(next_[0] > 0.0)) throw BlowUpPassed(index);

  // Rotate levels: prev <- cur, cur <- next, and recycle the old prev buffer.
  std::swap(state.f_prev.values, state.f_cur.values);
  std::swap(state.f_cur.values, next_);
  state.step_index = index;
  state.t = static_cast<double>(index) * dt_;
  state.corrector_delta = delta;
}

FieldState step(const FieldState& state, const SimConfig& cfg, const RadialGrid& grid) {
  cfg.validate();
  FieldState next = state;
  Stepper stepper(cfg, grid);
  stepper.advance(next);
  return next;
}

RunResult run(const SimConfig& cfg) {
  cfg.validate();
  RunResult result{cfg, cfg.make_grid(), {}, {}, HaltReason::MaxSteps, 0, 0.0};
  const RadialGrid& grid = result.grid;

  // Snapshot each requested time at its nearest step.
  std::vector<std::pair<std::int64_t, double>> wanted;
  for (double t : cfg.slice_times) wanted.emplace_back(std::llround(t / cfg.dt), t);
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               wanted.end());
  std::size_t next_slice = 0;
  auto capture_slices = [&](const FieldState& s) {
    while (next_slice < wanted.size() && wanted[next_slice].first <= s.step_index) {
      if (wanted[next_slice].first == s.step_index) {
        result.slices.push_back(TimeSlice{s.t, s.f_cur});
      }
      ++next_slice;
    }
  };

  FieldState state = initialize(cfg, grid);
  Stepper stepper(cfg, grid);
  const double stop = cfg.effective_stop_height();
  result.trace.samples.push_back({0.0, state.f_cur[0]});
  capture_slices(state);

  while (state.step_index < cfg.max_steps) {
    try {
      stepper.advance(state);
    } catch (const BlowUpPassed&) {
      result.halt_reason = HaltReason::BlowUpPassed;
      break;
    }
    if (state.step_index % cfg.sample_every == 0) {
      result.trace.samples.push_back({state.t, state.f_cur[0]});
    }
    capture_slices(state);
    if (state.f_cur[0] <= stop) {
      result.halt_reason = HaltReason::ReachedStopHeight;
      break;
    }
  }
  result.steps = state.step_index;
  result.halt_time = state.t;
  return result;
}

}  // namespace blowup

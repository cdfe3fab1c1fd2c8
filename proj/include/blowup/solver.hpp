#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "blowup/grid.hpp"

namespace blowup {

// Parameters of one collapse run. Defaults are the standard run
// f0 = 1, v0 = -0.01, dr = 0.01, dt = 0.001, r_max = 100.
struct SimConfig {
  double f0 = 1.0;
  double v0 = -0.01;
  double dr = 0.01;
  double dt = 0.001;
  double r_max = 100.0;
  int corrector_iters = 4;
  // Halt once f(0,t) <= stop_height; unset means 0.05 * f0.
  std::optional<double> stop_height;
  std::int64_t max_steps = 10'000'000;
  int sample_every = 1;
  std::vector<double> slice_times;

  double effective_stop_height() const { return stop_height.value_or(0.05 * f0); }

  // Throws Error(InvalidArgument) naming the offending field.
  void validate() const;

  RadialGrid make_grid() const { return RadialGrid::covering(dr, r_max); }
};

// Two consecutive time levels; f_cur is at time t.
struct FieldState {
  RadialField f_prev;
  RadialField f_cur;
  double t = 0.0;
  std::int64_t step_index = 0;
  // Max |change| over the final corrector pass of the step that produced
  // this state (0 for the initial state).
  double corrector_delta = 0.0;
};

struct OriginSample {
  double t;
  double f_origin;
};

struct OriginTrace {
  std::vector<OriginSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
};

struct TimeSlice {
  double t = 0.0;
  RadialField values;
};

enum class HaltReason { ReachedStopHeight, MaxSteps, BlowUpPassed };

std::string_view halt_reason_name(HaltReason reason) noexcept;

struct RunResult {
  SimConfig config;
  RadialGrid grid;
  OriginTrace trace;
  std::vector<TimeSlice> slices;
  HaltReason halt_reason = HaltReason::MaxSteps;
  std::int64_t steps = 0;
  double halt_time = 0.0;
};

// Origin: f_0 = (4/3) f_1 - (1/3) f_2 (f even in r). Outer: f_{n-1} = f_{n-2}.
void apply_boundaries(std::span<double> f);
RadialField apply_boundaries(RadialField f, const RadialGrid& grid);

// f_cur = f0 at t = 0 and a virtual level f_prev = f0 - v0*dt, so that the
// first extrapolated guess is f0 + v0*dt and the centred velocity at t = 0
// is exactly v0.
FieldState initialize(const SimConfig& cfg, const RadialGrid& grid);

// One leapfrog step with fixed-point correction of the velocity term.
// Throws BlowUpPassed when the new level is non-finite or f(0) <= 0.
FieldState step(const FieldState& state, const SimConfig& cfg, const RadialGrid& grid);

// Steps a FieldState in place with reusable work arrays. `run` uses this;
// `step` is a convenience wrapper around a single advance.
class Stepper {
 public:
  Stepper(const SimConfig& cfg, const RadialGrid& grid);

  void advance(FieldState& state);

 private:
  const RadialGrid* grid_;
  double dt_;
  int iters_;
  std::vector<double> spatial_;
  std::vector<double> coeff_;
  std::vector<double> next_;
};

// Evolves until f(0,t) <= stop_height, max_steps, or the blow-up is passed.
// A blow-up ends the run with HaltReason::BlowUpPassed; it is not rethrown.
RunResult run(const SimConfig& cfg);

}  // namespace blowup

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "blowup/grid.hpp"
#include "blowup/solver.hpp"

namespace blowup {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t n_points = 0;
};

// Ordinary least squares for y = slope*x + intercept. Throws
// Error(InsufficientData) for fewer than 2 points and Error(SingularFit) when
// all x coincide.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct VelocitySample {
  double t;
  double f;
  double dfdt;
};

// Centred differences at interior trace samples; endpoints are dropped.
std::vector<VelocitySample> trace_velocity(const OriginTrace& trace);

struct TimeWindow {
  double lo;
  double hi;
};

// Rule for the default extraction window: drop the first `skip_fraction` of
// the trace duration (start-up transient) and every sample with
// f(0,t) < floor_factor * stop_height.
struct WindowRule {
  double skip_fraction = 0.05;
  double floor_factor = 1.5;
  bool whole_trace = false;
};

TimeWindow extraction_window(const OriginTrace& trace, double stop_height,
                             const WindowRule& rule = {});

struct CutoffExtraction {
  double c = 0.0;
  double R = 0.0;
  LinearFit fit;
  TimeWindow window{0.0, 0.0};
};

// c = sqrt(-2/m), R = exp(-b/m + 1/2) for the line y = m x + b through
// (ln f, 1/f_t^2). Throws Error(ExtractionUndefined) when m >= 0.
CutoffExtraction cutoff_from_line(const LinearFit& fit, TimeWindow window);

// Fits 1/f_t(0,t)^2 against ln f(0,t) over the samples with t in `window`
// and derives (c, R). Throws Error(InsufficientData) when fewer than two
// usable samples fall in the window.
CutoffExtraction extract_cutoff(const OriginTrace& trace, TimeWindow window);

// y(r) = k + b*sqrt(1 + r^2/a^2): the branch of (y-k)^2/b^2 - r^2/a^2 = 1
// through the origin value k + b. The sign of b selects a bump (b < 0 with
// the apex at r = 0 above the asymptotes) or a dip.
struct HyperbolaFit {
  double a = 0.0;
  double b = 0.0;
  double k = 0.0;
  double rms_residual = 0.0;
  double window_r = 0.0;
  int iterations = 0;
  // Sum of squared residuals after each accepted step, starting with the
  // initial guess.
  std::vector<double> sse_history;

  double minus_b_over_a() const noexcept { return -b / a; }
  double operator()(double r) const;
};

// Damped Gauss-Newton (Levenberg-Marquardt) over (a, b, k) using the samples
// with r <= window_r. Without `init`, starts from k = value at the window
// edge, b = y(0) - k, a = window_r / 2.
HyperbolaFit hyperbola_fit(std::span<const double> r, std::span<const double> y,
                           double window_r, const std::optional<HyperbolaFit>& init = {});

HyperbolaFit hyperbola_fit(const TimeSlice& slice, const RadialGrid& grid, double window_r,
                           const std::optional<HyperbolaFit>& init = {});

}  // namespace blowup

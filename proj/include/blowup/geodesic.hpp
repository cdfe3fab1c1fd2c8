#pragma once

#include <span>
#include <vector>

namespace blowup {

// Adiabatic (cutoff-Lagrangian) model of the collapse: kinetic constant c,
// cutoff radius R and starting height f0. Along the trajectory
//   (f_t^2 / 2) [ln(1 + R^2/f^2) - R^2/(f^2 + R^2)] = c^2 / 2.
struct GeodesicModel {
  double c;
  double R;
  double f0;

  // Throws Error(Domain) unless c, R, f0 are positive and finite.
  void validate() const;
  // False when R <= f0, where the large-R extraction formulas lose accuracy.
  bool large_cutoff() const noexcept { return R > f0; }
};

// ln(1+x) - x/(1+x) with x = R^2/f^2; strictly positive for x > 0. A series
// is used for small x to avoid cancellation.
double kinetic_bracket(double f, double R);

// sqrt(kinetic_bracket(f, R)). Throws Error(Domain) for f <= 0 or R <= 0.
double integrand(double f, double R);

// Time for the adiabatic trajectory to shrink from f0 to f_target:
//   t = (1/c) * integral_{f_target}^{f0} integrand(f, R) df.
// Adaptive Simpson, absolute tolerance 1e-10 on the integral.
double collapse_time_integral(double f_target, const GeodesicModel& model);

// Lowest height the predictions will resolve, 1e-6 * f0.
double quadrature_floor(const GeodesicModel& model) noexcept;

// Collapse time to the quadrature floor: the largest predictable time.
double max_predictable_time(const GeodesicModel& model);

// Inverts collapse_time_integral: the height reached at time t. Bracketed
// Illinois/bisection search on [floor, f0] to |df| <= 1e-9. Throws
// Error(OutOfRange) when t < 0 or t exceeds max_predictable_time.
double predict_height(const GeodesicModel& model, double t);

struct TrajectoryPoint {
  double t;
  double f;
};

std::vector<TrajectoryPoint> predict_trajectory(const GeodesicModel& model,
                                                std::span<const double> times);

// Shrinking branch: f_t = -c / integrand(f, R).
double predicted_velocity(double f, const GeodesicModel& model);

// Adaptive Simpson on [a, b] to absolute tolerance `tol`, at most `max_depth`
// levels of bisection. Throws Error(Numerical) when the depth cap is hit.
template <class F>
double adaptive_simpson(F&& fn, double a, double b, double tol, int max_depth = 60);

}  // namespace blowup

#include "blowup/detail/adaptive_simpson.hpp"

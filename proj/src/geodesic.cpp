#include "blowup/geodesic.hpp"

#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr double kRootTolerance = 1e-9;
constexpr double kFloorFraction = 1e-6;

[[noreturn]] void domain_error(const std::string& msg) { throw Error(ErrorCode::Domain, msg); }

}  // namespace

void GeodesicModel::validate() const {
  if (!(std::isfinite(c) && c > 0.0)) domain_error("geodesic model: c must be positive");
  if (!(std::isfinite(R) && R > 0.0)) domain_error("geodesic model: R must be positive");
  if (!(std::isfinite(f0) && f0 > 0.0)) domain_error("geodesic model: f0 must be positive");
}

double kinetic_bracket(double f, double R) {
  if (!(f > 0.0)) domain_error("kinetic bracket: f must be positive (log divergence at f = 0)");
  if (!(R > 0.0)) domain_error("kinetic bracket: R must be positive");
  const double ratio = R / f;
  const double x = ratio * ratio;
  if (x < 1e-3) {
    // ln(1+x) - x/(1+x) = sum_{k>=2} (-1)^k (k-1)/k x^k
    double power = x;
    double sum = 0.0;
    for (int k = 2; k <= 12; ++k) {
      power *= x;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      sum += sign * static_cast<double>(k - 1) / static_cast<double>(k) * power;
    }
    return sum;
  }
  return std::log1p(x) - x / (1.0 + x);
}

double integrand(double f, double R) { return std::sqrt(kinetic_bracket(f, R)); }

double collapse_time_integral(double f_target, const GeodesicModel& model) {
  model.validate();
  if (!(f_target > 0.0)) domain_error("collapse time: target height must be positive");
  if (f_target > model.f0) domain_error("collapse time: target height exceeds f0");
  const double R = model.R;
  const double area =
      adaptive_simpson([R](double f) { return integrand(f, R); }, f_target, model.f0,
                       kQuadratureTolerance);
  return area / model.c;
}

double quadrature_floor(const GeodesicModel& model) noexcept { return kFloorFraction * model.f0; }

double max_predictable_time(const GeodesicModel& model) {
  return collapse_time_integral(quadrature_floor(model), model);
}

double predict_height(const GeodesicModel& model, double t) {
  model.validate();
  const double t_max = max_predictable_time(model);
  if (!(t >= 0.0) || t > t_max) {
    std::ostringstream msg;
    msg << "time " << t << " is outside the predictable range [0, " << t_max << "]";
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
  if (t == 0.0) return model.f0;

  // g(f) = T(f) - t is decreasing in f; g(lo) >= 0 >= g(hi).
  double lo = quadrature_floor(model);
  double hi = model.f0;
  double g_lo = t_max - t;
  double g_hi = -t;
  if (g_lo == 0.0) return lo;
  int side = 0;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200 && hi - lo > kRootTolerance; ++iter) {
    x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double g = collapse_time_integral(x, model) - t;
    if (g == 0.0) return x;
    if (g > 0.0) {
      lo = x;
      g_lo = g;
      if (side == 1) g_hi *= 0.5;
      side = 1;
    } else {
      hi = x;
      g_hi = g;
      if (side == -1) g_lo *= 0.5;
      side = -1;
    }
    // The Illinois iterate usually pins the root long before the bracket
    // closes from both sides; stop once the time residual is at round-off.
    if (std::abs(g) <= 1e-13 * (1.0 + t)) return x;
  }
  if (hi - lo > kRootTolerance) {
    throw Error(ErrorCode::Numerical, "trajectory inversion did not converge");
  }
  const double interp = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
  return (interp >= lo && interp <= hi) ? interp : 0.5 * (lo + hi);
}

std::vector<TrajectoryPoint> predict_trajectory(const GeodesicModel& model,
                                                std::span<const double> times) {
  std::vector<TrajectoryPoint> out;
  out.reserve(times.size());
  for (double t : times) out.push_back({t, predict_height(model, t)});
  return out;
}

double predicted_velocity(double f, const GeodesicModel& model) {
  model.validate();
  return -model.c / integrand(f, model.R);
}

}  // namespace blowup

#include "blowup/grid.hpp"

#include <cmath>
#include <string>

#include "blowup/error.hpp"

namespace blowup {

namespace {

void require_matching(std::size_t n, const RadialGrid& grid, const char* what) {
  if (n != grid.size()) {
    throw Error(ErrorCode::ContractViolation,
                std::string(what) + ": field has " + std::to_string(n) +
                    " samples but the grid has " + std::to_string(grid.size()));
  }
}

}  // namespace

RadialGrid::RadialGrid(double dr, std::size_t n_points)
    : dr_(dr), n_points_(n_points), outer_(n_points, 0.0), inner_(n_points, 0.0) {
  if (!(dr > 0.0) || !std::isfinite(dr)) {
    throw Error(ErrorCode::InvalidArgument, "grid spacing dr must be positive and finite");
  }
  if (n_points < 5) {
    throw Error(ErrorCode::InvalidArgument,
                "grid needs at least 5 points, got " + std::to_string(n_points));
  }
  const double half = 0.5 * dr;
  const double dr2 = dr * dr;
  for (std::size_t j = 1; j + 1 < n_points; ++j) {
    const double r = static_cast<double>(j) * dr;
    const double r3 = r * r * r;
    const double rp = r + half;
    const double rm = r - half;
    outer_[j] = rp * rp * rp / (r3 * dr2);
    inner_[j] = rm * rm * rm / (r3 * dr2);
  }
}

RadialGrid RadialGrid::covering(double dr, double r_max) {
  if (!(dr > 0.0) || !(r_max > 0.0) || !std::isfinite(r_max)) {
    throw Error(ErrorCode::InvalidArgument, "dr and r_max must be positive");
  }
  const auto intervals = static_cast<std::size_t>(std::llround(r_max / dr));
  return RadialGrid(dr, intervals + 1);
}

bool RadialField::all_finite() const noexcept {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

RadialField radial_operator_L(const RadialField& f, const RadialGrid& grid) {
  require_matching(f.size(), grid, "radial_operator_L");
  const std::size_t n = grid.size();
  RadialField out(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out[j] = grid.outer_weight(j) * (f[j + 1] - f[j]) - grid.inner_weight(j) * (f[j] - f[j - 1]);
  }
  return out;
}

RadialField centered_dr(const RadialField& f, const RadialGrid& grid) {
  require_matching(f.size(), grid, "centered_dr");
  const std::size_t n = grid.size();
  const double inv_2dr = 0.5 / grid.dr();
  RadialField out(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out[j] = (f[j + 1] - f[j - 1]) * inv_2dr;
  }
  return out;
}

RadialField rhs(const RadialField& f, const RadialField& dtf, const RadialGrid& grid) {
  require_matching(f.size(), grid, "rhs");
  require_matching(dtf.size(), grid, "rhs (time derivative)");
  if (!f.all_finite() || !dtf.all_finite()) throw BlowUpPassed(-1);

  const RadialField lap = radial_operator_L(f, grid);
  const RadialField fr = centered_dr(f, grid);
  const std::size_t n = grid.size();
  RadialField out(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double r = grid.r(j);
    const double denom = f[j] * f[j] + r * r;
    out[j] = lap[j] - 4.0 * r * fr[j] / denom +
             2.0 * f[j] / denom * (dtf[j] * dtf[j] - fr[j] * fr[j]);
  }
  return out;
}

void split_rhs(std::span<const double> f, const RadialGrid& grid,
               std::span<double> spatial, std::span<double> velocity_coeff) {
  require_matching(f.size(), grid, "split_rhs");
  require_matching(spatial.size(), grid, "split_rhs (spatial)");
  require_matching(velocity_coeff.size(), grid, "split_rhs (coefficient)");
  const std::size_t n = grid.size();
  const double inv_2dr = 0.5 / grid.dr();
  spatial[0] = spatial[n - 1] = 0.0;
  velocity_coeff[0] = velocity_coeff[n - 1] = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double fj = f[j];
    const double r = grid.r(j);
    const double lap = grid.outer_weight(j) * (f[j + 1] - fj) - grid.inner_weight(j) * (fj - f[j - 1]);
    const double fr = (f[j + 1] - f[j - 1]) * inv_2dr;
    const double denom = fj * fj + r * r;
    const double coeff = 2.0 * fj / denom;
    spatial[j] = lap - 4.0 * r * fr / denom - coeff * fr * fr;
    velocity_coeff[j] = coeff;
  }
}

}  // namespace blowup

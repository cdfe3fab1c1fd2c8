#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace blowup {

// Uniform radial mesh r_j = j*dr, j = 0..n_points-1.
class RadialGrid {
 public:
  RadialGrid(double dr, std::size_t n_points);

  // Mesh covering [0, r_max]; the point count is round(r_max/dr) + 1, so the
  // effective outer radius is (n_points-1)*dr.
  static RadialGrid covering(double dr, double r_max);

  double dr() const noexcept { return dr_; }
  std::size_t size() const noexcept { return n_points_; }
  double r_max() const noexcept { return static_cast<double>(n_points_ - 1) * dr_; }
  double r(std::size_t j) const noexcept { return static_cast<double>(j) * dr_; }

  // Flux-form weights of the radial operator at interior point j:
  // (L f)_j = outer_j*(f_{j+1}-f_j) - inner_j*(f_j-f_{j-1}).
  double outer_weight(std::size_t j) const noexcept { return outer_[j]; }
  double inner_weight(std::size_t j) const noexcept { return inner_[j]; }

 private:
  double dr_;
  std::size_t n_points_;
  std::vector<double> outer_;
  std::vector<double> inner_;
};

// Samples of f(r_j, t) at a fixed time.
struct RadialField {
  std::vector<double> values;

  RadialField() = default;
  explicit RadialField(std::vector<double> v) : values(std::move(v)) {}
  RadialField(std::size_t n, double fill) : values(n, fill) {}

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t j) { return values[j]; }
  double operator[](std::size_t j) const { return values[j]; }
  std::span<const double> view() const noexcept { return values; }
  std::span<double> view() noexcept { return values; }

  bool all_finite() const noexcept;
};

// Discrete r^-3 d/dr (r^3 df/dr) in conservative flux form. Entries 0 and n-1
// of the result are zero; boundary values belong to the solver.
RadialField radial_operator_L(const RadialField& f, const RadialGrid& grid);

// (f_{j+1} - f_{j-1}) / (2 dr) at interior points, zero at both ends.
RadialField centered_dr(const RadialField& f, const RadialGrid& grid);

// Right-hand side of the radial field equation
//   f_tt = L f - 4 r f_r/(f^2+r^2) + 2f/(f^2+r^2) (f_t^2 - f_r^2)
// at interior points. Throws BlowUpPassed(-1) on non-finite input.
RadialField rhs(const RadialField& f, const RadialField& dtf, const RadialGrid& grid);

// Allocation-free form of rhs used by the time stepper. Because only the last
// term depends on f_t, the right-hand side factors as
//   rhs_j = spatial_j + velocity_coeff_j * (f_t)_j^2
// with spatial and velocity_coeff functions of f alone. Writes interior
// entries of both outputs; entries 0 and n-1 are set to zero.
void split_rhs(std::span<const double> f, const RadialGrid& grid,
               std::span<double> spatial, std::span<double> velocity_coeff);

}  // namespace blowup

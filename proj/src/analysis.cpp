#include "blowup/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::ContractViolation, "linear_fit: x and y differ in length");
  }
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::InsufficientData, "linear_fit needs at least 2 points");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
    throw Error(ErrorCode::SingularFit, "linear_fit: all abscissae are equal");
  }

  double x_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x_mean += x[i];
    y_mean += y[i];
  }
  x_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - x_mean;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_mean);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::SingularFit, "linear_fit: abscissae have no spread");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    sse += r * r;
  }
  fit.rms_residual = std::sqrt(sse / static_cast<double>(n));
  fit.n_points = n;
  return fit;
}

std::vector<VelocitySample> trace_velocity(const OriginTrace& trace) {
  const auto& s = trace.samples;
  if (s.size() < 3) {
    throw Error(ErrorCode::InsufficientData,
                "trace_velocity needs at least 3 samples, got " + std::to_string(s.size()));
  }
  std::vector<VelocitySample> out;
  out.reserve(s.size() - 2);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double dfdt = (s[i + 1].f_origin - s[i - 1].f_origin) / (s[i + 1].t - s[i - 1].t);
    out.push_back({s[i].t, s[i].f_origin, dfdt});
  }
  return out;
}

TimeWindow extraction_window(const OriginTrace& trace, double stop_height, const WindowRule& rule) {
  if (trace.empty()) throw Error(ErrorCode::InsufficientData, "extraction window: empty trace");
  const double t_first = trace.samples.front().t;
  const double t_last = trace.samples.back().t;
  if (rule.whole_trace) return {t_first, t_last};

  const double lo = t_first + rule.skip_fraction * (t_last - t_first);
  const double floor = rule.floor_factor * stop_height;
  double hi = lo;
  for (const auto& s : trace.samples) {
    if (s.f_origin >= floor) hi = std::max(hi, s.t);
  }
  return {lo, hi};
}

CutoffExtraction cutoff_from_line(const LinearFit& fit, TimeWindow window) {
  if (!(fit.slope < 0.0) || !std::isfinite(fit.intercept)) {
    std::ostringstream msg;
    msg << "cutoff extraction undefined: fitted slope " << fit.slope
        << " is not negative (trace is not collapsing) in window [" << window.lo << ", "
        << window.hi << "]";
    throw Error(ErrorCode::ExtractionUndefined, msg.str());
  }
  CutoffExtraction out;
  out.c = std::sqrt(-2.0 / fit.slope);
  out.R = std::exp(-fit.intercept / fit.slope + 0.5);
  out.fit = fit;
  out.window = window;
  return out;
}

CutoffExtraction extract_cutoff(const OriginTrace& trace, TimeWindow window) {
  const auto velocity = trace_velocity(trace);
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& v : velocity) {
    if (v.t < window.lo || v.t > window.hi) continue;
    if (v.dfdt == 0.0 || !(v.f > 0.0)) continue;
    x.push_back(std::log(v.f));
    y.push_back(1.0 / (v.dfdt * v.dfdt));
  }
  if (x.size() < 2) {
    std::ostringstream msg;
    msg << "cutoff extraction: window [" << window.lo << ", " << window.hi << "] holds "
        << x.size() << " usable samples, need at least 2";
    throw Error(ErrorCode::InsufficientData, msg.str());
  }
  return cutoff_from_line(linear_fit(x, y), window);
}

double HyperbolaFit::operator()(double r) const { return k + b * std::sqrt(1.0 + (r * r) / (a * a)); }

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Gaussian elimination with partial pivoting; false when singular.
bool solve3(Mat3 m, Vec3 rhs, Vec3& out) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (!(std::abs(m[pivot][col]) > 0.0)) return false;
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int row = col + 1; row < 3; ++row) {
      const double factor = m[row][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[row][c] -= factor * m[col][c];
      rhs[row] -= factor * rhs[col];
    }
  }
  for (int row = 2; row >= 0; --row) {
    double acc = rhs[row];
    for (int c = row + 1; c < 3; ++c) acc -= m[row][c] * out[c];
    out[row] = acc / m[row][row];
  }
  return std::isfinite(out[0]) && std::isfinite(out[1]) && std::isfinite(out[2]);
}

double sum_squares(const Vec3& p, std::span<const double> r, std::span<const double> y) {
  double sse = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double model = p[2] + p[1] * std::sqrt(1.0 + (r[i] * r[i]) / (p[0] * p[0]));
    const double d = y[i] - model;
    sse += d * d;
  }
  return sse;
}

// Best (a, b, k) with a held fixed: y against s = sqrt(1 + r^2/a^2) is a
// straight line with slope b and intercept k.
std::optional<Vec3> linear_in_kb(double a, std::span<const double> r, std::span<const double> y) {
  std::vector<double> s(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) s[i] = std::sqrt(1.0 + (r[i] * r[i]) / (a * a));
  try {
    const auto line = linear_fit(s, y);
    return Vec3{a, line.slope, line.intercept};
  } catch (const Error&) {
    return std::nullopt;
  }
}

constexpr int kSeedScanPoints = 60;
// a beyond this multiple of the window means no curvature was resolved.
constexpr double kMaxScaleRatio = 1e6;
constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;
constexpr double kMaxDamping = 1e16;

}  // namespace

HyperbolaFit hyperbola_fit(std::span<const double> r_all, std::span<const double> y_all,
                           double window_r, const std::optional<HyperbolaFit>& init) {
  if (r_all.size() != y_all.size()) {
    throw Error(ErrorCode::ContractViolation, "hyperbola_fit: r and y differ in length");
  }
  if (!(window_r > 0.0)) throw Error(ErrorCode::InvalidArgument, "hyperbola_fit: window_r must be positive");

  std::vector<double> r;
  std::vector<double> y;
  for (std::size_t i = 0; i < r_all.size(); ++i) {
    if (r_all[i] <= window_r * (1.0 + 1e-12)) {
      r.push_back(r_all[i]);
      y.push_back(y_all[i]);
    }
  }
  if (r.size() < 10) {
    throw Error(ErrorCode::InsufficientData,
                "hyperbola_fit: " + std::to_string(r.size()) + " samples within r <= " +
                    std::to_string(window_r) + ", need at least 10");
  }

  Vec3 p;
  if (init) {
    p = {init->a, init->b, init->k};
  } else {
    const auto inner = std::min_element(r.begin(), r.end()) - r.begin();
    const auto outer = std::max_element(r.begin(), r.end()) - r.begin();
    const double k = y[outer];
    p = {0.5 * window_r, y[inner] - k, k};
    // The edge/apex guess can sit in the basin of the flat a -> inf limit.
    // For fixed a the model is linear in (k, b), so scan log a and keep
    // whichever start has the smaller residual.
    double best = sum_squares(p, r, y);
    for (int i = 0; i <= kSeedScanPoints; ++i) {
      const double a = window_r * std::pow(10.0, -3.0 + 6.0 * i / kSeedScanPoints);
      if (const auto cand = linear_in_kb(a, r, y)) {
        const double sse = sum_squares(*cand, r, y);
        if (sse < best) {
          best = sse;
          p = *cand;
        }
      }
    }
  }
  if (!(p[0] > 0.0)) throw Error(ErrorCode::InvalidArgument, "hyperbola_fit: initial a must be positive");

  HyperbolaFit fit;
  fit.window_r = window_r;
  double sse = sum_squares(p, r, y);
  fit.sse_history.push_back(sse);
  double damping = 1e-3;
  bool converged = false;
  int iter = 0;

  for (; iter < kMaxIterations && !converged; ++iter) {
    Mat3 jtj{};
    Vec3 jtr{};
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double q = (r[i] * r[i]) / (p[0] * p[0]);
      const double s = std::sqrt(1.0 + q);
      const Vec3 grad{-p[1] * q / (p[0] * s), s, 1.0};
      const double resid = y[i] - (p[2] + p[1] * s);
      for (int a = 0; a < 3; ++a) {
        jtr[a] += grad[a] * resid;
        for (int b = 0; b < 3; ++b) jtj[a][b] += grad[a] * grad[b];
      }
    }

    bool accepted = false;
    while (!accepted) {
      Mat3 lhs = jtj;
      for (int a = 0; a < 3; ++a) lhs[a][a] += damping * std::max(jtj[a][a], 1e-300);
      Vec3 delta{};
      if (solve3(lhs, jtr, delta)) {
        const Vec3 candidate{p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]};
        if (candidate[0] > 0.0) {
          const double cand_sse = sum_squares(candidate, r, y);
          if (cand_sse <= sse) {
            p = candidate;
            sse = cand_sse;
            fit.sse_history.push_back(sse);
            damping = std::max(damping * 0.1, 1e-12);
            accepted = true;
            const double norm =
                std::sqrt(delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]);
            if (norm <= kStepTolerance) converged = true;
            continue;
          }
        }
      }
      damping *= 10.0;
      if (damping > kMaxDamping) {
        // No descent direction left at working precision: p is a minimum.
        converged = true;
        break;
      }
    }
  }

  fit.a = p[0];
  fit.b = p[1];
  fit.k = p[2];
  fit.rms_residual = std::sqrt(sse / static_cast<double>(r.size()));
  fit.iterations = iter;
  const bool degenerate = !(fit.a < kMaxScaleRatio * window_r);
  if (!converged || degenerate || fit.b == 0.0 || !std::isfinite(fit.rms_residual)) {
    std::ostringstream msg;
    msg << "hyperbola fit failed after " << iter << " iterations: a=" << fit.a
        << " b=" << fit.b << " k=" << fit.k << " rms=" << fit.rms_residual;
    throw Error(ErrorCode::FitFailed, msg.str());
  }
  return fit;
}

HyperbolaFit hyperbola_fit(const TimeSlice& slice, const RadialGrid& grid, double window_r,
                           const std::optional<HyperbolaFit>& init) {
  if (slice.values.size() != grid.size()) {
    throw Error(ErrorCode::ContractViolation, "hyperbola_fit: slice does not match the grid");
  }
  std::vector<double> r(grid.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = grid.r(j);
  return hyperbola_fit(r, slice.values.values, window_r, init);
}

}  // namespace blowup

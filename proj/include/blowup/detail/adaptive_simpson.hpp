#pragma once

#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

namespace detail {

// A first estimate can agree with its refinement by coincidence; always split
// a few times before trusting the error estimate.
inline constexpr int kSimpsonMinDepth = 3;

struct SimpsonPanel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

template <class F>
double simpson_recurse(F& fn, const SimpsonPanel& p, double tol, int depth, int max_depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double diff = left + right - p.whole;
  if (depth >= kSimpsonMinDepth && std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  if (depth >= max_depth) {
    std::ostringstream msg;
    msg << "adaptive Simpson did not converge on [" << p.a << ", " << p.b
        << "] at depth " << depth << " (error estimate " << std::abs(diff) / 15.0
        << ", tolerance " << tol << ")";
    throw Error(ErrorCode::Numerical, msg.str());
  }
  const SimpsonPanel lp{p.a, lm, p.m, p.fa, flm, p.fm, left};
  const SimpsonPanel rp{p.m, rm, p.b, p.fm, frm, p.fb, right};
  return simpson_recurse(fn, lp, 0.5 * tol, depth + 1, max_depth) +
         simpson_recurse(fn, rp, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F&& fn, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = fn(a);
  const double fm = fn(m);
  const double fb = fn(b);
  const detail::SimpsonPanel whole{a, m, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)};
  return detail::simpson_recurse(fn, whole, tol, 0, max_depth);
}

}  // namespace blowup

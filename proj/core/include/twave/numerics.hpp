#pragma once

#include <cmath>
#include <utility>

#include "twave/error.hpp"

namespace twave::numerics {

struct Bracket {
  double lo;
  double hi;
};

/// Bisection on a sign-changing bracket. Stops when |f| < ftol or the
/// bracket collapses to machine resolution.
template <class F>
double bisect(F&& f, Bracket b, double ftol, int max_iter = 400) {
  double flo = f(b.lo);
  double fhi = f(b.hi);
  if (flo == 0.0) return b.lo;
  if (fhi == 0.0) return b.hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericalError("bisect: bracket does not change sign");
  }
  double mid = 0.5 * (b.lo + b.hi);
  for (int i = 0; i < max_iter; ++i) {
    mid = 0.5 * (b.lo + b.hi);
    const double fm = f(mid);
    if (std::abs(fm) < ftol || mid == b.lo || mid == b.hi) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      b.lo = mid;
      flo = fm;
    } else {
      b.hi = mid;
    }
  }
  return mid;
}

struct Minimum {
  double x;
  double fx;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
/// Iterates until the bracket width is below rel_width * max(1, |x|).
template <class F>
Minimum golden_section(F&& f, double lo, double hi, double rel_width) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 500; ++i) {
    const double scale = std::max(1.0, std::abs(0.5 * (a + b)));
    if (b - a <= rel_width * scale) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? Minimum{x1, f1} : Minimum{x2, f2};
}

}  // namespace twave::numerics

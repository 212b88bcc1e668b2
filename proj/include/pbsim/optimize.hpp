#pragma once

#include <cmath>
#include <concepts>
#include <numbers>
#include <utility>

#include "pbsim/errors.hpp"

namespace pbsim {

struct Minimum {
  double x;
  double value;
};

/// Golden-section search for a minimum of a unimodal f on [lo, hi].
/// One new evaluation per iteration; ties move toward the lower end.
template <std::invocable<double> F>
Minimum golden_section_minimize(F&& f, double lo, double hi, double tol) {
  if (!(hi > lo)) throw InvalidParameter("golden_section_minimize: need lo < hi");
  if (!(tol > 0)) throw InvalidParameter("golden_section_minimize: tolerance must be > 0");
  constexpr double inv_phi = std::numbers::phi - 1.0;  // 1/phi
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

/// Shrinks [lo, hi] around the switch point of a predicate with pred(lo) != pred(hi).
/// Returns the midpoint of the final bracket, whose width is <= tol.
template <std::predicate<double> P>
double bisect_predicate(P&& pred, double lo, double hi, double tol) {
  if (!(hi > lo)) throw InvalidParameter("bisect_predicate: need lo < hi");
  const bool left = pred(lo);
  if (pred(hi) == left) throw InvalidParameter("bisect_predicate: predicate does not change on the bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid) == left)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace pbsim

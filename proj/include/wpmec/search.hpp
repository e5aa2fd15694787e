#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wpmec {

struct UnimodalResult {
  double x = 0.0;
  double fx = 0.0;
  int evals = 0;
};

// Maximizes a unimodal function on [lo, hi] to absolute tolerance `tol` on x.
// Golden-section interval shrinking with parabolic acceleration (bounded Brent);
// never evaluates the endpoints. Throws if max_iter evaluations do not reach
// the tolerance.
template <class F>
UnimodalResult maximize_unimodal(F&& f, double lo, double hi, double tol, int max_iter) {
  if (!(hi > lo)) throw std::invalid_argument("maximize_unimodal: empty interval");
  if (!(tol > 0.0)) throw std::invalid_argument("maximize_unimodal: tol must be positive");

  constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt 5)/2
  double a = lo, b = hi;
  double x = a + kGolden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  int evals = 1;

  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    const double tol1 = tol + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) return {x, fx, evals};

    bool golden = true;
    if (std::abs(e) > tol1) {
      // Parabola through (v, w, x); accept the step only if it stays inside
      // the bracket and shrinks faster than the previous-but-one step.
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
        golden = false;
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (m > x) ? tol1 : -tol1;
      }
    }
    if (golden) {
      e = (x < m) ? b - x : a - x;
      d = kGolden * e;
    }

    const double u = (std::abs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
    const double fu = f(u);
    ++evals;

    if (fu >= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu >= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu >= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  throw std::runtime_error("maximize_unimodal: no convergence within max_iter");
}

}  // namespace wpmec

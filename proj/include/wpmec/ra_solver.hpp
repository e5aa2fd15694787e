#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wpmec/model.hpp"
#include "wpmec/params.hpp"
#include "wpmec/search.hpp"

namespace wpmec {

struct SolverConfig {
  double outer_tol = 1e-6;  // absolute tolerance on the WPT fraction a
  double inner_tol = 1e-8;  // relative tolerance on the offload time budget
  int max_iter = 200;       // iteration cap for every 1-D search inside

  void validate() const {
    if (!(outer_tol > 0.0) || !(inner_tol > 0.0))
      throw std::invalid_argument("SolverConfig: tolerances must be positive");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  }
};

namespace detail {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kRhoCap = 1e12;

// Marginal uplink rate per unit time as a function of rho = c*a/tau:
//   f(rho) = log2(1+rho) - rho/((1+rho) ln 2).
// Strictly increasing from f(0) = 0 and unbounded; d(tau*log2(1+c*a/tau))/dtau
// equals f evaluated at rho.
inline double marginal_kernel(double rho) {
  if (rho < 0.01) {
    // series of log1p(x)-x/(1+x); the direct form cancels below ~1e-2
    return rho * rho *
           (0.5 + rho * (-2.0 / 3.0 + rho * (0.75 + rho * (-0.8 + rho * (5.0 / 6.0 + rho * (-6.0 / 7.0 + rho * 0.875)))))) /
           kLn2;
  }
  return (std::log1p(rho) - rho / (1.0 + rho)) / kLn2;
}

inline double marginal_kernel_deriv(double rho) {
  const double t = 1.0 + rho;
  return rho / (t * t * kLn2);
}

// Solves marginal_kernel(rho) = y for y > 0. `hint` warm-starts Newton when
// positive. Bracket-safeguarded; falls back to geometric bisection whenever a
// Newton step leaves the known enclosure.
inline double marginal_kernel_inverse(double y, double hint, int max_iter) {
  double rho = hint;
  if (!(rho > 0.0)) {
    rho = (y < 0.28) ? std::sqrt(2.0 * kLn2 * y)
                     : std::exp2(std::min(y, 960.0) + 1.0 / kLn2);
  }
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const double resid = marginal_kernel(rho) - y;
    if (std::abs(resid) <= 5e-13 * y) return rho;
    if (resid > 0.0) hi = rho; else lo = rho;
    double next = rho - resid / marginal_kernel_deriv(rho);
    if (!(next > lo && next < hi))
      next = std::isinf(hi) ? rho * 4.0 : (lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi);
    if (next == rho) return rho;
    rho = next;
  }
  throw std::runtime_error("ra-solver: marginal inversion did not converge (max_iter)");
}

// Offload set compressed by weight: devices sharing a weight share the same
// rho at the equal-marginal optimum, so only per-class gain sums matter.
struct OffloadClasses {
  std::vector<double> w;      // distinct weights
  std::vector<double> c;      // sum of c0 = mu*P*h^2/N0 over the class
  std::vector<double> rho;    // scratch: per-class rho of the last inner solve
  std::vector<double> marg;   // scratch: marginal residuals of the last Newton step
  std::vector<double> slope;  // scratch: marginal slopes of the last Newton step
  double y = -1.0;            // scratch: warm start for the common dual value
  double y_cap = 0.0;         // largest admissible dual value (rho capped at 1e12)

  std::size_t size() const { return w.size(); }

  void reset() {
    w.clear();
    c.clear();
    rho.clear();
    marg.clear();
    slope.clear();
    y = -1.0;
    y_cap = 0.0;
  }
};

// Reused per-thread workspace; solve_p2 stays a pure function of its inputs.
struct SolveScratch {
  OffloadClasses cls;
  std::vector<std::size_t> members;
  std::vector<std::size_t> member_class;
};

inline SolveScratch& solve_scratch() {
  thread_local SolveScratch scratch;
  return scratch;
}

// First-guess inverse of the marginal kernel from its two asymptotes.
inline double kernel_inverse_estimate(double y) {
  return (y < 0.28) ? std::sqrt(2.0 * kLn2 * y)
                    : std::exp2(std::min(y, 960.0) + 1.0 / kLn2);
}

inline double offload_value(const OffloadClasses& cls, double a, double b_over_vu) {
  double value = 0.0;
  for (std::size_t d = 0; d < cls.size(); ++d)
    value += cls.w[d] * b_over_vu * (a * cls.c[d] / cls.rho[d]) * std::log1p(cls.rho[d]) / kLn2;
  return value;
}

// Nested-bisection route: the common dual value y = lambda*vu/B is driven
// onto the budget by safeguarded Newton, inverting the kernel per class at
// each step. Robust; used as the fallback for the joint iteration below.
inline bool inner_allocate_nested(double a, double R, OffloadClasses& cls,
                                  const SolverConfig& cfg) {
  const std::size_t d_count = cls.size();
  double y = cls.y;
  if (!(y > 0.0 && y < cls.y_cap)) {
    double ctot = 0.0, wc = 0.0;
    for (std::size_t d = 0; d < d_count; ++d) {
      ctot += cls.c[d];
      wc += cls.w[d] * cls.c[d];
    }
    y = std::min((wc / ctot) * marginal_kernel(a * ctot / R), cls.y_cap);
  }

  double y_lo = 0.0, y_hi = cls.y_cap;
  bool converged = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    double budget = 0.0, dbudget = 0.0;
    for (std::size_t d = 0; d < d_count; ++d) {
      const double rho = marginal_kernel_inverse(y / cls.w[d], cls.rho[d], cfg.max_iter);
      cls.rho[d] = rho;
      const double tau_cls = a * cls.c[d] / rho;
      budget += tau_cls;
      dbudget -= tau_cls / (rho * cls.w[d] * marginal_kernel_deriv(rho));
    }
    const double resid = budget - R;
    if (std::abs(resid) <= cfg.inner_tol * R) { converged = true; break; }
    if (resid > 0.0) y_lo = y; else y_hi = y;
    if (y >= cls.y_cap && resid > 0.0) { converged = true; break; }  // budget below the rho cap's floor
    double next = y - resid / dbudget;
    if (!(next > y_lo && next < y_hi))
      next = (y_lo > 0.0) ? std::sqrt(y_lo * y_hi) : 0.25 * y;
    if (next == y) { converged = true; break; }
    y = std::min(next, cls.y_cap);
  }
  cls.y = y;
  return converged;
}

// Splits the time budget R among the offload classes at WPT fraction a by
// equalizing weighted marginal rates. Single class solves in closed form.
// Otherwise the equal-marginal system
//
//   w_d * f(rho_d) = y  for every class,  sum_d a*C_d/rho_d = R
//
// is solved by a joint Newton step on (rho_1..rho_D, y); the linearization is
// arrow-shaped so the update costs O(D). Falls back to the nested route if
// the iteration stalls. Leaves per-class rho in cls.rho and returns the
// weighted offload value.
inline double inner_allocate(double a, double R, OffloadClasses& cls,
                             double b_over_vu, const SolverConfig& cfg) {
  const std::size_t d_count = cls.size();
  if (d_count == 1) {
    const double rho = a * cls.c[0] / R;
    cls.rho[0] = rho;
    return cls.w[0] * b_over_vu * R * std::log1p(rho) / kLn2;
  }

  double y = cls.y;
  if (!(y > 0.0 && y < cls.y_cap) || !(cls.rho[0] > 0.0)) {
    double ctot = 0.0, wc = 0.0;
    for (std::size_t d = 0; d < d_count; ++d) {
      ctot += cls.c[d];
      wc += cls.w[d] * cls.c[d];
    }
    y = std::min((wc / ctot) * marginal_kernel(a * ctot / R), cls.y_cap);
    for (std::size_t d = 0; d < d_count; ++d)
      cls.rho[d] = kernel_inverse_estimate(y / cls.w[d]);
  }

  bool converged = false;
  bool at_cap = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    double budget_resid = -R;
    double sum_gain = 0.0, sum_gain_resid = 0.0, max_marg = 0.0;
    for (std::size_t d = 0; d < d_count; ++d) {
      const double rho = cls.rho[d];
      const double slope = cls.w[d] * marginal_kernel_deriv(rho);
      const double marg_resid = cls.w[d] * marginal_kernel(rho) - y;
      const double tau_cls = a * cls.c[d] / rho;
      const double gain = tau_cls / (rho * slope);
      budget_resid += tau_cls;
      sum_gain += gain;
      sum_gain_resid += gain * marg_resid;
      max_marg = std::max(max_marg, std::abs(marg_resid));
      cls.marg[d] = marg_resid;
      cls.slope[d] = slope;
    }
    if (!std::isfinite(budget_resid) || !std::isfinite(sum_gain_resid)) break;
    const bool marg_ok = max_marg <= 1e-9 * std::max(y, 1e-300);
    if (marg_ok && std::abs(budget_resid) <= cfg.inner_tol * R) { converged = true; break; }
    if (marg_ok && at_cap && budget_resid > 0.0) { converged = true; break; }

    double y_new = y + (budget_resid + sum_gain_resid) / sum_gain;
    if (!(y_new > 0.0)) y_new = 0.125 * y;
    at_cap = y_new >= cls.y_cap;
    if (at_cap) y_new = cls.y_cap;
    const double dy = y_new - y;
    for (std::size_t d = 0; d < d_count; ++d) {
      const double step = (dy - cls.marg[d]) / cls.slope[d];
      double rho_new = cls.rho[d] + step;
      if (!(rho_new > 0.0)) rho_new = 0.125 * cls.rho[d];
      cls.rho[d] = rho_new;
    }
    y = y_new;
  }

  if (!converged) {
    cls.y = -1.0;
    for (std::size_t d = 0; d < d_count; ++d) cls.rho[d] = -1.0;
    if (!inner_allocate_nested(a, R, cls, cfg))
      throw std::runtime_error("ra-solver: dual search did not converge (max_iter)");
  } else {
    cls.y = y;
  }
  return offload_value(cls, a, b_over_vu);
}

}  // namespace detail

// Exact solve of the per-frame resource-allocation problem for a fixed
// offloading action: choose the WPT fraction a and the uplink slots tau to
// maximize the weighted sum rate under a + sum(tau) <= 1.
//
// Structure: offloaders with positive gain always receive positive time and
// the budget binds, so for each a the inner split is the equal-marginal
// allocation above; the resulting function of a is concave and is maximized
// by a bounded unimodal search on [0,1]. With no active offloader the whole
// frame goes to energy transfer (a = 1).
inline AllocationResult solve_p2(const ChannelFrame& frame, const OffloadAction& x,
                                 const SystemParams& p, const SolverConfig& cfg = {}) {
  const std::size_t n = p.n;
  if (frame.h.size() != n || x.x.size() != n)
    throw std::invalid_argument("solve_p2: length mismatch");
  cfg.validate();

  AllocationResult out;
  out.tau.assign(n, 0.0);

  // Offload set S: x_i = 1 and h_i > 0. Zero-gain offloaders can only waste
  // time, so they are dropped before the rho substitution.
  detail::SolveScratch& scratch = detail::solve_scratch();
  detail::OffloadClasses& cls = scratch.cls;
  std::vector<std::size_t>& members = scratch.members;
  std::vector<std::size_t>& member_class = scratch.member_class;
  cls.reset();
  members.clear();
  member_class.clear();
  double local_sum = 0.0;             // weighted local rates at a = 1
  const double c_scale = p.harvest_eff * p.ap_power_w / p.noise_w;
  for (std::size_t i = 0; i < n; ++i) {
    if (x.x[i] && frame.h[i] > 0.0) {
      const double c0 = c_scale * frame.h[i] * frame.h[i];
      std::size_t d = 0;
      for (; d < cls.size(); ++d)
        if (cls.w[d] == p.weights[i]) break;
      if (d == cls.size()) {
        cls.w.push_back(p.weights[i]);
        cls.c.push_back(0.0);
      }
      cls.c[d] += c0;
      members.push_back(i);
      member_class.push_back(d);
    } else if (!x.x[i]) {
      local_sum += p.weights[i] * local_rate(frame.h[i], p.energy_coeff[i], 1.0, p);
    }
  }

  if (members.empty()) {
    out.a = 1.0;
    out.q = weighted_sum_rate(frame, x, out.a, out.tau, p);
    return out;
  }

  cls.rho.assign(cls.size(), -1.0);
  cls.marg.assign(cls.size(), 0.0);
  cls.slope.assign(cls.size(), 0.0);
  cls.y_cap = *std::max_element(cls.w.begin(), cls.w.end()) *
              detail::marginal_kernel(detail::kRhoCap);
  const double b_over_vu = p.bandwidth_hz / p.vu;
  constexpr double kBudgetFloor = 1e-13;

  auto reduced = [&](double a) {
    double v = local_sum * std::cbrt(a);
    const double budget = 1.0 - a;
    if (budget > kBudgetFloor)
      v += detail::inner_allocate(a, budget, cls, b_over_vu, cfg);
    return v;
  };

  const UnimodalResult best = maximize_unimodal(reduced, 0.0, 1.0, cfg.outer_tol, cfg.max_iter);
  out.a = best.x;

  // Re-derive the split at the chosen a, then scale onto the exact budget;
  // the scaling perturbs marginals by O(inner_tol) only.
  const double budget = 1.0 - out.a;
  if (budget > kBudgetFloor) {
    detail::inner_allocate(out.a, budget, cls, b_over_vu, cfg);
    double total = 0.0;
    for (std::size_t m = 0; m < members.size(); ++m) {
      const double c0 = c_scale * frame.h[members[m]] * frame.h[members[m]];
      out.tau[members[m]] = out.a * c0 / cls.rho[member_class[m]];
      total += out.tau[members[m]];
    }
    const double scale = budget / total;
    for (std::size_t m : members) out.tau[m] *= scale;
  }
  out.q = weighted_sum_rate(frame, x, out.a, out.tau, p);
  return out;
}

}  // namespace wpmec

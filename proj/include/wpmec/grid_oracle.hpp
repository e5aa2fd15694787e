#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "wpmec/model.hpp"
#include "wpmec/params.hpp"

namespace wpmec {

// Brute-force reference for solve_p2. It shares only the rate formulas with
// the solver: the WPT fraction is gridded exhaustively, the time split is
// gridded too for up to two active offloaders, and for larger sets it comes
// from plain nested bisection (no Newton steps, no weight grouping). The
// returned value is a feasible lower bound within O(resolution) of the
// optimum.
inline AllocationResult grid_oracle_p2(const ChannelFrame& frame, const OffloadAction& x,
                                       const SystemParams& p, double resolution) {
  if (!(resolution > 0.0 && resolution <= 0.1))
    throw std::domain_error("grid_oracle_p2: resolution outside (0, 0.1]");
  const std::size_t n = p.n;
  if (frame.h.size() != n || x.x.size() != n)
    throw std::invalid_argument("grid_oracle_p2: length mismatch");

  std::vector<std::size_t> active;  // offloaders with positive gain
  for (std::size_t i = 0; i < n; ++i)
    if (x.x[i] && frame.h[i] > 0.0) active.push_back(i);

  const double ln2 = std::log(2.0);
  auto kernel = [ln2](double rho) { return (std::log1p(rho) - rho / (1.0 + rho)) / ln2; };

  AllocationResult best;
  best.tau.assign(n, 0.0);
  best.q = -1.0;
  std::vector<double> tau(n, 0.0);

  auto consider = [&](double a) {
    const double q = weighted_sum_rate(frame, x, a, tau, p);
    if (q > best.q) {
      best.q = q;
      best.a = a;
      best.tau = tau;
    }
  };

  const auto steps = static_cast<std::size_t>(std::floor(1.0 / resolution + 1e-9));
  for (std::size_t j = 0; j <= steps; ++j) {
    const double a = (j == steps) ? 1.0 : static_cast<double>(j) * resolution;
    const double budget = 1.0 - a;
    for (std::size_t i : active) tau[i] = 0.0;

    if (active.empty() || budget <= 0.0) {
      consider(a);
      continue;
    }

    if (active.size() == 1) {
      const auto tsteps = static_cast<std::size_t>(std::floor(budget / resolution + 1e-9));
      for (std::size_t j2 = 0; j2 <= tsteps + 1; ++j2) {
        tau[active[0]] = (j2 > tsteps) ? budget : static_cast<double>(j2) * resolution;
        consider(a);
      }
      tau[active[0]] = 0.0;
    } else if (active.size() == 2) {
      const auto tsteps = static_cast<std::size_t>(std::floor(budget / resolution + 1e-9));
      for (std::size_t j2 = 0; j2 <= tsteps + 1; ++j2) {
        const double t0 = (j2 > tsteps) ? budget : static_cast<double>(j2) * resolution;
        tau[active[0]] = t0;
        tau[active[1]] = budget - t0;
        consider(a);
      }
      tau[active[0]] = tau[active[1]] = 0.0;
    } else {
      // Equalize w_i*(B/vu)*f(c_i*a/tau_i) across the set by bisecting the
      // common marginal value, then land exactly on the budget.
      double lam_max = 0.0;
      std::vector<double> c(active.size());
      for (std::size_t m = 0; m < active.size(); ++m) {
        const double h = frame.h[active[m]];
        c[m] = p.harvest_eff * p.ap_power_w * h * h / p.noise_w;
        lam_max = std::max(lam_max, p.weights[active[m]]);
      }
      lam_max *= (p.bandwidth_hz / p.vu) * kernel(1e12);
      double lam_lo = lam_max * 1e-30, lam_hi = lam_max;
      double total = 0.0;
      for (int it = 0; it < 55; ++it) {
        const double lam = std::sqrt(lam_lo * lam_hi);
        total = 0.0;
        for (std::size_t m = 0; m < active.size(); ++m) {
          const double target = lam * p.vu / (p.weights[active[m]] * p.bandwidth_hz);
          double rho_lo = 1e-12, rho_hi = 1e12;
          for (int it2 = 0; it2 < 45; ++it2) {
            const double rho = std::sqrt(rho_lo * rho_hi);
            if (kernel(rho) < target) rho_lo = rho; else rho_hi = rho;
          }
          tau[active[m]] = c[m] * a / std::sqrt(rho_lo * rho_hi);
          total += tau[active[m]];
        }
        if (total > budget) lam_lo = lam; else lam_hi = lam;
      }
      const double scale = budget / total;
      for (std::size_t i : active) tau[i] *= scale;
      consider(a);
      for (std::size_t i : active) tau[i] = 0.0;
    }
  }
  return best;
}

}  // namespace wpmec

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wpmec/params.hpp"

namespace wpmec {

// One time frame's channel realization.
struct ChannelFrame {
  std::size_t t = 0;            // frame index, 1-based
  std::vector<double> h;        // channel power gains, >= 0
};

// Binary offloading decision; entry 1 means the device ships its task to the AP.
struct OffloadAction {
  std::vector<std::uint8_t> x;

  std::size_t size() const { return x.size(); }
  bool operator==(const OffloadAction& o) const { return x == o.x; }
};

// Lexicographic order with device 1 most significant; used for tie-breaking.
inline bool lex_less(const OffloadAction& a, const OffloadAction& b) {
  return a.x < b.x;
}

// Time split of one frame: `a` for energy broadcast, tau_i for each
// offloader's uplink, and the weighted sum rate it achieves.
struct AllocationResult {
  double a = 0.0;
  std::vector<double> tau;
  double q = 0.0;
};

// Energy picked up by one device while the AP broadcasts for fraction `a`.
inline double harvested_energy(double h_i, double a, const SystemParams& p) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("harvested_energy: a outside [0,1]");
  return p.harvest_eff * p.ap_power_w * h_i * a * p.frame_len_s;
}

// Bits/s processed on-device when all harvested energy is spent computing
// across the whole frame.
inline double local_rate(double h_i, double k_i, double a, const SystemParams& p) {
  if (!(k_i > 0.0)) throw std::domain_error("local_rate: k_i must be positive");
  return p.eta1 * std::cbrt(h_i / k_i) * std::cbrt(a);
}

// Bits/s pushed to the AP by a device that spends its whole energy budget on
// the uplink during its tau_i slot. The tau->0, a->0 and h->0 limits are all 0.
inline double offload_rate(double h_i, double a, double tau_i, const SystemParams& p) {
  if (tau_i <= 0.0 || a <= 0.0 || h_i <= 0.0) return 0.0;
  const double snr = p.harvest_eff * p.ap_power_w * a * h_i * h_i / (tau_i * p.noise_w);
  return p.bandwidth_hz * tau_i / p.vu * std::log2(1.0 + snr);
}

// Weighted sum computation rate Q(h, x, tau, a).
inline double weighted_sum_rate(const ChannelFrame& frame, const OffloadAction& x,
                                double a, const std::vector<double>& tau,
                                const SystemParams& p) {
  const std::size_t n = p.n;
  if (frame.h.size() != n || x.x.size() != n || tau.size() != n)
    throw std::invalid_argument("weighted_sum_rate: length mismatch");
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x.x[i])
      q += p.weights[i] * offload_rate(frame.h[i], a, tau[i], p);
    else
      q += p.weights[i] * local_rate(frame.h[i], p.energy_coeff[i], a, p);
  }
  return q;
}

inline double weighted_sum_rate(const ChannelFrame& frame, const OffloadAction& x,
                                const AllocationResult& alloc, const SystemParams& p) {
  return weighted_sum_rate(frame, x, alloc.a, alloc.tau, p);
}

}  // namespace wpmec

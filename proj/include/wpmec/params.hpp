#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpmec {

// Fixed physical and algorithmic constants of the network. Channel gains are
// the only time-varying quantity; everything else lives here.
struct SystemParams {
  std::size_t n = 0;          // number of wireless devices
  double frame_len_s = 1.0;   // time frame length T
  double ap_power_w = 3.0;    // AP transmit power P
  double harvest_eff = 0.51;  // energy harvesting efficiency mu
  double bandwidth_hz = 2e6;  // communication bandwidth B
  double noise_w = 1e-10;     // receiver noise power N0
  double vu = 1.1;            // communication overhead factor
  double cycles_per_bit = 100.0;       // CPU cycles per bit phi
  std::vector<double> energy_coeff;    // per-device computation energy coefficient
  std::vector<double> weights;         // per-device rate weight, > 0
  double eta1 = 0.0;          // (mu*P)^(1/3)/phi, cached

  // Free-space path-loss constants.
  double antenna_gain = 4.11;
  double carrier_hz = 915e6;
  double pathloss_exp = 2.8;

  void recompute_eta1() {
    eta1 = std::cbrt(harvest_eff * ap_power_w) / cycles_per_bit;
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemParams: " + msg); };
    if (n == 0) fail("n must be positive");
    if (!(harvest_eff > 0.0 && harvest_eff < 1.0)) fail("harvest_eff outside (0,1)");
    if (!(ap_power_w > 0.0)) fail("ap_power_w must be positive");
    if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz must be positive");
    if (!(noise_w > 0.0)) fail("noise_w must be positive");
    if (!(vu >= 1.0)) fail("vu must be >= 1");
    if (!(frame_len_s > 0.0)) fail("frame_len_s must be positive");
    if (!(cycles_per_bit > 0.0)) fail("cycles_per_bit must be positive");
    if (energy_coeff.size() != n) fail("energy_coeff length mismatch");
    if (weights.size() != n) fail("weights length mismatch");
    for (double k : energy_coeff)
      if (!(k > 0.0)) fail("energy_coeff entries must be positive");
    for (double w : weights)
      if (!(w > 0.0)) fail("weights must be positive");
    const double want = std::cbrt(harvest_eff * ap_power_w) / cycles_per_bit;
    if (std::abs(eta1 - want) > 1e-12 * std::abs(want)) fail("eta1 inconsistent with mu, P, phi");
  }
};

// Stock parameter set: equal energy coefficients 1e-26 and the alternating
// 1/1.5 weight pattern (odd devices 1, even devices 1.5, 1-based).
inline SystemParams default_params(std::size_t n) {
  SystemParams p;
  p.n = n;
  p.energy_coeff.assign(n, 1e-26);
  p.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.weights[i] = (i % 2 == 0) ? 1.0 : 1.5;
  p.recompute_eta1();
  return p;
}

}  // namespace wpmec

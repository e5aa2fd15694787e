#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wpmec/model.hpp"
#include "wpmec/params.hpp"
#include "wpmec/rng.hpp"

#include <json.hpp>

namespace wpmec {

// Device placement range in meters.
constexpr double kMinDistanceM = 2.5;
constexpr double kMaxDistanceM = 5.2;

struct Topology {
  std::vector<double> distances;   // AP-to-device distance, meters
  std::vector<double> mean_gains;  // free-space path-loss gains, derived
};

// Free-space path loss: A_d * (3e8 / (4 pi f_c d))^d_e.
inline double path_loss(double d, const SystemParams& p) {
  if (!(d > 0.0)) throw std::domain_error("path_loss: distance must be positive");
  const double lambda_term = 3e8 / (4.0 * 3.14159265358979323846 * p.carrier_hz * d);
  return p.antenna_gain * std::pow(lambda_term, p.pathloss_exp);
}

inline Topology topology_from_distances(std::vector<double> distances, const SystemParams& p) {
  Topology topo;
  topo.distances = std::move(distances);
  topo.mean_gains.reserve(topo.distances.size());
  for (double d : topo.distances) topo.mean_gains.push_back(path_loss(d, p));
  return topo;
}

// Random static placement, uniform in (2.5, 5.2) m.
inline Topology make_topology(std::size_t n, std::uint64_t seed, const SystemParams& p) {
  if (n < 1) throw std::invalid_argument("make_topology: n must be >= 1");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = rng::uniform_in(kMinDistanceM, kMaxDistanceM, seed, rng::kTopology, 0, i);
  return topology_from_distances(std::move(d), p);
}

// Rayleigh-fading frame: h_i = mean_gain_i * alpha with alpha ~ Exp(1),
// independent across devices and frames. Counter-addressed, so frame t can be
// produced without generating earlier frames and in any call order.
inline ChannelFrame sample_frame(const Topology& topo, std::size_t t, std::uint64_t seed) {
  ChannelFrame f;
  f.t = t;
  f.h.resize(topo.mean_gains.size());
  for (std::size_t i = 0; i < f.h.size(); ++i)
    f.h[i] = topo.mean_gains[i] * rng::exponential(seed, rng::kChannel, t, i);
  return f;
}

struct EpisodeSpec {
  std::size_t n_frames = 1;
  std::uint64_t seed = 1;
  Topology topology;
};

// Topology interchange document: {"distances": [...], "seed": ..., "weights": [...]}.
inline nlohmann::json topology_to_json(const Topology& topo, std::uint64_t seed,
                                       const std::vector<double>& weights) {
  return nlohmann::json{{"distances", topo.distances}, {"seed", seed}, {"weights", weights}};
}

struct TopologyFile {
  std::vector<double> distances;
  std::uint64_t seed = 0;
  std::vector<double> weights;
};

inline TopologyFile topology_from_json(const nlohmann::json& j) {
  TopologyFile t;
  t.distances = j.at("distances").get<std::vector<double>>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.weights = j.at("weights").get<std::vector<double>>();
  if (t.distances.size() != t.weights.size())
    throw std::invalid_argument("topology: distances/weights length mismatch");
  return t;
}

}  // namespace wpmec

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wpmec/channel.hpp"
#include "wpmec/rng.hpp"

using namespace wpmec;

TEST_CASE("path loss formula") {
  const SystemParams p = default_params(1);
  CHECK(path_loss(3.0, p) == Catch::Approx(6.983532188351923e-06).epsilon(1e-9));
  // power-law scaling when the distance doubles
  CHECK(path_loss(6.0, p) / path_loss(3.0, p) == Catch::Approx(std::pow(2.0, -2.8)).epsilon(1e-12));
  // the placement range brackets every device gain
  const double lo = path_loss(kMaxDistanceM, p);
  const double hi = path_loss(kMinDistanceM, p);
  const Topology topo = make_topology(16, 99, p);
  for (double g : topo.mean_gains) {
    CHECK(g > lo);
    CHECK(g < hi);
  }
  CHECK_THROWS_AS(path_loss(0.0, p), std::domain_error);
}

TEST_CASE("topologies are seeded and in range") {
  const SystemParams p = default_params(10);
  const Topology a = make_topology(10, 7, p);
  const Topology b = make_topology(10, 7, p);
  const Topology c = make_topology(10, 8, p);
  CHECK(a.distances == b.distances);
  CHECK(a.distances != c.distances);
  for (double d : a.distances) {
    CHECK(d > kMinDistanceM);
    CHECK(d < kMaxDistanceM);
  }
}

TEST_CASE("frames are counter-addressed and reproducible") {
  const SystemParams p = default_params(5);
  const Topology topo = make_topology(5, 21, p);
  const ChannelFrame f1 = sample_frame(topo, 1000, 21);
  // regenerate frame 1000 without generating 1..999
  const ChannelFrame f2 = sample_frame(topo, 1000, 21);
  CHECK(f1.h == f2.h);
  const ChannelFrame g = sample_frame(topo, 1001, 21);
  CHECK(f1.h != g.h);
}

TEST_CASE("fading factors follow Exp(1)") {
  const SystemParams p = default_params(2);
  const Topology topo = topology_from_distances({3.0, 4.0}, p);
  const std::size_t frames = 100000;
  std::vector<double> alpha(frames);
  double mean0 = 0.0;
  for (std::size_t t = 1; t <= frames; ++t) {
    const ChannelFrame f = sample_frame(topo, t, 5);
    alpha[t - 1] = f.h[0] / topo.mean_gains[0];
    mean0 += f.h[0];
  }
  mean0 /= static_cast<double>(frames);
  CHECK(mean0 == Catch::Approx(topo.mean_gains[0]).epsilon(0.02));

  std::sort(alpha.begin(), alpha.end());
  const double median = alpha[frames / 2];
  CHECK(median == Catch::Approx(std::log(2.0)).epsilon(0.02));
  const double q25 = alpha[frames / 4];
  CHECK(q25 == Catch::Approx(-std::log(0.75)).epsilon(0.02));
}

TEST_CASE("frames are independent across time") {
  const SystemParams p = default_params(1);
  const Topology topo = topology_from_distances({3.3}, p);
  const std::size_t frames = 10000;
  std::vector<double> h(frames);
  for (std::size_t t = 1; t <= frames; ++t) h[t - 1] = sample_frame(topo, t, 77).h[0];
  double mean = 0.0;
  for (double v : h) mean += v;
  mean /= static_cast<double>(frames);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t + 1 < frames; ++t) {
    num += (h[t] - mean) * (h[t + 1] - mean);
    den += (h[t] - mean) * (h[t] - mean);
  }
  const double lag1 = num / den;
  // |r| ~ 1/sqrt(M) under independence; 4 sigma bound
  CHECK(std::abs(lag1) < 4.0 / std::sqrt(static_cast<double>(frames)));
}

TEST_CASE("topology json round trip") {
  const SystemParams p = default_params(4);
  const Topology topo = make_topology(4, 31, p);
  const nlohmann::json j = topology_to_json(topo, 31, p.weights);
  const TopologyFile t = topology_from_json(j);
  CHECK(t.distances == topo.distances);
  CHECK(t.seed == 31);
  CHECK(t.weights == p.weights);
  // mean gains re-derive exactly
  const Topology again = topology_from_distances(t.distances, p);
  CHECK(again.mean_gains == topo.mean_gains);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "wpmec/channel.hpp"
#include "wpmec/grid_oracle.hpp"
#include "wpmec/ra_solver.hpp"
#include "wpmec/rng.hpp"

using namespace wpmec;

namespace {

// Random §V-style instance: gains from the fading model, random action bits.
struct Instance {
  ChannelFrame frame;
  OffloadAction x;
  SystemParams params;
};

Instance random_instance(std::size_t n, std::uint64_t seed) {
  Instance inst;
  inst.params = default_params(n);
  const Topology topo = make_topology(n, seed, inst.params);
  inst.frame = sample_frame(topo, 1, seed);
  inst.x.x.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    inst.x.x[i] = rng::uniform(seed, 17, 2, i) < 0.5 ? 0 : 1;
  return inst;
}

double feasibility_slack(const AllocationResult& r) {
  return r.a + std::accumulate(r.tau.begin(), r.tau.end(), 0.0) - 1.0;
}

}  // namespace

TEST_CASE("all-local action pushes the whole frame into energy transfer") {
  const auto inst = random_instance(6, 42);
  OffloadAction zeros;
  zeros.x.assign(6, 0);
  const AllocationResult r = solve_p2(inst.frame, zeros, inst.params);
  CHECK(r.a == 1.0);
  double want = 0.0;
  for (std::size_t i = 0; i < 6; ++i)
    want += inst.params.weights[i] *
            inst.params.eta1 * std::cbrt(inst.frame.h[i] / inst.params.energy_coeff[i]);
  CHECK(r.q == Catch::Approx(want).epsilon(1e-12));
  for (double t : r.tau) CHECK(t == 0.0);
}

TEST_CASE("zero-gain offloader matches the all-local solve") {
  const SystemParams p = default_params(3);
  ChannelFrame f;
  f.t = 1;
  f.h = {1.2e-5, 0.0, 3e-6};
  OffloadAction zeros;
  zeros.x = {0, 0, 0};
  OffloadAction flipped;
  flipped.x = {0, 1, 0};
  const AllocationResult a = solve_p2(f, zeros, p);
  const AllocationResult b = solve_p2(f, flipped, p);
  CHECK(b.a == a.a);
  CHECK(b.q == Catch::Approx(a.q).epsilon(1e-12));
  CHECK(b.tau[1] == 0.0);
}

TEST_CASE("single offloader agrees with a fine grid") {
  SystemParams p = default_params(1);
  ChannelFrame f;
  f.t = 1;
  f.h = {1e-5};
  OffloadAction x;
  x.x = {1};
  const AllocationResult got = solve_p2(f, x, p);
  const AllocationResult ref = grid_oracle_p2(f, x, p, 1e-4);
  CHECK(got.q >= ref.q - 1e-3 * ref.q);
  CHECK(got.q <= ref.q * (1.0 + 1e-3));
  CHECK(feasibility_slack(got) <= 1e-9);
}

TEST_CASE("grid oracle basics") {
  const SystemParams p = default_params(2);
  ChannelFrame f;
  f.t = 1;
  f.h = {8e-6, 1.1e-5};

  SECTION("resolution domain") {
    OffloadAction x;
    x.x = {1, 0};
    CHECK_THROWS_AS(grid_oracle_p2(f, x, p, 0.0), std::domain_error);
    CHECK_THROWS_AS(grid_oracle_p2(f, x, p, 0.2), std::domain_error);
  }

  SECTION("all-local hits the a=1 endpoint exactly") {
    OffloadAction x;
    x.x = {0, 0};
    const AllocationResult r = grid_oracle_p2(f, x, p, 1e-2);
    CHECK(r.a == 1.0);
  }

  SECTION("two offloaders never beat the solver") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const SystemParams p2 = default_params(2);
      const Topology topo = make_topology(2, seed, p2);
      const ChannelFrame fr = sample_frame(topo, 3, seed);
      OffloadAction x;
      x.x = {1, 1};
      const AllocationResult grid = grid_oracle_p2(fr, x, p2, 1e-3);
      const AllocationResult opt = solve_p2(fr, x, p2);
      CHECK(grid.q <= opt.q + 1e-6 * std::max(1.0, opt.q));
    }
  }
}

TEST_CASE("solver matches the grid oracle on random instances") {
  // 100 random instances across sizes; the acceptance suite repeats this at
  // scale, the unit test keeps a smaller but still meaningful sample.
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 40; ++seed) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng::uniform(seed, 23, 0, 0) * 10.0);
    const auto inst = random_instance(n, seed);
    const AllocationResult got = solve_p2(inst.frame, inst.x, inst.params);
    const AllocationResult ref = grid_oracle_p2(inst.frame, inst.x, inst.params, 1e-3);
    REQUIRE(got.q >= ref.q - 1e-3 * std::max(ref.q, 1.0));
    REQUIRE(feasibility_slack(got) <= 1e-9);
    for (std::size_t i = 0; i < n; ++i)
      if (!inst.x.x[i]) REQUIRE(got.tau[i] == 0.0);
    ++checked;
  }
}

TEST_CASE("solver q never decreases when a gain grows") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    auto inst = random_instance(5, seed);
    const AllocationResult before = solve_p2(inst.frame, inst.x, inst.params);
    const std::size_t bump = seed % 5;
    inst.frame.h[bump] *= 1.7;
    const AllocationResult after = solve_p2(inst.frame, inst.x, inst.params);
    CHECK(after.q >= before.q - 1e-9 * std::max(1.0, before.q));
  }
}

TEST_CASE("active offloaders share a common weighted marginal rate") {
  const double ln2 = std::log(2.0);
  auto kernel = [ln2](double rho) { return (std::log1p(rho) - rho / (1.0 + rho)) / ln2; };
  int with_two = 0;
  for (std::uint64_t seed = 300; with_two < 25; ++seed) {
    const auto inst = random_instance(8, seed);
    std::size_t active = 0;
    for (std::size_t i = 0; i < 8; ++i)
      if (inst.x.x[i] && inst.frame.h[i] > 0.0) ++active;
    if (active < 2) continue;
    ++with_two;
    const AllocationResult r = solve_p2(inst.frame, inst.x, inst.params);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < 8; ++i) {
      if (!inst.x.x[i] || inst.frame.h[i] <= 0.0) continue;
      const double c = inst.params.harvest_eff * inst.params.ap_power_w *
                       inst.frame.h[i] * inst.frame.h[i] / inst.params.noise_w;
      const double rho = c * r.a / r.tau[i];
      const double marginal = inst.params.weights[i] *
                              (inst.params.bandwidth_hz / inst.params.vu) * kernel(rho);
      if (first) { lo = hi = marginal; first = false; }
      lo = std::min(lo, marginal);
      hi = std::max(hi, marginal);
    }
    CHECK((hi - lo) <= 1e-6 * hi);
  }
}

TEST_CASE("solver is deterministic") {
  const auto inst = random_instance(7, 555);
  const AllocationResult a = solve_p2(inst.frame, inst.x, inst.params);
  const AllocationResult b = solve_p2(inst.frame, inst.x, inst.params);
  CHECK(a.a == b.a);
  CHECK(a.q == b.q);
  CHECK(a.tau == b.tau);
}

TEST_CASE("pathological iteration caps raise the non-convergence error") {
  const auto inst = random_instance(4, 9);
  SolverConfig cfg;
  cfg.max_iter = 2;
  bool has_offloader = false;
  for (std::size_t i = 0; i < 4; ++i)
    if (inst.x.x[i] && inst.frame.h[i] > 0.0) has_offloader = true;
  if (!has_offloader) return;
  CHECK_THROWS_AS(solve_p2(inst.frame, inst.x, inst.params, cfg), std::runtime_error);
}

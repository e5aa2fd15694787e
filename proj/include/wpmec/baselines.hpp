#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wpmec/model.hpp"
#include "wpmec/parallel.hpp"
#include "wpmec/ra_solver.hpp"

namespace wpmec {

namespace detail {

inline OffloadAction action_from_mask(std::uint32_t mask, std::size_t n) {
  OffloadAction act;
  act.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) act.x[i] = (mask >> (n - 1 - i)) & 1u;
  return act;
}

}  // namespace detail

// Optimal action by enumerating all 2^N offloading decisions; ties go to the
// lexicographically smallest action. Capped at N <= 12.
inline std::pair<OffloadAction, AllocationResult> exhaustive_opt(
    const ChannelFrame& frame, const SystemParams& p, const SolverConfig& cfg = {},
    ThreadPool* pool = nullptr) {
  const std::size_t n = p.n;
  if (n > 12) throw std::domain_error("exhaustive_opt: enumeration capped at N <= 12");
  const std::uint32_t masks = 1u << n;

  std::vector<double> q(masks);
  parallel_for(pool, masks, [&](std::size_t mask) {
    q[mask] = solve_p2(frame, detail::action_from_mask(static_cast<std::uint32_t>(mask), n), p, cfg).q;
  });

  // ascending masks are ascending lex order, so strict improvement keeps the
  // lexicographically smallest among exact ties
  std::uint32_t best = 0;
  for (std::uint32_t mask = 1; mask < masks; ++mask)
    if (q[mask] > q[best]) best = mask;

  OffloadAction act = detail::action_from_mask(best, n);
  AllocationResult alloc = solve_p2(frame, act, p, cfg);
  return {std::move(act), std::move(alloc)};
}

// Flip-one-device-at-a-time local search: each round scores all single-bit
// flips and applies the best strictly improving one; stops when no flip
// improves the rate by more than an absolute 1e-9.
inline std::pair<OffloadAction, AllocationResult> coordinate_descent(
    const ChannelFrame& frame, const SystemParams& p, const SolverConfig& cfg = {},
    ThreadPool* pool = nullptr, bool start_all_ones = false) {
  const std::size_t n = p.n;
  constexpr double kImprovement = 1e-9;

  OffloadAction current;
  current.x.assign(n, start_all_ones ? 1 : 0);
  AllocationResult alloc = solve_p2(frame, current, p, cfg);

  std::vector<AllocationResult> flips(n);
  while (true) {
    parallel_for(pool, n, [&](std::size_t i) {
      OffloadAction candidate = current;
      candidate.x[i] ^= 1u;
      flips[i] = solve_p2(frame, candidate, p, cfg);
    });
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (flips[i].q > alloc.q + kImprovement && (best == n || flips[i].q > flips[best].q))
        best = i;
    if (best == n) break;
    current.x[best] ^= 1u;
    alloc = flips[best];
  }
  return {std::move(current), std::move(alloc)};
}

// All devices compute locally (the whole frame charges them).
inline AllocationResult all_local(const ChannelFrame& frame, const SystemParams& p,
                                  const SolverConfig& cfg = {}) {
  OffloadAction x;
  x.x.assign(p.n, 0);
  return solve_p2(frame, x, p, cfg);
}

// All devices offload.
inline AllocationResult all_edge(const ChannelFrame& frame, const SystemParams& p,
                                 const SolverConfig& cfg = {}) {
  OffloadAction x;
  x.x.assign(p.n, 1);
  return solve_p2(frame, x, p, cfg);
}

}  // namespace wpmec

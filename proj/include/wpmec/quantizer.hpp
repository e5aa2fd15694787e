#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "wpmec/model.hpp"

namespace wpmec {

// Relaxed decision emitted by the policy network; entries live in (0,1).
struct RelaxedAction {
  std::vector<double> xhat;

  std::size_t size() const { return xhat.size(); }
};

// Ordered candidate list; the position of the winning action inside it (k*)
// feeds the adaptive-K schedule, so order matters and duplicates are kept.
struct CandidateSet {
  std::vector<OffloadAction> actions;
};

// Order-preserving quantization: candidate 1 rounds at 0.5, candidate m+1
// thresholds at the m-th closest entry to 0.5. Every candidate satisfies
// xhat_i > xhat_j  =>  x_i >= x_j.
inline CandidateSet order_preserving_quantize(const RelaxedAction& xhat, std::size_t k) {
  const std::size_t n = xhat.size();
  if (k < 1 || k > n + 1)
    throw std::domain_error("order_preserving_quantize: k outside [1, N+1]");

  CandidateSet out;
  out.actions.reserve(k);

  OffloadAction first;
  first.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) first.x[i] = xhat.xhat[i] > 0.5 ? 1 : 0;
  out.actions.push_back(std::move(first));
  if (k == 1) return out;

  // entries ranked by distance to 0.5; stable so ties fall back to device index
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(xhat.xhat[a] - 0.5) < std::abs(xhat.xhat[b] - 0.5);
  });

  for (std::size_t m = 2; m <= k; ++m) {
    const double pivot = xhat.xhat[order[m - 2]];
    OffloadAction act;
    act.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = xhat.xhat[i];
      if (v > pivot)
        act.x[i] = 1;
      else if (v == pivot)
        act.x[i] = pivot <= 0.5 ? 1 : 0;
      else
        act.x[i] = 0;
    }
    out.actions.push_back(std::move(act));
  }
  return out;
}

// K nearest binary vectors in Euclidean distance, ties broken by
// lexicographic order. Enumerates all vertices, so it is capped at N <= 12.
inline CandidateSet knn_quantize(const RelaxedAction& xhat, std::size_t k) {
  const std::size_t n = xhat.size();
  if (n > 12) throw std::domain_error("knn_quantize: vertex enumeration capped at N <= 12");
  const std::size_t vertices = std::size_t{1} << n;
  if (k < 1 || k > vertices) throw std::domain_error("knn_quantize: k outside [1, 2^N]");

  // mask with device 1 in the top bit, so ascending masks are ascending lex
  std::vector<std::uint32_t> masks(vertices);
  std::iota(masks.begin(), masks.end(), 0);
  std::vector<double> dist(vertices);
  for (std::uint32_t mask = 0; mask < vertices; ++mask) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double bit = (mask >> (n - 1 - i)) & 1u;
      const double diff = xhat.xhat[i] - bit;
      d2 += diff * diff;
    }
    dist[mask] = d2;
  }
  auto closer = [&](std::uint32_t a, std::uint32_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  };
  std::partial_sort(masks.begin(), masks.begin() + static_cast<std::ptrdiff_t>(k), masks.end(), closer);

  CandidateSet out;
  out.actions.reserve(k);
  for (std::size_t m = 0; m < k; ++m) {
    OffloadAction act;
    act.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) act.x[i] = (masks[m] >> (n - 1 - i)) & 1u;
    out.actions.push_back(std::move(act));
  }
  return out;
}

}  // namespace wpmec

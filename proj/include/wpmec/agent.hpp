#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wpmec/channel.hpp"
#include "wpmec/mlp.hpp"
#include "wpmec/model.hpp"
#include "wpmec/parallel.hpp"
#include "wpmec/quantizer.hpp"
#include "wpmec/ra_solver.hpp"

namespace wpmec {

enum class QuantizerKind { kOrderPreserving, kKnn };
enum class KMode { kFixed, kAdaptive };

// Candidate-count schedule. In adaptive mode the count starts at N and is
// re-set every `delta` frames to one past the largest winning index observed
// in that window, capped at N.
struct AdaptiveK {
  KMode mode = KMode::kFixed;
  std::size_t k_now = 1;
  std::size_t delta = 32;
  std::vector<std::size_t> history;  // winning indices of the current window
};

inline std::size_t update_k(AdaptiveK& ak, std::size_t n) {
  if (ak.history.empty()) throw std::logic_error("update_k: empty window");
  const std::size_t largest = *std::max_element(ak.history.begin(), ak.history.end());
  ak.k_now = std::min(largest + 1, n);
  ak.history.clear();
  return ak.k_now;
}

// Everything produced while handling one frame.
struct FrameResult {
  std::size_t t = 0;
  OffloadAction x_star;
  AllocationResult alloc;
  std::size_t k_star = 0;   // 1-based index of the winner in the candidate list
  std::size_t k_used = 0;   // candidates generated this frame
  std::optional<double> loss;  // present only on training frames
  std::uint64_t wall_us = 0;
};

struct AgentConfig {
  QuantizerKind quantizer = QuantizerKind::kOrderPreserving;
  KMode k_mode = KMode::kFixed;
  std::size_t k_fixed = 0;          // 0 means N
  std::size_t k_update_interval = 32;  // adaptive-K window
  TrainConfig train;
  SolverConfig solver;
  std::size_t memory_capacity = 1024;
  double learning_rate = 0.01;
  std::vector<std::size_t> hidden = {120, 80};
  std::uint64_t seed = 1;
  bool record_timing = true;
};

// Online offloading agent: per frame it relaxes the decision through the
// policy net, quantizes to candidates, scores them exactly via solve_p2,
// keeps the best, stores the pair for replay, and trains on schedule.
class OffloadAgent {
 public:
  OffloadAgent(std::size_t n, const AgentConfig& cfg, ThreadPool* pool = nullptr)
      : n_(n), cfg_(cfg), memory_(cfg.memory_capacity), pool_(pool) {
    cfg_.train.validate(cfg_.memory_capacity);
    cfg_.solver.validate();
    std::vector<std::size_t> dims;
    dims.push_back(n_);
    dims.insert(dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    dims.push_back(n_);
    net_ = init_policy(dims, cfg_.seed);
    net_.learning_rate = cfg_.learning_rate;
    adaptive_.mode = cfg_.k_mode;
    adaptive_.delta = cfg_.k_update_interval;
    adaptive_.k_now = (cfg_.k_mode == KMode::kAdaptive)
                          ? n_
                          : std::clamp<std::size_t>(cfg_.k_fixed == 0 ? n_ : cfg_.k_fixed, 1, n_ + 1);
  }

  FrameResult step(const ChannelFrame& frame, const SystemParams& params) {
    if (frame.h.size() != n_ || params.n != n_)
      throw std::invalid_argument("OffloadAgent::step: size mismatch");
    const auto started = std::chrono::steady_clock::now();

    FrameResult result;
    result.t = ++frames_seen_;

    std::vector<double> scaled(n_);
    for (std::size_t i = 0; i < n_; ++i) scaled[i] = frame.h[i] * cfg_.train.input_scale;

    const RelaxedAction xhat = forward(net_, scaled);
    const std::size_t k = adaptive_.k_now;
    const CandidateSet candidates = (cfg_.quantizer == QuantizerKind::kOrderPreserving)
                                        ? order_preserving_quantize(xhat, std::min(k, n_ + 1))
                                        : knn_quantize(xhat, k);
    result.k_used = candidates.actions.size();
    solve_count_ += result.k_used;

    // score candidates in parallel; slots are index-addressed so the result
    // is identical for any pool size
    std::vector<AllocationResult> allocs(candidates.actions.size());
    parallel_for(pool_, candidates.actions.size(), [&](std::size_t i) {
      allocs[i] = solve_p2(frame, candidates.actions[i], params, cfg_.solver);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < allocs.size(); ++i)
      if (allocs[i].q > allocs[best].q) best = i;
    result.k_star = best + 1;
    result.x_star = candidates.actions[best];
    result.alloc = allocs[best];

    // switched-off devices are stored as local so the policy learns to
    // exclude them
    std::vector<std::uint8_t> label = result.x_star.x;
    for (std::size_t i = 0; i < n_; ++i)
      if (frame.h[i] <= 0.0) label[i] = 0;
    memory_.push(std::move(scaled), std::move(label));

    if (result.t % cfg_.train.train_interval == 0)
      result.loss = train_step(net_, memory_, cfg_.train, cfg_.seed);

    if (adaptive_.mode == KMode::kAdaptive) {
      adaptive_.history.push_back(result.k_star);
      if (result.t % adaptive_.delta == 0) update_k(adaptive_, n_);
    }

    if (cfg_.record_timing) {
      const auto elapsed = std::chrono::steady_clock::now() - started;
      result.wall_us = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count());
    }
    return result;
  }

  const PolicyNet& policy() const { return net_; }
  PolicyNet& policy() { return net_; }
  const ReplayMemory& memory() const { return memory_; }
  std::size_t current_k() const { return adaptive_.k_now; }
  std::size_t frames_seen() const { return frames_seen_; }
  std::uint64_t solve_count() const { return solve_count_; }

 private:
  std::size_t n_;
  AgentConfig cfg_;
  PolicyNet net_;
  ReplayMemory memory_;
  AdaptiveK adaptive_;
  ThreadPool* pool_;
  std::size_t frames_seen_ = 0;
  std::uint64_t solve_count_ = 0;
};

// Plain episode: constant parameters, frames straight off the fading model.
inline std::vector<FrameResult> run_episode(const EpisodeSpec& spec, const SystemParams& params,
                                            const AgentConfig& cfg, ThreadPool* pool = nullptr) {
  OffloadAgent agent(params.n, cfg, pool);
  std::vector<FrameResult> out;
  out.reserve(spec.n_frames);
  for (std::size_t t = 1; t <= spec.n_frames; ++t) {
    const ChannelFrame frame = sample_frame(spec.topology, t, spec.seed);
    out.push_back(agent.step(frame, params));
  }
  return out;
}

}  // namespace wpmec

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "irdg/digraph.hpp"
#include "irdg/rng.hpp"

namespace irdg {

// Result of a truncated reachability search. When the cap was hit, `reached`
// may exceed the cap by at most the degree of the last expanded vertex;
// otherwise it is the exact size of the reachable set.
struct ExplorationOutcome {
  std::uint64_t reached = 0;
  bool hit_cap = false;
  std::span<const std::uint32_t> visited;  // valid until the explorer runs again
};

// Reusable scratch for repeated truncated searches over one digraph. Seen
// markers are epoch-stamped so consecutive calls cost O(vertices visited),
// not O(n).
class Explorer {
 public:
  explicit Explorer(const Digraph& g) : g_(&g), stamp_(g.n, 0) {}

  // Breadth-first over outgoing arcs, stopping once the collected list holds
  // at least `cap` vertices or the frontier is exhausted.
  ExplorationOutcome forward(std::uint32_t v, std::uint64_t cap) {
    return run(g_->out_offsets, g_->out_targets, v, cap);
  }

  // Same search over incoming arcs, i.e. forward exploration of the transpose.
  ExplorationOutcome backward(std::uint32_t v, std::uint64_t cap) {
    return run(g_->in_offsets, g_->in_sources, v, cap);
  }

 private:
  ExplorationOutcome run(const std::vector<std::uint64_t>& offsets,
                         const std::vector<std::uint32_t>& targets, std::uint32_t v,
                         std::uint64_t cap) {
    if (v >= g_->n) throw std::out_of_range("Explorer: vertex out of range");
    if (cap < 1) throw std::invalid_argument("Explorer: cap must be at least 1");
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    list_.clear();
    stamp_[v] = epoch_;
    list_.push_back(v);
    std::size_t next = 0;
    while (next < list_.size() && list_.size() < cap) {
      const std::uint32_t u = list_[next++];
      for (std::uint64_t e = offsets[u]; e < offsets[u + 1]; ++e) {
        const std::uint32_t w = targets[e];
        if (stamp_[w] != epoch_) {
          stamp_[w] = epoch_;
          list_.push_back(w);
        }
      }
    }
    return {list_.size(), list_.size() >= cap, {list_.data(), list_.size()}};
  }

  const Digraph* g_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> list_;
};

inline ExplorationOutcome explore_forward(const Digraph& g, std::uint32_t v, std::uint64_t cap) {
  Explorer e(g);
  ExplorationOutcome out = e.forward(v, cap);
  out.visited = {};  // scratch dies with the explorer
  return out;
}

inline ExplorationOutcome explore_backward(const Digraph& g, std::uint32_t v, std::uint64_t cap) {
  Explorer e(g);
  ExplorationOutcome out = e.backward(v, cap);
  out.visited = {};
  return out;
}

// Default truncation threshold: ceil(ln n), at least 1.
inline std::uint64_t default_omega(std::uint64_t n) {
  if (n <= 1) return 1;
  const double w = std::ceil(std::log(static_cast<double>(n)));
  return w < 1.0 ? 1 : static_cast<std::uint64_t>(w);
}

struct BigFractionOptions {
  std::uint64_t exact_threshold = 1'000'000;  // iterate every vertex up to here
  std::uint64_t sample_size = 100'000;        // vertices examined above it
  std::uint64_t seed = 0;                     // substream seed for subsampling
};

struct BigFractionEstimate {
  double value = 0.0;
  bool sampled = false;
  std::uint64_t examined = 0;
  std::uint64_t hits = 0;
  double ci_halfwidth = 0.0;  // 95% binomial half-width; 0 in exact mode
};

// Fraction of vertices whose forward and backward reachable sets both hold at
// least `cap` vertices. Exact sweep below the threshold, uniform subsample
// (with replacement) above it.
inline BigFractionEstimate big_vertex_fraction(const Digraph& g, std::uint64_t cap,
                                               const BigFractionOptions& opts = {}) {
  BigFractionEstimate est;
  if (g.n == 0) return est;
  Explorer fwd(g), bwd(g);
  auto is_big = [&](std::uint32_t v) {
    return fwd.forward(v, cap).hit_cap && bwd.backward(v, cap).hit_cap;
  };
  if (g.n <= opts.exact_threshold) {
    for (std::uint32_t v = 0; v < g.n; ++v)
      if (is_big(v)) ++est.hits;
    est.examined = g.n;
    est.value = static_cast<double>(est.hits) / static_cast<double>(g.n);
    return est;
  }
  SplitMix64 rng(derive_seed(opts.seed, 0xB16F8AC7u, g.n));
  est.sampled = true;
  est.examined = opts.sample_size;
  for (std::uint64_t s = 0; s < opts.sample_size; ++s)
    if (is_big(static_cast<std::uint32_t>(rng.next_below(g.n)))) ++est.hits;
  est.value = static_cast<double>(est.hits) / static_cast<double>(est.examined);
  est.ci_halfwidth =
      1.96 * std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(est.examined));
  return est;
}

}  // namespace irdg

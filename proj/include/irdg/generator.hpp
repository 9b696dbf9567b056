#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "irdg/digraph.hpp"
#include "irdg/errors.hpp"
#include "irdg/model.hpp"
#include "irdg/rng.hpp"

namespace irdg {

struct Seed {
  std::uint64_t value = 0;
};

struct SampleOptions {
  // Fail fast when the memory estimate for the arc buffers exceeds this.
  std::uint64_t max_bytes = std::uint64_t{4} << 30;
};

// Visits the cells of a row-major n_rows x n_cols grid that an independent
// Bernoulli(prob) coin selects, skipping the unselected ones with geometric
// jumps, so the cost is proportional to the number of selected cells.
template <class Sink>
void sample_block(std::uint64_t n_rows, std::uint64_t n_cols, double prob, SplitMix64& rng,
                  Sink&& sink) {
  if (n_rows == 0 || n_cols == 0 || prob <= 0.0) return;
  const std::uint64_t cells = n_rows * n_cols;
  if (prob >= 1.0) {
    for (std::uint64_t r = 0; r < n_rows; ++r)
      for (std::uint64_t c = 0; c < n_cols; ++c) sink(r, c);
    return;
  }
  const double denom = std::log1p(-prob);  // < 0
  std::uint64_t pos = 0;
  while (true) {
    const double jump = std::floor(std::log(rng.next_unit_positive()) / denom);
    if (!(jump < 9.2e18)) break;  // off the grid for any feasible block
    const auto skip = static_cast<std::uint64_t>(jump);
    if (skip >= cells - pos) break;
    pos += skip;
    sink(pos / n_cols, pos % n_cols);
    if (++pos == cells) break;
  }
}

// Convenience form used by tests.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_block(
    std::uint32_t n_rows, std::uint32_t n_cols, double prob, SplitMix64& rng) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
  sample_block(n_rows, n_cols, prob, rng, [&](std::uint64_t r, std::uint64_t c) {
    cells.emplace_back(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c));
  });
  return cells;
}

// Expected number of arcs, loops included.
inline double expected_arc_count(const ModelSpec& spec) {
  const std::size_t k = spec.type_count();
  const double n = static_cast<double>(spec.n);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double prob = std::min(1.0, spec.model.kernel().entries(i, j) / n);
      total += static_cast<double>(spec.counts[i]) * static_cast<double>(spec.counts[j]) * prob;
    }
  return total;
}

// Samples the random digraph: every ordered pair (u, v), including u = v,
// becomes an arc independently with probability min(1, p_{s(u)s(v)} / n).
// Identical (spec, seed) inputs produce bit-identical digraphs; each type
// block draws from its own substream derived from (seed, i, j), so the block
// order is irrelevant to the outcome.
inline Digraph sample_digraph(const ModelSpec& spec, Seed seed, const SampleOptions& opts = {}) {
  const std::size_t k = spec.type_count();
  const std::uint64_t n = spec.n;
  if (n == 0 || k == 0) throw ConfigError("sample_digraph: empty model");

  const double expected = expected_arc_count(spec);
  const double estimated_bytes =
      expected * 24.0 + static_cast<double>(n) * 24.0 + (1 << 16);
  if (estimated_bytes > static_cast<double>(opts.max_bytes))
    throw ConfigError("sample_digraph: estimated memory " +
                      std::to_string(static_cast<std::uint64_t>(estimated_bytes)) +
                      " bytes exceeds the cap of " + std::to_string(opts.max_bytes) +
                      " bytes (expected arcs: " +
                      std::to_string(static_cast<std::uint64_t>(expected)) + ")");

  std::vector<std::uint64_t> base(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) base[i + 1] = base[i] + spec.counts[i];

  std::vector<std::uint32_t> type_of(n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::uint64_t v = base[i]; v < base[i + 1]; ++v)
      type_of[v] = static_cast<std::uint32_t>(i);

  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected + 1.0)) + 64);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double prob = std::min(1.0, spec.model.kernel().entries(i, j) / static_cast<double>(n));
      SplitMix64 rng(derive_seed(seed.value, i, j));
      const std::uint64_t row_base = base[i], col_base = base[j];
      sample_block(spec.counts[i], spec.counts[j], prob, rng,
                   [&](std::uint64_t r, std::uint64_t c) {
                     arcs.emplace_back(static_cast<std::uint32_t>(row_base + r),
                                       static_cast<std::uint32_t>(col_base + c));
                   });
    }
  return digraph_from_arcs(static_cast<std::uint32_t>(n), std::move(arcs), std::move(type_of));
}

}  // namespace irdg

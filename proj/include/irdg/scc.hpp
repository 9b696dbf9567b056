#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "irdg/digraph.hpp"

namespace irdg {

// Strongly connected component decomposition. Communication is reflexive by
// convention, so isolated vertices form singleton components; sizes are
// sorted descending and second_largest is 0 when only one component exists.
struct SccSummary {
  std::uint32_t component_count = 0;
  std::vector<std::uint32_t> component_of;  // vertex -> component id
  std::vector<std::uint32_t> sizes;         // descending
  std::uint64_t largest = 0;
  std::uint64_t second_largest = 0;
};

namespace detail {

inline void finalize_summary(SccSummary& s, const std::vector<std::uint32_t>& component_sizes) {
  s.component_count = static_cast<std::uint32_t>(component_sizes.size());
  s.sizes = component_sizes;
  std::sort(s.sizes.begin(), s.sizes.end(), std::greater<>());
  s.largest = s.sizes.empty() ? 0 : s.sizes.front();
  s.second_largest = s.sizes.size() > 1 ? s.sizes[1] : 0;
}

}  // namespace detail

// Tarjan's algorithm with an explicit frame stack; no recursion, so graphs
// with tens of millions of vertices on one long path are fine.
inline SccSummary compute_scc(const Digraph& g) {
  const std::uint32_t n = g.n;
  constexpr std::uint32_t kUnvisited = 0xFFFFFFFFu;

  SccSummary summary;
  summary.component_of.assign(n, kUnvisited);
  std::vector<std::uint32_t> component_sizes;
  if (n == 0) {
    detail::finalize_summary(summary, component_sizes);
    return summary;
  }

  std::vector<std::uint32_t> index(n, kUnvisited);
  std::vector<std::uint32_t> lowlink(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t vertex;
    std::uint64_t cursor;  // next unexplored position in out_targets
  };
  std::vector<Frame> frames;
  std::uint32_t next_index = 0;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.push_back({root, g.out_offsets[root]});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!frames.empty()) {
      Frame& f = frames.back();
      const std::uint32_t v = f.vertex;
      bool descended = false;
      while (f.cursor < g.out_offsets[v + 1]) {
        const std::uint32_t w = g.out_targets[f.cursor++];
        if (index[w] == kUnvisited) {
          frames.push_back({w, g.out_offsets[w]});
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;

      if (lowlink[v] == index[v]) {
        const std::uint32_t id = static_cast<std::uint32_t>(component_sizes.size());
        std::uint32_t size = 0;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          summary.component_of[w] = id;
          ++size;
        } while (w != v);
        component_sizes.push_back(size);
      }
      frames.pop_back();
      if (!frames.empty()) {
        Frame& parent = frames.back();
        lowlink[parent.vertex] = std::min(lowlink[parent.vertex], lowlink[v]);
      }
    }
  }
  detail::finalize_summary(summary, component_sizes);
  return summary;
}

// Reference decomposition by O(n^3 / 64) transitive closure over one-word
// bitsets; limited to n <= 64 and used to cross-check compute_scc.
inline SccSummary compute_scc_reference(const Digraph& g) {
  const std::uint32_t n = g.n;
  if (n > 64) throw std::invalid_argument("compute_scc_reference: n = " + std::to_string(n) + " > 64");

  std::vector<std::uint64_t> reach(n, 0);
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v : g.out_neighbors(u)) reach[u] |= std::uint64_t{1} << v;
  for (std::uint32_t w = 0; w < n; ++w)
    for (std::uint32_t u = 0; u < n; ++u)
      if (reach[u] >> w & 1) reach[u] |= reach[w];

  SccSummary summary;
  summary.component_of.assign(n, 0xFFFFFFFFu);
  std::vector<std::uint32_t> component_sizes;
  for (std::uint32_t u = 0; u < n; ++u) {
    if (summary.component_of[u] != 0xFFFFFFFFu) continue;
    const std::uint32_t id = static_cast<std::uint32_t>(component_sizes.size());
    std::uint32_t size = 0;
    for (std::uint32_t v = u; v < n; ++v) {
      const bool communicate = v == u || ((reach[u] >> v & 1) && (reach[v] >> u & 1));
      if (communicate && summary.component_of[v] == 0xFFFFFFFFu) {
        summary.component_of[v] = id;
        ++size;
      }
    }
    component_sizes.push_back(size);
  }
  detail::finalize_summary(summary, component_sizes);
  return summary;
}

// Text export: one "size count" line per distinct component size, descending.
inline void write_size_spectrum(const SccSummary& s, std::ostream& os) {
  std::map<std::uint32_t, std::uint64_t, std::greater<>> histogram;
  for (std::uint32_t size : s.sizes) ++histogram[size];
  for (const auto& [size, count] : histogram) os << size << ' ' << count << '\n';
}

}  // namespace irdg

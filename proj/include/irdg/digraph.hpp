#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace irdg {

// Immutable digraph on n labeled vertices stored twice in compressed sparse
// rows: once over outgoing arcs and once over incoming arcs, so forward and
// backward traversals are both sequential. Adjacency lists are sorted, arcs
// are unique, loops are allowed.
struct Digraph {
  std::uint32_t n = 0;
  std::uint64_t arc_count = 0;
  std::vector<std::uint32_t> type_of;      // size n; all zero when untyped
  std::vector<std::uint64_t> out_offsets;  // size n + 1
  std::vector<std::uint32_t> out_targets;
  std::vector<std::uint64_t> in_offsets;
  std::vector<std::uint32_t> in_sources;

  std::span<const std::uint32_t> out_neighbors(std::uint32_t v) const {
    return {out_targets.data() + out_offsets[v],
            static_cast<std::size_t>(out_offsets[v + 1] - out_offsets[v])};
  }
  std::span<const std::uint32_t> in_neighbors(std::uint32_t v) const {
    return {in_sources.data() + in_offsets[v],
            static_cast<std::size_t>(in_offsets[v + 1] - in_offsets[v])};
  }
  std::uint64_t out_degree(std::uint32_t v) const { return out_offsets[v + 1] - out_offsets[v]; }
  std::uint64_t in_degree(std::uint32_t v) const { return in_offsets[v + 1] - in_offsets[v]; }

  // Arc-reversed view; the two CSR halves just swap roles.
  Digraph transposed() const {
    Digraph t;
    t.n = n;
    t.arc_count = arc_count;
    t.type_of = type_of;
    t.out_offsets = in_offsets;
    t.out_targets = in_sources;
    t.in_offsets = out_offsets;
    t.in_sources = out_targets;
    return t;
  }
};

using Arc = std::pair<std::uint32_t, std::uint32_t>;

// Builds both CSR halves from an arc list. Arcs are sorted lexicographically
// if they are not already; duplicates are rejected.
inline Digraph digraph_from_arcs(std::uint32_t n, std::vector<Arc> arcs,
                                 std::vector<std::uint32_t> type_of = {}) {
  for (const auto& [u, v] : arcs)
    if (u >= n || v >= n)
      throw std::invalid_argument("digraph_from_arcs: arc (" + std::to_string(u) + ", " +
                                  std::to_string(v) + ") out of range for n = " + std::to_string(n));
  if (!std::is_sorted(arcs.begin(), arcs.end())) std::sort(arcs.begin(), arcs.end());
  if (std::adjacent_find(arcs.begin(), arcs.end()) != arcs.end())
    throw std::invalid_argument("digraph_from_arcs: duplicate arc");
  if (!type_of.empty() && type_of.size() != n)
    throw std::invalid_argument("digraph_from_arcs: type_of size mismatch");

  Digraph g;
  g.n = n;
  g.arc_count = arcs.size();
  g.type_of = type_of.empty() ? std::vector<std::uint32_t>(n, 0) : std::move(type_of);

  g.out_offsets.assign(n + 1, 0);
  g.in_offsets.assign(n + 1, 0);
  for (const auto& [u, v] : arcs) {
    ++g.out_offsets[u + 1];
    ++g.in_offsets[v + 1];
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    g.out_offsets[v + 1] += g.out_offsets[v];
    g.in_offsets[v + 1] += g.in_offsets[v];
  }
  g.out_targets.resize(arcs.size());
  g.in_sources.resize(arcs.size());
  std::vector<std::uint64_t> out_cursor(g.out_offsets.begin(), g.out_offsets.end() - 1);
  std::vector<std::uint64_t> in_cursor(g.in_offsets.begin(), g.in_offsets.end() - 1);
  for (const auto& [u, v] : arcs) {
    g.out_targets[out_cursor[u]++] = v;
    g.in_sources[in_cursor[v]++] = u;  // scan order is u-ascending, so rows stay sorted
  }
  return g;
}

// Text export "u v" per arc, 0-based, lexicographically sorted.
inline void write_arc_list(const Digraph& g, std::ostream& os) {
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (std::uint32_t v : g.out_neighbors(u)) os << u << ' ' << v << '\n';
}

}  // namespace irdg

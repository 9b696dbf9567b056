#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "irdg/digraph.hpp"
#include "irdg/exploration.hpp"
#include "irdg/scc.hpp"
#include "support/oracles.hpp"

using namespace irdg;

TEST_CASE("an isolated vertex never hits the cap") {
  const Digraph g = digraph_from_arcs(3, {});
  const ExplorationOutcome out = explore_forward(g, 0, 2);
  CHECK(out.reached == 1);
  CHECK_FALSE(out.hit_cap);
}

TEST_CASE("a short path hits a cap of two") {
  const Digraph g = digraph_from_arcs(3, {{0, 1}, {1, 2}});
  const ExplorationOutcome out = explore_forward(g, 0, 2);
  CHECK(out.hit_cap);
  CHECK(out.reached >= 2);
}

TEST_CASE("a five-cycle is fully collected under a cap of ten") {
  const Digraph g = digraph_from_arcs(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  const ExplorationOutcome out = explore_forward(g, 0, 10);
  CHECK(out.reached == 5);
  CHECK_FALSE(out.hit_cap);
}

TEST_CASE("backward exploration equals forward exploration of the transpose") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 60; ++rep) {
    const std::uint32_t n = 1 + rng() % 12;
    const Digraph g = oracles::random_digraph(n, 0.25, rng);
    const Digraph t = g.transposed();
    for (std::uint32_t v = 0; v < n; ++v)
      for (std::uint64_t cap : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{3},
                                std::uint64_t{n}, std::uint64_t{n} + 3}) {
        const ExplorationOutcome b = explore_backward(g, v, cap);
        const ExplorationOutcome f = explore_forward(t, v, cap);
        CHECK(b.reached == f.reached);
        CHECK(b.hit_cap == f.hit_cap);
      }
  }
}

TEST_CASE("a sink with no incoming arcs reaches only itself backward") {
  const Digraph g = digraph_from_arcs(4, {{1, 0}, {2, 0}, {0, 3}});
  const ExplorationOutcome out = explore_backward(g, 1, 5);
  CHECK(out.reached == 1);
  CHECK_FALSE(out.hit_cap);
}

TEST_CASE("a complete digraph hits any small cap") {
  std::vector<Arc> arcs;
  for (std::uint32_t u = 0; u < 4; ++u)
    for (std::uint32_t v = 0; v < 4; ++v) arcs.emplace_back(u, v);
  const Digraph g = digraph_from_arcs(4, arcs);
  CHECK(explore_forward(g, 2, 3).hit_cap);
  CHECK(explore_backward(g, 2, 3).hit_cap);
}

TEST_CASE("the cap must be positive and the start vertex in range") {
  const Digraph g = digraph_from_arcs(2, {});
  CHECK_THROWS_AS(explore_forward(g, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(explore_forward(g, 2, 1), std::out_of_range);
}

TEST_CASE("big fraction of an arcless digraph is zero") {
  const Digraph g = digraph_from_arcs(10, {});
  CHECK(big_vertex_fraction(g, default_omega(10)).value == 0.0);
}

TEST_CASE("big fraction of a complete digraph is one") {
  std::vector<Arc> arcs;
  for (std::uint32_t u = 0; u < 10; ++u)
    for (std::uint32_t v = 0; v < 10; ++v) arcs.emplace_back(u, v);
  const Digraph g = digraph_from_arcs(10, arcs);
  const BigFractionEstimate est = big_vertex_fraction(g, 5);
  CHECK(est.value == 1.0);
  CHECK_FALSE(est.sampled);
  CHECK(est.examined == 10);
}

TEST_CASE("a cap larger than n leaves no big vertices") {
  std::vector<Arc> arcs;
  for (std::uint32_t u = 0; u < 20; ++u)
    for (std::uint32_t v = 0; v < 20; ++v) arcs.emplace_back(u, v);
  const Digraph g = digraph_from_arcs(20, arcs);
  CHECK(big_vertex_fraction(g, 21).value == 0.0);
}

TEST_CASE("membership shrinks as the cap grows") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const std::uint32_t n = 50 + rng() % 250;
    const Digraph g = oracles::random_digraph(n, 2.0 / n, rng);
    Explorer fwd(g), bwd(g);
    auto is_big = [&](std::uint32_t v, std::uint64_t cap) {
      return fwd.forward(v, cap).hit_cap && bwd.backward(v, cap).hit_cap;
    };
    std::uint64_t small_count = 0, large_count = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
      const bool big_small_cap = is_big(v, 3);
      const bool big_large_cap = is_big(v, 7);
      if (big_large_cap) CHECK(big_small_cap);  // larger cap is a subset
      small_count += big_small_cap;
      large_count += big_large_cap;
    }
    CHECK(big_vertex_fraction(g, 3).hits == small_count);
    CHECK(big_vertex_fraction(g, 7).hits == large_count);
    CHECK(large_count <= small_count);
  }
}

TEST_CASE("every member of a component at least as large as the cap is big") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const std::uint32_t n = 20 + rng() % 100;
    const Digraph g = oracles::random_digraph(n, 1.5 / n, rng);
    const SccSummary s = compute_scc(g);
    const std::uint64_t cap = 4;
    Explorer fwd(g), bwd(g);
    std::vector<std::uint64_t> component_size(s.component_count, 0);
    for (std::uint32_t v = 0; v < n; ++v) ++component_size[s.component_of[v]];
    for (std::uint32_t v = 0; v < n; ++v) {
      if (component_size[s.component_of[v]] < cap) continue;
      CHECK(fwd.forward(v, cap).hit_cap);
      CHECK(bwd.backward(v, cap).hit_cap);
    }
  }
}

TEST_CASE("subsampled estimates approximate the exact sweep") {
  std::mt19937_64 rng(53);
  const std::uint32_t n = 4000;
  const Digraph g = oracles::random_digraph(n, 2.0 / n, rng);
  const std::uint64_t cap = default_omega(n);
  const BigFractionEstimate exact = big_vertex_fraction(g, cap);
  BigFractionOptions opts;
  opts.exact_threshold = 1000;  // force sampling
  opts.sample_size = 2000;
  opts.seed = 99;
  const BigFractionEstimate sampled = big_vertex_fraction(g, cap, opts);
  CHECK(sampled.sampled);
  CHECK(sampled.examined == 2000);
  CHECK(sampled.ci_halfwidth > 0.0);
  CHECK(std::abs(sampled.value - exact.value) < 3.0 * sampled.ci_halfwidth + 1e-9);
}

TEST_CASE("default omega is the ceiling of the natural log") {
  CHECK(default_omega(0) == 1);
  CHECK(default_omega(1) == 1);
  CHECK(default_omega(2) == 1);
  CHECK(default_omega(3) == 2);
  CHECK(default_omega(100'000) == 12);
  CHECK(default_omega(10'000'000) == 17);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "irdg/errors.hpp"
#include "irdg/model.hpp"

using namespace irdg;

namespace {

ValidatedModel make_model(std::vector<double> probs, std::vector<std::vector<double>> kernel) {
  return validate_model(TypeDistribution{{}, std::move(probs)},
                        KernelMatrix{Matrix::from_rows(kernel)});
}

}  // namespace

TEST_CASE("validate_model accepts well-formed models") {
  const ValidatedModel homogeneous = make_model({1.0}, {{2.0}});
  CHECK(homogeneous.type_count() == 1);
  CHECK(homogeneous.dist().labels[0] == "t0");

  const ValidatedModel bipartite = make_model({0.5, 0.5}, {{0.0, 4.0}, {4.0, 0.0}});
  CHECK(bipartite.kernel().entries(0, 1) == 4.0);
}

TEST_CASE("validate_model rejects bad inputs with the offending index") {
  CHECK_THROWS_WITH(make_model({0.0, 1.0}, {{1, 1}, {1, 1}}),
                    Catch::Matchers::ContainsSubstring("q_1 not strictly positive"));
  CHECK_THROWS_WITH(make_model({0.3, 0.3}, {{1, 1}, {1, 1}}),
                    Catch::Matchers::ContainsSubstring("sum"));
  CHECK_THROWS_WITH(make_model({0.5, 0.5}, {{1, 1}, {1, -2}}),
                    Catch::Matchers::ContainsSubstring("kernel[1][1]"));
  CHECK_THROWS_WITH(make_model({0.5, 0.5}, {{1}}),
                    Catch::Matchers::ContainsSubstring("types"));
  CHECK_THROWS_AS(make_model({}, {}), ConfigError);
}

TEST_CASE("validate_model renormalizes small drift") {
  const double q = 1.0 / 3.0;
  const ValidatedModel m = make_model({q, q, q}, {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  double sum = 0.0;
  for (double p : m.dist().probs) sum += p;
  CHECK(sum == 1.0);
}

TEST_CASE("type_counts matches largest-remainder apportionment") {
  CHECK(type_counts({{}, {1.0}}, 100) == std::vector<std::uint64_t>{100});
  CHECK(type_counts({{}, {0.5, 0.5}}, 101) == std::vector<std::uint64_t>{51, 50});
  CHECK(type_counts({{}, {0.3, 0.3, 0.4}}, 10) == std::vector<std::uint64_t>{3, 3, 4});
  CHECK_THROWS_AS(type_counts({{}, {0.5, 0.5}}, 1), ConfigError);
}

TEST_CASE("type_counts sums to n and stays within one of proportionality") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> k_dist(1, 6);
  std::exponential_distribution<double> mass(1.0);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t k = k_dist(rng);
    std::vector<double> probs(k);
    double total = 0.0;
    for (double& p : probs) total += (p = mass(rng) + 1e-3);
    for (double& p : probs) p /= total;
    const std::uint64_t n = k + rng() % 2000;
    const auto counts = type_counts({{}, probs}, n);
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
      sum += counts[i];
      CHECK(std::abs(static_cast<double>(counts[i]) - probs[i] * static_cast<double>(n)) <
            1.0 + 1e-9);
    }
    CHECK(sum == n);
  }
}

TEST_CASE("make_model_spec rejects vertex counts that starve a type") {
  const ValidatedModel m = make_model({0.9, 0.05, 0.05}, {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  CHECK_THROWS_WITH(make_model_spec(m, 3), Catch::Matchers::ContainsSubstring("too small"));
  CHECK_NOTHROW(make_model_spec(m, 40));
  CHECK_THROWS_AS(make_model_spec(m, std::uint64_t{1} << 40), ConfigError);
}

TEST_CASE("discretize_kernel reproduces a constant kernel exactly") {
  const auto [dist, kernel] = discretize_kernel(constant_kernel(2.0), 3);
  REQUIRE(dist.probs.size() == 3);
  for (double q : dist.probs) CHECK(q == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(kernel.entries(i, j) == 2.0);
}

TEST_CASE("discretize_kernel averages a product kernel to closed form") {
  // bin means of s on [0,.5) and [.5,1) are 0.25 and 0.75; the midpoint rule
  // is exact for polynomials of degree one in each variable.
  const auto [dist, kernel] = discretize_kernel(product_kernel(4.0), 2);
  CHECK(kernel.entries(0, 0) == Catch::Approx(0.25).margin(1e-15));
  CHECK(kernel.entries(0, 1) == Catch::Approx(0.75).margin(1e-15));
  CHECK(kernel.entries(1, 0) == Catch::Approx(0.75).margin(1e-15));
  CHECK(kernel.entries(1, 1) == Catch::Approx(2.25).margin(1e-15));
}

TEST_CASE("discretize_kernel reports invalid kernel values with the point") {
  const KernelFunction bad{[](double, double) { return -1.0; }, {}};
  CHECK_THROWS_WITH(discretize_kernel(bad, 2),
                    Catch::Matchers::ContainsSubstring("-1") &&
                        Catch::Matchers::ContainsSubstring("kernel("));
  const KernelFunction nan_at_point{
      [](double s, double t) { return s > 0.5 && t > 0.5 ? std::nan("") : 1.0; }, {}};
  CHECK_THROWS_AS(discretize_kernel(nan_at_point, 2), ConfigError);
}

TEST_CASE("discretize_kernel is exact for grid-aligned piecewise kernels") {
  const std::vector<std::vector<double>> values{{1.0, 2.0}, {3.0, 4.0}};
  for (std::size_t k : {2u, 4u, 8u}) {
    const auto [dist, kernel] = discretize_kernel(piecewise_kernel(values), k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        CHECK(kernel.entries(i, j) == values[i * 2 / k][j * 2 / k]);
  }
}

TEST_CASE("discretize_kernel honors a piecewise-constant type measure") {
  // All mass on [0, 0.5): every representative point lands in the first half.
  const auto [dist, kernel] =
      discretize_kernel(product_kernel(1.0, TypeMeasure{{1.0, 0.0}}), 2, 4);
  CHECK(kernel.entries(1, 1) < 0.25);  // s, t < 0.5 everywhere
  CHECK_THROWS_WITH(
      discretize_kernel(product_kernel(1.0, TypeMeasure{{0.0, 0.0}}), 2),
      Catch::Matchers::ContainsSubstring("positive mass"));
}

TEST_CASE("mean_matrices computes forward and backward offspring means") {
  SECTION("homogeneous") {
    const auto [fwd, bwd] = mean_matrices(make_model({1.0}, {{2.0}}));
    CHECK(fwd(0, 0) == 2.0);
    CHECK(bwd(0, 0) == 2.0);
  }
  SECTION("bipartite") {
    const auto [fwd, bwd] = mean_matrices(make_model({0.5, 0.5}, {{0, 4}, {4, 0}}));
    CHECK(fwd(0, 1) == 2.0);
    CHECK(fwd(1, 0) == 2.0);
    CHECK(fwd(0, 0) == 0.0);
    CHECK(bwd(0, 1) == 2.0);
    CHECK(bwd(1, 0) == 2.0);
  }
  SECTION("skewed") {
    const auto [fwd, bwd] = mean_matrices(make_model({0.9, 0.1}, {{1, 1}, {1, 1}}));
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(fwd(i, 0) == Catch::Approx(0.9));
      CHECK(fwd(i, 1) == Catch::Approx(0.1));
      CHECK(bwd(i, 0) == Catch::Approx(0.9));
      CHECK(bwd(i, 1) == Catch::Approx(0.1));
    }
  }
}

TEST_CASE("mean matrices satisfy the diag(q) similarity identity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t k = 1 + rng() % 4;
    std::vector<double> probs(k);
    double total = 0.0;
    for (double& p : probs) total += (p = unit(rng) + 0.01);
    for (double& p : probs) p /= total;
    std::vector<std::vector<double>> kernel(k, std::vector<double>(k));
    for (auto& row : kernel)
      for (double& p : row) p = 5.0 * unit(rng);
    const ValidatedModel m = make_model(probs, kernel);
    const auto [fwd, bwd] = mean_matrices(m);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const double expected = fwd(j, i) * m.dist().probs[j] / m.dist().probs[i];
        CHECK(bwd(i, j) == Catch::Approx(expected).margin(1e-12));
      }
  }
}

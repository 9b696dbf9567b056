#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "irdg/errors.hpp"
#include "irdg/matrix.hpp"

namespace irdg {

// Discrete type distribution: k type labels with strictly positive
// probabilities q_i summing to one.
struct TypeDistribution {
  std::vector<std::string> labels;
  std::vector<double> probs;

  std::size_t type_count() const noexcept { return probs.size(); }
};

// Nonnegative rate matrix; the arc probability between a type-i source and a
// type-j target in an n-vertex digraph is min(1, entries(i,j) / n).
struct KernelMatrix {
  Matrix entries;
};

// Density of the type distribution on [0, 1] as piecewise-constant weights on
// equal-width cells. An empty weight vector means the uniform distribution.
struct TypeMeasure {
  std::vector<double> densities;

  bool is_uniform() const noexcept { return densities.empty(); }
};

// A rate kernel on [0,1]^2 together with the type measure it is paired with;
// discretize_kernel turns this into a (TypeDistribution, KernelMatrix) pair.
struct KernelFunction {
  std::function<double(double, double)> evaluator;
  TypeMeasure measure;
};

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

// Deterministic integer type counts for n vertices: largest-remainder
// apportionment of q_i * n, ties broken toward the lowest index. Every count
// is within one of exact proportionality.
inline std::vector<std::uint64_t> type_counts(const TypeDistribution& dist, std::uint64_t n) {
  const std::size_t k = dist.type_count();
  if (n < k)
    throw ConfigError("type_counts: n = " + std::to_string(n) + " is smaller than the number of types k = " +
                      std::to_string(k));
  std::vector<std::uint64_t> counts(k);
  std::vector<double> remainder(k);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = dist.probs[i] * static_cast<double>(n);
    counts[i] = static_cast<std::uint64_t>(std::floor(exact));
    remainder[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t idx = 0; assigned < n; ++idx) {
    ++counts[order[idx % k]];
    ++assigned;
  }
  return counts;
}

class ValidatedModel;
ValidatedModel validate_model(TypeDistribution dist, KernelMatrix kernel);

// A type distribution and rate matrix that passed validation. Immutable and
// safe to share across workers; make_model_spec pins it to a vertex count.
class ValidatedModel {
 public:
  const TypeDistribution& dist() const noexcept { return dist_; }
  const KernelMatrix& kernel() const noexcept { return kernel_; }
  std::size_t type_count() const noexcept { return dist_.type_count(); }

 private:
  friend ValidatedModel validate_model(TypeDistribution dist, KernelMatrix kernel);
  ValidatedModel(TypeDistribution dist, KernelMatrix kernel)
      : dist_(std::move(dist)), kernel_(std::move(kernel)) {}

  TypeDistribution dist_;
  KernelMatrix kernel_;
};

inline ValidatedModel validate_model(TypeDistribution dist, KernelMatrix kernel) {
  const std::size_t k = dist.probs.size();
  if (k == 0) throw ConfigError("model: needs at least one type");
  if (dist.labels.empty()) {
    dist.labels.reserve(k);
    for (std::size_t i = 0; i < k; ++i) dist.labels.push_back("t" + std::to_string(i));
  }
  if (dist.labels.size() != k)
    throw ConfigError("model: " + std::to_string(dist.labels.size()) + " labels for " +
                      std::to_string(k) + " probabilities");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double q = dist.probs[i];
    if (!(q > 0.0) || !std::isfinite(q))
      throw ConfigError("model: q_" + std::to_string(i + 1) + " not strictly positive (probs[" +
                        std::to_string(i) + "] = " + detail::format_double(q) + ")");
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("model: type probabilities sum to " + detail::format_double(sum) +
                      ", expected 1 within 1e-12");
  for (double& q : dist.probs) q /= sum;

  if (kernel.entries.size() != k)
    throw ConfigError("model: kernel is " + std::to_string(kernel.entries.size()) + "x" +
                      std::to_string(kernel.entries.size()) + " but there are " + std::to_string(k) +
                      " types");
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double p = kernel.entries(i, j);
      if (!(p >= 0.0) || !std::isfinite(p))
        throw ConfigError("model: kernel[" + std::to_string(i) + "][" + std::to_string(j) +
                          "] = " + detail::format_double(p) + " is not a finite nonnegative rate");
    }
  return ValidatedModel(std::move(dist), std::move(kernel));
}

// Documented cap: vertices are stored as 32-bit indices.
inline constexpr std::uint64_t kMaxVertexCount = (std::uint64_t{1} << 31) - 1;

// A validated model instantiated at a concrete vertex count. Vertices are
// laid out in type-contiguous blocks: counts[0] vertices of type 0 first, etc.
struct ModelSpec {
  ValidatedModel model;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> counts;

  std::size_t type_count() const noexcept { return model.type_count(); }
};

inline ModelSpec make_model_spec(ValidatedModel model, std::uint64_t n) {
  if (n < 1) throw ConfigError("model: n must be at least 1");
  if (n > kMaxVertexCount)
    throw ConfigError("model: n = " + std::to_string(n) + " exceeds the 32-bit vertex index cap " +
                      std::to_string(kMaxVertexCount));
  auto counts = type_counts(model.dist(), n);
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] == 0)
      throw ConfigError("model: n = " + std::to_string(n) + " is too small to give type " +
                        model.dist().labels[i] + " at least one vertex");
  return ModelSpec{std::move(model), n, std::move(counts)};
}

// Offspring mean matrices of the forward and backward branching processes:
// a type-i particle has Poisson(p_ij * q_j) type-j children going forward and
// Poisson(p_ji * q_j) going backward.
inline std::pair<Matrix, Matrix> mean_matrices(const ValidatedModel& model) {
  const std::size_t k = model.type_count();
  Matrix forward(k), backward(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      forward(i, j) = model.kernel().entries(i, j) * model.dist().probs[j];
      backward(i, j) = model.kernel().entries(j, i) * model.dist().probs[j];
    }
  return {std::move(forward), std::move(backward)};
}

inline std::pair<Matrix, Matrix> mean_matrices(const ModelSpec& spec) {
  return mean_matrices(spec.model);
}

namespace detail {

// Inverse CDF of a piecewise-constant density on [0,1]; u in (0,1).
inline double measure_quantile(const TypeMeasure& measure, double u) {
  if (measure.is_uniform()) return u;
  const std::size_t r = measure.densities.size();
  double total = 0.0;
  for (double w : measure.densities) total += w;
  double target = u * total;
  for (std::size_t c = 0; c < r; ++c) {
    const double w = measure.densities[c];
    if (target <= w || c == r - 1) {
      const double inside = w > 0.0 ? target / w : 0.0;
      return (static_cast<double>(c) + std::min(1.0, inside)) / static_cast<double>(r);
    }
    target -= w;
  }
  return 1.0;
}

}  // namespace detail

// Reduce a kernel function to a k-type finite model: k equal-measure bins,
// per-bin representative points at measure quantiles, and entries obtained by
// midpoint-rule averaging of the kernel over an m x m subgrid per bin pair.
inline std::pair<TypeDistribution, KernelMatrix> discretize_kernel(const KernelFunction& kf,
                                                                   std::size_t k,
                                                                   std::size_t subgrid = 8) {
  if (k < 1) throw ConfigError("discretize_kernel: k must be at least 1");
  if (subgrid < 1) throw ConfigError("discretize_kernel: subgrid must be at least 1");
  if (!kf.evaluator) throw ConfigError("discretize_kernel: kernel has no evaluator");
  if (!kf.measure.is_uniform()) {
    double total = 0.0;
    for (double w : kf.measure.densities) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw ConfigError("discretize_kernel: measure density " + detail::format_double(w) +
                          " is not a finite nonnegative weight");
      total += w;
    }
    if (!(total > 0.0)) throw ConfigError("discretize_kernel: measure has no positive mass");
  }

  // Representative points: subgrid midpoints in measure coordinates.
  std::vector<double> points(k * subgrid);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t a = 0; a < subgrid; ++a) {
      const double u = (static_cast<double>(i) +
                        (static_cast<double>(a) + 0.5) / static_cast<double>(subgrid)) /
                       static_cast<double>(k);
      points[i * subgrid + a] = detail::measure_quantile(kf.measure, u);
    }

  TypeDistribution dist;
  dist.probs.assign(k, 1.0 / static_cast<double>(k));
  dist.labels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) dist.labels.push_back("bin" + std::to_string(i));

  KernelMatrix kernel{Matrix(k)};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < subgrid; ++a)
        for (std::size_t b = 0; b < subgrid; ++b) {
          const double s = points[i * subgrid + a];
          const double t = points[j * subgrid + b];
          const double v = kf.evaluator(s, t);
          if (!(v >= 0.0) || !std::isfinite(v))
            throw ConfigError("discretize_kernel: kernel(" + detail::format_double(s) + ", " +
                              detail::format_double(t) + ") = " + detail::format_double(v) +
                              " is not a finite nonnegative value");
          acc += v;
        }
      kernel.entries(i, j) = acc / static_cast<double>(subgrid * subgrid);
    }
  return {std::move(dist), std::move(kernel)};
}

// Named kernel builders used by the config format.
inline KernelFunction constant_kernel(double c, TypeMeasure measure = {}) {
  return KernelFunction{[c](double, double) { return c; }, std::move(measure)};
}

inline KernelFunction product_kernel(double a, TypeMeasure measure = {}) {
  return KernelFunction{[a](double s, double t) { return a * s * t; }, std::move(measure)};
}

// Piecewise-constant kernel on an r x r grid of equal-width cells of [0,1]^2.
inline KernelFunction piecewise_kernel(std::vector<std::vector<double>> values,
                                       TypeMeasure measure = {}) {
  const std::size_t r = values.size();
  if (r == 0) throw ConfigError("piecewise kernel: needs at least one row");
  for (const auto& row : values)
    if (row.size() != r) throw ConfigError("piecewise kernel: value grid must be square");
  auto grid = std::make_shared<std::vector<std::vector<double>>>(std::move(values));
  auto eval = [grid, r](double s, double t) {
    auto cell = [r](double x) {
      auto c = static_cast<std::size_t>(x * static_cast<double>(r));
      return std::min(c, r - 1);
    };
    return (*grid)[cell(s)][cell(t)];
  };
  return KernelFunction{std::move(eval), std::move(measure)};
}

}  // namespace irdg

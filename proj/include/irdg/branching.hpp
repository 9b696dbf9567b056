#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irdg/digraph.hpp"
#include "irdg/errors.hpp"
#include "irdg/matrix.hpp"
#include "irdg/model.hpp"
#include "irdg/scc.hpp"

namespace irdg {

struct FixedPointOptions {
  double tol = 1e-12;
  // Sized so that the exactly-critical case (unit spectral radius) still
  // converges: its residual decays like 1/t^2, which crosses 1e-12 after
  // about 1.4e6 iterations.
  std::size_t max_iter = 4'000'000;
  // Drawn into the loop by tests: verifies the iterates stay in [0, 1] and
  // grow componentwise.
  bool check_monotone = false;
  // Alternative starting point, used by tests probing fixed-point minimality.
  std::optional<std::vector<double>> start;
};

struct FixedPointResult {
  std::vector<double> extinction;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// Smallest fixed point of the extinction system for Poisson offspring with
// the given mean matrix: xi_i = exp(sum_j mean(i,j) * (xi_j - 1)), iterated
// from the zero vector. The iterates increase monotonically toward the
// extinction probabilities; survival is 1 - xi.
inline FixedPointResult extinction_fixed_point(const Matrix& mean,
                                               const FixedPointOptions& opts = {}) {
  const std::size_t k = mean.size();
  if (!(opts.tol > 0.0)) throw ConfigError("extinction_fixed_point: tol must be positive");
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (!(mean(i, j) >= 0.0) || !std::isfinite(mean(i, j)))
        throw ConfigError("extinction_fixed_point: mean(" + std::to_string(i) + ", " +
                          std::to_string(j) + ") is not finite nonnegative");

  std::vector<double> cur = opts.start ? *opts.start : std::vector<double>(k, 0.0);
  std::vector<double> next(k);
  double residual = 0.0;
  for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
    residual = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double exponent = 0.0;
      for (std::size_t j = 0; j < k; ++j) exponent += mean(i, j) * (cur[j] - 1.0);
      next[i] = std::exp(exponent);
      residual = std::max(residual, std::abs(next[i] - cur[i]));
      if (opts.check_monotone && !opts.start) {
        if (next[i] > 1.0 || next[i] < cur[i] - 1e-15)
          throw std::logic_error("extinction_fixed_point: iterate left [xi_t, 1]");
      }
    }
    cur.swap(next);
    if (residual < opts.tol) return {std::move(cur), iter, residual};
  }
  throw ConvergenceError("extinction_fixed_point: no convergence after " +
                             std::to_string(opts.max_iter) +
                             " iterations (residual " + detail::format_double(residual) + ")",
                         std::move(cur), residual, opts.max_iter);
}

// Digraph on the k types with an arc i -> j exactly when the kernel rate
// p_ij is nonzero. The kernel is irreducible iff this digraph is strongly
// connected.
inline Digraph type_digraph(const ValidatedModel& model) {
  const std::size_t k = model.type_count();
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (model.kernel().entries(i, j) > 0.0)
        arcs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  return digraph_from_arcs(static_cast<std::uint32_t>(k), std::move(arcs));
}

inline Digraph type_digraph(const ModelSpec& spec) { return type_digraph(spec.model); }

// Perron root of a nonnegative matrix. The support digraph is split into
// strongly connected blocks first; each nontrivial block is irreducible, so
// shifted power iteration on it keeps strictly positive iterates and the
// Collatz-Wielandt ratios bracket the root with certainty. The shift is half
// the largest row sum: it makes the block primitive and keeps the damping of
// rotating eigenvalue pairs bounded away from one, which a vanishing shift
// would not.
inline double spectral_radius(const Matrix& m, double tol = 1e-10,
                              std::size_t max_iter = 1'000'000) {
  const std::size_t k = m.size();
  if (k == 0) return 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j)))
        throw ConfigError("spectral_radius: matrix is not finite nonnegative");

  std::vector<Arc> support;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (m(i, j) != 0.0)
        support.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  const SccSummary blocks =
      compute_scc(digraph_from_arcs(static_cast<std::uint32_t>(k), std::move(support)));

  std::vector<std::vector<std::uint32_t>> members(blocks.component_count);
  for (std::uint32_t v = 0; v < k; ++v) members[blocks.component_of[v]].push_back(v);

  double best = 0.0;
  for (const auto& block : members) {
    if (block.size() == 1) {
      best = std::max(best, m(block[0], block[0]));
      continue;
    }
    const std::size_t b = block.size();
    double max_row_sum = 0.0;
    for (std::uint32_t bi : block) {
      double row = 0.0;
      for (std::uint32_t bj : block) row += m(bi, bj);
      max_row_sum = std::max(max_row_sum, row);
    }
    const double shift = 1e-9 + 0.5 * max_row_sum;
    std::vector<double> x(b, 1.0 / static_cast<double>(b)), y(b);
    bool converged = false;
    double estimate = 0.0, gap = 0.0;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0, total = 0.0;
      for (std::size_t r = 0; r < b; ++r) {
        double acc = shift * x[r];
        for (std::size_t c = 0; c < b; ++c) acc += m(block[r], block[c]) * x[c];
        y[r] = acc;
        total += acc;
        const double ratio = acc / x[r];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      estimate = 0.5 * (lo + hi) - shift;
      gap = hi - lo;
      if (gap <= tol) {
        converged = true;
        break;
      }
      for (std::size_t r = 0; r < b; ++r) x[r] = y[r] / total;
    }
    if (!converged)
      throw ConvergenceError("spectral_radius: power iteration did not converge", {estimate},
                             gap, max_iter);
    best = std::max(best, std::max(0.0, estimate));
  }
  return best;
}

// Survival fraction restricted to one strongly connected block of the type
// digraph.
struct ComponentSurvival {
  std::vector<std::uint32_t> types;
  double rho = 0.0;
};

struct SurvivalResult {
  std::vector<double> forward_survival;   // per type, forward process
  std::vector<double> backward_survival;  // per type, backward process
  double joint_survival = 0.0;            // sum_i fwd_i * bwd_i * q_i
  double spectral_radius = 0.0;           // Perron root of the forward mean matrix
  bool kernel_irreducible = false;
  std::vector<ComponentSurvival> component_rho;  // one entry per type-digraph SCC
  std::size_t forward_iterations = 0;
  std::size_t backward_iterations = 0;
};

struct SurvivalOptions {
  double tol = 1e-12;
  std::size_t max_iter = 4'000'000;
  double spectral_tol = 1e-10;
};

inline SurvivalResult survival(const ValidatedModel& model, const SurvivalOptions& opts = {}) {
  const std::size_t k = model.type_count();
  const auto [forward_mean, backward_mean] = mean_matrices(model);
  FixedPointOptions fp{opts.tol, opts.max_iter, false, std::nullopt};
  FixedPointResult fwd = extinction_fixed_point(forward_mean, fp);
  FixedPointResult bwd = extinction_fixed_point(backward_mean, fp);

  SurvivalResult result;
  result.forward_survival.resize(k);
  result.backward_survival.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    result.forward_survival[i] = 1.0 - fwd.extinction[i];
    result.backward_survival[i] = 1.0 - bwd.extinction[i];
    result.joint_survival +=
        result.forward_survival[i] * result.backward_survival[i] * model.dist().probs[i];
  }
  result.forward_iterations = fwd.iterations;
  result.backward_iterations = bwd.iterations;
  result.spectral_radius = spectral_radius(forward_mean, opts.spectral_tol);

  const SccSummary blocks = compute_scc(type_digraph(model));
  result.kernel_irreducible = blocks.component_count == 1;
  result.component_rho.resize(blocks.component_count);
  for (std::uint32_t t = 0; t < k; ++t) {
    ComponentSurvival& comp = result.component_rho[blocks.component_of[t]];
    comp.types.push_back(t);
    comp.rho +=
        result.forward_survival[t] * result.backward_survival[t] * model.dist().probs[t];
  }
  return result;
}

inline SurvivalResult survival(const ModelSpec& spec, const SurvivalOptions& opts = {}) {
  return survival(spec.model, opts);
}

struct GiantFraction {
  double rho = 0.0;
  SurvivalResult detail;
};

// Predicted asymptotic fraction of vertices in the largest strongly connected
// component. For an irreducible kernel this is the joint survival fraction;
// otherwise no component of the random digraph can span two blocks of the
// type digraph, and the prediction is the best block: max_m over blocks of
// the survival products summed over the block's types.
inline GiantFraction giant_fraction(const ValidatedModel& model, const SurvivalOptions& opts = {}) {
  GiantFraction g;
  g.detail = survival(model, opts);
  if (g.detail.kernel_irreducible) {
    g.rho = g.detail.joint_survival;
  } else {
    g.rho = 0.0;
    for (const auto& comp : g.detail.component_rho) g.rho = std::max(g.rho, comp.rho);
  }
  return g;
}

inline GiantFraction giant_fraction(const ModelSpec& spec, const SurvivalOptions& opts = {}) {
  return giant_fraction(spec.model, opts);
}

}  // namespace irdg

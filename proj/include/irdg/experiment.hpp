#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "irdg/branching.hpp"
#include "irdg/errors.hpp"
#include "irdg/exploration.hpp"
#include "irdg/generator.hpp"
#include "irdg/model.hpp"
#include "irdg/rng.hpp"
#include "irdg/scc.hpp"

namespace irdg {

// Truncation-threshold rule for the big-vertex sweep: ceil(ln n) by default,
// or a fixed value.
struct OmegaRule {
  bool use_log = true;
  std::uint64_t fixed = 0;

  std::uint64_t value_for(std::uint64_t n) const {
    if (use_log) return default_omega(n);
    return fixed < 1 ? 1 : fixed;
  }
};

struct ExperimentConfig {
  ValidatedModel model;
  std::vector<std::uint64_t> n_grid;  // strictly increasing
  std::uint32_t trials = 1;
  std::uint64_t base_seed = 0;
  OmegaRule omega;
  std::uint32_t workers = 1;
  std::uint64_t subsample = 100'000;
  SampleOptions sampling;
  SurvivalOptions solver;
};

struct TrialRecord {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t arc_count = 0;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  double n1_frac = 0.0;
  double n2_frac = 0.0;
  double big_frac = 0.0;
  double analytic_rho = 0.0;
  double wall_ms = 0.0;

  bool operator==(const TrialRecord&) const = default;
};

struct TrialFailure {
  std::uint64_t n = 0;
  std::uint32_t trial = 0;
  std::string message;
};

struct NAggregate {
  std::uint64_t n = 0;
  std::uint32_t completed = 0;
  double mean_n1_frac = 0.0;
  double stddev_n1_frac = 0.0;
  double mean_n2_frac = 0.0;
  double stddev_n2_frac = 0.0;
  double analytic_rho = 0.0;
};

struct ExperimentResult {
  double analytic_rho = 0.0;
  bool kernel_irreducible = false;
  std::vector<TrialRecord> records;      // sorted by (n, trial)
  std::vector<NAggregate> aggregates;    // one per grid point
  std::vector<TrialFailure> failures;
};

// Per-trial seed: SplitMix64-style hash of (base, n, trial), documented in
// the README. Trials are independent substreams regardless of worker count.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t n, std::uint32_t trial) {
  return derive_seed(base, n, trial);
}

// Streaming consumer: called in canonical order as soon as a grid point's
// trials are complete, before the next grid point starts.
using RecordSink = std::function<void(const TrialRecord&)>;

inline void validate_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw ConfigError("config: trials must be at least 1");
  if (config.n_grid.empty()) throw ConfigError("config: n_grid must not be empty");
  for (std::size_t i = 1; i < config.n_grid.size(); ++i)
    if (config.n_grid[i] <= config.n_grid[i - 1])
      throw ConfigError("config: n_grid must be strictly increasing (n_grid[" + std::to_string(i) +
                        "] = " + std::to_string(config.n_grid[i]) + ")");
  if (config.workers < 1) throw ConfigError("config: workers must be at least 1");
  for (std::uint64_t n : config.n_grid) make_model_spec(config.model, n);  // n >= k, counts >= 1
}

// Runs trials per grid point: sample, decompose, explore, record. Trials run
// on up to `workers` threads; failed trials are collected, not fatal. Output
// order is canonical (n ascending, then trial index) regardless of schedule.
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       const RecordSink& on_record = {}) {
  validate_config(config);

  ExperimentResult result;
  const GiantFraction analytic = giant_fraction(config.model, config.solver);
  result.analytic_rho = analytic.rho;
  result.kernel_irreducible = analytic.detail.kernel_irreducible;

  for (std::uint64_t n : config.n_grid) {
    const ModelSpec spec = make_model_spec(config.model, n);
    const std::uint64_t omega = config.omega.value_for(n);

    std::vector<TrialRecord> records(config.trials);
    std::vector<std::string> errors(config.trials);
    std::vector<std::uint8_t> ok(config.trials, 0);
    std::atomic<std::uint32_t> next{0};

    auto worker = [&]() {
      for (std::uint32_t t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1)) {
        const auto start = std::chrono::steady_clock::now();
        try {
          const std::uint64_t seed = trial_seed(config.base_seed, n, t);
          const Digraph g = sample_digraph(spec, Seed{seed}, config.sampling);
          const SccSummary scc = compute_scc(g);
          BigFractionOptions big_opts;
          big_opts.sample_size = config.subsample;
          big_opts.seed = derive_seed(seed, 0x5EEDu, t);
          const BigFractionEstimate big = big_vertex_fraction(g, omega, big_opts);

          TrialRecord& r = records[t];
          r.n = n;
          r.seed = seed;
          r.arc_count = g.arc_count;
          r.n1 = scc.largest;
          r.n2 = scc.second_largest;
          r.n1_frac = static_cast<double>(scc.largest) / static_cast<double>(n);
          r.n2_frac = static_cast<double>(scc.second_largest) / static_cast<double>(n);
          r.big_frac = big.value;
          r.analytic_rho = result.analytic_rho;
          r.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
          ok[t] = 1;
        } catch (const std::exception& e) {
          errors[t] = e.what();
        }
      }
    };

    const std::uint32_t thread_count = std::min(config.workers, config.trials);
    if (thread_count <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(thread_count);
      for (std::uint32_t w = 0; w < thread_count; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    NAggregate agg;
    agg.n = n;
    agg.analytic_rho = result.analytic_rho;
    double s1 = 0.0, s2 = 0.0, q1 = 0.0, q2 = 0.0;
    for (std::uint32_t t = 0; t < config.trials; ++t) {
      if (!ok[t]) {
        result.failures.push_back({n, t, errors[t]});
        continue;
      }
      result.records.push_back(records[t]);
      if (on_record) on_record(records[t]);
      ++agg.completed;
      s1 += records[t].n1_frac;
      s2 += records[t].n2_frac;
    }
    if (agg.completed > 0) {
      agg.mean_n1_frac = s1 / agg.completed;
      agg.mean_n2_frac = s2 / agg.completed;
      for (std::uint32_t t = 0; t < config.trials; ++t) {
        if (!ok[t]) continue;
        q1 += (records[t].n1_frac - agg.mean_n1_frac) * (records[t].n1_frac - agg.mean_n1_frac);
        q2 += (records[t].n2_frac - agg.mean_n2_frac) * (records[t].n2_frac - agg.mean_n2_frac);
      }
      if (agg.completed > 1) {
        agg.stddev_n1_frac = std::sqrt(q1 / (agg.completed - 1));
        agg.stddev_n2_frac = std::sqrt(q2 / (agg.completed - 1));
      }
    }
    result.aggregates.push_back(agg);
  }
  return result;
}

inline constexpr const char* kCsvHeader =
    "n,seed,arc_count,n1,n2,n1_frac,n2_frac,big_frac,analytic_rho,wall_ms";

namespace detail {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void emit_csv_row(const TrialRecord& r, std::ostream& os) {
  os << r.n << ',' << r.seed << ',' << r.arc_count << ',' << r.n1 << ',' << r.n2 << ','
     << detail::g17(r.n1_frac) << ',' << detail::g17(r.n2_frac) << ',' << detail::g17(r.big_frac)
     << ',' << detail::g17(r.analytic_rho) << ',' << detail::g17(r.wall_ms) << '\n';
}

// Fixed-header CSV, floats at 17 significant digits (round-trip exact).
inline void emit_csv(const std::vector<TrialRecord>& records, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const TrialRecord& r : records) emit_csv_row(r, os);
}

inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("emit_csv: cannot open " + path + " for writing");
  emit_csv(records, os);
  if (!os.flush()) throw IoError("emit_csv: write to " + path + " failed");
}

inline std::vector<TrialRecord> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw IoError("parse_csv: missing or unexpected header line");
  std::vector<TrialRecord> records;
  for (std::size_t lineno = 2; std::getline(is, line); ++lineno) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 10)
      throw IoError("parse_csv: line " + std::to_string(lineno) + " has " +
                    std::to_string(fields.size()) + " fields, expected 10");
    try {
      TrialRecord r;
      r.n = std::stoull(fields[0]);
      r.seed = std::stoull(fields[1]);
      r.arc_count = std::stoull(fields[2]);
      r.n1 = std::stoull(fields[3]);
      r.n2 = std::stoull(fields[4]);
      r.n1_frac = std::stod(fields[5]);
      r.n2_frac = std::stod(fields[6]);
      r.big_frac = std::stod(fields[7]);
      r.analytic_rho = std::stod(fields[8]);
      r.wall_ms = std::stod(fields[9]);
      records.push_back(r);
    } catch (const std::exception&) {
      throw IoError("parse_csv: line " + std::to_string(lineno) + " is not a record");
    }
  }
  return records;
}

inline std::vector<TrialRecord> parse_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("parse_csv: cannot open " + path);
  return parse_csv(is);
}

}  // namespace irdg

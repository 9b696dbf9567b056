// Command line front end: analytic solve, single-digraph sampling, seeded
// experiment sweeps, and kernel discretization.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "irdg/branching.hpp"
#include "irdg/errors.hpp"
#include "irdg/experiment.hpp"
#include "irdg/generator.hpp"
#include "irdg/json_io.hpp"
#include "irdg/scc.hpp"

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw irdg::IoError("cannot open " + path + " for writing");
  os << content;
  if (!os.flush()) throw irdg::IoError("write to " + path + " failed");
}

void print_or_write(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text_file(out_path, content);
}

struct CommonArgs {
  std::string config_path;
  std::string out_path;
};

int run_solve(const CommonArgs& args, double tol, std::uint64_t max_iter) {
  const irdg::LoadedModel loaded = irdg::load_model_file(args.config_path);
  irdg::SurvivalOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  const irdg::GiantFraction result = irdg::giant_fraction(loaded.model, opts);
  print_or_write(args.out_path, irdg::survival_to_json(result, loaded.model).dump(2) + "\n");
  return 0;
}

int run_sample(const CommonArgs& args, std::optional<std::uint64_t> n_override,
               std::uint64_t seed, const std::string& arcs_path,
               const std::string& spectrum_path) {
  const irdg::LoadedModel loaded = irdg::load_model_file(args.config_path);
  std::optional<std::uint64_t> n = n_override ? n_override : loaded.n;
  if (!n)
    throw irdg::ConfigError(
        "sample: no vertex count; pass --n or put \"n\" in the model file");
  const irdg::ModelSpec spec = irdg::make_model_spec(loaded.model, *n);
  const irdg::Digraph g = irdg::sample_digraph(spec, irdg::Seed{seed});
  const irdg::SccSummary scc = irdg::compute_scc(g);

  if (!arcs_path.empty()) {
    std::ofstream os(arcs_path);
    if (!os) throw irdg::IoError("cannot open " + arcs_path + " for writing");
    irdg::write_arc_list(g, os);
    if (!os.flush()) throw irdg::IoError("write to " + arcs_path + " failed");
  }
  if (!spectrum_path.empty()) {
    std::ofstream os(spectrum_path);
    if (!os) throw irdg::IoError("cannot open " + spectrum_path + " for writing");
    irdg::write_size_spectrum(scc, os);
    if (!os.flush()) throw irdg::IoError("write to " + spectrum_path + " failed");
  }
  irdg::json summary = irdg::scc_summary_to_json(g, scc);
  summary["seed"] = seed;
  print_or_write(args.out_path, summary.dump(2) + "\n");
  return 0;
}

int run_sweep(const CommonArgs& args, std::optional<std::uint64_t> seed,
              const std::string& format, const std::string& omega,
              std::optional<std::uint32_t> workers) {
  const irdg::json config_json = irdg::load_json_file(args.config_path);
  const auto base_dir = std::filesystem::path(args.config_path).parent_path();
  irdg::SweepFile sweep = irdg::load_experiment(config_json, base_dir);

  if (seed) sweep.config.base_seed = *seed;
  if (!args.out_path.empty()) sweep.out_path = args.out_path;
  if (!format.empty()) {
    if (format == "csv")
      sweep.format = irdg::OutputFormat::csv;
    else if (format == "json")
      sweep.format = irdg::OutputFormat::json;
    else
      throw irdg::ConfigError("--format: expected csv or json, got \"" + format + "\"");
  }
  if (!omega.empty()) sweep.config.omega = irdg::parse_omega(omega, "--omega");
  if (workers) sweep.config.workers = *workers;

  irdg::ExperimentResult result;
  if (sweep.format == irdg::OutputFormat::csv) {
    // CSV rows stream out as each grid point completes.
    std::ofstream file;
    if (!sweep.out_path.empty()) {
      file.open(sweep.out_path);
      if (!file) throw irdg::IoError("cannot open " + sweep.out_path + " for writing");
    }
    std::ostream& os = sweep.out_path.empty() ? std::cout : file;
    os << irdg::kCsvHeader << '\n';
    result = irdg::run_experiment(sweep.config, [&os](const irdg::TrialRecord& r) {
      irdg::emit_csv_row(r, os);
      os.flush();
    });
    if (!sweep.out_path.empty() && !file.flush())
      throw irdg::IoError("write to " + sweep.out_path + " failed");
  } else {
    result = irdg::run_experiment(sweep.config);
    if (sweep.out_path.empty())
      irdg::emit_json(result, std::cout);
    else
      irdg::emit_json(result, sweep.out_path);
  }

  // Human-readable summary; kept off stdout when the records go there.
  std::ostream& info = sweep.out_path.empty() ? std::cerr : std::cout;
  info << "kernel " << (result.kernel_irreducible ? "irreducible" : "reducible")
       << "; analytic rho = " << result.analytic_rho
       << (result.kernel_irreducible ? " (joint survival)" : " (best type-digraph component)")
       << '\n';
  for (const irdg::NAggregate& a : result.aggregates)
    info << "n=" << a.n << " completed=" << a.completed << " mean_n1_frac=" << a.mean_n1_frac
         << " stddev_n1_frac=" << a.stddev_n1_frac << " mean_n2_frac=" << a.mean_n2_frac
         << '\n';
  for (const irdg::TrialFailure& f : result.failures)
    std::cerr << "trial failed: n=" << f.n << " trial=" << f.trial << ": " << f.message << '\n';
  return 0;
}

int run_discretize(const CommonArgs& args, std::optional<std::uint64_t> k_override) {
  irdg::json m = irdg::load_json_file(args.config_path);
  if (k_override) {
    if (!m.is_object() || !m.contains("kernel_function"))
      throw irdg::ConfigError("--types: the model must use \"kernel_function\"");
    m["types"] = *k_override;
  }
  const irdg::LoadedModel loaded = irdg::load_model(m, args.config_path + ": model");
  if (!loaded.discretized)
    throw irdg::ConfigError("discretize: the model is already a finite matrix");
  print_or_write(args.out_path, irdg::model_to_json(loaded.model).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inhomogeneous random digraph simulator and solver"};
  app.require_subcommand(1);

  CommonArgs solve_args, sample_args, sweep_args, disc_args;
  double solve_tol = 1e-12;
  std::uint64_t solve_max_iter = 4'000'000;
  std::optional<std::uint64_t> sample_n;
  std::uint64_t sample_seed = 0;
  std::string sample_arcs, sample_spectrum;
  std::optional<std::uint64_t> sweep_seed;
  std::string sweep_format, sweep_omega;
  std::optional<std::uint32_t> sweep_workers;
  std::optional<std::uint64_t> disc_types;

  CLI::App* solve = app.add_subcommand("solve", "print survival probabilities and the predicted giant fraction for a model");
  solve->add_option("--config", solve_args.config_path, "model file (JSON)")->required();
  solve->add_option("--out", solve_args.out_path, "write the result here instead of stdout");
  solve->add_option("--tol", solve_tol, "fixed-point tolerance");
  solve->add_option("--max-iter", solve_max_iter, "fixed-point iteration budget");

  CLI::App* sample = app.add_subcommand("sample", "sample one digraph and report its component structure");
  sample->add_option("--config", sample_args.config_path, "model file (JSON)")->required();
  sample->add_option("--n", sample_n, "vertex count (overrides \"n\" from the model file)");
  sample->add_option("--seed", sample_seed, "sampling seed");
  sample->add_option("--out", sample_args.out_path, "write the summary here instead of stdout");
  sample->add_option("--arcs", sample_arcs, "export the arc list (\"u v\" lines, sorted)");
  sample->add_option("--spectrum", sample_spectrum, "export the component size spectrum (\"size count\" lines)");

  CLI::App* sweep = app.add_subcommand("sweep", "run seeded trials over an n grid and emit per-trial records");
  sweep->add_option("--config", sweep_args.config_path, "experiment file (JSON)")->required();
  sweep->add_option("--seed", sweep_seed, "override the base seed");
  sweep->add_option("--out", sweep_args.out_path, "override the output path");
  sweep->add_option("--format", sweep_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--omega", sweep_omega, "exploration cutoff: \"ln\" or a positive integer");
  sweep->add_option("--workers", sweep_workers, "concurrent trial workers");

  CLI::App* discretize = app.add_subcommand("discretize", "reduce a kernel function to a finite type matrix and print it");
  discretize->add_option("--config", disc_args.config_path, "kernel-function model file (JSON)")->required();
  discretize->add_option("--types", disc_types, "override the number of bins");
  discretize->add_option("--out", disc_args.out_path, "write the model here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(irdg::ExitCode::config);
  }

  try {
    if (solve->parsed()) return run_solve(solve_args, solve_tol, solve_max_iter);
    if (sample->parsed())
      return run_sample(sample_args, sample_n, sample_seed, sample_arcs, sample_spectrum);
    if (sweep->parsed())
      return run_sweep(sweep_args, sweep_seed, sweep_format, sweep_omega, sweep_workers);
    if (discretize->parsed()) return run_discretize(disc_args, disc_types);
  } catch (const irdg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(irdg::ExitCode::config);
  }
  return 0;
}

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "irdg/branching.hpp"
#include "irdg/errors.hpp"
#include "irdg/experiment.hpp"
#include "irdg/model.hpp"
#include "irdg/scc.hpp"

namespace irdg {

using nlohmann::json;

enum class OutputFormat { csv, json };

namespace detail {

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + end, '\n'));
}

inline const json* find_key(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path + ": expected an object");
}

inline void check_known_keys(const json& obj, std::initializer_list<const char*> known,
                             const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end())
      throw ConfigError(path + ": unknown field \"" + key + "\"");
  }
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

inline std::uint64_t get_uint(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(path + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

inline std::vector<double> get_number_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<std::vector<double>> get_number_grid(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array of rows");
  std::vector<std::vector<double>> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_number_array(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

// Parses JSON text; syntax errors are reported with the line they occur on.
inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": parse error at line " +
                      std::to_string(detail::line_of_byte(text, e.byte)) + ": " + e.what());
  }
}

inline json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_json_text(buf.str(), path);
}

struct LoadedModel {
  ValidatedModel model;
  std::optional<std::uint64_t> n;  // present when the file pins a vertex count
  bool discretized = false;        // built from a kernel function
};

namespace detail {

inline KernelFunction load_kernel_function(const json& kf, TypeMeasure measure,
                                           const std::string& path) {
  require_object(kf, path);
  const json* name_v = find_key(kf, "name");
  if (!name_v) throw ConfigError(path + ".name: required");
  const std::string name = get_string(*name_v, path + ".name");
  if (name == "constant") {
    check_known_keys(kf, {"name", "c"}, path);
    const json* c = find_key(kf, "c");
    if (!c) throw ConfigError(path + ".c: required for the constant kernel");
    return constant_kernel(get_number(*c, path + ".c"), std::move(measure));
  }
  if (name == "product") {
    check_known_keys(kf, {"name", "a"}, path);
    const json* a = find_key(kf, "a");
    if (!a) throw ConfigError(path + ".a: required for the product kernel");
    return product_kernel(get_number(*a, path + ".a"), std::move(measure));
  }
  if (name == "piecewise") {
    check_known_keys(kf, {"name", "values"}, path);
    const json* values = find_key(kf, "values");
    if (!values) throw ConfigError(path + ".values: required for the piecewise kernel");
    return piecewise_kernel(get_number_grid(*values, path + ".values"), std::move(measure));
  }
  throw ConfigError(path + ".name: unknown kernel \"" + name +
                    "\" (expected constant, product, or piecewise)");
}

}  // namespace detail

// Model schema: either a finite model ("probs" + "kernel" [+ "labels"]) or a
// kernel function ("kernel_function" + "types" [+ "subgrid", "measure"]).
// Optional "n" pins a vertex count for single-digraph commands.
inline LoadedModel load_model(const json& m, const std::string& path = "model") {
  detail::require_object(m, path);
  const json* kernel = detail::find_key(m, "kernel");
  const json* kernel_function = detail::find_key(m, "kernel_function");
  if (!!kernel == !!kernel_function)
    throw ConfigError(path + ": exactly one of \"kernel\" and \"kernel_function\" is required");

  LoadedModel loaded = [&] {
    if (kernel) {
      detail::check_known_keys(m, {"labels", "probs", "kernel", "n"}, path);
      const json* probs = detail::find_key(m, "probs");
      if (!probs) throw ConfigError(path + ".probs: required with \"kernel\"");
      TypeDistribution dist;
      dist.probs = detail::get_number_array(*probs, path + ".probs");
      if (const json* labels = detail::find_key(m, "labels")) {
        if (!labels->is_array()) throw ConfigError(path + ".labels: expected an array of strings");
        for (std::size_t i = 0; i < labels->size(); ++i)
          dist.labels.push_back(
              detail::get_string((*labels)[i], path + ".labels[" + std::to_string(i) + "]"));
      }
      KernelMatrix km;
      try {
        km.entries = Matrix::from_rows(detail::get_number_grid(*kernel, path + ".kernel"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ".kernel: rows must form a square matrix (" + e.what() + ")");
      }
      return LoadedModel{validate_model(std::move(dist), std::move(km)), std::nullopt, false};
    }
    detail::check_known_keys(m, {"kernel_function", "types", "subgrid", "measure", "n"}, path);
    const json* types = detail::find_key(m, "types");
    if (!types) throw ConfigError(path + ".types: required with \"kernel_function\"");
    const std::uint64_t k = detail::get_uint(*types, path + ".types");
    std::uint64_t subgrid = 8;
    if (const json* sg = detail::find_key(m, "subgrid"))
      subgrid = detail::get_uint(*sg, path + ".subgrid");
    TypeMeasure measure;
    if (const json* mv = detail::find_key(m, "measure")) {
      detail::require_object(*mv, path + ".measure");
      detail::check_known_keys(*mv, {"densities"}, path + ".measure");
      const json* densities = detail::find_key(*mv, "densities");
      if (!densities) throw ConfigError(path + ".measure.densities: required");
      measure.densities = detail::get_number_array(*densities, path + ".measure.densities");
    }
    const KernelFunction kf = detail::load_kernel_function(*kernel_function, std::move(measure),
                                                           path + ".kernel_function");
    auto [dist, km] = discretize_kernel(kf, static_cast<std::size_t>(k),
                                        static_cast<std::size_t>(subgrid));
    return LoadedModel{validate_model(std::move(dist), std::move(km)), std::nullopt, true};
  }();

  if (const json* n = detail::find_key(m, "n")) loaded.n = detail::get_uint(*n, path + ".n");
  return loaded;
}

inline LoadedModel load_model_file(const std::string& path) {
  return load_model(load_json_file(path), path + ": model");
}

// Sweep configuration plus the output routing that belongs to the harness.
struct SweepFile {
  ExperimentConfig config;
  std::string out_path;  // empty: write to stdout
  OutputFormat format = OutputFormat::csv;
};

inline OmegaRule parse_omega(const std::string& text, const std::string& path) {
  if (text == "ln") return OmegaRule{true, 0};
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size() || v < 1) throw std::invalid_argument(text);
    return OmegaRule{false, v};
  } catch (const std::exception&) {
    throw ConfigError(path + ": expected \"ln\" or a positive integer, got \"" + text + "\"");
  }
}

// Experiment schema: "model" (inline object or path string), "n_grid",
// "trials", "seed", "omega" ("ln" or integer), "out", "format", "workers",
// "subsample", "memory_cap_bytes", "tol", "max_iter".
inline SweepFile load_experiment(const json& c, const std::filesystem::path& base_dir,
                                 const std::string& path = "config") {
  detail::require_object(c, path);
  detail::check_known_keys(c,
                           {"model", "n_grid", "trials", "seed", "omega", "out", "format",
                            "workers", "subsample", "memory_cap_bytes", "tol", "max_iter"},
                           path);
  const json* model_v = detail::find_key(c, "model");
  if (!model_v) throw ConfigError(path + ".model: required");
  LoadedModel loaded = [&] {
    if (model_v->is_string()) {
      const std::filesystem::path ref = model_v->get<std::string>();
      const std::filesystem::path resolved = ref.is_absolute() ? ref : base_dir / ref;
      return load_model_file(resolved.string());
    }
    return load_model(*model_v, path + ".model");
  }();

  const json* n_grid = detail::find_key(c, "n_grid");
  if (!n_grid) throw ConfigError(path + ".n_grid: required");
  if (!n_grid->is_array() || n_grid->empty())
    throw ConfigError(path + ".n_grid: expected a non-empty array of integers");

  SweepFile sweep{ExperimentConfig{std::move(loaded.model), {}, 1, 0, {}, 1, 100'000, {}, {}},
                  "", OutputFormat::csv};
  for (std::size_t i = 0; i < n_grid->size(); ++i)
    sweep.config.n_grid.push_back(
        detail::get_uint((*n_grid)[i], path + ".n_grid[" + std::to_string(i) + "]"));

  if (const json* v = detail::find_key(c, "trials")) {
    const std::uint64_t trials = detail::get_uint(*v, path + ".trials");
    if (trials < 1) throw ConfigError(path + ".trials: must be at least 1");
    sweep.config.trials = static_cast<std::uint32_t>(trials);
  }
  if (const json* v = detail::find_key(c, "seed"))
    sweep.config.base_seed = detail::get_uint(*v, path + ".seed");
  if (const json* v = detail::find_key(c, "omega")) {
    if (v->is_string())
      sweep.config.omega = parse_omega(v->get<std::string>(), path + ".omega");
    else
      sweep.config.omega = OmegaRule{false, detail::get_uint(*v, path + ".omega")};
  }
  if (const json* v = detail::find_key(c, "out"))
    sweep.out_path = detail::get_string(*v, path + ".out");
  if (const json* v = detail::find_key(c, "format")) {
    const std::string f = detail::get_string(*v, path + ".format");
    if (f == "csv")
      sweep.format = OutputFormat::csv;
    else if (f == "json")
      sweep.format = OutputFormat::json;
    else
      throw ConfigError(path + ".format: expected \"csv\" or \"json\", got \"" + f + "\"");
  }
  if (const json* v = detail::find_key(c, "workers")) {
    const std::uint64_t workers = detail::get_uint(*v, path + ".workers");
    if (workers < 1) throw ConfigError(path + ".workers: must be at least 1");
    sweep.config.workers = static_cast<std::uint32_t>(workers);
  }
  if (const json* v = detail::find_key(c, "subsample")) {
    sweep.config.subsample = detail::get_uint(*v, path + ".subsample");
    if (sweep.config.subsample < 1) throw ConfigError(path + ".subsample: must be at least 1");
  }
  if (const json* v = detail::find_key(c, "memory_cap_bytes"))
    sweep.config.sampling.max_bytes = detail::get_uint(*v, path + ".memory_cap_bytes");
  if (const json* v = detail::find_key(c, "tol")) {
    sweep.config.solver.tol = detail::get_number(*v, path + ".tol");
    if (!(sweep.config.solver.tol > 0.0)) throw ConfigError(path + ".tol: must be positive");
  }
  if (const json* v = detail::find_key(c, "max_iter"))
    sweep.config.solver.max_iter = detail::get_uint(*v, path + ".max_iter");
  return sweep;
}

// ---- serialization ----

inline json model_to_json(const ValidatedModel& model) {
  const std::size_t k = model.type_count();
  json kernel = json::array();
  for (std::size_t i = 0; i < k; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < k; ++j) row.push_back(model.kernel().entries(i, j));
    kernel.push_back(std::move(row));
  }
  return json{{"labels", model.dist().labels},
              {"probs", model.dist().probs},
              {"kernel", std::move(kernel)}};
}

inline json survival_to_json(const GiantFraction& g, const ValidatedModel& model) {
  const SurvivalResult& s = g.detail;
  json components = json::array();
  for (const auto& comp : s.component_rho) {
    json types = json::array();
    for (std::uint32_t t : comp.types) types.push_back(model.dist().labels[t]);
    components.push_back(json{{"types", std::move(types)}, {"rho", comp.rho}});
  }
  return json{{"labels", model.dist().labels},
              {"giant_fraction", g.rho},
              {"joint_survival", s.joint_survival},
              {"spectral_radius", s.spectral_radius},
              {"irreducible", s.kernel_irreducible},
              {"forward_survival", s.forward_survival},
              {"backward_survival", s.backward_survival},
              {"components", std::move(components)},
              {"iterations", json{{"forward", s.forward_iterations},
                                  {"backward", s.backward_iterations}}}};
}

inline json scc_summary_to_json(const Digraph& g, const SccSummary& s) {
  json spectrum = json::array();
  std::size_t i = 0;
  while (i < s.sizes.size()) {
    std::size_t j = i;
    while (j < s.sizes.size() && s.sizes[j] == s.sizes[i]) ++j;
    spectrum.push_back(json::array({s.sizes[i], j - i}));
    i = j;
  }
  const double n = static_cast<double>(g.n);
  return json{{"n", g.n},
              {"arc_count", g.arc_count},
              {"component_count", s.component_count},
              {"n1", s.largest},
              {"n2", s.second_largest},
              {"n1_frac", g.n ? static_cast<double>(s.largest) / n : 0.0},
              {"n2_frac", g.n ? static_cast<double>(s.second_largest) / n : 0.0},
              {"spectrum", std::move(spectrum)}};
}

inline json record_to_json(const TrialRecord& r) {
  return json{{"n", r.n},
              {"seed", r.seed},
              {"arc_count", r.arc_count},
              {"n1", r.n1},
              {"n2", r.n2},
              {"n1_frac", r.n1_frac},
              {"n2_frac", r.n2_frac},
              {"big_frac", r.big_frac},
              {"analytic_rho", r.analytic_rho},
              {"wall_ms", r.wall_ms}};
}

inline json experiment_to_json(const ExperimentResult& result) {
  json records = json::array();
  for (const TrialRecord& r : result.records) records.push_back(record_to_json(r));
  json aggregates = json::array();
  for (const NAggregate& a : result.aggregates)
    aggregates.push_back(json{{"n", a.n},
                              {"completed", a.completed},
                              {"mean_n1_frac", a.mean_n1_frac},
                              {"stddev_n1_frac", a.stddev_n1_frac},
                              {"mean_n2_frac", a.mean_n2_frac},
                              {"stddev_n2_frac", a.stddev_n2_frac},
                              {"analytic_rho", a.analytic_rho}});
  json failures = json::array();
  for (const TrialFailure& f : result.failures)
    failures.push_back(json{{"n", f.n}, {"trial", f.trial}, {"error", f.message}});
  return json{{"analytic_rho", result.analytic_rho},
              {"irreducible", result.kernel_irreducible},
              {"records", std::move(records)},
              {"aggregates", std::move(aggregates)},
              {"failures", std::move(failures)}};
}

inline void emit_json(const ExperimentResult& result, std::ostream& os) {
  os << experiment_to_json(result).dump(2) << '\n';
}

inline void emit_json(const ExperimentResult& result, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("emit_json: cannot open " + path + " for writing");
  emit_json(result, os);
  if (!os.flush()) throw IoError("emit_json: write to " + path + " failed");
}

}  // namespace irdg

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace irdg {

// Process exit codes shared by the library's error hierarchy and the CLI.
enum class ExitCode : int { ok = 0, config = 1, convergence = 2, io = 3 };

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Invalid model parameters, malformed configuration, or resource limits.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

// An iterative solver hit its iteration budget. Carries the last iterate so
// callers can report how far the computation got.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate, double residual,
                   std::size_t iterations)
      : Error(ExitCode::convergence, what),
        last_iterate_(std::move(last_iterate)),
        residual_(residual),
        iterations_(iterations) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
  std::size_t iterations_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

}  // namespace irdg

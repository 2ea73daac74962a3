#pragma once

#include "horizon/polynomials.hpp"
#include "horizon/predictor.hpp"
#include "horizon/signals.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace horizon {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitOutsideClass = 3,
  kExitBoundViolation = 4,
};

/// Malformed or invalid configuration; the message names the offending line or key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Absolute allowance added to analytic bounds for time-domain quadrature error.
inline constexpr double kQuadratureBudget = 1e-8;

struct ExperimentConfig {
  double T = 0.5;
  double theta = 0.1;
  double r = 2.0;
  ApproxMethod method = ApproxMethod::Projection;
  int d_min = 0;
  int d_max = 10;
  /// Kernel description without T/theta, e.g. {"shape": "bump"} or
  /// {"shape": "mollified", "prototype": "box", "epsilon": 0.1}.
  nlohmann::json kernel = {{"shape", "bump"}};
  nlohmann::json signal = {{"kind", "poisson"}, {"params", {{"a", 1.5}}}};
  double t_min = -2.0;
  double t_max = 2.0;
  int t_points = 41;
  double omega_max = 64.0;
  int grid_points = 4096;
  std::vector<double> nu_range{0.0, 0.01, 0.1};
  int p = 2;
  nlohmann::json noise = {{"kind", "chirp_noise"},
                          {"params", {{"band", {16.0, 32.0}}, {"amplitude", 1.0}, {"chirp_rate", 0.05}}}};
  double eps_target = 1e-4;
  std::string output_dir = ".";
  Precision precision = Precision::Extended;
  /// 0 = HORIZON_THREADS or the hardware concurrency.
  int threads = 0;
  /// Prediction instants for the predict command; empty means the t-grid.
  std::vector<double> t_list;
  /// Fill the runtime_ms column with wall-clock values (off keeps output byte-stable).
  bool timing = false;

  /// Throws ConfigError on syntax errors (with line and column), unknown
  /// keys, wrong types and violated invariants.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;

  TargetKernel make_kernel() const;
  Signal make_signal() const;
  Signal make_noise() const;
  TimeGrid make_tgrid() const;
  SpectralGrid make_grid() const;
  int resolved_threads() const;
};

struct CommandOutput {
  std::string csv;
  nlohmann::json summary = nlohmann::json::object();
  int exit_code = kExitOk;
  /// Diagnostic for non-zero exit codes.
  std::string message;
};

/// Rows d,method,alpha,taylor_bound for both methods.
CommandOutput cmd_alpha_sweep(const ExperimentConfig& config);
/// Rows d,sup_error,bound,runtime_ms; summary with the smallest d meeting eps_target.
CommandOutput cmd_convergence(const ExperimentConfig& config);
/// Rows nu,d,empirical_total_error,bound_total.
CommandOutput cmd_noise_sweep(const ExperimentConfig& config);
/// Rows t,y,y_hat,abs_err at degree d_max.
CommandOutput cmd_predict(const ExperimentConfig& config);

/// Runs fn(0..n-1) on up to `threads` workers; results keep index order.
template <typename Result>
std::vector<Result> parallel_map(std::size_t n, int threads,
                                 const std::function<Result(std::size_t)>& fn) {
  std::vector<Result> out(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::min<std::size_t>(n, threads > 0 ? threads : 1);
  auto run = [&](std::size_t worker) {
    for (std::size_t i = worker; i < n; i += workers) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace horizon

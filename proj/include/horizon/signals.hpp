#pragma once

#include "horizon/spectral_core.hpp"
#include "horizon/weighted_space.hpp"

#include <json.hpp>

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace horizon {

/// A real-valued test process: time-domain evaluator plus, where known, the
/// exact spectrum X(i omega) = int e^{-i omega t} x(t) dt.
class SignalModel {
 public:
  virtual ~SignalModel() = default;

  virtual std::string kind() const = 0;
  virtual double value(double t) const = 0;
  /// Extended-precision evaluation for the high-order predictor sums; models
  /// without one fall back to value().
  virtual extended value_ext(const extended& t) const {
    return value(static_cast<double>(t));
  }
  virtual std::optional<cplx> spectrum(double /*omega*/) const { return std::nullopt; }
  /// Exponential decay rate of |X(i omega)|; +inf for faster-than-exponential
  /// decay or band-limited spectra.
  virtual double decay_rate() const { return std::numeric_limits<double>::infinity(); }
  /// Closed-form int e^{sign r |omega|} |X|^2 d omega where known (+inf if divergent).
  virtual std::optional<double> weighted_energy(double /*r*/, int /*sign*/) const {
    return std::nullopt;
  }
  /// Interval holding essentially all of x, used to transform signals without
  /// a closed-form spectrum.
  virtual std::optional<std::pair<double, double>> time_window() const { return std::nullopt; }
  virtual nlohmann::json params() const { return nlohmann::json::object(); }
};

/// Immutable, cheaply copyable handle to a SignalModel.
class Signal {
 public:
  explicit Signal(std::shared_ptr<const SignalModel> model);

  double operator()(double t) const { return model_->value(t); }
  double value(double t) const { return model_->value(t); }
  extended operator()(const extended& t) const { return model_->value_ext(t); }
  std::optional<cplx> spectrum(double omega) const { return model_->spectrum(omega); }
  bool has_spectrum() const { return model_->spectrum(0.0).has_value(); }
  /// Spectrum sampled on the grid nodes; throws if none is available.
  Eigen::VectorXcd spectrum_on(const SpectralGrid& grid) const;
  double decay_rate() const { return model_->decay_rate(); }
  std::string kind() const { return model_->kind(); }
  const SignalModel& model() const { return *model_; }

  nlohmann::json to_json() const;
  static Signal from_json(const nlohmann::json& spec);

 private:
  std::shared_ptr<const SignalModel> model_;
};

Signal zero_signal();

/// x(t) = a / (pi (a^2 + t^2)),  X(i omega) = e^{-a |omega|}.
Signal poisson_signal(double a);

/// x(t) = exp(-t^2 / (2 sigma^2)) / (sigma sqrt(2 pi)),  X = exp(-sigma^2 omega^2 / 2).
Signal gaussian_signal(double sigma);

/// Poisson signal times cos(omega0 t).
Signal cosine_modulated_poisson(double a, double omega0);

/// sum_i c_i x_i.
Signal superposition(std::vector<std::pair<double, Signal>> terms);

/// Band-limited noise with smooth bump envelope on omega0 <= |omega| <= omega1
/// and quadratic phase: N(i omega) = A w(|omega|) e^{-i c omega |omega|}.
Signal chirp_noise(double omega0, double omega1, double amplitude, double chirp_rate = 0.0);

struct ClassReport {
  double r = 0.0;
  int sign = -1;
  /// int e^{sign r|omega|} |X|^2 d omega; +inf when divergent
  double norm_sq = 0.0;
  /// sqrt(norm_sq)
  double norm = 0.0;
  bool member = false;
  bool unit_ball = false;
};

/// Membership of x in the class with weight e^{sign r|omega|} (sign = -1 is
/// the class X(r); sign = +1 is the dual weight of the error bound). Uses the
/// closed form when the signal provides one, otherwise grid quadrature with
/// tail divergence detection.
ClassReport class_norm(const Signal& x, double r, int sign = -1,
                       const std::optional<SpectralGrid>& grid = std::nullopt);

/// x0 + s eta with s chosen so that ||s N||_{L_p(grid)} = nu. Returns x0 itself
/// when nu = 0.
Signal add_noise(const Signal& x0, const Signal& eta, double nu, int p, const SpectralGrid& grid);

/// ||N||_{L_p} of a signal's spectrum on the grid (p = 1, 2).
double spectral_lp_norm(const Signal& eta, int p, const SpectralGrid& grid);

}  // namespace horizon

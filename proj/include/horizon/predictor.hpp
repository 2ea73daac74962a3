#pragma once

#include "horizon/kernels.hpp"
#include "horizon/polynomials.hpp"
#include "horizon/signals.hpp"
#include "horizon/spectral_core.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace horizon {

/// Raised when a signal's spectrum is too heavy for the weight e^{r|omega|}.
class OutsideClassError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Time-domain quadrature resolution for convolutions with h and h_hat.
/// Bump kernels use the tanh-substituted trapezoid rule (flat_endpoint_rule);
/// mollified kernels use composite Gauss-Legendre split at their breakpoints.
struct ConvolutionOptions {
  double flat_step = 0.02;
  double flat_half_width = 4.0;
  /// Gauss-Legendre panels per smooth piece of a mollified kernel.
  int panels_per_piece = 16;
};

using VectorXe = Eigen::Matrix<extended, Eigen::Dynamic, 1>;

/// Read-only view of x over [t - memory, t], addressed by lag.
/// Lags outside [0, memory] throw std::out_of_range: no sample after t is
/// reachable through this view.
class PastWindow {
 public:
  PastWindow(const Signal& x, double t, double memory) : x_(x), t_(t), memory_(memory) {}
  double operator()(double lag) const;
  extended operator()(const extended& lag) const;
  double now() const { return t_; }
  double memory() const { return memory_; }

 private:
  const Signal& x_;
  double t_;
  double memory_;
};

/// h_hat_d(t) = sum_k a_k h^(k)(t - T) = sum_k a_k q^(k)(t), supported in
/// [0, T + theta]; its transfer function is psi_d(z) Q(z) = e^{-Tz} psi_d(z) H(z).
///
/// The taps are assembled in extended precision: for d around 10 the terms
/// a_k q^(k) reach 1e14 while their sum is O(1), so double arithmetic would
/// lose every significant digit of the prediction.
class PredictorKernel {
 public:
  PredictorKernel(TargetKernel h, Polynomial psi, ConvolutionOptions opts = {});

  const TargetKernel& target() const { return h_; }
  const Polynomial& psi() const { return psi_; }
  int degree() const { return psi_.degree(); }
  /// Memory length T + theta.
  double tau() const { return h_.tau(); }

  cplx operator()(double t) const;
  std::complex<extended> operator()(const extended& t) const;
  /// Transfer function psi(i omega) Q(i omega) evaluated from the target kernel.
  cplx transfer(double omega) const;
  /// psi(i omega) Q(i omega) on the grid.
  Eigen::VectorXcd transfer_on(const SpectralGrid& grid) const;
  /// Fourier transform of the assembled taps, sum_j tap_j e^{-i omega lag_j}.
  Eigen::VectorXcd tap_spectrum(const Eigen::VectorXd& omegas) const;

  /// Lag nodes in [0, tau] and the products weight * h_hat(lag).
  const VectorXe& lags() const { return lags_; }
  const VectorXe& taps_real() const { return taps_re_; }
  const VectorXe& taps_imag() const { return taps_im_; }

 private:
  TargetKernel h_;
  Polynomial psi_;
  VectorXe lags_;
  VectorXe taps_re_;
  VectorXe taps_im_;
};

PredictorKernel build_predictor(const TargetKernel& h, const Polynomial& psi,
                                ConvolutionOptions opts = {});

/// Precomputed rule for y(t) = int_{-T}^{theta} h(u) x(t - u) du.
class TargetConvolution {
 public:
  explicit TargetConvolution(const TargetKernel& h, ConvolutionOptions opts = {});
  double operator()(const Signal& x, double t) const;

 private:
  Eigen::VectorXd offsets_;
  Eigen::VectorXd taps_;
};

/// y(t) = int_{t-theta}^{t+T} h(t - s) x(s) ds.
double target(const TargetKernel& h, const Signal& x, double t, ConvolutionOptions opts = {});

/// Re int_{t-T-theta}^{t} h_hat_d(t - s) x(s) ds; reads x only through a PastWindow.
double predict(const PredictorKernel& pk, const Signal& x, double t);
extended predict_extended(const PredictorKernel& pk, const Signal& x, double t);

/// beta = int e^{r|omega|} |Q(i omega) X(i omega)|^2 d omega on the grid.
/// Throws OutsideClassError("signal outside class") when the integrand tail grows.
double beta_of(const TargetKernel& h, const Signal& x, double r, const SpectralGrid& grid);

/// (1/2 pi) sqrt(alpha_d beta) with alpha_d in closed form.
double error_bound(const PredictorKernel& pk, const Signal& x, double r, const SpectralGrid& grid,
                   Precision precision = Precision::Extended);

/// (nu / 2 pi)(||H_hat_d||_{L_q} + ||H||_{L_q}) on the grid, q = inf for p = 1
/// and q = 2 for p = 2.
double noise_bound(const PredictorKernel& pk, const TargetKernel& h, double nu, int p,
                   const SpectralGrid& grid);

struct PredictionResult {
  TimeGrid grid;
  Eigen::VectorXd y;
  Eigen::VectorXd y_hat;
  double sup_error = 0.0;
  double bound = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  int d = 0;
  std::string method;

  /// Rows t, y, y_hat, abs_err in 17-digit scientific notation.
  std::string to_csv() const;
  nlohmann::json summary() const;
};

/// Evaluates y and y_hat on the time grid and fills the bound fields.
PredictionResult run_prediction(const PredictorKernel& pk, const Signal& x, const TimeGrid& tgrid,
                                double r, const SpectralGrid& grid, const std::string& method = "",
                                ConvolutionOptions opts = {});

struct NoiseReport {
  /// ||N||_{L_p} on the grid
  double nu = 0.0;
  int p = 2;
  /// E_d = sup |y - y_hat| for the clean signal
  double base_error = 0.0;
  /// E_{eta,d} = sup |h_hat_d * eta - h * eta|
  double noise_error = 0.0;
  /// noise bound per unit nu
  double bound_slope = 0.0;
  /// noise_error <= nu * bound_slope (with a relative 1e-9 quadrature allowance)
  bool within_bound = false;
};

NoiseReport empirical_noise_error(const PredictorKernel& pk, const TargetKernel& h,
                                  const Signal& x0, const Signal& eta, const TimeGrid& tgrid,
                                  int p, const SpectralGrid& grid, ConvolutionOptions opts = {});

/// Formats a double with 17 significant digits in scientific notation.
std::string format_real(double v);

}  // namespace horizon

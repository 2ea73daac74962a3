#include "horizon/predictor.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace horizon {

double PastWindow::operator()(double lag) const {
  if (!(lag >= 0.0 && lag <= memory_))
    throw std::out_of_range("lag outside the memory window");
  return x_(t_ - lag);
}

extended PastWindow::operator()(const extended& lag) const {
  if (!(lag >= 0 && lag <= memory_)) throw std::out_of_range("lag outside the memory window");
  return x_(extended(t_) - lag);
}

namespace {

template <typename Real>
BasicQuadratureRule<Real> support_rule(const TargetKernel& h, double shift,
                                       const ConvolutionOptions& opts) {
  if (h.shape() == KernelShape::Bump)
    return flat_endpoint_rule<Real>(Real(-h.T()) + shift, Real(h.theta()) + shift, opts.flat_step,
                                    opts.flat_half_width);
  std::vector<Real> breaks;
  for (double b : h.breakpoints()) breaks.push_back(Real(b) + shift);
  return composite_gauss_legendre<Real>(breaks, opts.panels_per_piece);
}

}  // namespace

PredictorKernel::PredictorKernel(TargetKernel h, Polynomial psi, ConvolutionOptions opts)
    : h_(std::move(h)), psi_(std::move(psi)) {
  if (psi_.degree() > kMaxDerivative)
    throw std::domain_error("polynomial degree exceeds the kernel derivative capability");
  const auto rule = support_rule<extended>(h_, h_.T(), opts);
  lags_ = rule.nodes;
  taps_re_.resize(rule.size());
  taps_im_.resize(rule.size());
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const auto v = (*this)(lags_(j));
    taps_re_(j) = rule.weights(j) * v.real();
    taps_im_(j) = rule.weights(j) * v.imag();
  }
}

std::complex<extended> PredictorKernel::operator()(const extended& t) const {
  if (!(t > 0 && t < tau())) return {extended(0), extended(0)};
  const auto jets = h_.derivatives<extended>(psi_.degree(), t - h_.T());
  extended re = 0, im = 0;
  for (int k = 0; k <= psi_.degree(); ++k) {
    re += psi_.coeff(k).real() * jets[k];
    im += psi_.coeff(k).imag() * jets[k];
  }
  return {re, im};
}

cplx PredictorKernel::operator()(double t) const {
  const auto v = (*this)(extended(t));
  return {v.real().convert_to<double>(), v.imag().convert_to<double>()};
}

Eigen::VectorXcd PredictorKernel::tap_spectrum(const Eigen::VectorXd& omegas) const {
  Eigen::VectorXcd out(omegas.size());
  for (Eigen::Index i = 0; i < omegas.size(); ++i) {
    extended re = 0, im = 0;
    for (Eigen::Index j = 0; j < lags_.size(); ++j) {
      const extended phase = omegas(i) * lags_(j);
      const extended c = cos(phase), s = sin(phase);
      // (tr + i ti)(c - i s)
      re += taps_re_(j) * c + taps_im_(j) * s;
      im += taps_im_(j) * c - taps_re_(j) * s;
    }
    out(i) = cplx(re.convert_to<double>(), im.convert_to<double>());
  }
  return out;
}

cplx PredictorKernel::transfer(double omega) const {
  return psi_.at_i_omega(omega) * q_transform(h_, cplx(0.0, omega));
}

Eigen::VectorXcd PredictorKernel::transfer_on(const SpectralGrid& grid) const {
  Eigen::VectorXcd out = q_spectrum(h_, grid);
  for (Eigen::Index j = 0; j < out.size(); ++j) out(j) *= psi_.at_i_omega(grid.nodes()(j));
  return out;
}

PredictorKernel build_predictor(const TargetKernel& h, const Polynomial& psi,
                                ConvolutionOptions opts) {
  return PredictorKernel(h, psi, opts);
}

TargetConvolution::TargetConvolution(const TargetKernel& h, ConvolutionOptions opts) {
  const auto rule = support_rule<double>(h, 0.0, opts);
  offsets_ = rule.nodes;
  taps_.resize(rule.size());
  for (Eigen::Index j = 0; j < rule.size(); ++j) taps_(j) = rule.weights(j) * h(offsets_(j));
}

double TargetConvolution::operator()(const Signal& x, double t) const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < offsets_.size(); ++j) acc += taps_(j) * x(t - offsets_(j));
  return acc;
}

double target(const TargetKernel& h, const Signal& x, double t, ConvolutionOptions opts) {
  return TargetConvolution(h, opts)(x, t);
}

extended predict_extended(const PredictorKernel& pk, const Signal& x, double t) {
  const PastWindow past(x, t, pk.tau());
  const auto& lags = pk.lags();
  const auto& taps = pk.taps_real();
  extended acc = 0;
  for (Eigen::Index j = 0; j < lags.size(); ++j) acc += taps(j) * past(lags(j));
  return acc;
}

double predict(const PredictorKernel& pk, const Signal& x, double t) {
  return predict_extended(pk, x, t).convert_to<double>();
}

double beta_of(const TargetKernel& h, const Signal& x, double r, const SpectralGrid& grid) {
  const Eigen::VectorXcd qx = q_spectrum(h, grid).cwiseProduct(x.spectrum_on(grid));
  try {
    return weighted_norm_sq(qx, WeightedNorm(r, +1), grid);
  } catch (const std::domain_error&) {
    throw OutsideClassError("signal outside class");
  }
}

double error_bound(const PredictorKernel& pk, const Signal& x, double r, const SpectralGrid& grid,
                   Precision precision) {
  const double alpha = alpha_closed_form(pk.psi(), pk.target().T(), r, precision);
  const double beta = beta_of(pk.target(), x, r, grid);
  return std::sqrt(alpha * beta) / (2.0 * kPi);
}

double noise_bound(const PredictorKernel& pk, const TargetKernel& h, double nu, int p,
                   const SpectralGrid& grid) {
  if (!(nu >= 0.0)) throw std::invalid_argument("noise_bound: nu must be >= 0");
  if (p != 1 && p != 2) throw std::invalid_argument("noise_bound: p must be 1 or 2");
  if (nu == 0.0) return 0.0;
  const int q = p == 1 ? kSupNorm : 2;
  const Eigen::VectorXcd hh = pk.transfer_on(grid);
  const Eigen::VectorXcd hs = h_spectrum(h, grid);
  return nu / (2.0 * kPi) * (lp_norm(hh, q, grid) + lp_norm(hs, q, grid));
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string PredictionResult::to_csv() const {
  std::ostringstream out;
  out << "t,y,y_hat,abs_err\n";
  for (int i = 0; i < grid.n_points(); ++i) {
    out << format_real(grid.nodes()(i)) << ',' << format_real(y(i)) << ',' << format_real(y_hat(i))
        << ',' << format_real(std::abs(y(i) - y_hat(i))) << '\n';
  }
  return out.str();
}

nlohmann::json PredictionResult::summary() const {
  return {{"sup_error", sup_error}, {"bound", bound}, {"alpha", alpha},
          {"beta", beta},           {"d", d},         {"method", method}};
}

PredictionResult run_prediction(const PredictorKernel& pk, const Signal& x, const TimeGrid& tgrid,
                                double r, const SpectralGrid& grid, const std::string& method,
                                ConvolutionOptions opts) {
  PredictionResult out{tgrid, Eigen::VectorXd(tgrid.n_points()), Eigen::VectorXd(tgrid.n_points()),
                       0.0, 0.0, 0.0, 0.0, pk.degree(), method};
  const TargetConvolution conv(pk.target(), opts);
  for (int i = 0; i < tgrid.n_points(); ++i) {
    const double t = tgrid.nodes()(i);
    out.y(i) = conv(x, t);
    out.y_hat(i) = predict(pk, x, t);
  }
  out.sup_error = (out.y - out.y_hat).cwiseAbs().maxCoeff();
  out.alpha = alpha_closed_form(pk.psi(), pk.target().T(), r, Precision::Extended);
  out.beta = beta_of(pk.target(), x, r, grid);
  out.bound = std::sqrt(out.alpha * out.beta) / (2.0 * kPi);
  return out;
}

NoiseReport empirical_noise_error(const PredictorKernel& pk, const TargetKernel& h,
                                  const Signal& x0, const Signal& eta, const TimeGrid& tgrid,
                                  int p, const SpectralGrid& grid, ConvolutionOptions opts) {
  NoiseReport report;
  report.p = p;
  report.nu = spectral_lp_norm(eta, p, grid);
  const TargetConvolution conv(h, opts);
  for (int i = 0; i < tgrid.n_points(); ++i) {
    const double t = tgrid.nodes()(i);
    report.base_error = std::max(report.base_error, std::abs(conv(x0, t) - predict(pk, x0, t)));
    report.noise_error = std::max(report.noise_error, std::abs(predict(pk, eta, t) - conv(eta, t)));
  }
  report.bound_slope = noise_bound(pk, h, 1.0, p, grid);
  report.within_bound = report.noise_error <= report.nu * report.bound_slope * (1.0 + 1e-9);
  return report;
}

}  // namespace horizon

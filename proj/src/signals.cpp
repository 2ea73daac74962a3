#include "horizon/signals.hpp"

#include "horizon/kernels.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <stdexcept>

namespace horizon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class ZeroModel final : public SignalModel {
 public:
  std::string kind() const override { return "zero"; }
  double value(double) const override { return 0.0; }
  extended value_ext(const extended&) const override { return 0; }
  std::optional<cplx> spectrum(double) const override { return cplx(0.0); }
  std::optional<double> weighted_energy(double, int) const override { return 0.0; }
};

class PoissonModel final : public SignalModel {
 public:
  explicit PoissonModel(double a) : a_(a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("poisson_signal: a must be > 0");
  }
  std::string kind() const override { return "poisson"; }
  double value(double t) const override { return a_ / (kPi * (a_ * a_ + t * t)); }
  extended value_ext(const extended& t) const override {
    const extended a = a_;
    return a / (boost::math::constants::pi<extended>() * (a * a + t * t));
  }
  std::optional<cplx> spectrum(double w) const override { return std::exp(-a_ * std::abs(w)); }
  double decay_rate() const override { return a_; }
  std::optional<double> weighted_energy(double r, int sign) const override {
    // int e^{(sign r - 2a)|omega|} d omega
    const double rate = 2.0 * a_ - sign * r;
    return rate > 0.0 ? 2.0 / rate : kInf;
  }
  std::optional<std::pair<double, double>> time_window() const override {
    return std::pair{-1e3, 1e3};
  }
  nlohmann::json params() const override { return {{"a", a_}}; }

 private:
  double a_;
};

class GaussianModel final : public SignalModel {
 public:
  explicit GaussianModel(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("gaussian_signal: sigma must be > 0");
  }
  std::string kind() const override { return "gaussian"; }
  double value(double t) const override {
    const double z = t / sigma_;
    return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * kPi));
  }
  extended value_ext(const extended& t) const override {
    const extended z = t / sigma_;
    return exp(-z * z / 2) / (sigma_ * sqrt(2 * boost::math::constants::pi<extended>()));
  }
  std::optional<cplx> spectrum(double w) const override {
    const double z = sigma_ * w;
    return std::exp(-0.5 * z * z);
  }
  std::optional<double> weighted_energy(double r, int sign) const override {
    // 2 int_0^inf e^{sign r w - sigma^2 w^2} dw
    // e^{c^2} and erfc(c) leave the double range separately for large c
    const extended c = extended(r) / (2 * sigma_);
    const extended e = exp(c * c) * boost::math::erfc(extended(-sign) * c);
    return std::sqrt(kPi) / sigma_ * e.convert_to<double>();
  }
  std::optional<std::pair<double, double>> time_window() const override {
    return std::pair{-40.0 * sigma_, 40.0 * sigma_};
  }
  nlohmann::json params() const override { return {{"sigma", sigma_}}; }

 private:
  double sigma_;
};

class CosineModulatedPoissonModel final : public SignalModel {
 public:
  CosineModulatedPoissonModel(double a, double omega0) : base_(a), a_(a), omega0_(omega0) {}
  std::string kind() const override { return "cosine_modulated_poisson"; }
  double value(double t) const override { return base_.value(t) * std::cos(omega0_ * t); }
  extended value_ext(const extended& t) const override {
    return base_.value_ext(t) * cos(omega0_ * t);
  }
  std::optional<cplx> spectrum(double w) const override {
    return 0.5 * (std::exp(-a_ * std::abs(w - omega0_)) + std::exp(-a_ * std::abs(w + omega0_)));
  }
  double decay_rate() const override { return a_; }
  std::optional<std::pair<double, double>> time_window() const override {
    return base_.time_window();
  }
  nlohmann::json params() const override { return {{"a", a_}, {"omega0", omega0_}}; }

 private:
  PoissonModel base_;
  double a_;
  double omega0_;
};

class SuperpositionModel final : public SignalModel {
 public:
  explicit SuperpositionModel(std::vector<std::pair<double, Signal>> terms)
      : terms_(std::move(terms)) {}
  std::string kind() const override { return "superposition"; }
  double value(double t) const override {
    double acc = 0.0;
    for (const auto& [c, x] : terms_) acc += c * x(t);
    return acc;
  }
  extended value_ext(const extended& t) const override {
    extended acc = 0;
    for (const auto& [c, x] : terms_) acc += c * x(t);
    return acc;
  }
  std::optional<cplx> spectrum(double w) const override {
    cplx acc = 0.0;
    for (const auto& [c, x] : terms_) {
      const auto s = x.spectrum(w);
      if (!s) return std::nullopt;
      acc += c * *s;
    }
    return acc;
  }
  double decay_rate() const override {
    double rate = kInf;
    for (const auto& [c, x] : terms_)
      if (c != 0.0) rate = std::min(rate, x.decay_rate());
    return rate;
  }
  std::optional<std::pair<double, double>> time_window() const override {
    std::optional<std::pair<double, double>> out;
    for (const auto& [c, x] : terms_) {
      const auto w = x.model().time_window();
      if (!w) return std::nullopt;
      out = out ? std::pair{std::min(out->first, w->first), std::max(out->second, w->second)} : *w;
    }
    return out;
  }
  nlohmann::json params() const override {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [c, x] : terms_) list.push_back({{"coef", c}, {"signal", x.to_json()}});
    return {{"terms", list}};
  }

 private:
  std::vector<std::pair<double, Signal>> terms_;
};

class ChirpNoiseModel final : public SignalModel {
 public:
  ChirpNoiseModel(double lo, double hi, double amplitude, double rate)
      : lo_(lo), hi_(hi), amplitude_(amplitude), rate_(rate) {
    if (!(lo >= 0.0) || !(hi > lo)) throw std::invalid_argument("chirp_noise: need 0 <= lo < hi");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("chirp_noise: bad amplitude");
  }
  std::string kind() const override { return "chirp_noise"; }

  double value(double t) const override {
    // (A/pi) int_lo^hi w(v) cos(v t - c v^2) dv
    const double phase_span = (hi_ - lo_) * (std::abs(t) + 2.0 * std::abs(rate_) * hi_);
    const int panels = std::max(16, static_cast<int>(std::ceil(phase_span / 2.0)));
    const auto rule = composite_gauss_legendre(lo_, hi_, panels);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < rule.size(); ++j) {
      const double v = rule.nodes(j);
      acc += rule.weights(j) * envelope(v) * std::cos(v * t - rate_ * v * v);
    }
    return amplitude_ * acc / kPi;
  }
  std::optional<cplx> spectrum(double w) const override {
    const double v = std::abs(w);
    return amplitude_ * envelope(v) * std::polar(1.0, -rate_ * w * v);
  }
  nlohmann::json params() const override {
    return {{"band", {lo_, hi_}}, {"amplitude", amplitude_}, {"chirp_rate", rate_}};
  }

 private:
  double envelope(double v) const {
    const double u = (2.0 * v - (lo_ + hi_)) / (hi_ - lo_);
    return std::exp(1.0) * BumpDerivatives::instance()(0, u);
  }
  double lo_, hi_, amplitude_, rate_;
};

}  // namespace

Signal::Signal(std::shared_ptr<const SignalModel> model) : model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("Signal: null model");
}

Eigen::VectorXcd Signal::spectrum_on(const SpectralGrid& grid) const {
  Eigen::VectorXcd out(grid.nodes().size());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const auto s = model_->spectrum(grid.nodes()(j));
    if (!s) {
      const auto window = model_->time_window();
      if (!window) throw std::domain_error("signal '" + kind() + "' has no spectrum");
      return fourier_transform([this](double t) { return model_->value(t); }, window->first,
                               window->second, grid);
    }
    out(j) = *s;
  }
  return out;
}

nlohmann::json Signal::to_json() const { return {{"kind", kind()}, {"params", model_->params()}}; }

Signal Signal::from_json(const nlohmann::json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  const nlohmann::json params = spec.value("params", nlohmann::json::object());
  if (kind == "zero") return zero_signal();
  if (kind == "poisson") return poisson_signal(params.at("a").get<double>());
  if (kind == "gaussian") return gaussian_signal(params.at("sigma").get<double>());
  if (kind == "cosine_modulated_poisson")
    return cosine_modulated_poisson(params.at("a").get<double>(), params.at("omega0").get<double>());
  if (kind == "superposition") {
    std::vector<std::pair<double, Signal>> terms;
    for (const auto& term : params.at("terms"))
      terms.emplace_back(term.at("coef").get<double>(), from_json(term.at("signal")));
    return superposition(std::move(terms));
  }
  if (kind == "chirp_noise") {
    const auto band = params.at("band");
    return chirp_noise(band.at(0).get<double>(), band.at(1).get<double>(),
                       params.value("amplitude", 1.0), params.value("chirp_rate", 0.0));
  }
  throw std::invalid_argument("unknown signal kind '" + kind + "'");
}

Signal zero_signal() { return Signal(std::make_shared<ZeroModel>()); }
Signal poisson_signal(double a) { return Signal(std::make_shared<PoissonModel>(a)); }
Signal gaussian_signal(double sigma) { return Signal(std::make_shared<GaussianModel>(sigma)); }
Signal cosine_modulated_poisson(double a, double omega0) {
  return Signal(std::make_shared<CosineModulatedPoissonModel>(a, omega0));
}
Signal superposition(std::vector<std::pair<double, Signal>> terms) {
  return Signal(std::make_shared<SuperpositionModel>(std::move(terms)));
}
Signal chirp_noise(double omega0, double omega1, double amplitude, double chirp_rate) {
  return Signal(std::make_shared<ChirpNoiseModel>(omega0, omega1, amplitude, chirp_rate));
}

ClassReport class_norm(const Signal& x, double r, int sign, const std::optional<SpectralGrid>& grid) {
  const WeightedNorm weight(r, sign);
  ClassReport report;
  report.r = r;
  report.sign = sign;
  if (const auto closed = x.model().weighted_energy(r, sign)) {
    report.norm_sq = *closed;
  } else {
    const SpectralGrid g = grid ? *grid : default_spectral_grid(r);
    try {
      report.norm_sq = weighted_norm_sq(x.spectrum_on(g), weight, g);
    } catch (const std::domain_error& e) {
      if (std::string(e.what()) != "weight/decay mismatch") throw;
      report.norm_sq = kInf;
    }
  }
  report.member = std::isfinite(report.norm_sq);
  report.norm = std::sqrt(report.norm_sq);
  report.unit_ball = report.member && report.norm <= 1.0;
  return report;
}

double spectral_lp_norm(const Signal& eta, int p, const SpectralGrid& grid) {
  if (p != 1 && p != 2) throw std::invalid_argument("noise norm index p must be 1 or 2");
  return lp_norm(eta.spectrum_on(grid), p, grid);
}

Signal add_noise(const Signal& x0, const Signal& eta, double nu, int p, const SpectralGrid& grid) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("add_noise: nu must be >= 0");
  const double raw = spectral_lp_norm(eta, p, grid);
  if (!(raw > 0.0)) throw std::domain_error("add_noise: noise has zero spectrum on the grid");
  if (nu == 0.0) return x0;
  return superposition({{1.0, x0}, {nu / raw, eta}});
}

}  // namespace horizon

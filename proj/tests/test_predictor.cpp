#include "oracle.hpp"

#include "horizon/experiment.hpp"
#include "horizon/predictor.hpp"

#include <doctest.h>

#include <cmath>
#include <mutex>

using namespace horizon;

namespace {

// Records every time at which the signal is read.
class RecordingModel final : public SignalModel {
 public:
  explicit RecordingModel(Signal inner) : inner_(std::move(inner)) {}
  std::string kind() const override { return "recording"; }
  double value(double t) const override {
    note(t);
    return inner_(t);
  }
  extended value_ext(const extended& t) const override {
    note(t.convert_to<double>());
    return inner_(t);
  }
  double latest() const { return latest_; }
  double earliest() const { return earliest_; }
  long count() const { return count_; }

 private:
  void note(double t) const {
    std::lock_guard<std::mutex> lock(mutex_);
    latest_ = std::max(latest_, t);
    earliest_ = std::min(earliest_, t);
    ++count_;
  }
  Signal inner_;
  mutable std::mutex mutex_;
  mutable double latest_ = -INFINITY;
  mutable double earliest_ = INFINITY;
  mutable long count_ = 0;
};

const TargetKernel& canonical_kernel() {
  static const TargetKernel h = bump_kernel(0.5, 0.1);
  return h;
}

}  // namespace

TEST_SUITE("predictor") {

TEST_CASE("predictor kernel support and delay identity") {
  const auto& h = canonical_kernel();
  const PredictorKernel p0(h, Polynomial());
  for (double t : {0.05, 0.2, 0.45, 0.59}) CHECK(p0(t).real() == doctest::Approx(h(t - 0.5)).epsilon(1e-14));
  const PredictorKernel p6(h, taylor_psi(0.5, 6));
  for (const auto* pk : {&p0, &p6}) {
    CHECK((*pk)(-0.01) == cplx(0.0));
    CHECK((*pk)(pk->tau() + 0.01) == cplx(0.0));
    CHECK(pk->tau() == doctest::Approx(0.6));
  }
  CHECK_THROWS_AS(PredictorKernel(h, taylor_psi(0.5, kMaxDerivative + 1)), std::domain_error);
}

TEST_CASE("assembled kernel transform equals psi times Q") {
  const auto& h = canonical_kernel();
  const Eigen::VectorXd omegas = (Eigen::VectorXd(3) << 0.0, 1.0, 3.0).finished();
  for (int d : {0, 4, 10}) {
    const PredictorKernel pk(h, projection_psi(0.5, 2.0, d, Precision::Extended));
    const auto F = pk.tap_spectrum(omegas);
    for (int i = 0; i < omegas.size(); ++i) {
      const cplx expected = pk.transfer(omegas(i));
      CHECK(std::abs(F(i) - expected) < 1e-8 * std::abs(expected));
    }
    // the same identity through an independent double quadrature at low degree
    if (d == 0) {
      const double re = oracle::adaptive_simpson([&](double t) { return pk(t).real() * std::cos(3.0 * t); }, 0.0, 0.6);
      const double im = oracle::adaptive_simpson([&](double t) { return -pk(t).real() * std::sin(3.0 * t); }, 0.0, 0.6);
      CHECK(std::abs(cplx(re, im) - pk.transfer(3.0)) < 1e-9);
    }
  }
}

TEST_CASE("target matches adaptive quadrature and the spectral identity") {
  const auto& h = canonical_kernel();
  const auto x = poisson_signal(1.5);
  const double oracle_value =
      oracle::adaptive_simpson([&](double u) { return h(u) * x(-u); }, -0.5, 0.1, 1e-14);
  CHECK(target(h, x, 0.0) == doctest::Approx(oracle_value).epsilon(1e-9));
  CHECK(target(h, zero_signal(), 0.3) == 0.0);

  const SpectralGrid grid(64.0, 4096);
  const cplx y0 = grid.integrate(h_spectrum(h, grid).cwiseProduct(x.spectrum_on(grid))) / (2.0 * kPi);
  CHECK(std::abs(y0.real() - target(h, x, 0.0)) < 1e-6);
}

TEST_CASE("predictions") {
  const auto& h = canonical_kernel();
  const auto x = poisson_signal(1.5);
  const PredictorKernel p0(h, Polynomial());
  CHECK(predict(p0, zero_signal(), 0.0) == 0.0);
  for (double t : {-1.0, 0.0, 0.8})
    CHECK(predict(p0, x, t) == doctest::Approx(target(h, x, t - 0.5)).epsilon(1e-12));
}

TEST_CASE("prediction quadrature is converged at the highest degree") {
  const auto& h = canonical_kernel();
  const auto x = poisson_signal(1.5);
  ConvolutionOptions fine;
  fine.flat_step = 0.01;
  fine.flat_half_width = 4.5;
  for (int d : {10, 14, 16}) {
    const auto psi = projection_psi(0.5, 2.0, d, Precision::Extended);
    const PredictorKernel coarse_pk(h, psi), fine_pk(h, psi, fine);
    // at d = 16 the working precision, not the rule, limits agreement
    const double tol = d <= 14 ? 1e-12 : kQuadratureBudget;
    for (double t : {-2.0, 0.0, 1.3})
      CHECK(std::abs(predict(coarse_pk, x, t) - predict(fine_pk, x, t)) < tol);
  }
}

TEST_CASE("predict reads only the memory window before t") {
  const auto& h = canonical_kernel();
  auto model = std::make_shared<RecordingModel>(poisson_signal(1.5));
  const Signal x(model);
  const PredictorKernel pk(h, taylor_psi(0.5, 8));
  const double t = 0.25;
  predict(pk, x, t);
  CHECK(model->count() > 0);
  CHECK(model->latest() <= t);
  CHECK(model->earliest() >= t - pk.tau());
  // the rule stops short of the endpoints, where the kernel is flat
  CHECK(t - model->earliest() > pk.tau() - 1e-3);
  const PastWindow past(x, t, pk.tau());
  CHECK_THROWS_AS(past(-1e-12), std::out_of_range);
  CHECK_THROWS_AS(past(pk.tau() + 1e-12), std::out_of_range);
  CHECK(past.memory() == pk.tau());
}

TEST_CASE("prediction is linear in the signal") {
  const auto& h = canonical_kernel();
  const PredictorKernel pk(h, projection_psi(0.5, 2.0, 10, Precision::Extended));
  const auto x1 = poisson_signal(1.5), x2 = gaussian_signal(0.8);
  const auto mix = superposition({{2.0, x1}, {-3.0, x2}});
  for (double t : {-1.5, 0.2, 1.9}) {
    const double lhs = predict(pk, mix, t);
    const double rhs = 2.0 * predict(pk, x1, t) - 3.0 * predict(pk, x2, t);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("error bound holds on the canonical configuration") {
  const auto& h = canonical_kernel();
  const auto x = poisson_signal(1.5);
  const TimeGrid tg(-2.0, 2.0, 41);
  const SpectralGrid grid(64.0, 4096);
  double previous = INFINITY;
  for (int d = 0; d <= 10; ++d) {
    const PredictorKernel pk(h, projection_psi(0.5, 2.0, d, Precision::Extended));
    const auto res = run_prediction(pk, x, tg, 2.0, grid, "projection");
    CHECK(res.sup_error <= res.bound * (1.0 + 1e-6) + 1e-8);
    CHECK(res.sup_error <= previous + 1e-10);
    previous = res.sup_error;
  }
  const PredictorKernel taylor10(h, taylor_psi(0.5, 10));
  const auto res = run_prediction(taylor10, x, tg, 2.0, grid, "taylor");
  CHECK(res.sup_error <= res.bound);
  CHECK(res.summary().at("d") == 10);
  CHECK(res.to_csv().rfind("t,y,y_hat,abs_err\n", 0) == 0);
}

TEST_CASE("error bound edge cases") {
  const SpectralGrid grid(64.0, 4096);
  const auto x = poisson_signal(1.5);
  const auto h0 = bump_kernel(0.0, 0.4);
  CHECK(error_bound(PredictorKernel(h0, Polynomial()), x, 2.0, grid) == 0.0);

  const auto& h = canonical_kernel();
  const double b6 = error_bound(PredictorKernel(h, taylor_psi(0.5, 6)), x, 2.0, grid);
  const double b8 = error_bound(PredictorKernel(h, taylor_psi(0.5, 8)), x, 2.0, grid);
  CHECK(b6 > 0.0);
  CHECK(std::isfinite(b6));
  CHECK(b8 <= 0.5 * b6);

  CHECK(beta_of(h, x, 2.0, grid) > 0.0);
  CHECK_THROWS_WITH_AS(beta_of(h, poisson_signal(0.9), 2.0, grid), "signal outside class",
                       OutsideClassError);
}

TEST_CASE("noise bound") {
  const auto& h = canonical_kernel();
  const SpectralGrid grid(64.0, 4096);
  const PredictorKernel p4(h, projection_psi(0.5, 2.0, 4, Precision::Extended));
  const PredictorKernel p10(h, projection_psi(0.5, 2.0, 10, Precision::Extended));
  for (int p : {1, 2}) {
    CHECK(noise_bound(p4, h, 0.0, p, grid) == 0.0);
    CHECK(noise_bound(p4, h, 0.2, p, grid) == 2.0 * noise_bound(p4, h, 0.1, p, grid));
    CHECK(noise_bound(p10, h, 0.1, p, grid) > noise_bound(p4, h, 0.1, p, grid));
  }
  CHECK_THROWS(noise_bound(p4, h, -0.1, 2, grid));
  CHECK_THROWS(noise_bound(p4, h, 0.1, 3, grid));
}

TEST_CASE("empirical noise error") {
  const auto& h = canonical_kernel();
  const SpectralGrid grid(64.0, 4096);
  const TimeGrid tg(-2.0, 2.0, 21);
  const auto x0 = poisson_signal(1.5);
  const PredictorKernel pk(h, projection_psi(0.5, 2.0, 6, Precision::Extended));

  const auto none = empirical_noise_error(pk, h, x0, zero_signal(), tg, 2, grid);
  CHECK(none.noise_error == 0.0);

  const auto eta = chirp_noise(16.0, 32.0, 1.0, 0.05);
  const auto eta_scaled = superposition({{0.1 / spectral_lp_norm(eta, 2, grid), eta}});
  const auto report = empirical_noise_error(pk, h, x0, eta_scaled, tg, 2, grid);
  CHECK(report.nu == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(report.within_bound);
  CHECK(report.base_error > 0.0);

  const auto doubled = superposition({{2.0, eta_scaled}});
  const auto report2 = empirical_noise_error(pk, h, x0, doubled, tg, 2, grid);
  CHECK(report2.noise_error == doctest::Approx(2.0 * report.noise_error).epsilon(1e-12));

  // time-domain noise response against the spectral formula
  const double t = 0.4;
  Eigen::VectorXcd integrand = (pk.transfer_on(grid) - h_spectrum(h, grid)).cwiseProduct(eta.spectrum_on(grid));
  for (int k = 0; k < grid.n_points(); ++k) integrand(k) *= std::polar(1.0, grid.nodes()(k) * t);
  const double spectral = (grid.integrate(integrand) / (2.0 * kPi)).real();
  CHECK(std::abs(predict(pk, eta, t) - target(h, eta, t) - spectral) < 1e-9);
}

}  // TEST_SUITE

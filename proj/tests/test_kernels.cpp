#include "oracle.hpp"

#include "horizon/kernels.hpp"

#include <doctest.h>

#include <cmath>

using namespace horizon;

namespace {

double max_abs_derivative(const TargetKernel& h, int k) {
  double m = 0.0;
  const int n = 2000;
  for (int i = 1; i < n; ++i) {
    const double t = -h.T() + h.tau() * i / n;
    m = std::max(m, std::abs(h.derivative(k, t)));
  }
  return m;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("bump numerators follow the exact recurrence") {
  const auto& g = BumpDerivatives::instance();
  // P_1 = -2u, P_2 = 6u^4 - 2
  CHECK(g.numerator(1).size() == 2);
  CHECK(g.numerator(1)[1] == -2);
  CHECK(g.numerator(2)[0] == -2);
  CHECK(g.numerator(2)[4] == 6);
  const double mass =
      oracle::adaptive_simpson([&g](double u) { return g(0, u); }, -1.0, 1.0, 1e-15, 256);
  CHECK(g.mass() == doctest::Approx(mass).epsilon(1e-13));
}

TEST_CASE("bump kernel values") {
  const auto h = bump_kernel(0.5, 0.1);
  CHECK(h(-0.5) == 0.0);
  CHECK(h(0.1) == 0.0);
  CHECK(h(0.7) == 0.0);
  const double mid = -0.2;
  CHECK(h(mid) > h(mid + 0.05));
  CHECK(h(mid) > h(mid - 0.05));
  const double mass = oracle::adaptive_simpson([&h](double t) { return h(t); }, -0.5, 0.1);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  const auto unit = bump_kernel(1.0, 1.0);
  CHECK(unit(0.0) / unit.normalization() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(bump_kernel(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("derivatives vanish outside the support and at the symmetric centre") {
  const auto h = bump_kernel(0.3, 0.3);
  for (int k = 1; k <= kMaxDerivative; ++k) {
    CHECK(h.derivative(k, -0.31) == 0.0);
    CHECK(h.derivative(k, 0.31) == 0.0);
  }
  CHECK(std::abs(h.derivative(1, 0.0)) < 1e-12);
  CHECK_THROWS_AS(h.derivative(kMaxDerivative + 1, 0.0), std::domain_error);
}

TEST_CASE("derivatives match richardson finite differences") {
  const auto h = bump_kernel(0.5, 0.1);
  for (int k = 1; k <= 6; ++k) {
    for (int i = 0; i < 20; ++i) {
      const double t = -0.5 + 0.6 * (0.05 + 0.9 * i / 19.0);
      const double fd =
          oracle::richardson_derivative([&](double s) { return h.derivative(k - 1, s); }, t, 1e-5);
      const double exact = h.derivative(k, t);
      CHECK(std::abs(exact - fd) <= 1e-5 * std::abs(exact));
    }
  }
}

TEST_CASE("extended and double derivatives agree") {
  const auto h = bump_kernel(0.5, 0.1);
  for (int k = 0; k <= kMaxDerivative; ++k) {
    const double scale = max_abs_derivative(h, k);
    for (double t : {-0.49, -0.3, -0.2, 0.0, 0.09}) {
      const double a = h.derivative(k, t);
      const double b = h.derivative(k, extended(t)).convert_to<double>();
      CHECK(std::abs(a - b) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("derivatives are flat at both endpoints") {
  const auto bump = bump_kernel(0.5, 0.1);
  const auto moll = mollify(named_prototype("triangle", 0.5, 0.1), 0.5, 0.1, 0.05);
  for (const auto* h : {&bump, &moll}) {
    for (int k = 0; k <= 8; ++k) {
      const double scale = max_abs_derivative(*h, k);
      for (double t : {-h->T() - 1e-9, -h->T() + 1e-9, h->theta() - 1e-9, h->theta() + 1e-9})
        CHECK(std::abs(h->derivative(k, t)) < 1e-6 * scale);
    }
  }
}

TEST_CASE("derivative spectrum equals (i omega)^k times the kernel spectrum") {
  const auto h = bump_kernel(0.5, 0.1);
  const Eigen::VectorXd omegas = Eigen::VectorXd::LinSpaced(12, 0.1, 10.0);
  const auto H = fourier_transform([&h](double t) { return h(t); }, -0.5, 0.1, omegas);
  for (int k = 1; k <= 6; ++k) {
    const auto Hk = derivative_spectrum(h, k, omegas);
    for (int i = 0; i < omegas.size(); ++i) {
      const cplx expected = std::pow(cplx(0.0, omegas(i)), k) * H(i);
      CHECK(std::abs(Hk(i) - expected) < 1e-8 * std::abs(expected));
    }
  }
}

TEST_CASE("mollifier has unit mass and support [-eps, eps]") {
  const double eps = 0.1;
  const double mass = oracle::adaptive_simpson([eps](double t) { return mollifier(eps, t); }, -eps, eps);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mollifier(eps, 0.1000001) == 0.0);
  CHECK(mollifier(eps, -0.1) == 0.0);
}

TEST_CASE("mollified kernels") {
  const double T = 0.5, theta = 0.5, eps = 0.1;
  const auto zero = mollify(Prototype{"zero", [](double) { return 0.0; }, {}}, T, theta, eps);
  for (double t : {-0.4, 0.0, 0.3}) CHECK(zero(t) == 0.0);

  const auto box = mollify(named_prototype("box", T, theta), T, theta, eps);
  for (int i = 0; i <= 10; ++i) {
    const double t = -T + 2 * eps + (T + theta - 4 * eps) * i / 10.0;
    CHECK(std::abs(box(t) - 1.0) < 1e-10);
  }
  CHECK(box(-T) == 0.0);
  CHECK(box(theta) == 0.0);

  const auto proto = named_prototype("triangle", T, theta);
  double previous = INFINITY;
  for (double e : {0.1, 0.05, 0.025}) {
    const auto he = mollify(proto, T, theta, e);
    const double err = std::sqrt(oracle::adaptive_simpson(
        [&](double t) {
          const double d = he(t) - proto.profile(t);
          return d * d;
        },
        -T, theta, 1e-12, 256));
    CHECK(err < previous);
    previous = err;
  }
  CHECK_THROWS_AS(mollify(proto, T, theta, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mollify(proto, T, theta, 0.0), std::invalid_argument);
}

TEST_CASE("mollified derivatives match finite differences") {
  const auto h = mollify(named_prototype("parabola", 0.5, 0.1), 0.5, 0.1, 0.1);
  for (int k = 1; k <= 4; ++k) {
    const double scale = max_abs_derivative(h, k);
    for (double t : {-0.42, -0.3, -0.2, -0.05, 0.05}) {
      const double fd =
          oracle::richardson_derivative([&](double s) { return h.derivative(k - 1, s); }, t, 1e-4);
      CHECK(std::abs(h.derivative(k, t) - fd) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("q is the causal shift of h") {
  const auto h = bump_kernel(0.5, 0.1);
  CHECK(h.q(-1e-3) == 0.0);
  CHECK(h.q(h.tau() + 1e-3) == 0.0);
  CHECK(h.q(0.3) == h(0.3 - 0.5));
}

TEST_CASE("q transform") {
  const auto h = bump_kernel(0.5, 0.1);
  CHECK(q_transform(h, 0.0).real() == doctest::Approx(1.0).epsilon(1e-12));
  for (double w : {0.5, 1.0, 5.0}) {
    const cplx H = q_transform(h, cplx(0.0, w)) * std::polar(1.0, w * h.T());
    const cplx F = fourier_transform([&h](double t) { return h(t); }, -0.5, 0.1,
                                     Eigen::VectorXd::Constant(1, w))(0);
    CHECK(std::abs(H - F) < 1e-10 * std::abs(F));
  }
  CHECK(std::abs(q_transform(h, cplx(0.0, 100.0))) < std::abs(q_transform(h, 0.0)));
  const SpectralGrid grid(64.0, 4096);
  CHECK(q_spectrum(h, grid).cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("kernel json round trip") {
  const auto h = mollify(named_prototype("box", 0.5, 0.2), 0.5, 0.2, 0.05);
  const auto back = TargetKernel::from_json(h.to_json());
  CHECK(back.to_json() == h.to_json());
  CHECK(back(0.0) == h(0.0));
  const auto b = TargetKernel::from_json({{"shape", "bump"}, {"T", 0.5}, {"theta", 0.1}});
  CHECK(b(-0.2) == bump_kernel(0.5, 0.1)(-0.2));
  CHECK_THROWS(TargetKernel::from_json({{"shape", "spline"}, {"T", 0.5}, {"theta", 0.1}}));
}

}  // TEST_SUITE

#pragma once

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <functional>
#include <numbers>
#include <vector>

namespace horizon {

using cplx = std::complex<double>;
using RealFunction = std::function<double(double)>;

inline constexpr double kPi = std::numbers::pi;

/// Points per Gauss-Legendre panel in every composite rule of the library.
inline constexpr int kPanelDegree = 16;

/// Nodes and weights of a quadrature rule over a finite interval.
template <typename Real>
struct BasicQuadratureRule {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> weights;

  Eigen::Index size() const { return nodes.size(); }
};

using QuadratureRule = BasicQuadratureRule<double>;

/// Gauss-Legendre rule on [-1, 1] with n points (Newton refinement of the
/// Legendre roots in the target precision).
template <typename Real>
BasicQuadratureRule<Real> gauss_legendre(int n) {
  using std::abs;
  using std::cos;
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  BasicQuadratureRule<Real> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Real pi = boost::math::constants::pi<Real>();
  const Real tol = 4 * std::numeric_limits<Real>::epsilon();
  auto legendre = [n](const Real& x, Real& p_n, Real& dp_n) {
    Real p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    p_n = p1;
    dp_n = n * (x * p1 - p0) / (x * x - 1);
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = cos(pi * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real p, dp;
    for (int iter = 0; iter < 200; ++iter) {
      legendre(x, p, dp);
      const Real dx = p / dp;
      x -= dx;
      if (abs(dx) <= tol) break;
    }
    legendre(x, p, dp);
    const Real w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0;
  return rule;
}

/// The kPanelDegree-point reference rule, built once per scalar type.
template <typename Real>
const BasicQuadratureRule<Real>& reference_panel() {
  static const BasicQuadratureRule<Real> rule = gauss_legendre<Real>(kPanelDegree);
  return rule;
}

/// Composite rule with `panels_per_piece` panels of kPanelDegree points on
/// each interval between consecutive (strictly increasing) breakpoints.
template <typename Real>
BasicQuadratureRule<Real> composite_gauss_legendre(const std::vector<Real>& breaks,
                                                   int panels_per_piece) {
  using std::isfinite;
  if (breaks.size() < 2) throw std::invalid_argument("composite rule needs two breakpoints");
  if (panels_per_piece < 1) throw std::invalid_argument("composite rule needs panels >= 1");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!isfinite(breaks[i])) throw std::domain_error("non-finite quadrature support");
    if (i > 0 && !(breaks[i] > breaks[i - 1]))
      throw std::invalid_argument("quadrature breakpoints must increase");
  }
  const auto& ref = reference_panel<Real>();
  const auto pieces = static_cast<Eigen::Index>(breaks.size()) - 1;
  const Eigen::Index n = pieces * panels_per_piece * kPanelDegree;
  BasicQuadratureRule<Real> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  Eigen::Index out = 0;
  for (Eigen::Index piece = 0; piece < pieces; ++piece) {
    const Real a = breaks[piece];
    const Real h = (breaks[piece + 1] - a) / panels_per_piece;
    for (int p = 0; p < panels_per_piece; ++p) {
      const Real mid = a + (Real(p) + Real(0.5)) * h;
      for (int j = 0; j < kPanelDegree; ++j) {
        rule.nodes(out) = mid + h / 2 * ref.nodes(j);
        rule.weights(out) = h / 2 * ref.weights(j);
        ++out;
      }
    }
  }
  return rule;
}

/// Composite rule: `panels` equal panels of kPanelDegree points on [a, b].
QuadratureRule composite_gauss_legendre(double a, double b, int panels);

/// Rule for integrands that vanish to all orders at both ends of [a, b]:
/// substitutes t = mid + half tanh(sigma) and applies the trapezoid rule on
/// sigma in [-sigma_max, sigma_max]. For bump-type integrands the transformed
/// integrand is entire in sigma and the rule converges geometrically in 1/step.
template <typename Real>
BasicQuadratureRule<Real> flat_endpoint_rule(const Real& a, const Real& b, double step = 0.02,
                                             double sigma_max = 4.0) {
  using std::cosh;
  using std::tanh;
  if (!(b > a)) throw std::invalid_argument("flat_endpoint_rule: need a < b");
  const int half_count = static_cast<int>(std::ceil(sigma_max / step));
  const Real mid = (a + b) / 2;
  const Real half = (b - a) / 2;
  BasicQuadratureRule<Real> rule;
  rule.nodes.resize(2 * half_count + 1);
  rule.weights.resize(2 * half_count + 1);
  for (int j = -half_count; j <= half_count; ++j) {
    const Real sigma = Real(j) * Real(step);
    const Real c = cosh(sigma);
    rule.nodes(j + half_count) = mid + half * tanh(sigma);
    rule.weights(j + half_count) = half * Real(step) / (c * c);
  }
  return rule;
}

/// Symmetric truncated frequency grid [-omega_max, omega_max] carrying a
/// composite Gauss-Legendre rule. The panel count is even so that omega = 0
/// is a panel boundary (the |omega| kink of exponential weights).
class SpectralGrid {
 public:
  /// n_points must be a positive multiple of 2 * kPanelDegree.
  SpectralGrid(double omega_max, int n_points);

  double omega_max() const { return omega_max_; }
  int n_points() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Quadrature of samples given on the nodes.
  template <typename Derived>
  auto integrate(const Eigen::DenseBase<Derived>& samples) const {
    return (weights_.array().template cast<typename Derived::Scalar>() *
            samples.derived().array())
        .sum();
  }

 private:
  double omega_max_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

/// Smallest omega_max such that omega^(2 degree) e^{-r omega} has dropped
/// below 1e-16 of its peak (degree 0 gives e^{-r omega_max} < 1e-16).
double default_omega_max(double r, int degree = 0);

/// Grid with default_omega_max(r, degree) and the given resolution.
SpectralGrid default_spectral_grid(double r, int degree = 0, int n_points = 4096);

/// Uniform time grid with n_points nodes from t_min to t_max inclusive.
class TimeGrid {
 public:
  TimeGrid(double t_min, double t_max, int n_points);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double step() const { return step_; }
  int n_points() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }

 private:
  double t_min_;
  double t_max_;
  double step_;
  Eigen::VectorXd nodes_;
};

/// Controls the time-side resolution of the transforms below.
struct TransformOptions {
  /// Lower bound on the number of panels over the support.
  int min_panels = 64;
  /// Upper bound on the phase advance omega * panel_width of one panel.
  double max_phase_per_panel = 2.0;
};

/// Panel count for a support of the given length resolved up to |omega|.
int transform_panels(double length, double omega_max, const TransformOptions& opts = {});

/// F(i omega_k) = int_a^b e^{-i omega_k t} f(t) dt at every grid node.
Eigen::VectorXcd fourier_transform(const RealFunction& f, double a, double b,
                                   const SpectralGrid& grid,
                                   const TransformOptions& opts = {});

/// F(i omega) at arbitrary frequencies.
Eigen::VectorXcd fourier_transform(const RealFunction& f, double a, double b,
                                   const Eigen::VectorXd& omegas,
                                   const TransformOptions& opts = {});

/// int_0^b e^{-z t} f(t) dt for a causal f supported in [0, b].
cplx laplace_transform(const RealFunction& f, double b, cplx z,
                       const TransformOptions& opts = {});

/// |‖f‖² - (1/2π)‖F‖²_grid| / ‖f‖² for f supported in [a, b].
double parseval_check(const RealFunction& f, double a, double b, const SpectralGrid& grid,
                      const TransformOptions& opts = {});

/// Samples f at the rule's nodes; throws std::domain_error on NaN/inf.
Eigen::VectorXd sample(const RealFunction& f, const QuadratureRule& rule);

}  // namespace horizon

#include "horizon/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace horizon {

QuadratureRule composite_gauss_legendre(double a, double b, int panels) {
  return composite_gauss_legendre<double>(std::vector<double>{a, b}, panels);
}

SpectralGrid::SpectralGrid(double omega_max, int n_points) : omega_max_(omega_max) {
  if (!(omega_max > 0.0) || !std::isfinite(omega_max))
    throw std::invalid_argument("SpectralGrid: omega_max must be positive and finite");
  if (n_points <= 0 || n_points % (2 * kPanelDegree) != 0)
    throw std::invalid_argument("SpectralGrid: n_points must be a positive multiple of " +
                                std::to_string(2 * kPanelDegree));
  const int half_panels = n_points / (2 * kPanelDegree);
  auto half = composite_gauss_legendre(0.0, omega_max, half_panels);
  const Eigen::Index m = half.size();
  nodes_.resize(2 * m);
  weights_.resize(2 * m);
  // mirror the positive half so the node set is exactly symmetric
  nodes_.tail(m) = half.nodes;
  weights_.tail(m) = half.weights;
  nodes_.head(m) = -half.nodes.reverse();
  weights_.head(m) = half.weights.reverse();
}

double default_omega_max(double r, int degree) {
  if (!(r > 0.0)) throw std::invalid_argument("default_omega_max: r must be positive");
  const double log_floor = 16.0 * std::log(10.0);
  if (degree <= 0) return log_floor / r;
  // log of omega^(2 degree) e^{-r omega}, relative to its peak at 2 degree / r
  const double m = 2.0 * degree;
  const double peak = m / r;
  auto rel = [&](double w) { return m * std::log(w / peak) - r * (w - peak); };
  double lo = peak, hi = 2.0 * peak + log_floor / r;
  while (rel(hi) > -log_floor) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (rel(mid) > -log_floor ? lo : hi) = mid;
  }
  return std::max(hi, log_floor / r);
}

SpectralGrid default_spectral_grid(double r, int degree, int n_points) {
  return SpectralGrid(default_omega_max(r, degree), n_points);
}

TimeGrid::TimeGrid(double t_min, double t_max, int n_points) : t_min_(t_min), t_max_(t_max) {
  if (!(t_min < t_max)) throw std::invalid_argument("TimeGrid: t_min must be below t_max");
  if (n_points < 2) throw std::invalid_argument("TimeGrid: need at least two points");
  step_ = (t_max - t_min) / (n_points - 1);
  nodes_.resize(n_points);
  for (int i = 0; i < n_points; ++i) nodes_(i) = t_min + i * step_;
  nodes_(n_points - 1) = t_max;
}

int transform_panels(double length, double omega_max, const TransformOptions& opts) {
  const double by_phase = std::ceil(std::abs(omega_max) * length / opts.max_phase_per_panel);
  return std::max(opts.min_panels, static_cast<int>(by_phase));
}

Eigen::VectorXd sample(const RealFunction& f, const QuadratureRule& rule) {
  Eigen::VectorXd values(rule.size());
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    values(j) = f(rule.nodes(j));
    if (!std::isfinite(values(j)))
      throw std::domain_error("non-finite function value at t = " +
                              std::to_string(rule.nodes(j)));
  }
  return values;
}

namespace {

void check_support(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("transform requires a finite support");
  if (!(b > a)) throw std::invalid_argument("transform support must satisfy a < b");
}

}  // namespace

Eigen::VectorXcd fourier_transform(const RealFunction& f, double a, double b,
                                   const Eigen::VectorXd& omegas,
                                   const TransformOptions& opts) {
  check_support(a, b);
  const double wmax = omegas.size() ? omegas.cwiseAbs().maxCoeff() : 0.0;
  const auto rule = composite_gauss_legendre(a, b, transform_panels(b - a, wmax, opts));
  const Eigen::VectorXd fw = sample(f, rule).cwiseProduct(rule.weights);
  // shift the phase origin to the support midpoint to keep the sums well scaled
  const double c = 0.5 * (a + b);
  const Eigen::ArrayXd dt = rule.nodes.array() - c;
  Eigen::VectorXcd out(omegas.size());
  for (Eigen::Index k = 0; k < omegas.size(); ++k) {
    const double w = omegas(k);
    const double re = (fw.array() * (w * dt).cos()).sum();
    const double im = -(fw.array() * (w * dt).sin()).sum();
    out(k) = std::polar(1.0, -w * c) * cplx(re, im);
  }
  return out;
}

Eigen::VectorXcd fourier_transform(const RealFunction& f, double a, double b,
                                   const SpectralGrid& grid, const TransformOptions& opts) {
  return fourier_transform(f, a, b, grid.nodes(), opts);
}

cplx laplace_transform(const RealFunction& f, double b, cplx z, const TransformOptions& opts) {
  if (!std::isfinite(b)) throw std::domain_error("laplace_transform requires bounded support");
  if (!(b > 0.0)) throw std::invalid_argument("laplace_transform support [0, b] needs b > 0");
  const auto rule = composite_gauss_legendre(0.0, b, transform_panels(b, std::abs(z), opts));
  const Eigen::VectorXd fw = sample(f, rule).cwiseProduct(rule.weights);
  cplx sum = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) sum += fw(j) * std::exp(-z * rule.nodes(j));
  return sum;
}

double parseval_check(const RealFunction& f, double a, double b, const SpectralGrid& grid,
                      const TransformOptions& opts) {
  check_support(a, b);
  const auto rule = composite_gauss_legendre(a, b, transform_panels(b - a, 0.0, opts));
  const Eigen::VectorXd v = sample(f, rule);
  const double time_energy = rule.weights.dot(v.cwiseAbs2());
  if (!(time_energy > 0.0)) throw std::domain_error("parseval_check: zero function");
  const Eigen::VectorXcd spec = fourier_transform(f, a, b, grid, opts);
  const double freq_energy = grid.integrate(spec.cwiseAbs2()) / (2.0 * kPi);
  return std::abs(time_energy - freq_energy) / time_energy;
}

}  // namespace horizon

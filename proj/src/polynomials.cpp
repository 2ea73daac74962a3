#include "horizon/polynomials.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace horizon {

std::string to_string(ApproxMethod method) {
  return method == ApproxMethod::Taylor ? "taylor" : "projection";
}

ApproxMethod parse_method(std::string_view name) {
  if (name == "taylor") return ApproxMethod::Taylor;
  if (name == "projection") return ApproxMethod::Projection;
  throw std::invalid_argument("unknown approximation method '" + std::string(name) + "'");
}

Polynomial::Polynomial(Eigen::VectorXcd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() == 0) throw std::invalid_argument("Polynomial needs at least one coefficient");
}

cplx Polynomial::operator()(cplx z) const {
  cplx acc = coeffs_(coeffs_.size() - 1);
  for (Eigen::Index k = coeffs_.size() - 2; k >= 0; --k) acc = acc * z + coeffs_(k);
  return acc;
}

cplx Polynomial::power_sum(cplx z) const {
  cplx acc = 0.0, zk = 1.0;
  for (Eigen::Index k = 0; k < coeffs_.size(); ++k) {
    acc += coeffs_(k) * zk;
    zk *= z;
  }
  return acc;
}

Polynomial taylor_psi(double T, int d) {
  if (!std::isfinite(T) || T < 0.0) throw std::invalid_argument("taylor_psi: T must be >= 0");
  if (d < 0) throw std::invalid_argument("taylor_psi: degree must be >= 0");
  if (d > kMaxTaylorDegree) throw std::domain_error("taylor_psi: degree too large");
  Eigen::VectorXcd a(d + 1);
  double term = 1.0;
  for (int k = 0; k <= d; ++k) {
    if (k > 0) term *= T / k;
    a(k) = term;
  }
  return Polynomial(std::move(a));
}

template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> monomial_gram(const Real& r, int d) {
  if (d < 0) throw std::invalid_argument("monomial_gram: degree must be >= 0");
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> g(d + 1, d + 1);
  for (int j = 0; j <= d; ++j)
    for (int k = 0; k <= d; ++k) g(j, k) = signed_monomial_moment<Real>(j + k, r);
  return g;
}

namespace {

template <typename Real>
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// sqrt of the diagonal moments, the rescaling that makes every basis
/// monomial unit-norm before orthogonalization.
template <typename Real>
VectorR<Real> monomial_scales(const Real& r, int d) {
  using std::sqrt;
  VectorR<Real> s(d + 1);
  for (int k = 0; k <= d; ++k) s(k) = sqrt(monomial_moment<Real>(2 * k, r));
  return s;
}

/// Orthonormal basis in the rescaled monomial coordinates.
template <typename Real>
MatrixR<Real> scaled_orthonormal_basis(const Real& r, int d) {
  using std::sqrt;
  const VectorR<Real> s = monomial_scales(r, d);
  MatrixR<Real> g = monomial_gram(r, d);
  for (int j = 0; j <= d; ++j)
    for (int k = 0; k <= d; ++k) g(j, k) /= s(j) * s(k);

  const Real tol = 1000 * std::numeric_limits<Real>::epsilon();
  MatrixR<Real> q = MatrixR<Real>::Zero(d + 1, d + 1);
  for (int j = 0; j <= d; ++j) {
    VectorR<Real> v = VectorR<Real>::Unit(d + 1, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        const Real proj = v.dot(g * q.col(i));
        v -= proj * q.col(i);
      }
    }
    const Real norm_sq = v.dot(g * v);
    if (!(norm_sq > tol)) throw std::domain_error("increase precision or lower d");
    q.col(j) = v / sqrt(norm_sq);
  }
  return q;
}

}  // namespace

template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> orthonormal_basis(const Real& r, int d) {
  if (d < 0) throw std::invalid_argument("orthonormal_basis: degree must be >= 0");
  MatrixR<Real> q = scaled_orthonormal_basis(r, d);
  const VectorR<Real> s = monomial_scales(r, d);
  for (int k = 0; k <= d; ++k) q.row(k) /= s(k);
  return q;
}

namespace {

/// Multiplies by i^{-k}: the map from omega-coefficients to z-coefficients.
cplx rotate_to_z(double re, double im, int k) {
  switch (k % 4) {
    case 0: return {re, im};
    case 1: return {im, -re};
    case 2: return {-re, -im};
    default: return {-im, re};
  }
}

template <typename Real>
Polynomial project(const Real& T, const Real& r, int d) {
  const MatrixR<Real> q = scaled_orthonormal_basis(r, d);
  const VectorR<Real> s = monomial_scales(r, d);
  VectorR<Real> target_re(d + 1), target_im(d + 1);
  for (int k = 0; k <= d; ++k) {
    const std::complex<Real> e = exponential_moment<Real>(k, r, T);
    target_re(k) = e.real() / s(k);
    target_im(k) = e.imag() / s(k);
  }
  // coefficients of the projection in the scaled monomial coordinates
  const VectorR<Real> beta_re = q * (q.transpose() * target_re);
  const VectorR<Real> beta_im = q * (q.transpose() * target_im);

  Eigen::VectorXcd a(d + 1);
  for (int k = 0; k <= d; ++k) {
    const Real re = beta_re(k) / s(k);
    const Real im = beta_im(k) / s(k);
    a(k) = rotate_to_z(static_cast<double>(re), static_cast<double>(im), k);
    const double scale = std::max(1.0, std::abs(a(k)));
    if (std::abs(a(k).imag()) < 1e-10 * scale) a(k).imag(0.0);
  }
  return Polynomial(std::move(a));
}

}  // namespace

Polynomial projection_psi(double T, double r, int d, Precision precision) {
  if (!std::isfinite(T) || T < 0.0) throw std::invalid_argument("projection_psi: T must be >= 0");
  if (!(r > 0.0)) throw std::invalid_argument("projection_psi: r must be positive");
  if (d < 0) throw std::invalid_argument("projection_psi: degree must be >= 0");
  if (T == 0.0) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(d + 1);
    a(0) = 1.0;
    return Polynomial(std::move(a));
  }
  if (precision == Precision::Double) {
    if (d > kMaxDoubleProjectionDegree) throw std::domain_error("increase precision or lower d");
    return project<double>(T, r, d);
  }
  return project<extended>(extended(T), extended(r), d);
}

Polynomial make_psi(ApproxMethod method, double T, double r, int d, Precision precision) {
  return method == ApproxMethod::Taylor ? taylor_psi(T, d) : projection_psi(T, r, d, precision);
}

double alpha_of(const Polynomial& psi, double T, double r, const SpectralGrid& grid) {
  const auto& w = grid.nodes();
  Eigen::VectorXcd diff(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j)
    diff(j) = psi.at_i_omega(w(j)) - std::polar(1.0, w(j) * T);
  return weighted_norm_sq(diff, WeightedNorm(r, -1), grid);
}

template <typename Real>
Real alpha_closed_form(const Polynomial& psi, const Real& T, const Real& r) {
  const int d = psi.degree();
  // b_k = a_k i^k: coefficients of psi(i omega) as a polynomial in omega
  VectorR<Real> b_re(d + 1), b_im(d + 1);
  for (int k = 0; k <= d; ++k) {
    const cplx a = psi.coeff(k);
    cplx b;
    switch (k % 4) {
      case 0: b = a; break;
      case 1: b = {-a.imag(), a.real()}; break;
      case 2: b = -a; break;
      default: b = {a.imag(), -a.real()}; break;
    }
    b_re(k) = Real(b.real());
    b_im(k) = Real(b.imag());
  }
  const MatrixR<Real> g = monomial_gram(r, d);
  Real quadratic = b_re.dot(g * b_re) + b_im.dot(g * b_im);
  Real cross = 0;
  for (int k = 0; k <= d; ++k) {
    const std::complex<Real> e = exponential_moment<Real>(k, r, T);
    cross += b_re(k) * e.real() + b_im(k) * e.imag();
  }
  Real alpha = quadratic - 2 * cross + monomial_moment<Real>(0, r);
  return alpha < 0 ? Real(0) : alpha;
}

double alpha_closed_form(const Polynomial& psi, double T, double r, Precision precision) {
  if (precision == Precision::Double) return alpha_closed_form<double>(psi, T, r);
  return static_cast<double>(alpha_closed_form<extended>(psi, extended(T), extended(r)));
}

double taylor_alpha_bound(double T, double r, int d) {
  return 2.0 * std::pow(T, d) / std::pow(r, d - 1);
}

ApproxReport approximate(ApproxMethod method, double T, double r, int d, Precision precision) {
  const Polynomial psi = make_psi(method, T, r, d, precision);
  ApproxReport report;
  report.d = d;
  report.method = method;
  report.r = r;
  report.T = T;
  report.alpha = alpha_closed_form(psi, T, r, Precision::Extended);
  report.imag_residue = psi.max_imag();
  return report;
}

template Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> monomial_gram(const double&, int);
template Eigen::Matrix<extended, Eigen::Dynamic, Eigen::Dynamic> monomial_gram(const extended&, int);
template Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> orthonormal_basis(const double&, int);
template Eigen::Matrix<extended, Eigen::Dynamic, Eigen::Dynamic> orthonormal_basis(const extended&, int);
template double alpha_closed_form(const Polynomial&, const double&, const double&);
template extended alpha_closed_form(const Polynomial&, const extended&, const extended&);

}  // namespace horizon

#pragma once

#include "horizon/spectral_core.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace horizon {

/// 50 significant decimal digits; used for moments and Gram-Schmidt when the
/// Hankel conditioning outruns double precision.
using extended = boost::multiprecision::cpp_bin_float_50;

enum class Precision { Double, Extended };

using ComplexSpectrum = std::function<cplx(double)>;

/// Weight e^{sign * r |omega|}. sign = -1 is the approximation space used for
/// the polynomials, sign = +1 the dual weight that appears in the error bound.
struct WeightedNorm {
  double r;
  int sign;

  WeightedNorm(double r_, int sign_) : r(r_), sign(sign_) {
    if (!(r_ > 0.0)) throw std::invalid_argument("WeightedNorm: r must be positive");
    if (sign_ != 1 && sign_ != -1) throw std::invalid_argument("WeightedNorm: sign must be +-1");
  }

  double weight(double omega) const { return std::exp(sign * r * std::abs(omega)); }
};

template <typename Real>
Real factorial(int k) {
  Real f = 1;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

/// int |omega|^k e^{-r|omega|} d omega = 2 k! / r^{k+1}.
template <typename Real>
Real monomial_moment(int k, const Real& r) {
  if (k < 0) throw std::invalid_argument("monomial_moment: k must be non-negative");
  if (!(r > 0)) throw std::invalid_argument("monomial_moment: r must be positive");
  using std::pow;
  return 2 * factorial<Real>(k) / Real(pow(r, k + 1));
}

/// int omega^k e^{-r|omega|} d omega: zero for odd k.
template <typename Real>
Real signed_monomial_moment(int k, const Real& r) {
  return k % 2 == 0 ? monomial_moment<Real>(k, r) : Real(0);
}

/// int omega^k e^{i omega T} e^{-r|omega|} d omega
///   = k! [ (r - iT)^{-(k+1)} + (-1)^k (r + iT)^{-(k+1)} ],
/// evaluated in polar form: the sum is real for even k and imaginary for odd k.
template <typename Real>
std::complex<Real> exponential_moment(int k, const Real& r, const Real& T) {
  if (k < 0) throw std::invalid_argument("exponential_moment: k must be non-negative");
  if (!(r > 0)) throw std::invalid_argument("exponential_moment: r must be positive");
  using std::atan2;
  using std::cos;
  using std::pow;
  using std::sin;
  using std::sqrt;
  const Real rho = sqrt(r * r + T * T);
  const Real phi = atan2(T, r);
  const Real scale = 2 * factorial<Real>(k) / Real(pow(rho, k + 1));
  if (k % 2 == 0) return {Real(scale * cos(Real((k + 1) * phi))), Real(0)};
  return {Real(0), Real(scale * sin(Real((k + 1) * phi)))};
}

/// Envelope test on the outer half of a grid: the integrand is split into
/// blocks by |omega| over [omega_max/2, omega_max] and the block maxima are
/// compared. A tail whose envelope does not decay means the integral over
/// the real line diverges (or the grid is too short to tell).
struct TailDiagnosis {
  bool divergent = false;
  /// last block maximum / first block maximum (0 when the tail vanishes)
  double envelope_ratio = 0.0;
};

TailDiagnosis diagnose_tail(const Eigen::VectorXd& integrand, const SpectralGrid& grid,
                            int blocks = 8);

/// int e^{sign r |omega|} |u(omega)|^2 d omega over the grid. Throws
/// std::domain_error("weight/decay mismatch") when sign = +1 and the weighted
/// integrand does not decay.
double weighted_norm_sq(const ComplexSpectrum& u, const WeightedNorm& norm,
                        const SpectralGrid& grid);

/// Same, with u already sampled on the grid nodes.
double weighted_norm_sq(const Eigen::VectorXcd& u_on_grid, const WeightedNorm& norm,
                        const SpectralGrid& grid);

/// Unweighted L_p norm (p = 1, 2) or sup norm (p = 0 encodes infinity) over the grid.
double lp_norm(const Eigen::VectorXcd& u_on_grid, int p, const SpectralGrid& grid);

inline constexpr int kSupNorm = 0;

}  // namespace horizon

#pragma once

#include "horizon/spectral_core.hpp"
#include "horizon/weighted_space.hpp"

#include <string>
#include <string_view>

namespace horizon {

enum class ApproxMethod { Taylor, Projection };

std::string to_string(ApproxMethod method);
ApproxMethod parse_method(std::string_view name);

/// psi(z) = sum_k a_k z^k with complex coefficients a_0..a_d.
class Polynomial {
 public:
  Polynomial() : coeffs_(Eigen::VectorXcd::Ones(1)) {}
  explicit Polynomial(Eigen::VectorXcd coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  cplx coeff(int k) const { return coeffs_(k); }

  /// Horner evaluation.
  cplx operator()(cplx z) const;
  cplx at_i_omega(double omega) const { return (*this)(cplx(0.0, omega)); }
  /// Direct sum of a_k z^k, kept for cross-checking Horner.
  cplx power_sum(cplx z) const;

  /// Largest |Im a_k|.
  double max_imag() const { return coeffs_.imag().cwiseAbs().maxCoeff(); }

 private:
  Eigen::VectorXcd coeffs_;
};

/// Degree cap for double-precision projection.
inline constexpr int kMaxDoubleProjectionDegree = 16;
/// Factorial overflow guard for Taylor coefficients.
inline constexpr int kMaxTaylorDegree = 170;

/// Truncated Taylor expansion of e^{Tz}: a_k = T^k / k!.
Polynomial taylor_psi(double T, int d);

/// L_{2,-r}-orthogonal projection of e^{i omega T} onto polynomials of degree
/// <= d in omega, rewritten in powers of z = i omega. Throws
/// std::domain_error("increase precision or lower d") when the moment Gram
/// matrix is numerically singular at the requested precision.
Polynomial projection_psi(double T, double r, int d, Precision precision = Precision::Double);

Polynomial make_psi(ApproxMethod method, double T, double r, int d,
                    Precision precision = Precision::Double);

/// Hankel moment matrix G_jk = int omega^{j+k} e^{-r|omega|} d omega, j,k <= d.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> monomial_gram(const Real& r, int d);

/// Columns are the monomial coefficients (in omega) of an orthonormal basis
/// of degree <= d polynomials in L_{2,-r}, from modified Gram-Schmidt with
/// one reorthogonalization pass over diagonally rescaled monomials.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> orthonormal_basis(const Real& r, int d);

/// alpha = int e^{-r|omega|} |psi(i omega) - e^{i omega T}|^2 d omega by grid quadrature.
double alpha_of(const Polynomial& psi, double T, double r, const SpectralGrid& grid);

/// Same quantity expanded through closed-form monomial and exponential moments.
template <typename Real>
Real alpha_closed_form(const Polynomial& psi, const Real& T, const Real& r);

double alpha_closed_form(const Polynomial& psi, double T, double r, Precision precision);

/// 2 T^d / r^{d-1}; meaningful for T < r.
double taylor_alpha_bound(double T, double r, int d);

struct ApproxReport {
  int d = 0;
  double alpha = 0.0;
  ApproxMethod method = ApproxMethod::Taylor;
  double r = 0.0;
  double T = 0.0;
  /// max |Im a_k| left after real-coefficient cleanup
  double imag_residue = 0.0;
};

/// Builds psi_d and evaluates alpha_d in closed form.
ApproxReport approximate(ApproxMethod method, double T, double r, int d,
                         Precision precision = Precision::Double);

extern template Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> monomial_gram(const double&, int);
extern template Eigen::Matrix<extended, Eigen::Dynamic, Eigen::Dynamic> monomial_gram(const extended&, int);
extern template Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> orthonormal_basis(const double&, int);
extern template Eigen::Matrix<extended, Eigen::Dynamic, Eigen::Dynamic> orthonormal_basis(const extended&, int);
extern template double alpha_closed_form(const Polynomial&, const double&, const double&);
extern template extended alpha_closed_form(const Polynomial&, const extended&, const extended&);

}  // namespace horizon

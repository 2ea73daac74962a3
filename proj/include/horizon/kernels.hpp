#pragma once

#include "horizon/spectral_core.hpp"
#include "horizon/weighted_space.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace horizon {

/// Highest derivative order the kernels expose; matches the polynomial
/// degree cap.
inline constexpr int kMaxDerivative = 16;

/// Standard bump g(u) = exp(-1/(1-u^2)) on (-1, 1) and its derivatives,
///   g^(k)(u) = P_k(u) / (1-u^2)^{2k} * g(u),
///   P_{k+1} = P_k' (1-u^2)^2 + P_k [4k u (1-u^2) - 2u],  P_0 = 1,
/// with the integer coefficients of P_k built once in exact arithmetic.
///
/// The derivatives grow like (k!)^2 while P_k cancels heavily near the
/// endpoints, so orders above kFastOrder are evaluated in extended precision
/// even on the double overload.
class BumpDerivatives {
 public:
  static constexpr int kFastOrder = 4;

  static const BumpDerivatives& instance();

  /// g^(k)(u); zero outside the open interval (-1, 1).
  double operator()(int k, double u) const;
  extended operator()(int k, const extended& u) const;
  /// Coefficients of P_k, lowest order first (exact in extended).
  const std::vector<extended>& numerator(int k) const { return numerators_.at(k); }
  /// int_{-1}^{1} g(u) du.
  double mass() const { return mass_; }
  const extended& mass_extended() const { return mass_ext_; }

 private:
  BumpDerivatives();
  std::vector<std::vector<extended>> numerators_;
  std::vector<std::vector<long double>> fast_numerators_;
  extended mass_ext_;
  double mass_ = 0.0;
};

enum class KernelShape { Bump, Mollified };

/// Prototype profile for a mollified kernel, with the points where it is
/// not smooth (quadrature splits there).
struct Prototype {
  std::string name = "custom";
  RealFunction profile;
  std::vector<double> breakpoints;
};

/// Named prototypes on (-T, theta): "box" (1), "triangle" (peak 1 at the
/// midpoint), "parabola" (peak 1 at the midpoint).
Prototype named_prototype(const std::string& name, double T, double theta);

/// Smooth kernel h supported in [-T, theta]: anticausal reach T, causal tail
/// theta. q(t) = h(t - T) is then supported in [0, T + theta].
class TargetKernel {
 public:
  double T() const { return T_; }
  double theta() const { return theta_; }
  double tau() const { return T_ + theta_; }
  KernelShape shape() const { return shape_; }
  double normalization() const { return scale_; }
  std::optional<double> epsilon() const;

  double operator()(double t) const { return derivative(0, t); }
  /// k-th derivative at t; zero outside the open support.
  double derivative(int k, double t) const;
  extended derivative(int k, const extended& t) const;
  /// h(t), h'(t), ..., h^(d)(t).
  template <typename Real>
  std::vector<Real> derivatives(int d, const Real& t) const;
  double q(double t) const { return derivative(0, t - T_); }
  double q_derivative(int k, double t) const { return derivative(k, t - T_); }

  /// Support endpoints plus interior features, increasing, in t.
  std::vector<double> breakpoints() const;

  nlohmann::json to_json() const;
  static TargetKernel from_json(const nlohmann::json& spec);

  friend TargetKernel bump_kernel(double T, double theta);
  friend TargetKernel mollify(Prototype prototype, double T, double theta, double epsilon);

 private:
  struct MollifierData {
    double epsilon;
    Prototype prototype;
  };

  TargetKernel(double T, double theta, KernelShape shape)
      : T_(T), theta_(theta), shape_(shape) {}

  template <typename Real>
  std::vector<Real> mollified_derivatives(int k_min, int k_max, const Real& t) const;

  double T_;
  double theta_;
  KernelShape shape_;
  double scale_ = 1.0;
  extended scale_ext_ = 1;
  std::shared_ptr<const MollifierData> mollifier_;
};

/// Unit-mass bump on [-T, theta].
TargetKernel bump_kernel(double T, double theta);

/// h_eps(t) = int kappa_eps(t - s) 1_{[-T+eps, theta-eps]}(s) prototype(s) ds,
/// kappa_eps(t) = kappa_1(t/eps)/eps the unit-mass bump of half-width eps.
TargetKernel mollify(Prototype prototype, double T, double theta, double epsilon);

/// Unit-mass mollifier kappa_eps and its derivatives.
double mollifier(double epsilon, double t, int k = 0);

extern template std::vector<double> TargetKernel::derivatives<double>(int, const double&) const;
extern template std::vector<extended> TargetKernel::derivatives<extended>(int,
                                                                          const extended&) const;

double kernel_derivative(const TargetKernel& h, int k, double t);

/// Q(z) = int_0^{T+theta} e^{-zt} h(t - T) dt (entire in z).
cplx q_transform(const TargetKernel& h, cplx z, const TransformOptions& opts = {});

/// Q(i omega) at the grid nodes.
Eigen::VectorXcd q_spectrum(const TargetKernel& h, const SpectralGrid& grid,
                            const TransformOptions& opts = {});

/// F[h^(k)](i omega) at the given frequencies, accumulated in extended
/// precision: at low omega the transform of a high derivative is orders of
/// magnitude below the integrand and a double sum loses it.
Eigen::VectorXcd derivative_spectrum(const TargetKernel& h, int k, const Eigen::VectorXd& omegas);

/// H(i omega) = Q(i omega) e^{i omega T}, the Fourier transform of h.
Eigen::VectorXcd h_spectrum(const TargetKernel& h, const SpectralGrid& grid,
                            const TransformOptions& opts = {});

}  // namespace horizon

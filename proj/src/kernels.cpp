#include "horizon/kernels.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace horizon {

namespace {

using boost::multiprecision::cpp_int;
using IntPoly = std::vector<cpp_int>;

IntPoly next_numerator(const IntPoly& p, int k) {
  // P' (1 - u^2)^2 + P [(4k - 2) u - 4k u^3]
  IntPoly out(p.size() + 3, 0);
  for (std::size_t j = 1; j < p.size(); ++j) {
    const cpp_int dj = p[j] * static_cast<int>(j);
    out[j - 1] += dj;
    out[j + 1] -= 2 * dj;
    out[j + 3] += dj;
  }
  for (std::size_t j = 0; j < p.size(); ++j) {
    out[j + 1] += (4 * k - 2) * p[j];
    out[j + 3] -= 4 * k * p[j];
  }
  while (out.size() > 1 && out.back() == 0) out.pop_back();
  return out;
}

template <typename Real, typename Coeff>
Real horner(const std::vector<Coeff>& p, const Real& u) {
  Real acc = p.back();
  for (std::size_t j = p.size() - 1; j-- > 0;) acc = acc * u + p[j];
  return acc;
}

void check_order(int k) {
  if (k < 0 || k > kMaxDerivative)
    throw std::domain_error("derivative order exceeds d_max = " + std::to_string(kMaxDerivative));
}

}  // namespace

BumpDerivatives::BumpDerivatives() {
  IntPoly p{1};
  for (int k = 0; k <= kMaxDerivative; ++k) {
    std::vector<extended> exact(p.size());
    std::vector<long double> fast(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      exact[j] = extended(p[j]);
      fast[j] = p[j].convert_to<long double>();
    }
    numerators_.push_back(std::move(exact));
    fast_numerators_.push_back(std::move(fast));
    p = next_numerator(p, k);
  }
  // g(tanh s) sech^2 s = exp(-cosh^2 s) sech^2 s is entire and decays
  // double-exponentially, so the trapezoid rule is exact to working precision.
  const auto rule = flat_endpoint_rule<extended>(extended(-1), extended(1), 0.05, 4.0);
  mass_ext_ = 0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) mass_ext_ += rule.weights(j) * (*this)(0, rule.nodes(j));
  mass_ = mass_ext_.convert_to<double>();
}

const BumpDerivatives& BumpDerivatives::instance() {
  static const BumpDerivatives table;
  return table;
}

double BumpDerivatives::operator()(int k, double u) const {
  check_order(k);
  if (!(std::abs(u) < 1.0)) return 0.0;
  if (k > kFastOrder) return (*this)(k, extended(u)).convert_to<double>();
  const double s = (1.0 - u) * (1.0 + u);
  const double envelope = std::exp(-1.0 / s - 2.0 * k * std::log(s));
  if (envelope == 0.0) return 0.0;
  return static_cast<double>(horner(fast_numerators_[k], static_cast<long double>(u))) * envelope;
}

extended BumpDerivatives::operator()(int k, const extended& u) const {
  check_order(k);
  if (!(abs(u) < 1)) return 0;
  const extended s = (1 - u) * (1 + u);
  return horner(numerators_[k], u) * exp(-1 / s - 2 * k * log(s));
}

double mollifier(double epsilon, double t, int k) {
  const auto& g = BumpDerivatives::instance();
  return g(k, t / epsilon) / (g.mass() * std::pow(epsilon, k + 1));
}

Prototype named_prototype(const std::string& name, double T, double theta) {
  const double lo = -T, hi = theta, mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  auto inside = [lo, hi](double s) { return s > lo && s < hi; };
  if (name == "box") return {name, [inside](double s) { return inside(s) ? 1.0 : 0.0; }, {}};
  if (name == "triangle")
    return {name,
            [=](double s) { return inside(s) ? 1.0 - std::abs(s - mid) / half : 0.0; },
            {mid}};
  if (name == "parabola")
    return {name,
            [=](double s) {
              const double v = (s - mid) / half;
              return inside(s) ? 1.0 - v * v : 0.0;
            },
            {}};
  throw std::invalid_argument("unknown prototype '" + name + "'");
}

std::optional<double> TargetKernel::epsilon() const {
  if (mollifier_) return mollifier_->epsilon;
  return std::nullopt;
}

double TargetKernel::derivative(int k, double t) const {
  check_order(k);
  if (!(t > -T_ && t < theta_)) return 0.0;
  if (shape_ == KernelShape::Mollified) return mollified_derivatives(k, k, t)[0];
  const double half = 0.5 * (T_ + theta_);
  const double u = (t - 0.5 * (theta_ - T_)) / half;
  return scale_ * BumpDerivatives::instance()(k, u) / std::pow(half, k);
}

extended TargetKernel::derivative(int k, const extended& t) const {
  check_order(k);
  if (!(t > -T_ && t < theta_)) return 0;
  if (shape_ == KernelShape::Mollified) return mollified_derivatives(k, k, t)[0];
  const extended half = (extended(T_) + theta_) / 2;
  const extended u = (t - (extended(theta_) - T_) / 2) / half;
  return scale_ext_ * BumpDerivatives::instance()(k, u) / pow(half, k);
}

template <typename Real>
std::vector<Real> TargetKernel::derivatives(int d, const Real& t) const {
  check_order(d);
  if (shape_ == KernelShape::Mollified) {
    if (!(t > -T_ && t < theta_)) return std::vector<Real>(d + 1, Real(0));
    return mollified_derivatives(0, d, t);
  }
  std::vector<Real> out(d + 1);
  for (int k = 0; k <= d; ++k) out[k] = derivative(k, t);
  return out;
}

template <typename Real>
std::vector<Real> TargetKernel::mollified_derivatives(int k_min, int k_max, const Real& t) const {
  // h_eps^(k)(t) = eps^{-k} / mass * int g^(k)(w) p(t - eps w) dw over the
  // w-range where t - eps w lies in [-T + eps, theta - eps]; w = tanh(sigma)
  // turns the flat ends of g^(k) into an entire integrand in sigma.
  using std::atanh;
  using std::cosh;
  using std::max;
  using std::min;
  using std::tanh;
  constexpr double kSigmaMax = 4.5;
  const auto& g = BumpDerivatives::instance();
  const double eps = mollifier_->epsilon;
  std::vector<Real> out(k_max - k_min + 1, Real(0));
  const Real w_lo = max(Real(-1), Real((t - (theta_ - eps)) / eps));
  const Real w_hi = min(Real(1), Real((t - (-T_ + eps)) / eps));
  if (!(w_hi > w_lo)) return out;
  auto to_sigma = [&](const Real& w) -> Real {
    if (w <= -1) return Real(-kSigmaMax);
    if (w >= 1) return Real(kSigmaMax);
    return max(Real(-kSigmaMax), min(Real(kSigmaMax), Real(atanh(w))));
  };
  std::vector<Real> breaks{to_sigma(w_lo)};
  std::vector<Real> inner;
  for (double b : mollifier_->prototype.breakpoints) {
    const Real w = (t - b) / eps;
    if (w > w_lo && w < w_hi) inner.push_back(to_sigma(w));
  }
  std::sort(inner.begin(), inner.end());
  for (const Real& x : inner)
    if (x > breaks.back()) breaks.push_back(x);
  const Real top = to_sigma(w_hi);
  if (!(top > breaks.back())) return out;
  breaks.push_back(top);
  const auto rule = composite_gauss_legendre<Real>(breaks, 6);
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Real sigma = rule.nodes(j);
    const Real c = cosh(sigma);
    const Real w = tanh(sigma);
    const Real s = t - eps * w;
    const Real weight = rule.weights(j) / (c * c) *
                        Real(mollifier_->prototype.profile(static_cast<double>(s)));
    if (weight == 0) continue;
    for (int k = k_min; k <= k_max; ++k) out[k - k_min] += weight * g(k, w);
  }
  Real mass;
  if constexpr (std::is_same_v<Real, double>) mass = g.mass();
  else mass = g.mass_extended();
  for (int k = k_min; k <= k_max; ++k) {
    using std::pow;
    out[k - k_min] /= mass * Real(pow(Real(eps), k));
  }
  return out;
}

template std::vector<double> TargetKernel::derivatives<double>(int, const double&) const;
template std::vector<extended> TargetKernel::derivatives<extended>(int, const extended&) const;

std::vector<double> TargetKernel::breakpoints() const {
  std::vector<double> out{-T_};
  if (mollifier_) {
    const double eps = mollifier_->epsilon;
    std::vector<double> inner{-T_ + 2 * eps, theta_ - 2 * eps};
    for (double b : mollifier_->prototype.breakpoints) {
      inner.push_back(b - eps);
      inner.push_back(b + eps);
    }
    std::sort(inner.begin(), inner.end());
    for (double b : inner)
      if (b > out.back() + 1e-12 && b < theta_ - 1e-12) out.push_back(b);
  }
  out.push_back(theta_);
  return out;
}

nlohmann::json TargetKernel::to_json() const {
  nlohmann::json j{{"shape", shape_ == KernelShape::Bump ? "bump" : "mollified"},
                   {"T", T_},
                   {"theta", theta_}};
  if (mollifier_) {
    j["epsilon"] = mollifier_->epsilon;
    j["prototype"] = mollifier_->prototype.name;
  }
  return j;
}

TargetKernel TargetKernel::from_json(const nlohmann::json& spec) {
  const std::string shape = spec.value("shape", std::string("bump"));
  const double T = spec.at("T").get<double>();
  const double theta = spec.at("theta").get<double>();
  if (shape == "bump") return bump_kernel(T, theta);
  if (shape == "mollified") {
    const std::string proto = spec.value("prototype", std::string("box"));
    if (proto == "custom") throw std::invalid_argument("custom prototypes cannot be deserialized");
    return mollify(named_prototype(proto, T, theta), T, theta, spec.at("epsilon").get<double>());
  }
  throw std::invalid_argument("unknown kernel shape '" + shape + "'");
}

TargetKernel bump_kernel(double T, double theta) {
  if (!(T >= 0.0) || !(theta >= 0.0) || !std::isfinite(T) || !std::isfinite(theta))
    throw std::invalid_argument("bump_kernel: T and theta must be finite and non-negative");
  if (!(T + theta > 0.0)) throw std::invalid_argument("bump_kernel: empty support (T + theta = 0)");
  TargetKernel h(T, theta, KernelShape::Bump);
  h.scale_ = 1.0 / (0.5 * (T + theta) * BumpDerivatives::instance().mass());
  h.scale_ext_ = 2 / ((extended(T) + theta) * BumpDerivatives::instance().mass_extended());
  return h;
}

TargetKernel mollify(Prototype prototype, double T, double theta, double epsilon) {
  if (!(T >= 0.0) || !(theta >= 0.0) || !(T + theta > 0.0))
    throw std::invalid_argument("mollify: need T, theta >= 0 with T + theta > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("mollify: epsilon must be positive");
  if (!(epsilon < 0.5 * (T + theta)))
    throw std::invalid_argument("mollify: epsilon must be below half the support");
  if (!prototype.profile) throw std::invalid_argument("mollify: empty prototype");
  TargetKernel h(T, theta, KernelShape::Mollified);
  h.mollifier_ = std::make_shared<const TargetKernel::MollifierData>(
      TargetKernel::MollifierData{epsilon, std::move(prototype)});
  return h;
}

double kernel_derivative(const TargetKernel& h, int k, double t) { return h.derivative(k, t); }

cplx q_transform(const TargetKernel& h, cplx z, const TransformOptions& opts) {
  return laplace_transform([&h](double t) { return h.q(t); }, h.tau(), z, opts);
}

Eigen::VectorXcd q_spectrum(const TargetKernel& h, const SpectralGrid& grid,
                            const TransformOptions& opts) {
  return fourier_transform([&h](double t) { return h.q(t); }, 0.0, h.tau(), grid, opts);
}

Eigen::VectorXcd derivative_spectrum(const TargetKernel& h, int k, const Eigen::VectorXd& omegas) {
  check_order(k);
  BasicQuadratureRule<extended> rule;
  if (h.shape() == KernelShape::Bump) {
    rule = flat_endpoint_rule<extended>(extended(-h.T()), extended(h.theta()));
  } else {
    std::vector<extended> breaks;
    for (double b : h.breakpoints()) breaks.emplace_back(b);
    rule = composite_gauss_legendre<extended>(breaks, 16);
  }
  std::vector<extended> values(rule.size());
  for (Eigen::Index j = 0; j < rule.size(); ++j)
    values[j] = rule.weights(j) * h.derivative(k, rule.nodes(j));
  Eigen::VectorXcd out(omegas.size());
  for (Eigen::Index i = 0; i < omegas.size(); ++i) {
    extended re = 0, im = 0;
    for (Eigen::Index j = 0; j < rule.size(); ++j) {
      const extended phase = omegas(i) * rule.nodes(j);
      re += values[j] * cos(phase);
      im -= values[j] * sin(phase);
    }
    out(i) = cplx(re.convert_to<double>(), im.convert_to<double>());
  }
  return out;
}

Eigen::VectorXcd h_spectrum(const TargetKernel& h, const SpectralGrid& grid,
                            const TransformOptions& opts) {
  Eigen::VectorXcd out = q_spectrum(h, grid, opts);
  for (Eigen::Index j = 0; j < out.size(); ++j)
    out(j) *= std::polar(1.0, grid.nodes()(j) * h.T());
  return out;
}

}  // namespace horizon

// Acceptance checks on the canonical configuration: T = 0.5, theta = 0.1,
// r = 2, bump kernel, Poisson signal a = 1.5, 41 points on [-2, 2].
// Prints one PASS/FAIL line per criterion; exits non-zero on any failure.

#include "oracle.hpp"

#include "horizon/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>

using namespace horizon;

namespace {

constexpr double kT = 0.5, kTheta = 0.1, kR = 2.0, kA = 1.5;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const TargetKernel& kernel() {
  static const TargetKernel h = bump_kernel(kT, kTheta);
  return h;
}
const SpectralGrid& grid() {
  static const SpectralGrid g(64.0, 4096);
  return g;
}
const TimeGrid& tgrid() {
  static const TimeGrid g(-2.0, 2.0, 41);
  return g;
}

Outcome taylor_alpha_bound_holds() {
  Outcome out;
  double worst = -INFINITY;
  for (int d = 2; d <= 12; ++d) {
    const double alpha = alpha_closed_form(taylor_psi(kT, d), kT, kR, Precision::Extended);
    const double bound = taylor_alpha_bound(kT, kR, d);
    worst = std::max(worst, alpha - bound);
    if (alpha > bound + 1e-12) out.pass = false;
  }
  const double b10 = taylor_alpha_bound(kT, kR, 10);
  if (std::abs(b10 - 3.815e-6) > 5e-10) out.pass = false;
  out.detail = "max(alpha - bound) over d=2..12 " + sci(worst) + ", bound at d=10 " + sci(b10);
  return out;
}

Outcome projection_is_optimal_and_monotone() {
  Outcome out;
  double previous = INFINITY, worst_gap = -INFINITY, worst_rise = -INFINITY;
  for (int d = 0; d <= 12; ++d) {
    const Precision prec = d <= 10 ? Precision::Double : Precision::Extended;
    const double proj = approximate(ApproxMethod::Projection, kT, kR, d, prec).alpha;
    const double tay = alpha_closed_form(taylor_psi(kT, d), kT, kR, Precision::Extended);
    worst_gap = std::max(worst_gap, proj - tay);
    if (d > 0) worst_rise = std::max(worst_rise, proj - previous);
    if (proj > tay + 1e-12 || proj > previous) out.pass = false;
    previous = proj;
  }
  out.detail = "max(projection - taylor) " + sci(worst_gap) + ", max step increase " + sci(worst_rise);
  return out;
}

Outcome kernel_transform_identity() {
  Outcome out;
  // 50 grid frequencies spread over |omega| <= 20
  const auto& g = grid();
  const int n = g.n_points();
  Eigen::VectorXd omegas(50);
  const int lo = n / 2 - 800, hi = n / 2 + 800;
  for (int i = 0; i < 50; ++i) omegas(i) = g.nodes()(lo + (hi - lo) * i / 49);
  const auto& h = kernel();
  const auto H = fourier_transform([&h](double t) { return h(t); }, -kT, kTheta, omegas);
  double worst = 0.0;
  for (int d : {0, 4, 10}) {
    const PredictorKernel pk(h, projection_psi(kT, kR, d, Precision::Extended));
    const auto F = pk.tap_spectrum(omegas);
    for (int i = 0; i < omegas.size(); ++i) {
      const cplx expected = std::polar(1.0, -omegas(i) * kT) * pk.psi().at_i_omega(omegas(i)) * H(i);
      worst = std::max(worst, std::abs(F(i) - expected) / std::abs(expected));
    }
  }
  out.pass = worst < 1e-8;
  out.detail = "max relative error " + sci(worst) + " over d in {0,4,10}";
  return out;
}

Outcome error_bound_valid() {
  Outcome out;
  const auto x = poisson_signal(kA);
  std::ostringstream s;
  for (int d : {2, 6, 10}) {
    const PredictorKernel pk(kernel(), projection_psi(kT, kR, d, Precision::Extended));
    const auto res = run_prediction(pk, x, tgrid(), kR, grid(), "projection");
    if (res.sup_error > res.bound + kQuadratureBudget) out.pass = false;
    s << "d=" << d << " err " << sci(res.sup_error) << " <= " << sci(res.bound) << "; ";
  }
  out.detail = s.str();
  return out;
}

Outcome weak_predictability() {
  Outcome out;
  const auto x = poisson_signal(kA);
  const auto err = [&](int d) {
    const PredictorKernel pk(kernel(), projection_psi(kT, kR, d, Precision::Extended));
    return run_prediction(pk, x, tgrid(), kR, grid(), "projection").sup_error;
  };
  const double e2 = err(2), e10 = err(10);
  out.pass = e10 * 10.0 <= e2;
  out.detail = "sup error d=2 " + sci(e2) + ", d=10 " + sci(e10) + ", ratio " + sci(e2 / e10);
  return out;
}

Outcome noise_robustness() {
  Outcome out;
  std::ostringstream s;
  for (int p : {1, 2}) {
    ExperimentConfig c;
    c.nu_range = {0.0, 0.01, 0.1};
    c.p = p;
    const auto res = cmd_noise_sweep(c);
    if (res.exit_code != kExitOk) out.pass = false;
    double margin = INFINITY;
    for (const auto& row : res.summary.at("rows"))
      margin = std::min(margin, row.at("bound_total").get<double>() -
                                    row.at("empirical_total_error").get<double>());
    s << "p=" << p << " min(bound - error) " << sci(margin) << "; ";
  }
  const PredictorKernel p4(kernel(), projection_psi(kT, kR, 4, Precision::Extended));
  const PredictorKernel p10(kernel(), projection_psi(kT, kR, 10, Precision::Extended));
  const double b4 = noise_bound(p4, kernel(), 0.1, 2, grid());
  const double b10 = noise_bound(p10, kernel(), 0.1, 2, grid());
  if (!(b10 > b4)) out.pass = false;
  s << "noise bound at nu=0.1: d=4 " << sci(b4) << ", d=10 " << sci(b10);
  out.detail = s.str();
  return out;
}

Outcome derivatives_correct() {
  Outcome out;
  const auto& h = kernel();
  double worst_fd = 0.0;
  for (int k = 1; k <= 6; ++k) {
    for (int i = 0; i < 20; ++i) {
      const double t = -kT + (kT + kTheta) * (0.05 + 0.9 * i / 19.0);
      const double fd =
          oracle::richardson_derivative([&](double s) { return h.derivative(k - 1, s); }, t, 1e-5);
      const double exact = h.derivative(k, t);
      worst_fd = std::max(worst_fd, std::abs(exact - fd) / std::abs(exact));
    }
  }
  const Eigen::VectorXd omegas = Eigen::VectorXd::LinSpaced(20, 0.5, 20.0);
  const auto H = fourier_transform([&h](double t) { return h(t); }, -kT, kTheta, omegas);
  double worst_freq = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const auto Hk = derivative_spectrum(h, k, omegas);
    for (int i = 0; i < omegas.size(); ++i) {
      const cplx expected = std::pow(cplx(0.0, omegas(i)), k) * H(i);
      worst_freq = std::max(worst_freq, std::abs(Hk(i) - expected) / std::abs(expected));
    }
  }
  out.pass = worst_fd <= 1e-5 && worst_freq < 1e-8;
  out.detail = "finite differences " + sci(worst_fd) + ", frequency domain " + sci(worst_freq);
  return out;
}

Outcome moments_correct() {
  Outcome out;
  const auto half_line = [](auto f, double r, int k) {
    const long double upper = (k + 100.0L) / r;
    const long double scale = std::abs(f(static_cast<long double>(std::max(k, 1)) / r));
    return 2 * oracle::adaptive_simpson<long double>(f, 0.0L, upper, 1e-16L * scale * upper, 256);
  };
  double worst_mono = 0.0, worst_expo = 0.0;
  for (double r : {0.5, 2.0, 4.0}) {
    for (int k = 0; k <= 24; ++k) {
      const long double mono =
          half_line([k, r](long double w) { return std::pow(w, k) * std::exp(-r * w); }, r, k);
      worst_mono =
          std::max(worst_mono, static_cast<double>(std::abs(monomial_moment<double>(k, r) / mono - 1)));
    }
  }
  // r = T is avoided: the phase (k + 1) pi / 4 makes some moments exactly zero
  for (double r : {1.0, 2.0, 4.0}) {
    for (int k = 0; k <= 24; ++k) {
      const bool even = k % 2 == 0;
      const long double expo = half_line(
          [k, r, even](long double w) {
            return std::pow(w, k) * (even ? std::cos(kT * w) : std::sin(kT * w)) * std::exp(-r * w);
          },
          r, k);
      const auto m = exponential_moment<double>(k, r, kT);
      worst_expo =
          std::max(worst_expo, static_cast<double>(std::abs((even ? m.real() : m.imag()) / expo - 1)));
    }
  }
  out.pass = worst_mono < 1e-10 && worst_expo < 1e-10;
  out.detail = "max relative error for k <= 24: monomial " + sci(worst_mono) + ", exponential " +
               sci(worst_expo);
  return out;
}

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
  double latest = -INFINITY, earliest = INFINITY;
  long reads = 0;

 private:
  void note(double t) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto* self = const_cast<RecordingModel*>(this);
    self->latest = std::max(latest, t);
    self->earliest = std::min(earliest, t);
    ++self->reads;
  }
  Signal inner_;
  mutable std::mutex mutex_;
};

Outcome causal_limited_memory() {
  Outcome out;
  const PredictorKernel pk(kernel(), projection_psi(kT, kR, 10, Precision::Extended));
  long future = 0;
  double widest = 0.0;
  for (double t : tgrid().nodes()) {
    auto model = std::make_shared<RecordingModel>(poisson_signal(kA));
    predict(pk, Signal(model), t);
    if (model->latest > t) ++future;
    if (model->earliest < t - pk.tau()) ++future;
    widest = std::max(widest, t - model->earliest);
  }
  const double window = PastWindow(poisson_signal(kA), 0.0, pk.tau()).memory();
  out.pass = future == 0 && window == kT + kTheta;
  out.detail = "reads outside [t - tau, t]: " + std::to_string(future) + ", memory " + sci(window) +
               ", widest lag read " + sci(widest);
  return out;
}

Outcome class_gate() {
  Outcome out;
  const auto report = class_norm(poisson_signal(kA), kR);
  bool flagged = false;
  try {
    beta_of(kernel(), poisson_signal(0.9), kR, grid());
  } catch (const OutsideClassError&) {
    flagged = true;
  }
  const bool dual = class_norm(poisson_signal(0.9), kR, +1).member;
  out.pass = std::abs(report.norm_sq - 0.4) <= 1e-10 && report.member && flagged && !dual;
  out.detail = "norm^2 " + sci(report.norm_sq) + ", divergence for a=0.9 " + (flagged ? "flagged" : "missed");
  return out;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"taylor alpha bound", taylor_alpha_bound_holds},
      {"projection optimality", projection_is_optimal_and_monotone},
      {"kernel transform identity", kernel_transform_identity},
      {"error bound validity", error_bound_valid},
      {"weak predictability", weak_predictability},
      {"noise robustness", noise_robustness},
      {"derivative correctness", derivatives_correct},
      {"moment layer", moments_correct},
      {"causality and limited memory", causal_limited_memory},
      {"class gate", class_gate},
  };
  int failures = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %d: %s (%s) [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

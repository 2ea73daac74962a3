#include "horizon/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace horizon {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys{
    "T",     "theta",    "r",          "method",     "d_range",   "kernel",
    "signal", "tgrid",   "grid",       "nu_range",   "p",         "noise",
    "eps_target", "output_dir", "precision", "threads", "t_list", "timing"};

std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

template <typename V>
V field(const json& j, const std::string& key, const std::string& what) {
  try {
    return j.at(key).get<V>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "': expected " + what);
  }
}

std::vector<double> real_list(const json& j, const std::string& key) {
  if (!j.at(key).is_array()) throw ConfigError("key '" + key + "': expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError("key '" + key + "': expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Precision parse_precision(const std::string& name) {
  if (name == "double") return Precision::Double;
  if (name == "extended") return Precision::Extended;
  throw ConfigError("key 'precision': expected \"double\" or \"extended\", got \"" + name + "\"");
}

std::string precision_name(Precision p) { return p == Precision::Double ? "double" : "extended"; }

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

/// Refuses signals whose spectra are too heavy for the class or for the dual weight.
bool check_class(const ExperimentConfig& config, const Signal& x, const TargetKernel& h,
                 const SpectralGrid& grid, CommandOutput& out, double* beta) {
  const ClassReport report = class_norm(x, config.r, -1, grid);
  if (!report.member) {
    out.exit_code = kExitOutsideClass;
    out.message = "signal outside class: int e^{-r|w|}|X|^2 dw diverges";
    return false;
  }
  try {
    *beta = beta_of(h, x, config.r, grid);
  } catch (const OutsideClassError&) {
    out.exit_code = kExitOutsideClass;
    out.message = "signal outside class: int e^{r|w|}|Q X|^2 dw diverges for r = " +
                  format_real(config.r);
    return false;
  }
  return true;
}

/// Lazily built tables and multiprecision constants, initialised before workers start.
void warm_up() {
  (void)BumpDerivatives::instance();
  (void)boost::math::constants::pi<extended>();
  (void)reference_panel<extended>();
  (void)reference_panel<double>();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config syntax error at " + position_of(text, e.byte == 0 ? 0 : e.byte - 1) +
                      ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kKnownKeys.count(key)) throw ConfigError("unknown key '" + key + "'");

  ExperimentConfig c;
  if (j.contains("T")) c.T = field<double>(j, "T", "a number");
  if (j.contains("theta")) c.theta = field<double>(j, "theta", "a number");
  if (j.contains("r")) c.r = field<double>(j, "r", "a number");
  if (j.contains("method")) {
    try {
      c.method = parse_method(field<std::string>(j, "method", "a string"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("key 'method': ") + e.what());
    }
  }
  if (j.contains("d_range")) {
    const auto range = field<std::vector<int>>(j, "d_range", "[d_min, d_max]");
    if (range.size() != 2) throw ConfigError("key 'd_range': expected [d_min, d_max]");
    c.d_min = range[0];
    c.d_max = range[1];
  }
  if (j.contains("kernel")) {
    if (!j["kernel"].is_object()) throw ConfigError("key 'kernel': expected an object");
    c.kernel = j["kernel"];
  }
  if (j.contains("signal")) {
    if (!j["signal"].is_object()) throw ConfigError("key 'signal': expected an object");
    c.signal = j["signal"];
  }
  if (j.contains("noise")) {
    if (!j["noise"].is_object()) throw ConfigError("key 'noise': expected an object");
    c.noise = j["noise"];
  }
  if (j.contains("tgrid")) {
    const json& g = j["tgrid"];
    if (!g.is_object()) throw ConfigError("key 'tgrid': expected {t_min, t_max, n}");
    if (g.contains("t_min")) c.t_min = field<double>(g, "t_min", "a number");
    if (g.contains("t_max")) c.t_max = field<double>(g, "t_max", "a number");
    if (g.contains("n")) c.t_points = field<int>(g, "n", "an integer");
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) throw ConfigError("key 'grid': expected {omega_max, n}");
    if (g.contains("omega_max")) c.omega_max = field<double>(g, "omega_max", "a number");
    if (g.contains("n")) c.grid_points = field<int>(g, "n", "an integer");
  }
  if (j.contains("nu_range")) c.nu_range = real_list(j, "nu_range");
  if (j.contains("p")) c.p = field<int>(j, "p", "1 or 2");
  if (j.contains("eps_target")) c.eps_target = field<double>(j, "eps_target", "a number");
  if (j.contains("output_dir")) c.output_dir = field<std::string>(j, "output_dir", "a path");
  if (j.contains("precision"))
    c.precision = parse_precision(field<std::string>(j, "precision", "a string"));
  if (j.contains("threads")) c.threads = field<int>(j, "threads", "an integer");
  if (j.contains("t_list")) c.t_list = real_list(j, "t_list");
  if (j.contains("timing")) c.timing = field<bool>(j, "timing", "a boolean");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

json ExperimentConfig::to_json() const {
  return {{"T", T},
          {"theta", theta},
          {"r", r},
          {"method", horizon::to_string(method)},
          {"d_range", {d_min, d_max}},
          {"kernel", kernel},
          {"signal", signal},
          {"tgrid", {{"t_min", t_min}, {"t_max", t_max}, {"n", t_points}}},
          {"grid", {{"omega_max", omega_max}, {"n", grid_points}}},
          {"nu_range", nu_range},
          {"p", p},
          {"noise", noise},
          {"eps_target", eps_target},
          {"output_dir", output_dir},
          {"precision", precision_name(precision)},
          {"threads", threads},
          {"t_list", t_list},
          {"timing", timing}};
}

void ExperimentConfig::validate() const {
  if (!std::isfinite(T) || T < 0.0) throw ConfigError("key 'T': must be finite and >= 0");
  if (!std::isfinite(theta) || theta < 0.0)
    throw ConfigError("key 'theta': must be finite and >= 0");
  if (!(T + theta > 0.0)) throw ConfigError("keys 'T', 'theta': kernel support is empty");
  if (!std::isfinite(r) || !(r > 0.0)) throw ConfigError("key 'r': must be > 0");
  if (d_min < 0 || d_max < d_min) throw ConfigError("key 'd_range': need 0 <= d_min <= d_max");
  if (d_max > kMaxDerivative)
    throw ConfigError("key 'd_range': d_max exceeds " + std::to_string(kMaxDerivative));
  if (p != 1 && p != 2) throw ConfigError("key 'p': must be 1 or 2");
  if (!(eps_target > 0.0)) throw ConfigError("key 'eps_target': must be > 0");
  if (threads < 0) throw ConfigError("key 'threads': must be >= 0");
  if (nu_range.empty()) throw ConfigError("key 'nu_range': must not be empty");
  for (double nu : nu_range)
    if (!std::isfinite(nu) || nu < 0.0) throw ConfigError("key 'nu_range': entries must be >= 0");
  for (double t : t_list)
    if (!std::isfinite(t)) throw ConfigError("key 't_list': entries must be finite");
  auto guard = [](const char* key, auto&& make) {
    try {
      make();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
  };
  guard("tgrid", [this] { make_tgrid(); });
  guard("grid", [this] { make_grid(); });
  guard("kernel", [this] { make_kernel(); });
  guard("signal", [this] { make_signal(); });
  guard("noise", [this] { make_noise(); });
}

TargetKernel ExperimentConfig::make_kernel() const {
  json spec = kernel;
  spec["T"] = T;
  spec["theta"] = theta;
  return TargetKernel::from_json(spec);
}

Signal ExperimentConfig::make_signal() const { return Signal::from_json(signal); }
Signal ExperimentConfig::make_noise() const { return Signal::from_json(noise); }
TimeGrid ExperimentConfig::make_tgrid() const { return TimeGrid(t_min, t_max, t_points); }
SpectralGrid ExperimentConfig::make_grid() const { return SpectralGrid(omega_max, grid_points); }

int ExperimentConfig::resolved_threads() const {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("HORIZON_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CommandOutput cmd_alpha_sweep(const ExperimentConfig& config) {
  CommandOutput out;
  const int n = config.d_max - config.d_min + 1;
  std::vector<std::pair<ApproxMethod, int>> points;
  for (auto m : {ApproxMethod::Taylor, ApproxMethod::Projection})
    for (int d = config.d_min; d <= config.d_max; ++d) points.emplace_back(m, d);
  warm_up();
  const auto alphas = parallel_map<double>(
      points.size(), config.resolved_threads(), [&](std::size_t i) {
        const auto [m, d] = points[i];
        return approximate(m, config.T, config.r, d, config.precision).alpha;
      });

  std::ostringstream csv;
  csv << "d,method,alpha,taylor_bound\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [m, d] = points[i];
    csv << d << ',' << to_string(m) << ',' << format_real(alphas[i]) << ',';
    if (config.T < config.r) csv << format_real(taylor_alpha_bound(config.T, config.r, d));
    csv << '\n';
  }
  out.csv = csv.str();

  bool monotone = true, optimal = true;
  for (int i = 0; i < n; ++i) {
    const double taylor = alphas[i], projection = alphas[n + i];
    if (projection > taylor + 1e-12) optimal = false;
    if (i > 0 && projection > alphas[n + i - 1] + 1e-12) monotone = false;
  }
  out.summary = {{"command", "alpha-sweep"},
                 {"T", config.T},
                 {"r", config.r},
                 {"precision", precision_name(config.precision)},
                 {"projection_non_increasing", monotone},
                 {"projection_below_taylor", optimal}};
  if (!monotone || !optimal) {
    out.exit_code = kExitBoundViolation;
    out.message = !monotone ? "projection alpha is not non-increasing in d"
                            : "projection alpha exceeds the Taylor alpha";
  }
  return out;
}

CommandOutput cmd_convergence(const ExperimentConfig& config) {
  CommandOutput out;
  const TargetKernel h = config.make_kernel();
  const Signal x = config.make_signal();
  const SpectralGrid grid = config.make_grid();
  const TimeGrid tgrid = config.make_tgrid();
  double beta = 0.0;
  if (!check_class(config, x, h, grid, out, &beta)) return out;

  const TargetConvolution conv(h);
  Eigen::VectorXd y(tgrid.n_points());
  for (int i = 0; i < tgrid.n_points(); ++i) y(i) = conv(x, tgrid.nodes()(i));

  struct Row {
    int d = 0;
    double sup_error = 0.0, alpha = 0.0, bound = 0.0, runtime_ms = 0.0;
  };
  warm_up();
  const auto rows = parallel_map<Row>(
      config.d_max - config.d_min + 1, config.resolved_threads(), [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        Row row;
        row.d = config.d_min + static_cast<int>(i);
        const PredictorKernel pk(h, make_psi(config.method, config.T, config.r, row.d,
                                             config.precision));
        for (int k = 0; k < tgrid.n_points(); ++k)
          row.sup_error =
              std::max(row.sup_error, std::abs(y(k) - predict(pk, x, tgrid.nodes()(k))));
        row.alpha = alpha_closed_form(pk.psi(), config.T, config.r, config.precision);
        row.bound = std::sqrt(row.alpha * beta) / (2.0 * kPi);
        row.runtime_ms = config.timing ? elapsed_ms(start) : 0.0;
        return row;
      });

  std::ostringstream csv;
  csv << "d,sup_error,bound,runtime_ms\n";
  json smallest = nullptr;
  json table = json::array();
  bool within = true;
  for (const auto& row : rows) {
    csv << row.d << ',' << format_real(row.sup_error) << ',' << format_real(row.bound) << ','
        << format_real(row.runtime_ms) << '\n';
    if (smallest.is_null() && row.sup_error <= config.eps_target) smallest = row.d;
    if (row.sup_error > row.bound + kQuadratureBudget) within = false;
    table.push_back({{"d", row.d}, {"sup_error", row.sup_error}, {"alpha", row.alpha},
                     {"bound", row.bound}});
  }
  out.csv = csv.str();
  out.summary = {{"command", "convergence"},
                 {"method", to_string(config.method)},
                 {"T", config.T},
                 {"theta", config.theta},
                 {"r", config.r},
                 {"beta", beta},
                 {"eps_target", config.eps_target},
                 {"smallest_d_meeting_target", smallest},
                 {"quadrature_budget", kQuadratureBudget},
                 {"all_within_bound", within},
                 {"rows", table}};
  if (!within) {
    out.exit_code = kExitBoundViolation;
    out.message = "sup error exceeds the analytic bound plus quadrature budget";
  }
  return out;
}

CommandOutput cmd_noise_sweep(const ExperimentConfig& config) {
  CommandOutput out;
  const TargetKernel h = config.make_kernel();
  const Signal x0 = config.make_signal();
  const Signal eta = config.make_noise();
  const SpectralGrid grid = config.make_grid();
  const TimeGrid tgrid = config.make_tgrid();
  double beta = 0.0;
  if (!check_class(config, x0, h, grid, out, &beta)) return out;
  const double raw = spectral_lp_norm(eta, config.p, grid);
  if (!(raw > 0.0)) {
    out.exit_code = kExitConfig;
    out.message = "noise has a zero spectrum on the grid";
    return out;
  }

  // y_hat - y is linear in x, so the clean and pure-noise residuals are
  // computed once per d and combined for every nu.
  const TargetConvolution conv(h);
  const int nt = tgrid.n_points();
  Eigen::VectorXd y0(nt), y_eta(nt);
  for (int i = 0; i < nt; ++i) {
    y0(i) = conv(x0, tgrid.nodes()(i));
    y_eta(i) = conv(eta, tgrid.nodes()(i));
  }
  struct Residual {
    Eigen::VectorXd clean, noise;
    double eps = 0.0, slope = 0.0;
  };
  warm_up();
  const auto residuals = parallel_map<Residual>(
      config.d_max - config.d_min + 1, config.resolved_threads(), [&](std::size_t i) {
        const int d = config.d_min + static_cast<int>(i);
        const PredictorKernel pk(h, make_psi(config.method, config.T, config.r, d,
                                             config.precision));
        Residual res{Eigen::VectorXd(nt), Eigen::VectorXd(nt)};
        for (int k = 0; k < nt; ++k) {
          const double t = tgrid.nodes()(k);
          res.clean(k) = predict(pk, x0, t) - y0(k);
          res.noise(k) = predict(pk, eta, t) - y_eta(k);
        }
        const double alpha = alpha_closed_form(pk.psi(), config.T, config.r, config.precision);
        res.eps = std::sqrt(alpha * beta) / (2.0 * kPi);
        res.slope = noise_bound(pk, h, 1.0, config.p, grid);
        return res;
      });

  std::ostringstream csv;
  csv << "nu,d,empirical_total_error,bound_total\n";
  json table = json::array();
  bool within = true;
  for (double nu : config.nu_range) {
    for (std::size_t i = 0; i < residuals.size(); ++i) {
      const auto& res = residuals[i];
      const int d = config.d_min + static_cast<int>(i);
      const double empirical = (res.clean + (nu / raw) * res.noise).cwiseAbs().maxCoeff();
      const double bound = res.eps + nu * res.slope;
      csv << format_real(nu) << ',' << d << ',' << format_real(empirical) << ','
          << format_real(bound) << '\n';
      if (empirical > bound + kQuadratureBudget) within = false;
      table.push_back({{"nu", nu}, {"d", d}, {"empirical_total_error", empirical},
                       {"bound_total", bound}, {"eps", res.eps}, {"noise_slope", res.slope}});
    }
  }
  out.csv = csv.str();
  out.summary = {{"command", "noise-sweep"},
                 {"method", to_string(config.method)},
                 {"p", config.p},
                 {"beta", beta},
                 {"quadrature_budget", kQuadratureBudget},
                 {"all_within_bound", within},
                 {"rows", table}};
  if (!within) {
    out.exit_code = kExitBoundViolation;
    out.message = "noisy prediction error exceeds the robustness bound";
  }
  return out;
}

CommandOutput cmd_predict(const ExperimentConfig& config) {
  CommandOutput out;
  const TargetKernel h = config.make_kernel();
  const Signal x = config.make_signal();
  const SpectralGrid grid = config.make_grid();
  double beta = 0.0;
  if (!check_class(config, x, h, grid, out, &beta)) return out;

  std::vector<double> times = config.t_list;
  if (times.empty()) {
    const TimeGrid tgrid = config.make_tgrid();
    times.assign(tgrid.nodes().data(), tgrid.nodes().data() + tgrid.n_points());
  }
  const int d = config.d_max;
  warm_up();
  const PredictorKernel pk(h, make_psi(config.method, config.T, config.r, d, config.precision));
  const TargetConvolution conv(h);
  const auto values = parallel_map<std::pair<double, double>>(
      times.size(), config.resolved_threads(), [&](std::size_t i) {
        return std::pair{conv(x, times[i]), predict(pk, x, times[i])};
      });

  std::ostringstream csv;
  csv << "t,y,y_hat,abs_err\n";
  double max_err = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto [y, y_hat] = values[i];
    const double err = std::abs(y - y_hat);
    max_err = std::max(max_err, err);
    csv << format_real(times[i]) << ',' << format_real(y) << ',' << format_real(y_hat) << ','
        << format_real(err) << '\n';
  }
  const double alpha = alpha_closed_form(pk.psi(), config.T, config.r, config.precision);
  const double bound = std::sqrt(alpha * beta) / (2.0 * kPi);
  out.csv = csv.str();
  out.summary = {{"command", "predict"},
                 {"method", to_string(config.method)},
                 {"d", d},
                 {"max_abs_err", max_err},
                 {"bound", bound},
                 {"within_bound", max_err <= bound + kQuadratureBudget}};
  if (max_err > bound + kQuadratureBudget) {
    out.exit_code = kExitBoundViolation;
    out.message = "prediction error exceeds the analytic bound";
  }
  return out;
}

}  // namespace horizon

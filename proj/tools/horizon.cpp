#include "horizon/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using horizon::CommandOutput;
using horizon::ExperimentConfig;

struct Overrides {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::string precision;
  std::string method;
  std::vector<int> d_range;
  std::vector<double> t_list;
  bool timing = false;
};

ExperimentConfig resolve(const Overrides& o) {
  nlohmann::json j = o.config_path.empty()
                         ? ExperimentConfig{}.to_json()
                         : ExperimentConfig::load(o.config_path).to_json();
  if (!o.out_dir.empty()) j["output_dir"] = o.out_dir;
  if (o.threads > 0) j["threads"] = o.threads;
  if (!o.precision.empty()) j["precision"] = o.precision;
  if (!o.method.empty()) j["method"] = o.method;
  if (!o.d_range.empty()) j["d_range"] = o.d_range;
  if (!o.t_list.empty()) j["t_list"] = o.t_list;
  if (o.timing) j["timing"] = true;
  return ExperimentConfig::parse(j.dump());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

int run(const std::string& name, CommandOutput (*command)(const ExperimentConfig&),
        const Overrides& o) {
  ExperimentConfig config;
  try {
    config = resolve(o);
  } catch (const horizon::ConfigError& e) {
    std::cerr << "horizon " << name << ": " << e.what() << '\n';
    return horizon::kExitConfig;
  }
  const CommandOutput result = command(config);
  if (!result.csv.empty()) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / (name + ".csv"), result.csv);
    write_file(dir / (name + ".json"), result.summary.dump(2) + "\n");
    std::cout << (dir / (name + ".csv")).string() << '\n';
  }
  if (result.exit_code != horizon::kExitOk)
    std::cerr << "horizon " << name << ": " << result.message << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limited-memory predictors for signals with exponentially decaying spectra"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--threads", o.threads, "Worker threads (default: HORIZON_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--precision", o.precision, "Polynomial construction precision")
        ->check(CLI::IsMember({"double", "extended"}));
    sub->add_option("--method", o.method, "Polynomial family")
        ->check(CLI::IsMember({"taylor", "projection"}));
    sub->add_option("--d-range", o.d_range, "Degree range: D_MIN D_MAX")->expected(2);
  };

  struct Entry {
    const char* name;
    const char* help;
    CommandOutput (*command)(const ExperimentConfig&);
  };
  const Entry entries[] = {
      {"alpha-sweep", "Approximation error alpha_d for both polynomial families",
       horizon::cmd_alpha_sweep},
      {"convergence", "Sup prediction error against the analytic bound per degree",
       horizon::cmd_convergence},
      {"noise-sweep", "Prediction error under band-limited noise against the robustness bound",
       horizon::cmd_noise_sweep},
      {"predict", "Target and prediction at individual instants", horizon::cmd_predict},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& entry : entries) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.help);
    add_common(sub);
    if (std::string(entry.name) == "convergence")
      sub->add_flag("--timing", o.timing, "Record wall-clock runtime_ms (breaks byte-stability)");
    if (std::string(entry.name) == "predict")
      sub->add_option("--t", o.t_list, "Prediction instants (default: the config t-grid)");
    subs.emplace_back(sub, &entry);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : horizon::kExitConfig;
  }
  for (const auto& [sub, entry] : subs)
    if (sub->parsed()) {
      try {
        return run(entry->name, entry->command, o);
      } catch (const std::exception& e) {
        std::cerr << "horizon " << entry->name << ": " << e.what() << '\n';
        return 1;
      }
    }
  return 0;
}

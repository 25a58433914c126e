// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the HBC link simulator: scenario runs, analytic
// rejection sweeps, BER sweeps, and eye-diagram exports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hbcsim/scenario.hpp"

namespace {

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("sweep_ber: bad value in --values: " + item);
    }
    if (used != item.size())
      throw std::invalid_argument("sweep_ber: bad value in --values: " + item);
    values.push_back(v);
  }
  return values;
}

hbcsim::Scenario load_base(const std::string& config_path,
                           const std::string& preset) {
  if (!preset.empty() && !config_path.empty())
    throw std::invalid_argument("give either a config file or --preset, not both");
  if (!preset.empty()) return hbcsim::preset_scenario(preset);
  if (!config_path.empty()) return hbcsim::load_scenario_file(config_path);
  throw std::invalid_argument("need a config file or --preset");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Broadband NRZ human-body-communication link simulator"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  app.add_option("--out-dir", out_dir, "Directory for output artifacts");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one scenario end to end");
  std::string run_config;
  std::string run_preset;
  std::uint64_t run_seed = 0;
  bool run_seed_given = false;
  run_cmd->add_option("config", run_config, "Scenario config (JSON)");
  run_cmd->add_option("--preset", run_preset, "Built-in scenario name");
  run_cmd->add_option("--seed", run_seed, "Override the noise seed")
      ->each([&run_seed_given](const std::string&) { run_seed_given = true; });

  // sweep-rejection
  auto* rej_cmd = app.add_subcommand(
      "sweep-rejection", "Tabulate the analytic worst-case notch rejection");
  double rej_bit_rate = 1.0e8;
  double rej_f_lo = 8.8e7;
  double rej_f_hi = 1.08e8;
  std::size_t rej_n = 201;
  rej_cmd->add_option("--bit-rate", rej_bit_rate, "Bit rate in Hz");
  rej_cmd->add_option("--f-lo", rej_f_lo, "Sweep start frequency in Hz");
  rej_cmd->add_option("--f-hi", rej_f_hi, "Sweep end frequency in Hz");
  rej_cmd->add_option("--n-points", rej_n, "Number of sweep points");

  // sweep-ber
  auto* ber_cmd = app.add_subcommand(
      "sweep-ber", "Re-run a scenario along one axis and tabulate BER");
  std::string ber_config;
  std::string ber_preset;
  std::string ber_axis;
  std::string ber_values;
  std::uint64_t ber_seed = 1;
  ber_cmd->add_option("config", ber_config, "Base scenario config (JSON)");
  ber_cmd->add_option("--preset", ber_preset, "Built-in base scenario name");
  ber_cmd->add_option("--axis", ber_axis, "Sweep axis: sir_db, f_i, or snr_db")
      ->required();
  ber_cmd->add_option("--values", ber_values, "Comma-separated axis values")
      ->required();
  ber_cmd->add_option("--seed", ber_seed, "Base seed for per-point noise seeds");

  // eye
  auto* eye_cmd = app.add_subcommand("eye", "Export an eye diagram as CSV");
  std::string eye_config;
  std::string eye_preset;
  std::string eye_which = "integrated";
  eye_cmd->add_option("config", eye_config, "Scenario config (JSON)");
  eye_cmd->add_option("--preset", eye_preset, "Built-in scenario name");
  eye_cmd->add_option("--which", eye_which, "Which eye: direct or integrated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (run_cmd->parsed()) {
      hbcsim::Scenario s = load_base(run_config, run_preset);
      if (run_seed_given) {
        if (!s.noise.enabled)
          throw std::invalid_argument("--seed given but the scenario has no noise");
        s.noise.seed = run_seed;
      }
      const hbcsim::RunReport report = hbcsim::run_scenario(s, out_dir);
      std::cout << hbcsim::format_run_report(report);
    } else if (rej_cmd->parsed()) {
      if (!(rej_bit_rate > 0.0))
        throw std::invalid_argument("sweep_rejection: --bit-rate must be > 0");
      std::filesystem::create_directories(out_dir);
      const std::string path =
          (std::filesystem::path(out_dir) / "sweep_rejection.csv").string();
      hbcsim::write_sweep_rejection_csv(1.0 / rej_bit_rate, rej_f_lo, rej_f_hi,
                                        rej_n, path);
      std::cout << "wrote " << path << "\n";
    } else if (ber_cmd->parsed()) {
      const hbcsim::Scenario base = load_base(ber_config, ber_preset);
      const std::vector<double> values = parse_value_list(ber_values);
      std::filesystem::create_directories(out_dir);
      const std::string path =
          (std::filesystem::path(out_dir) / "sweep_ber.csv").string();
      hbcsim::write_sweep_ber_csv(base, ber_axis, values, ber_seed, path);
      std::cout << "wrote " << path << "\n";
    } else if (eye_cmd->parsed()) {
      const hbcsim::Scenario s = load_base(eye_config, eye_preset);
      const auto paths = hbcsim::export_eye(s, eye_which, out_dir);
      for (const std::string& p : paths) std::cout << "wrote " << p << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

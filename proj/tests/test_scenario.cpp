// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hbcsim/scenario.hpp"

using namespace hbcsim;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

void expect_config_error(const std::string& json_text, const std::string& needle) {
  try {
    scenario_from_json(ordered_json::parse(json_text));
    FAIL_CHECK("expected an error mentioning \"" << needle << "\"");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    INFO("message: " << msg);
    CHECK(msg.find(needle) != std::string::npos);
  }
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hbcsim_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

}  // namespace

// ---- presets --------------------------------------------------------------------

TEST_CASE("presets: all five load, validate, and resolve amplitudes") {
  const auto names = preset_names();
  REQUIRE(names.size() == 5);
  for (const std::string& name : names) {
    const Scenario s = preset_scenario(name);
    CHECK(s.name == name);
    CHECK_NOTHROW(validate(s));
    CHECK(resolve_a_sig(s) > 0.0);
    CHECK(s.data.n_bits == 10000);
    CHECK(s.noise.enabled);
    CHECK(s.noise.snr_db == 20.0);
  }
  // Amplitude calibration reference points.
  CHECK(resolve_a_sig(preset_scenario("fig8a")) == doctest::Approx(1.0e-3));
  CHECK(resolve_a_sig(preset_scenario("fig8f")) ==
        doctest::Approx(7.07106781186548e-4).epsilon(1e-9));
  CHECK(resolve_a_sig(preset_scenario("fig8k")) ==
        doctest::Approx(2.23606797749979e-3).epsilon(1e-9));
  CHECK(resolve_a_sig(preset_scenario("fig8p")) ==
        doctest::Approx(2.23606797749979e-3).epsilon(1e-9));
  CHECK_THROWS_AS(preset_scenario("fig8z"), std::invalid_argument);
}

TEST_CASE("presets: interferer placement matches the scenario family") {
  CHECK(preset_scenario("fig8a").interferers.empty());
  const Scenario k = preset_scenario("fig8k");
  REQUIRE(k.interferers.size() == 1);
  CHECK(k.interferers[0].kind == InterfererKind::cw);
  CHECK(k.interferers[0].freq_hz == 1.0e8);
  CHECK(k.interferers[0].power_dbm == -17.0);
  const Scenario p = preset_scenario("fig8p");
  CHECK(p.interferers[0].freq_hz == 9.5e7);
  const Scenario u = preset_scenario("fig8u");
  REQUIRE(u.interferers.size() == 1);
  CHECK(u.interferers[0].kind == InterfererKind::am);
  CHECK(u.interferers[0].carrier_hz == 9.8e7);
  CHECK(u.interferers[0].mod_index == 0.5);
}

TEST_CASE("scenario_echo: every effective parameter appears, defaults included") {
  const Scenario s = preset_scenario("fig8k");
  const ordered_json echo = scenario_echo(s);
  CHECK(echo["name"] == "fig8k");
  CHECK(echo["link"]["bit_rate_hz"] == 1.0e8);
  CHECK(echo["link"]["samples_per_bit"] == 100);
  CHECK(echo["link"]["t_b_s"].get<double>() == doctest::Approx(1.0e-8));
  CHECK(echo["link"]["sample_rate_hz"].get<double>() == doctest::Approx(1.0e10));
  CHECK(echo["data"]["prbs_order"] == 7);
  CHECK(echo["data"]["prbs_seed"] == 127);
  CHECK(echo["data"]["n_bits"] == 10000);
  CHECK(echo["receiver"]["k_int_per_s"] == 1.0e8);
  CHECK(echo["receiver"]["delta_frac"] == 0.0);
  CHECK(echo["receiver"]["threshold_v"] == 0.0);
  CHECK(echo["receiver"]["start_phase"] == 0);
  CHECK(echo["receiver"]["direct_sample_phase"] == 0.5);
  CHECK(echo["receiver"]["cdr_steps"] == 16);
  CHECK(echo["channel"]["coupling_corner_hz"] == 0.0);
  CHECK(echo["channel"]["attenuation_db"] == 0.0);
  CHECK(echo["interferers"].size() == 1);
  CHECK(echo["interferers"][0]["kind"] == "cw");
  CHECK(echo["noise"]["enabled"] == true);
  CHECK(echo["noise"]["seed"] == 1);
  CHECK(echo["calibration"]["mode"] == "sir_db");
  CHECK(echo["calibration"]["sir_db"] == -23.0);
  CHECK(echo["calibration"]["r_ref_ohm"] == 50.0);
  CHECK(echo["calibration"]["a_sig_resolved_v"].get<double>() ==
        doctest::Approx(2.23606797749979e-3));
  CHECK(echo["outputs"].size() == 5);
}

// ---- config parsing ---------------------------------------------------------------

TEST_CASE("scenario_from_json: minimal config fills every default") {
  const Scenario s = scenario_from_json(
      ordered_json::parse(R"({"calibration": {"a_sig_v": 0.001}})"));
  CHECK(s.name == "custom");
  CHECK(s.link.bit_rate == 1.0e8);
  CHECK(s.link.samples_per_bit == 100);
  CHECK(s.data.prbs_order == 7);
  CHECK(s.data.prbs_seed == 127);
  CHECK(s.data.n_bits == 10000);
  CHECK(s.receiver.k_int == 1.0e8);
  CHECK(s.direct_sample_phase == 0.5);
  CHECK(s.cdr_steps == 16);
  CHECK_FALSE(s.noise.enabled);
  CHECK(s.interferers.empty());
  CHECK(s.calibration.has_a_sig);
  CHECK(s.outputs.decisions);
  CHECK(s.outputs.report);
}

TEST_CASE("scenario_from_json: full config round-trips") {
  const char* text = R"({
    "name": "bench",
    "link": {"bit_rate_hz": 5.0e7, "samples_per_bit": 64},
    "data": {"prbs_order": 15, "prbs_seed": 44, "n_bits": 512},
    "receiver": {"k_int_per_s": 5.0e7, "delta_frac": 0.1, "threshold_v": 0.01,
                 "start_phase": 180, "direct_sample_phase": 0.25, "cdr_steps": 32},
    "channel": {"coupling_corner_hz": 1.0e5, "attenuation_db": 6.0},
    "interferers": [
      {"kind": "cw", "power_dbm": -20, "freq_hz": 9.1e7, "phase_rad": 0.5},
      {"kind": "multitone", "power_dbm": -25, "band_lo_hz": 8.8e7,
       "band_hi_hz": 1.08e8, "n_tones": 11, "phase_seed": 3}
    ],
    "noise": {"snr_db": 15.0, "seed": 42},
    "calibration": {"sir_db": -10.0, "r_ref_ohm": 75.0},
    "outputs": ["decisions", "report"]
  })";
  const Scenario s = scenario_from_json(ordered_json::parse(text));
  CHECK(s.name == "bench");
  CHECK(s.link.bit_rate == 5.0e7);
  CHECK(s.link.samples_per_bit == 64);
  CHECK(s.data.prbs_order == 15);
  CHECK(s.receiver.delta_frac == 0.1);
  CHECK(s.receiver.start_phase == 180);
  CHECK(s.cdr_steps == 32);
  CHECK(s.channel.attenuation_db == 6.0);
  REQUIRE(s.interferers.size() == 2);
  CHECK(s.interferers[1].kind == InterfererKind::multitone);
  CHECK(s.interferers[1].n_tones == 11);
  CHECK(s.noise.enabled);
  CHECK(s.noise.seed == 42);
  CHECK(s.calibration.has_sir);
  CHECK(s.calibration.r_ref_ohm == 75.0);
  CHECK(s.outputs.decisions);
  CHECK(s.outputs.report);
  CHECK_FALSE(s.outputs.psd);
  CHECK_FALSE(s.outputs.eye_direct);
}

TEST_CASE("scenario_from_json: errors name the offending key") {
  expect_config_error(R"({"calibration": {"a_sig_v": 1e-3}, "bogus": 1})", "bogus");
  expect_config_error(
      R"({"link": {"bit_rate_hz": 1e8, "samples": 5}, "calibration": {"a_sig_v": 1e-3}})",
      "link.samples");
  expect_config_error(R"({"calibration": {"a_sig_v": 1e-3, "sir_db": -10},
                          "interferers": [{"kind": "cw", "power_dbm": -17, "freq_hz": 9e7}]})",
                      "calibration");
  expect_config_error(R"({})", "calibration");
  expect_config_error(R"({"calibration": {"sir_db": -10}})", "sir_db");
  expect_config_error(R"({"calibration": {"a_sig_v": 1e-3}, "noise": {"snr_db": 20}})",
                      "noise.seed");
  expect_config_error(
      R"({"calibration": {"a_sig_v": 1e-3},
          "interferers": [{"kind": "cw", "power_dbm": -17, "freq_hz": 6.0e9}]})",
      "freq_hz");
  expect_config_error(
      R"({"calibration": {"a_sig_v": 1e-3},
          "interferers": [{"kind": "laser", "power_dbm": -17}]})",
      "kind");
  expect_config_error(
      R"({"calibration": {"a_sig_v": 1e-3}, "outputs": ["decisions", "movie"]})",
      "movie");
  expect_config_error(
      R"({"calibration": {"a_sig_v": 1e-3}, "data": {"n_bits": 8}})", "n_bits");
  expect_config_error(
      R"({"calibration": {"a_sig_v": 1e-3}, "receiver": {"cdr_steps": 2}})",
      "cdr_steps");
  expect_config_error(
      R"({"calibration": {"a_sig_v": 1e-3}, "receiver": {"delta_frac": 0.5}})",
      "delta_frac");
}

TEST_CASE("load_scenario_file: missing file and broken JSON") {
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/nope.json"), std::invalid_argument);
  TempDir tmp("badjson");
  const std::string path = (tmp.path / "bad.json").string();
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_scenario_file(path), std::invalid_argument);
}

// ---- end-to-end runs ---------------------------------------------------------------

TEST_CASE("run_scenario: interference-free baseline is error-free with open eyes") {
  Scenario s = preset_scenario("fig8a");
  s.data.n_bits = 2000;
  TempDir tmp("fig8a");
  const RunReport r = run_scenario(s, tmp.str());

  CHECK(r.a_sig_resolved == doctest::Approx(1.0e-3));
  CHECK(r.noise_sigma == doctest::Approx(1.0e-4));
  CHECK(r.ber_direct.rate == 0.0);
  CHECK(r.ber_integrated.rate == 0.0);
  CHECK(r.eye_height_direct > 0.0);
  CHECK(r.eye_height_integrated > 0.0);
  // Integration averages the noise down: the integrated eye opens wider.
  CHECK(r.eye_height_integrated > r.eye_height_direct);
  // The constructed waveform is aligned, and phase recovery agrees.
  CHECK(r.recovered_phase_s == 0.0);
  CHECK(r.recovered_eye_height > 0.0);

  // All requested artifacts exist on disk and are listed in the report.
  REQUIRE(r.artifacts.size() == 7);
  for (const std::string& a : r.artifacts) CHECK(fs::exists(a));
  const ordered_json report = ordered_json::parse(slurp((tmp.path / "report.json").string()));
  CHECK(report["scenario"]["name"] == "fig8a");
  CHECK(report["results"]["ber_integrated"]["rate"] == 0.0);
  CHECK(report["artifacts"].size() == 7);
}

TEST_CASE("run_scenario: decisions CSV reproduces the reported error counts") {
  Scenario s = preset_scenario("fig8k");
  s.data.n_bits = 1500;
  TempDir tmp("fig8k");
  const RunReport r = run_scenario(s, tmp.str());

  const auto lines = split_lines(slurp((tmp.path / "decisions.csv").string()));
  REQUIRE(lines.size() == 1501);
  CHECK(lines[0] == "bit_index,tx_bit,direct_sample,direct_bit,integrated_sample,integrated_bit");
  std::size_t direct_errors = 0, integrated_errors = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    REQUIRE(f.size() == 6);
    CHECK(std::stoul(f[0]) == i - 1);
    const int tx = std::stoi(f[1]);
    if (tx != std::stoi(f[3])) ++direct_errors;
    if (tx != std::stoi(f[5])) ++integrated_errors;
  }
  CHECK(direct_errors == r.ber_direct.errors);
  CHECK(integrated_errors == r.ber_integrated.errors);
  // The strong on-notch tone closes the direct eye but not the integrated one.
  CHECK(r.eye_height_direct < 0.0);
  CHECK(r.eye_height_integrated > 0.0);
  CHECK(r.ber_integrated.rate == 0.0);
  CHECK(r.ber_direct.rate > 0.1);
}

TEST_CASE("run_scenario: byte-identical artifacts on identical configs") {
  Scenario s = preset_scenario("fig8u");
  s.data.n_bits = 800;
  TempDir a("det_a"), b("det_b");
  run_scenario(s, a.str());
  std::map<std::string, std::string> first;
  for (const char* name : {"decisions.csv", "eye_direct.csv", "eye_integrated.csv",
                           "eye_direct_metrics.csv", "eye_integrated_metrics.csv",
                           "psd.csv", "report.json"})
    first[name] = slurp((a.path / name).string());

  // Rerunning with everything identical (output directory included) must
  // reproduce every artifact byte for byte, the report included.
  run_scenario(s, a.str());
  for (const auto& [name, bytes] : first) {
    INFO("artifact: " << name);
    CHECK(slurp((a.path / name).string()) == bytes);
  }

  // The CSV artifacts carry no paths, so they are also identical across
  // different output directories; the report embeds artifact locations and is
  // excluded from the cross-directory comparison.
  run_scenario(s, b.str());
  for (const auto& [name, bytes] : first) {
    if (name == "report.json") continue;
    INFO("artifact: " << name);
    CHECK(slurp((b.path / name).string()) == bytes);
  }
}

TEST_CASE("run_scenario: artifact selection honors the outputs list") {
  Scenario s = preset_scenario("fig8a");
  s.data.n_bits = 200;
  s.outputs = {};
  s.outputs.psd = true;
  TempDir tmp("psd_only");
  const RunReport r = run_scenario(s, tmp.str());
  REQUIRE(r.artifacts.size() == 1);
  CHECK(fs::exists(tmp.path / "psd.csv"));
  CHECK_FALSE(fs::exists(tmp.path / "decisions.csv"));
  const auto lines = split_lines(slurp((tmp.path / "psd.csv").string()));
  CHECK(lines[0] == "freq_hz,density_dbhz");
  REQUIRE(lines.size() >= 3);
  CHECK(split_fields(lines[1])[0] == "0");
}

TEST_CASE("format_run_report: readable summary carries the key numbers") {
  Scenario s = preset_scenario("fig8a");
  s.data.n_bits = 200;
  s.outputs = {};
  const RunReport r = run_scenario(s, "unused_dir_not_created");
  const std::string text = format_run_report(r);
  CHECK(text.find("ber_direct") != std::string::npos);
  CHECK(text.find("ber_integrated") != std::string::npos);
  CHECK(text.find("eye_height_integrated_v") != std::string::npos);
  CHECK(text.find("a_sig_resolved_v: 0.001") != std::string::npos);
  CHECK(text.find("\"name\": \"fig8a\"") != std::string::npos);
  CHECK_FALSE(fs::exists("unused_dir_not_created"));
}

// ---- sweeps -------------------------------------------------------------------------

TEST_CASE("write_sweep_rejection_csv: pinned 6-significant-digit rows") {
  TempDir tmp("rej");
  const std::string path = (tmp.path / "sweep_rejection.csv").string();
  write_sweep_rejection_csv(1.0e-8, 8.8e7, 1.08e8, 201, path);
  const auto lines = split_lines(slurp(path));
  REQUIRE(lines.size() == 202);
  CHECK(lines[0] == "freq_hz,rejection_db");
  CHECK(lines[1] == "8.8e+07,17.5128");
  CHECK(lines[71] == "9.5e+07,25.6108");   // row for 95 MHz
  CHECK(lines[121] == "1e+08,120");        // the notch hits the cap
  CHECK(lines[201] == "1.08e+08,22.6983");
}

TEST_CASE("sweep points: axis edits, per-point seeds, and validation") {
  const Scenario base = preset_scenario("fig8k");
  const Scenario p0 = scenario_for_sweep_point(base, "sir_db", -10.0, 99, 0);
  CHECK(p0.calibration.sir_db == -10.0);
  CHECK(p0.noise.seed == mix_seed(99, 0));
  const Scenario p1 = scenario_for_sweep_point(base, "sir_db", -10.0, 99, 1);
  CHECK(p1.noise.seed == mix_seed(99, 1));
  CHECK(p0.noise.seed != p1.noise.seed);

  const Scenario pf = scenario_for_sweep_point(base, "f_i", 9.1e7, 99, 0);
  CHECK(pf.interferers[0].freq_hz == 9.1e7);
  const Scenario pu = scenario_for_sweep_point(preset_scenario("fig8u"), "f_i", 9.1e7, 99, 0);
  CHECK(pu.interferers[0].carrier_hz == 9.1e7);
  const Scenario ps = scenario_for_sweep_point(base, "snr_db", 10.0, 99, 0);
  CHECK(ps.noise.snr_db == 10.0);

  CHECK_THROWS_AS(scenario_for_sweep_point(base, "bogus", 1.0, 99, 0),
                  std::invalid_argument);
  Scenario no_intf = preset_scenario("fig8a");
  CHECK_THROWS_AS(scenario_for_sweep_point(no_intf, "sir_db", -10.0, 99, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(scenario_for_sweep_point(no_intf, "f_i", 9.0e7, 99, 0),
                  std::invalid_argument);
  Scenario no_noise = base;
  no_noise.noise.enabled = false;
  CHECK_THROWS_AS(scenario_for_sweep_point(no_noise, "snr_db", 10.0, 99, 0),
                  std::invalid_argument);
}

TEST_CASE("write_sweep_ber_csv: rows cross-check against direct recomputation") {
  Scenario base = preset_scenario("fig8k");
  base.data.n_bits = 600;
  const std::vector<double> values{-23.0, -11.0, 0.0};
  TempDir tmp("bercsv");
  const std::string path = (tmp.path / "sweep_ber.csv").string();
  write_sweep_ber_csv(base, "sir_db", values, 7, path);

  const auto lines = split_lines(slurp(path));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "axis_value,ber_direct,ber_integrated,ci95_lo,ci95_hi");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto f = split_fields(lines[i + 1]);
    REQUIRE(f.size() == 5);
    CHECK(f[0] == fmt9(values[i]));
    const Scenario point = scenario_for_sweep_point(base, "sir_db", values[i], 7, i);
    const ChainProducts p = run_chain(point);
    const BerResult bd = ber(p.tx_bits, p.direct.bits);
    const BerResult bi = ber(p.tx_bits, p.integrated.bits);
    CHECK(f[1] == fmt9(bd.rate));
    CHECK(f[2] == fmt9(bi.rate));
    CHECK(f[3] == fmt9(bi.ci95_lo));
    CHECK(f[4] == fmt9(bi.ci95_hi));
    // On-notch interference never breaks the integrating receiver.
    CHECK(bi.rate <= 1.0e-3);
  }
  CHECK_THROWS_AS(write_sweep_ber_csv(base, "sir_db", {}, 7, path),
                  std::invalid_argument);
}

// ---- eye export ----------------------------------------------------------------------

TEST_CASE("export_eye: CSV traces capped at 512, metrics cover all folds") {
  Scenario s = preset_scenario("fig8k");
  s.data.n_bits = 800;
  TempDir tmp("eye");
  const auto paths = export_eye(s, "integrated", tmp.str());
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == (tmp.path / "eye_integrated.csv").string());

  const auto lines = split_lines(slurp(paths[0]));
  CHECK(lines[0] == "trace_id,t_s,v");
  // 512 traces x 100 samples per fold.
  REQUIRE(lines.size() == 1 + 512 * 100);
  CHECK(split_fields(lines[1])[0] == "0");
  CHECK(split_fields(lines.back())[0] == "511");

  const auto metrics = split_lines(slurp(paths[1]));
  REQUIRE(metrics.size() == 2);
  CHECK(metrics[0] == "eye_height_v,eye_width_s,sampling_instant_s,n_traces");
  const auto mf = split_fields(metrics[1]);
  REQUIRE(mf.size() == 4);
  CHECK(std::stod(mf[0]) > 0.0);  // integrated eye open under the on-notch tone
  CHECK(mf[3] == "800");

  const auto direct_paths = export_eye(s, "direct", tmp.str());
  const auto dm = split_fields(split_lines(slurp(direct_paths[1]))[1]);
  CHECK(std::stod(dm[0]) < 0.0);  // direct eye closed
  CHECK_THROWS_AS(export_eye(s, "bogus", tmp.str()), std::invalid_argument);
}

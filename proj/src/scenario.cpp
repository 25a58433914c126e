// SPDX-License-Identifier: Apache-2.0

#include "hbcsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hbcsim {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr double kQuarterTurn = std::numbers::pi / 4.0;
constexpr std::size_t kMaxEyeTracesInCsv = 512;

std::string fmt_g(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

// ---- strict config parsing -------------------------------------------------

[[noreturn]] void bad_key(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

void check_allowed(const ordered_json& obj, const std::string& section,
                   std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad_key(section, "must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok) bad_key(section + "." + item.key(), "unknown key");
  }
}

double get_num(const ordered_json& obj, const std::string& section,
               const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) bad_key(section + "." + key, "must be a number");
  return it->get<double>();
}

double get_num_req(const ordered_json& obj, const std::string& section,
                   const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad_key(section + "." + key, "required key missing");
  if (!it->is_number()) bad_key(section + "." + key, "must be a number");
  return it->get<double>();
}

std::uint64_t get_u64(const ordered_json& obj, const std::string& section,
                      const char* key, std::uint64_t fallback,
                      bool required = false) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) bad_key(section + "." + key, "required key missing");
    return fallback;
  }
  if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() && it->get<long long>() < 0))
    bad_key(section + "." + key, "must be a non-negative integer");
  return it->get<std::uint64_t>();
}

long long get_int(const ordered_json& obj, const std::string& section,
                  const char* key, long long fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) bad_key(section + "." + key, "must be an integer");
  return it->get<long long>();
}

InterferenceSpec parse_interferer(const ordered_json& j, const std::string& section) {
  if (!j.is_object()) bad_key(section, "must be an object");
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string())
    bad_key(section + ".kind", "required string (\"cw\", \"am\", or \"multitone\")");
  const std::string kind = kind_it->get<std::string>();

  InterferenceSpec spec;
  if (kind == "cw") {
    spec.kind = InterfererKind::cw;
    check_allowed(j, section, {"kind", "power_dbm", "freq_hz", "phase_rad"});
    spec.power_dbm = get_num_req(j, section, "power_dbm");
    spec.freq_hz = get_num_req(j, section, "freq_hz");
    spec.phase_rad = get_num(j, section, "phase_rad", 0.0);
  } else if (kind == "am") {
    spec.kind = InterfererKind::am;
    check_allowed(j, section,
                  {"kind", "power_dbm", "carrier_hz", "mod_hz", "mod_index", "phase_rad"});
    spec.power_dbm = get_num_req(j, section, "power_dbm");
    spec.carrier_hz = get_num_req(j, section, "carrier_hz");
    spec.mod_hz = get_num(j, section, "mod_hz", 1.0e6);
    spec.mod_index = get_num(j, section, "mod_index", 0.5);
    spec.phase_rad = get_num(j, section, "phase_rad", 0.0);
  } else if (kind == "multitone") {
    spec.kind = InterfererKind::multitone;
    check_allowed(j, section,
                  {"kind", "power_dbm", "band_lo_hz", "band_hi_hz", "n_tones", "phase_seed"});
    spec.power_dbm = get_num_req(j, section, "power_dbm");
    spec.band_lo_hz = get_num(j, section, "band_lo_hz", 8.8e7);
    spec.band_hi_hz = get_num(j, section, "band_hi_hz", 1.08e8);
    spec.n_tones = static_cast<int>(get_int(j, section, "n_tones", 21));
    spec.phase_seed = get_u64(j, section, "phase_seed", 0, /*required=*/true);
  } else {
    bad_key(section + ".kind", "must be \"cw\", \"am\", or \"multitone\"");
  }
  return spec;
}

const char* kind_name(InterfererKind kind) {
  switch (kind) {
    case InterfererKind::cw: return "cw";
    case InterfererKind::am: return "am";
    case InterfererKind::multitone: return "multitone";
  }
  return "?";
}

// ---- shared artifact builders ----------------------------------------------

// The direct receiver's sampling instant inside one bit-period fold.
double direct_instant(const Scenario& s) {
  const auto spb = static_cast<double>(s.link.samples_per_bit);
  auto idx = static_cast<std::size_t>(std::llround(s.direct_sample_phase * spb));
  idx = std::min<std::size_t>(idx, s.link.samples_per_bit - 1);
  return static_cast<double>(idx) / s.link.sample_rate();
}

// The integrated trace's decision instant: the sample at T_b - delta, or the
// last in-window sample when delta = 0 (the full-window value has no sample of
// its own on the running trace).
double integrated_instant(const Scenario& s) {
  const auto spb = s.link.samples_per_bit;
  const auto delta_samples = static_cast<std::size_t>(
      std::llround(s.receiver.delta_frac * static_cast<double>(spb)));
  const std::size_t idx = std::min(spb - delta_samples, spb - 1);
  return static_cast<double>(idx) / s.link.sample_rate();
}

EyeDiagram build_eye(const ChainProducts& p, const Scenario& s, bool integrated) {
  const double t_b = s.link.bit_period();
  return integrated
             ? eye_diagram(p.integrated_trace, t_b, 0.0, integrated_instant(s))
             : eye_diagram(p.rx, t_b, 0.0, direct_instant(s));
}

void write_eye_csv(const EyeDiagram& eye, double sample_rate,
                   const std::string& csv_path, const std::string& metrics_path) {
  {
    auto out = open_out(csv_path);
    out << "trace_id,t_s,v\n";
    const std::size_t n = std::min(eye.traces.size(), kMaxEyeTracesInCsv);
    for (std::size_t f = 0; f < n; ++f)
      for (std::size_t t = 0; t < eye.traces[f].size(); ++t)
        out << f << ',' << fmt_g(static_cast<double>(t) / sample_rate, 9) << ','
            << fmt_g(eye.traces[f][t], 9) << '\n';
  }
  {
    auto out = open_out(metrics_path);
    out << "eye_height_v,eye_width_s,sampling_instant_s,n_traces\n";
    out << fmt_g(eye.eye_height, 9) << ',' << fmt_g(eye.eye_width, 9) << ','
        << fmt_g(eye.sampling_instant, 9) << ',' << eye.traces.size() << '\n';
  }
}

ordered_json ber_json(const BerResult& b) {
  return ordered_json{{"errors", b.errors},
                      {"rate", b.rate},
                      {"ci95_lo", b.ci95_lo},
                      {"ci95_hi", b.ci95_hi}};
}

}  // namespace

// ---- presets -----------------------------------------------------------------

std::vector<std::string> preset_names() {
  return {"fig8a", "fig8f", "fig8k", "fig8p", "fig8u"};
}

Scenario preset_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  s.link.bit_rate = 1.0e8;
  s.link.samples_per_bit = 100;
  s.receiver.k_int = 1.0e8;  // 1/T_b: integrated rail equals +/- a_sig
  s.receiver.delta_frac = 0.0;
  s.receiver.threshold = 0.0;
  s.receiver.start_phase = 0;
  s.direct_sample_phase = 0.5;
  s.cdr_steps = 16;
  s.data = {7, 127, 10000};
  s.noise = {true, 20.0, 1};
  s.calibration.r_ref_ohm = 50.0;
  s.outputs = {true, true, true, true, true};

  InterferenceSpec cw;
  cw.kind = InterfererKind::cw;
  cw.phase_rad = kQuarterTurn;

  if (name == "fig8a") {
    // Baseline: noise only, no interferer.
    s.calibration.has_a_sig = true;
    s.calibration.a_sig_v = 1.0e-3;
  } else if (name == "fig8f") {
    // Moderate CW tone sitting exactly on the bit-rate notch.
    cw.freq_hz = 1.0e8;
    cw.power_dbm = -39.0;
    s.interferers = {cw};
    s.calibration.has_sir = true;
    s.calibration.sir_db = -11.0;
  } else if (name == "fig8k") {
    // Strong CW tone on the notch.
    cw.freq_hz = 1.0e8;
    cw.power_dbm = -17.0;
    s.interferers = {cw};
    s.calibration.has_sir = true;
    s.calibration.sir_db = -23.0;
  } else if (name == "fig8p") {
    // Strong CW tone off-notch, mid FM band.
    cw.freq_hz = 9.5e7;
    cw.power_dbm = -17.0;
    s.interferers = {cw};
    s.calibration.has_sir = true;
    s.calibration.sir_db = -23.0;
  } else if (name == "fig8u") {
    // Strong AM interferer mid FM band.
    InterferenceSpec am;
    am.kind = InterfererKind::am;
    am.power_dbm = -17.0;
    am.carrier_hz = 9.8e7;
    am.mod_hz = 1.0e6;
    am.mod_index = 0.5;
    am.phase_rad = kQuarterTurn;
    s.interferers = {am};
    s.calibration.has_sir = true;
    s.calibration.sir_db = -23.0;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return s;
}

// ---- config ------------------------------------------------------------------

Scenario scenario_from_json(const ordered_json& config) {
  check_allowed(config, "(top level)",
                {"name", "link", "data", "receiver", "channel", "interferers",
                 "noise", "calibration", "outputs"});
  Scenario s;

  if (auto it = config.find("name"); it != config.end()) {
    if (!it->is_string()) bad_key("name", "must be a string");
    s.name = it->get<std::string>();
  }

  const ordered_json empty = ordered_json::object();
  const ordered_json& link = config.contains("link") ? config.at("link") : empty;
  check_allowed(link, "link", {"bit_rate_hz", "samples_per_bit"});
  s.link.bit_rate = get_num(link, "link", "bit_rate_hz", 1.0e8);
  const long long spb = get_int(link, "link", "samples_per_bit", 100);
  if (spb < 1) bad_key("link.samples_per_bit", "must be a positive integer");
  s.link.samples_per_bit = static_cast<std::size_t>(spb);

  const ordered_json& data = config.contains("data") ? config.at("data") : empty;
  check_allowed(data, "data", {"prbs_order", "prbs_seed", "n_bits"});
  s.data.prbs_order = static_cast<int>(get_int(data, "data", "prbs_order", 7));
  s.data.prbs_seed = get_u64(data, "data", "prbs_seed", 127);
  const long long n_bits = get_int(data, "data", "n_bits", 10000);
  if (n_bits < 1) bad_key("data.n_bits", "must be a positive integer");
  s.data.n_bits = static_cast<std::size_t>(n_bits);

  const ordered_json& rx = config.contains("receiver") ? config.at("receiver") : empty;
  check_allowed(rx, "receiver",
                {"k_int_per_s", "delta_frac", "threshold_v", "start_phase",
                 "direct_sample_phase", "cdr_steps"});
  s.receiver.k_int = get_num(rx, "receiver", "k_int_per_s", s.link.bit_rate);
  s.receiver.delta_frac = get_num(rx, "receiver", "delta_frac", 0.0);
  s.receiver.threshold = get_num(rx, "receiver", "threshold_v", 0.0);
  s.receiver.start_phase = static_cast<int>(get_int(rx, "receiver", "start_phase", 0));
  s.direct_sample_phase = get_num(rx, "receiver", "direct_sample_phase", 0.5);
  s.cdr_steps = static_cast<int>(get_int(rx, "receiver", "cdr_steps", 16));

  const ordered_json& ch = config.contains("channel") ? config.at("channel") : empty;
  check_allowed(ch, "channel", {"coupling_corner_hz", "attenuation_db"});
  s.channel.coupling_corner_hz = get_num(ch, "channel", "coupling_corner_hz", 0.0);
  s.channel.attenuation_db = get_num(ch, "channel", "attenuation_db", 0.0);

  if (auto it = config.find("interferers"); it != config.end()) {
    if (!it->is_array()) bad_key("interferers", "must be an array");
    std::size_t idx = 0;
    for (const auto& item : *it) {
      s.interferers.push_back(
          parse_interferer(item, "interferers[" + std::to_string(idx) + "]"));
      ++idx;
    }
  }

  if (auto it = config.find("noise"); it != config.end()) {
    check_allowed(*it, "noise", {"snr_db", "seed"});
    s.noise.enabled = true;
    s.noise.snr_db = get_num_req(*it, "noise", "snr_db");
    s.noise.seed = get_u64(*it, "noise", "seed", 0, /*required=*/true);
  }

  if (auto it = config.find("calibration"); it != config.end()) {
    check_allowed(*it, "calibration", {"sir_db", "a_sig_v", "r_ref_ohm"});
    if (it->contains("sir_db")) {
      s.calibration.has_sir = true;
      s.calibration.sir_db = get_num_req(*it, "calibration", "sir_db");
    }
    if (it->contains("a_sig_v")) {
      s.calibration.has_a_sig = true;
      s.calibration.a_sig_v = get_num_req(*it, "calibration", "a_sig_v");
    }
    s.calibration.r_ref_ohm = get_num(*it, "calibration", "r_ref_ohm", 50.0);
  }

  if (auto it = config.find("outputs"); it != config.end()) {
    if (!it->is_array()) bad_key("outputs", "must be an array of artifact names");
    for (const auto& item : *it) {
      if (!item.is_string()) bad_key("outputs", "entries must be strings");
      const std::string a = item.get<std::string>();
      if (a == "decisions") s.outputs.decisions = true;
      else if (a == "eye_direct") s.outputs.eye_direct = true;
      else if (a == "eye_integrated") s.outputs.eye_integrated = true;
      else if (a == "psd") s.outputs.psd = true;
      else if (a == "report") s.outputs.report = true;
      else bad_key("outputs", "unknown artifact: " + a);
    }
  } else {
    s.outputs = {true, true, true, true, true};
  }

  validate(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

void validate(const Scenario& s) {
  if (s.name.empty()) bad_key("name", "must not be empty");

  LinkParams link = s.link;
  link.a_sig = 1.0;  // structural check; the real amplitude is calibrated below
  link.k_int = s.receiver.k_int;
  link.delta_frac = s.receiver.delta_frac;
  validate(link);
  validate(s.receiver);

  if (s.data.prbs_order != 7 && s.data.prbs_order != 15)
    bad_key("data.prbs_order", "must be 7 or 15");
  const std::uint64_t mask = (1ULL << s.data.prbs_order) - 1;
  if (s.data.prbs_seed == 0 || s.data.prbs_seed > mask)
    bad_key("data.prbs_seed", "must be nonzero and fit in the PRBS order");
  if (s.data.n_bits < 32)
    bad_key("data.n_bits", "must be >= 32 (phase recovery and eye folding need it)");

  if (!(s.direct_sample_phase >= 0.0 && s.direct_sample_phase < 1.0))
    bad_key("receiver.direct_sample_phase", "must be in [0, 1)");
  if (s.cdr_steps < 8) bad_key("receiver.cdr_steps", "must be >= 8");

  const double nyquist = s.link.sample_rate() / 2.0;
  if (s.channel.coupling_corner_hz < 0.0)
    bad_key("channel.coupling_corner_hz", "must be >= 0");
  if (s.channel.coupling_corner_hz >= nyquist && s.channel.coupling_corner_hz != 0.0)
    bad_key("channel.coupling_corner_hz", "at or above Nyquist");
  if (s.channel.attenuation_db < 0.0)
    bad_key("channel.attenuation_db", "must be >= 0");

  for (std::size_t i = 0; i < s.interferers.size(); ++i) {
    const InterferenceSpec& spec = s.interferers[i];
    const std::string where = "interferers[" + std::to_string(i) + "]";
    if (!std::isfinite(spec.power_dbm)) bad_key(where + ".power_dbm", "must be finite");
    switch (spec.kind) {
      case InterfererKind::cw:
        if (!(spec.freq_hz > 0.0) || spec.freq_hz >= nyquist)
          bad_key(where + ".freq_hz", "must be in (0, Nyquist)");
        break;
      case InterfererKind::am:
        if (!(spec.carrier_hz > 0.0) || spec.carrier_hz >= nyquist)
          bad_key(where + ".carrier_hz", "must be in (0, Nyquist)");
        if (!(spec.mod_hz > 0.0) || spec.mod_hz >= spec.carrier_hz)
          bad_key(where + ".mod_hz", "must be in (0, carrier_hz)");
        if (!(spec.mod_index >= 0.0 && spec.mod_index <= 1.0))
          bad_key(where + ".mod_index", "must be in [0, 1]");
        break;
      case InterfererKind::multitone:
        if (!(spec.band_lo_hz > 0.0) || !(spec.band_lo_hz < spec.band_hi_hz))
          bad_key(where + ".band_lo_hz", "need 0 < band_lo_hz < band_hi_hz");
        if (spec.band_hi_hz >= nyquist)
          bad_key(where + ".band_hi_hz", "at or above Nyquist");
        if (spec.n_tones < 1) bad_key(where + ".n_tones", "must be >= 1");
        break;
    }
  }

  if (s.noise.enabled && !std::isfinite(s.noise.snr_db))
    bad_key("noise.snr_db", "must be finite");

  if (s.calibration.has_sir == s.calibration.has_a_sig)
    bad_key("calibration", "exactly one of sir_db or a_sig_v is required");
  if (s.calibration.has_a_sig && !(s.calibration.a_sig_v > 0.0))
    bad_key("calibration.a_sig_v", "must be > 0");
  if (s.calibration.has_sir && s.interferers.empty())
    bad_key("calibration.sir_db", "needs at least one interferer as power reference");
  if (!(s.calibration.r_ref_ohm > 0.0))
    bad_key("calibration.r_ref_ohm", "must be > 0");
}

double resolve_a_sig(const Scenario& s) {
  if (s.calibration.has_a_sig) return s.calibration.a_sig_v;
  const double a_intf = dbm_to_peak_amplitude(s.interferers.front().power_dbm,
                                              s.calibration.r_ref_ohm);
  return sig_amplitude_from_sir(a_intf, s.calibration.sir_db);
}

nlohmann::ordered_json scenario_echo(const Scenario& s) {
  ordered_json j;
  j["name"] = s.name;
  j["link"] = {{"bit_rate_hz", s.link.bit_rate},
               {"samples_per_bit", s.link.samples_per_bit},
               {"t_b_s", s.link.bit_period()},
               {"sample_rate_hz", s.link.sample_rate()}};
  j["data"] = {{"prbs_order", s.data.prbs_order},
               {"prbs_seed", s.data.prbs_seed},
               {"n_bits", s.data.n_bits}};
  j["receiver"] = {{"k_int_per_s", s.receiver.k_int},
                   {"delta_frac", s.receiver.delta_frac},
                   {"threshold_v", s.receiver.threshold},
                   {"start_phase", s.receiver.start_phase},
                   {"direct_sample_phase", s.direct_sample_phase},
                   {"cdr_steps", s.cdr_steps}};
  j["channel"] = {{"coupling_corner_hz", s.channel.coupling_corner_hz},
                  {"attenuation_db", s.channel.attenuation_db}};
  j["interferers"] = ordered_json::array();
  for (const InterferenceSpec& spec : s.interferers) {
    ordered_json item;
    item["kind"] = kind_name(spec.kind);
    item["power_dbm"] = spec.power_dbm;
    switch (spec.kind) {
      case InterfererKind::cw:
        item["freq_hz"] = spec.freq_hz;
        item["phase_rad"] = spec.phase_rad;
        break;
      case InterfererKind::am:
        item["carrier_hz"] = spec.carrier_hz;
        item["mod_hz"] = spec.mod_hz;
        item["mod_index"] = spec.mod_index;
        item["phase_rad"] = spec.phase_rad;
        break;
      case InterfererKind::multitone:
        item["band_lo_hz"] = spec.band_lo_hz;
        item["band_hi_hz"] = spec.band_hi_hz;
        item["n_tones"] = spec.n_tones;
        item["phase_seed"] = spec.phase_seed;
        break;
    }
    j["interferers"].push_back(item);
  }
  j["noise"] = s.noise.enabled
                   ? ordered_json{{"enabled", true},
                                  {"snr_db", s.noise.snr_db},
                                  {"seed", s.noise.seed}}
                   : ordered_json{{"enabled", false}};
  ordered_json cal;
  cal["mode"] = s.calibration.has_sir ? "sir_db" : "a_sig_v";
  if (s.calibration.has_sir) cal["sir_db"] = s.calibration.sir_db;
  if (s.calibration.has_a_sig) cal["a_sig_v"] = s.calibration.a_sig_v;
  cal["r_ref_ohm"] = s.calibration.r_ref_ohm;
  cal["a_sig_resolved_v"] = resolve_a_sig(s);
  j["calibration"] = cal;
  ordered_json outs = ordered_json::array();
  if (s.outputs.decisions) outs.push_back("decisions");
  if (s.outputs.eye_direct) outs.push_back("eye_direct");
  if (s.outputs.eye_integrated) outs.push_back("eye_integrated");
  if (s.outputs.psd) outs.push_back("psd");
  if (s.outputs.report) outs.push_back("report");
  j["outputs"] = outs;
  return j;
}

// ---- chain -------------------------------------------------------------------

ChainProducts run_chain(const Scenario& s) {
  validate(s);
  ChainProducts p;
  p.a_sig = resolve_a_sig(s);

  LinkParams link = s.link;
  link.a_sig = p.a_sig;
  link.k_int = s.receiver.k_int;
  link.delta_frac = s.receiver.delta_frac;

  p.tx_bits = prbs(s.data.prbs_order, s.data.prbs_seed, s.data.n_bits);
  Waveform tx = nrz_modulate(p.tx_bits, link);

  // Signal path goes through the coupling channel; interference and noise are
  // picked up at the receiver, after it.
  Waveform sig = rc_highpass(tx, s.channel.coupling_corner_hz);
  sig = attenuate(sig, s.channel.attenuation_db);
  p.a_sig_rx = p.a_sig * std::pow(10.0, -s.channel.attenuation_db / 20.0);

  std::vector<Waveform> parts;
  parts.reserve(1 + s.interferers.size());
  parts.push_back(std::move(sig));
  const double duration = tx.duration();
  for (const InterferenceSpec& spec : s.interferers)
    parts.push_back(make_interference(spec, link.sample_rate(), duration,
                                      s.calibration.r_ref_ohm));
  Waveform rx = superpose(parts);

  if (s.noise.enabled) {
    p.noise_sigma = noise_sigma_from_snr(p.a_sig_rx, s.noise.snr_db);
    rx = add_awgn(rx, p.noise_sigma, s.noise.seed);
  }
  p.rx = std::move(rx);

  p.direct = direct_demodulate(p.rx, link, s.direct_sample_phase);
  p.integrated = ddr_demodulate(p.rx, link, s.receiver);
  p.integrated_trace = superpose({p.integrated.traces[0], p.integrated.traces[1]});
  return p;
}

RunReport run_scenario(const Scenario& s, const std::string& out_dir) {
  const ChainProducts p = run_chain(s);

  LinkParams link = s.link;
  link.a_sig = p.a_sig;
  link.k_int = s.receiver.k_int;
  link.delta_frac = s.receiver.delta_frac;

  RunReport r;
  r.scenario_echo = scenario_echo(s);
  r.a_sig_resolved = p.a_sig;
  r.noise_sigma = p.noise_sigma;
  r.ber_direct = ber(p.tx_bits, p.direct.bits);
  r.ber_integrated = ber(p.tx_bits, p.integrated.bits);
  r.eye_height_direct = sampled_eye_height(p.direct.samples);
  r.eye_height_integrated = sampled_eye_height(p.integrated.samples);
  const auto [phase, height] =
      recover_sampling_phase(p.rx, link, s.receiver, s.cdr_steps);
  r.recovered_phase_s = phase;
  r.recovered_eye_height = height;

  const bool any_output = s.outputs.decisions || s.outputs.eye_direct ||
                          s.outputs.eye_integrated || s.outputs.psd ||
                          s.outputs.report;
  if (!any_output) return r;
  fs::create_directories(out_dir);
  const auto path_of = [&out_dir](const char* file) {
    return (fs::path(out_dir) / file).string();
  };

  if (s.outputs.decisions) {
    const std::string path = path_of("decisions.csv");
    auto out = open_out(path);
    out << "bit_index,tx_bit,direct_sample,direct_bit,integrated_sample,integrated_bit\n";
    for (std::size_t k = 0; k < p.tx_bits.size(); ++k)
      out << k << ',' << int(p.tx_bits[k]) << ',' << fmt_g(p.direct.samples[k], 9)
          << ',' << int(p.direct.bits[k]) << ',' << fmt_g(p.integrated.samples[k], 9)
          << ',' << int(p.integrated.bits[k]) << '\n';
    r.artifacts.push_back(path);
  }
  if (s.outputs.eye_direct) {
    const EyeDiagram eye = build_eye(p, s, /*integrated=*/false);
    const std::string csv = path_of("eye_direct.csv");
    const std::string metrics = path_of("eye_direct_metrics.csv");
    write_eye_csv(eye, s.link.sample_rate(), csv, metrics);
    r.artifacts.push_back(csv);
    r.artifacts.push_back(metrics);
  }
  if (s.outputs.eye_integrated) {
    const EyeDiagram eye = build_eye(p, s, /*integrated=*/true);
    const std::string csv = path_of("eye_integrated.csv");
    const std::string metrics = path_of("eye_integrated_metrics.csv");
    write_eye_csv(eye, s.link.sample_rate(), csv, metrics);
    r.artifacts.push_back(csv);
    r.artifacts.push_back(metrics);
  }
  if (s.outputs.psd) {
    std::size_t segment = 4096;
    while (segment > p.rx.samples.size()) segment /= 2;
    const auto points = psd(p.rx, segment, 0.5, "hann");
    const std::string path = path_of("psd.csv");
    auto out = open_out(path);
    out << "freq_hz,density_dbhz\n";
    for (const PsdPoint& pt : points)
      out << fmt_g(pt.freq_hz, 9) << ',' << fmt_g(pt.density_dbhz, 9) << '\n';
    r.artifacts.push_back(path);
  }
  if (s.outputs.report) {
    const std::string path = path_of("report.json");
    r.artifacts.push_back(path);
    ordered_json j;
    j["scenario"] = r.scenario_echo;
    j["results"] = {{"a_sig_resolved_v", r.a_sig_resolved},
                    {"noise_sigma_v", r.noise_sigma},
                    {"ber_direct", ber_json(r.ber_direct)},
                    {"ber_integrated", ber_json(r.ber_integrated)},
                    {"eye_height_direct_v", r.eye_height_direct},
                    {"eye_height_integrated_v", r.eye_height_integrated},
                    {"recovered_phase_s", r.recovered_phase_s},
                    {"recovered_eye_height_v", r.recovered_eye_height}};
    j["artifacts"] = r.artifacts;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
  }
  return r;
}

std::string format_run_report(const RunReport& r) {
  std::ostringstream out;
  out << "== effective scenario ==\n" << r.scenario_echo.dump(2) << "\n";
  out << "== results ==\n";
  out << "a_sig_resolved_v: " << fmt_g(r.a_sig_resolved, 9) << "\n";
  out << "noise_sigma_v: " << fmt_g(r.noise_sigma, 9) << "\n";
  out << "ber_direct: rate=" << fmt_g(r.ber_direct.rate, 9)
      << " errors=" << r.ber_direct.errors << " ci95=["
      << fmt_g(r.ber_direct.ci95_lo, 9) << ", " << fmt_g(r.ber_direct.ci95_hi, 9)
      << "]\n";
  out << "ber_integrated: rate=" << fmt_g(r.ber_integrated.rate, 9)
      << " errors=" << r.ber_integrated.errors << " ci95=["
      << fmt_g(r.ber_integrated.ci95_lo, 9) << ", "
      << fmt_g(r.ber_integrated.ci95_hi, 9) << "]\n";
  out << "eye_height_direct_v: " << fmt_g(r.eye_height_direct, 9) << "\n";
  out << "eye_height_integrated_v: " << fmt_g(r.eye_height_integrated, 9) << "\n";
  out << "recovered_phase_s: " << fmt_g(r.recovered_phase_s, 9) << "\n";
  out << "recovered_eye_height_v: " << fmt_g(r.recovered_eye_height, 9) << "\n";
  out << "artifacts:";
  if (r.artifacts.empty()) out << " (none)";
  out << "\n";
  for (const std::string& a : r.artifacts) out << "  " << a << "\n";
  return out.str();
}

// ---- sweeps and exports --------------------------------------------------------

void write_sweep_rejection_csv(double t_b, double f_lo, double f_hi,
                               std::size_t n_points, const std::string& path) {
  const RejectionCurve curve = rejection_curve(t_b, f_lo, f_hi, n_points);
  auto out = open_out(path);
  out << "freq_hz,rejection_db\n";
  for (const RejectionPoint& pt : curve.points)
    out << fmt_g(pt.freq_hz, 6) << ',' << fmt_g(pt.rejection_db, 6) << '\n';
}

Scenario scenario_for_sweep_point(const Scenario& base, const std::string& axis,
                                  double value, std::uint64_t base_seed,
                                  std::size_t index) {
  Scenario s = base;
  s.outputs = {};
  if (axis == "sir_db") {
    if (s.interferers.empty())
      throw std::invalid_argument(
          "sweep_ber: sir_db axis needs at least one interferer in the base scenario");
    s.calibration.has_sir = true;
    s.calibration.sir_db = value;
    s.calibration.has_a_sig = false;
    s.calibration.a_sig_v = 0.0;
  } else if (axis == "f_i") {
    if (s.interferers.empty())
      throw std::invalid_argument(
          "sweep_ber: f_i axis needs at least one interferer in the base scenario");
    InterferenceSpec& first = s.interferers.front();
    if (first.kind == InterfererKind::cw) first.freq_hz = value;
    else if (first.kind == InterfererKind::am) first.carrier_hz = value;
    else
      throw std::invalid_argument(
          "sweep_ber: f_i axis needs a cw or am first interferer");
  } else if (axis == "snr_db") {
    if (!base.noise.enabled)
      throw std::invalid_argument(
          "sweep_ber: snr_db axis needs a noise block in the base scenario");
    s.noise.snr_db = value;
  } else {
    throw std::invalid_argument("sweep_ber: unknown axis: " + axis);
  }
  if (s.noise.enabled) s.noise.seed = mix_seed(base_seed, index);
  validate(s);
  return s;
}

void write_sweep_ber_csv(const Scenario& base, const std::string& axis,
                         const std::vector<double>& values,
                         std::uint64_t base_seed, const std::string& path) {
  if (values.empty())
    throw std::invalid_argument("sweep_ber: empty values list");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("sweep_ber: axis values must be finite");

  std::ostringstream rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Scenario point =
        scenario_for_sweep_point(base, axis, values[i], base_seed, i);
    const ChainProducts p = run_chain(point);
    const BerResult bd = ber(p.tx_bits, p.direct.bits);
    const BerResult bi = ber(p.tx_bits, p.integrated.bits);
    rows << fmt_g(values[i], 9) << ',' << fmt_g(bd.rate, 9) << ','
         << fmt_g(bi.rate, 9) << ',' << fmt_g(bi.ci95_lo, 9) << ','
         << fmt_g(bi.ci95_hi, 9) << '\n';
  }
  auto out = open_out(path);
  out << "axis_value,ber_direct,ber_integrated,ci95_lo,ci95_hi\n";
  out << rows.str();
}

std::vector<std::string> export_eye(const Scenario& scenario,
                                    const std::string& which,
                                    const std::string& out_dir) {
  bool integrated;
  if (which == "direct") integrated = false;
  else if (which == "integrated") integrated = true;
  else throw std::invalid_argument("export_eye: which must be \"direct\" or \"integrated\"");

  const ChainProducts p = run_chain(scenario);
  const EyeDiagram eye = build_eye(p, scenario, integrated);
  fs::create_directories(out_dir);
  const std::string csv =
      (fs::path(out_dir) / ("eye_" + which + ".csv")).string();
  const std::string metrics =
      (fs::path(out_dir) / ("eye_" + which + "_metrics.csv")).string();
  write_eye_csv(eye, scenario.link.sample_rate(), csv, metrics);
  return {csv, metrics};
}

}  // namespace hbcsim

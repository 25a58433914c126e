// SPDX-License-Identifier: Apache-2.0
//
// Declarative scenario runner: builds the TX -> channel -> interference -> RX
// chain from a JSON config or a named preset, runs single scenarios and sweeps
// (rejection curve, BER vs axis), and emits deterministic CSV/JSON artifacts.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hbcsim/analysis.hpp"
#include "hbcsim/channel.hpp"
#include "hbcsim/ddr_receiver.hpp"
#include "hbcsim/signal_core.hpp"

namespace hbcsim {

struct DataSpec {
  int prbs_order = 7;
  std::uint64_t prbs_seed = 127;  // all-ones PRBS7 state
  std::size_t n_bits = 10000;
};

struct NoiseSpec {
  bool enabled = false;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

// Exactly one of (sir_db, with the first interferer as power reference) or an
// explicit a_sig_v determines the transmitted signal amplitude.
struct Calibration {
  bool has_sir = false;
  double sir_db = 0.0;
  bool has_a_sig = false;
  double a_sig_v = 0.0;
  double r_ref_ohm = 50.0;
};

struct OutputSpec {
  bool decisions = false;
  bool eye_direct = false;
  bool eye_integrated = false;
  bool psd = false;
  bool report = false;
};

struct Scenario {
  std::string name = "custom";
  LinkParams link;  // link.a_sig is filled from calibration when the chain runs
  DataSpec data;
  ReceiverConfig receiver;
  double direct_sample_phase = 0.5;  // baseline receiver sampling point
  int cdr_steps = 16;                // phase-recovery grid resolution
  ChannelParams channel;
  std::vector<InterferenceSpec> interferers;
  NoiseSpec noise;
  Calibration calibration;
  OutputSpec outputs;
};

struct RunReport {
  nlohmann::ordered_json scenario_echo;  // every effective parameter, defaults included
  double a_sig_resolved = 0.0;           // volts at the modulator
  double noise_sigma = 0.0;              // volts per sample (0 when noise disabled)
  BerResult ber_direct;
  BerResult ber_integrated;
  double eye_height_direct = 0.0;        // from per-bit decision samples
  double eye_height_integrated = 0.0;
  double recovered_phase_s = 0.0;        // recover_sampling_phase result
  double recovered_eye_height = 0.0;
  std::vector<std::string> artifacts;    // emitted file paths
};

// Named canned scenarios ("fig8a", "fig8f", "fig8k", "fig8p", "fig8u"):
// the no-interferer baseline, a moderate CW tone at the bit-rate notch, a
// strong CW tone at the notch, a strong CW tone off-notch at 95 MHz, and a
// strong AM interferer mid-band. Throws on unknown names.
Scenario preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

// Strict config parsing: unknown keys, missing seeds, conflicting calibration,
// or Nyquist violations raise std::invalid_argument naming the offending key.
Scenario scenario_from_json(const nlohmann::ordered_json& config);
Scenario load_scenario_file(const std::string& path);
void validate(const Scenario& scenario);

// The signal amplitude the chain will use (explicit or SIR-derived).
double resolve_a_sig(const Scenario& scenario);

// Full effective-parameter echo (defaults included) as a JSON object.
nlohmann::ordered_json scenario_echo(const Scenario& scenario);

// Intermediate products of one chain evaluation, for callers that need the
// waveforms/decisions rather than the report.
struct ChainProducts {
  BitSequence tx_bits;
  Waveform rx;                  // received waveform (signal + interference + noise)
  DemodResult direct;
  DemodResult integrated;
  Waveform integrated_trace;    // sum of the two path traces
  double a_sig = 0.0;           // modulator amplitude
  double a_sig_rx = 0.0;        // post-attenuation amplitude at the receiver
  double noise_sigma = 0.0;
};

ChainProducts run_chain(const Scenario& scenario);

// Runs the chain, computes metrics, writes the artifacts requested by
// scenario.outputs into out_dir (created if needed), and returns the report.
RunReport run_scenario(const Scenario& scenario, const std::string& out_dir);

// Human-readable structured-text rendering of a report.
std::string format_run_report(const RunReport& report);

// CSV `freq_hz,rejection_db` (6 significant digits), one row per grid point.
void write_sweep_rejection_csv(double t_b, double f_lo, double f_hi,
                               std::size_t n_points, const std::string& path);

// Per-point scenario for a BER sweep: axis is "sir_db", "f_i" (first
// interferer's carrier), or "snr_db"; the point's noise seed derives from
// (base_seed, index) so points are independent yet reproducible.
Scenario scenario_for_sweep_point(const Scenario& base, const std::string& axis,
                                  double value, std::uint64_t base_seed,
                                  std::size_t index);

// CSV `axis_value,ber_direct,ber_integrated,ci95_lo,ci95_hi` (CI of the
// integrated-path BER), one row per value. Empty value lists are rejected.
void write_sweep_ber_csv(const Scenario& base, const std::string& axis,
                         const std::vector<double>& values,
                         std::uint64_t base_seed, const std::string& path);

// Folded-eye export: CSV `trace_id,t_s,v` (capped at 512 traces) plus a
// one-line metrics sidecar `eye_height_v,eye_width_s,sampling_instant_s,
// n_traces` computed from all folds. which is "direct" or "integrated".
// Returns {csv_path, metrics_path}.
std::vector<std::string> export_eye(const Scenario& scenario,
                                    const std::string& which,
                                    const std::string& out_dir);

}  // namespace hbcsim

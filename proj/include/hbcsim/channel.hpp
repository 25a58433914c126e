// SPDX-License-Identifier: Apache-2.0
//
// Capacitive-coupling channel model (first-order high-pass + flat loss),
// interference generators (CW, AM, multi-tone FM-band proxy), AWGN injection,
// and linear superposition of signal paths.
#pragma once

#include <cstdint>
#include <vector>

#include "hbcsim/signal_core.hpp"

namespace hbcsim {

struct ChannelParams {
  double coupling_corner_hz = 0.0;  // first-order high-pass corner; 0 disables
  double attenuation_db = 0.0;      // flat in-band loss, >= 0
};

enum class InterfererKind { cw, am, multitone };

// Tagged description of one interferer. Only the fields of the active kind are
// read; power_dbm and the defaults below apply to all kinds.
struct InterferenceSpec {
  InterfererKind kind = InterfererKind::cw;
  double power_dbm = -17.0;  // average power at the reference impedance

  // CW: A_pk * sin(2*pi*freq_hz*t + phase_rad)
  double freq_hz = 1.0e8;
  double phase_rad = 0.0;

  // AM: A_c * (1 + mod_index*cos(2*pi*mod_hz*t)) * sin(2*pi*carrier_hz*t + phase_rad),
  // with A_c scaled so total average power equals power_dbm.
  double carrier_hz = 9.8e7;
  double mod_hz = 1.0e6;
  double mod_index = 0.5;  // in [0, 1]

  // MULTITONE: n_tones equal-power sinusoids, equally spaced (endpoints
  // inclusive) over [band_lo_hz, band_hi_hz]; n_tones = 1 means band center.
  // Tone phases derive deterministically from phase_seed.
  double band_lo_hz = 8.8e7;
  double band_hi_hz = 1.08e8;
  int n_tones = 21;
  std::uint64_t phase_seed = 1;
};

// First-order high-pass (bilinear-discretized single pole, prewarped so the
// -3 dB point lands exactly on corner_hz). corner_hz = 0 returns the input
// unchanged; corner at/above Nyquist throws.
Waveform rc_highpass(const Waveform& wave, double corner_hz);

// Scales samples by 10^(-attenuation_db / 20); attenuation_db >= 0.
Waveform attenuate(const Waveform& wave, double attenuation_db);

Waveform cw_interference(const InterferenceSpec& spec, double sample_rate,
                         double duration, double r_ref = 50.0);

Waveform am_interference(const InterferenceSpec& spec, double sample_rate,
                         double duration, double r_ref = 50.0);

Waveform multitone_fm_band(const InterferenceSpec& spec, double sample_rate,
                           double duration, double r_ref = 50.0);

// Dispatches on spec.kind.
Waveform make_interference(const InterferenceSpec& spec, double sample_rate,
                           double duration, double r_ref = 50.0);

// Adds independent zero-mean Gaussian samples of standard deviation sigma.
// Same seed => same output within one implementation.
Waveform add_awgn(const Waveform& wave, double sigma, std::uint64_t seed);

// Pointwise sum; all waves must share sample_rate, t0, and length.
Waveform superpose(const std::vector<Waveform>& waves);

}  // namespace hbcsim

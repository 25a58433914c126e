// SPDX-License-Identifier: Apache-2.0
//
// Resettable integrate-and-dump receiver with two half-rate phase-interleaved
// paths (alternate bits), end-of-window sampling with optional delta offset,
// threshold decision, plus a direct-sampling baseline receiver and exhaustive
// sampling-phase recovery.
#pragma once

#include <cstddef>
#include <utility>

#include "hbcsim/signal_core.hpp"

namespace hbcsim {

struct ReceiverConfig {
  double k_int = 1.0e8;     // integrator gain, 1/s (> 0)
  double delta_frac = 0.0;  // sampling offset as fraction of T_b, in [0, 0.25)
  double threshold = 0.0;   // decision level on the sampled integrator output
  int start_phase = 0;      // 0 or 180: which path owns bit 0
};

void validate(const ReceiverConfig& cfg);

// Decisions plus the per-bit sampled values and per-path integrator traces the
// decisions were taken from. For the direct receiver, traces is empty.
struct DemodResult {
  BitSequence bits;             // one decision per whole bit period
  std::vector<double> samples;  // value compared against the threshold
  std::vector<Waveform> traces; // 2 per-path traces; 0 during reset half-cycles
};

// Running integral k_int * integral_{window_start}^{t} wave dt over the window
// [window_start, window_start + window_len] (seconds, relative to the same
// clock as wave.t0), computed by the trapezoidal rule with integrator state 0
// at the window start. Returns the trace (one value per sample in the closed
// window) and the value at the window end. The window must lie within the
// waveform and hold at least 16 samples.
std::pair<Waveform, double> integrate_and_dump(const Waveform& wave,
                                               double window_start,
                                               double window_len,
                                               double k_int);

// Integrate-and-dump demodulation of an aligned waveform (bit k occupies
// [k*T_b, (k+1)*T_b); alignment produced by recover_sampling_phase). Even bits
// go to one path, odd bits to the other; each bit is sampled at its window end
// minus delta_frac*T_b and compared against cfg.threshold.
DemodResult ddr_demodulate(const Waveform& wave, const LinkParams& link,
                           const ReceiverConfig& cfg);

// Baseline non-integrating receiver: one sample per bit at
// t = (k + sample_phase) * T_b, decision against 0. sample_phase in [0, 1).
DemodResult direct_demodulate(const Waveform& wave, const LinkParams& link,
                              double sample_phase);

// Exhaustively evaluates n_steps candidate bit-boundary offsets over one T_b,
// runs ddr_demodulate at each, and returns (offset seconds, eye height) for
// the offset maximizing the sampled eye height (first maximum wins). Requires
// >= 32 bit periods of waveform and n_steps >= 8. A degenerate flat waveform
// throws "no eye found"; an eye height <= 0 at every offset is reported, not
// an error.
std::pair<double, double> recover_sampling_phase(const Waveform& wave,
                                                 const LinkParams& link,
                                                 const ReceiverConfig& cfg,
                                                 int n_steps);

}  // namespace hbcsim

// SPDX-License-Identifier: Apache-2.0
//
// Waveform and bit-sequence primitives: NRZ modulation, PRBS generation, and
// power/amplitude calibration helpers (dBm, SIR, SNR arithmetic).
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hbcsim {

// Uniformly sampled real-valued voltage trace.
struct Waveform {
  std::vector<double> samples;  // volts
  double sample_rate = 0.0;     // Hz, > 0
  double t0 = 0.0;              // start time, seconds

  std::size_t size() const { return samples.size(); }
  double dt() const { return 1.0 / sample_rate; }
  // Duration of the sampled span under the staircase view (n samples cover
  // n sample intervals); used to size generated interference to n_bits * T_b.
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Ordered binary payload; every element is 0 or 1.
using BitSequence = std::vector<std::uint8_t>;

// Link timing and signal-scale parameters shared by modulator and receivers.
struct LinkParams {
  double bit_rate = 1.0e8;           // bits/s; T_b = 1/bit_rate
  std::size_t samples_per_bit = 100; // >= 16 (numerical-integration fidelity floor)
  double a_sig = 1.0;                // NRZ rail amplitude, volts (> 0)
  double k_int = 1.0e8;              // integrator gain, 1/s (> 0)
  double delta_frac = 0.0;           // sampling offset as fraction of T_b, in [0, 0.25)

  double bit_period() const { return 1.0 / bit_rate; }
  double sample_rate() const { return bit_rate * static_cast<double>(samples_per_bit); }
};

// Throws std::invalid_argument if params violate their invariants.
void validate(const LinkParams& params);

// Maximal-length Fibonacci LFSR stream, MSB output.
// order in {7, 15}; seed != 0 and fits in `order` bits; n >= 1.
// Normative recurrence: output = bit (order-1); feedback = output XOR bit
// (order-2); state = (state << 1 | feedback) masked to `order` bits.
BitSequence prbs(int order, std::uint64_t seed, std::size_t n);

// Bipolar NRZ: bit 1 -> +a_sig, bit 0 -> -a_sig, each held samples_per_bit
// samples. Output length = bits.size() * samples_per_bit, t0 = 0.
Waveform nrz_modulate(const BitSequence& bits, const LinkParams& params);

// Peak amplitude of a sinusoid dissipating power_dbm average power in r_ref:
// V_pk = sqrt(2 * 10^((power_dbm - 30)/10) * r_ref).
double dbm_to_peak_amplitude(double power_dbm, double r_ref = 50.0);

// A_sig such that 10*log10(A_sig^2 / (A_intf^2 / 2)) = sir_db, i.e. NRZ power
// A_sig^2 against sinusoid power A_intf^2/2.
double sig_amplitude_from_sir(double a_intf, double sir_db);

// Per-sample white-noise standard deviation for a full-bandwidth SNR:
// sigma = a_sig * 10^(-snr_db / 20).
double noise_sigma_from_snr(double a_sig, double snr_db);

// Deterministic seed derivation (splitmix64 over the pair); used wherever a
// family of independent-but-reproducible streams is derived from one base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

// Deterministic uniform value in [0, 1) from (seed, index); stable across
// platforms (no implementation-defined library distributions involved).
double unit_from_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace hbcsim

// SPDX-License-Identifier: Apache-2.0

#include "hbcsim/signal_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hbcsim {

void validate(const LinkParams& params) {
  if (!(params.bit_rate > 0.0))
    throw std::invalid_argument("link: bit_rate must be > 0");
  if (params.samples_per_bit < 16)
    throw std::invalid_argument("link: samples_per_bit must be >= 16");
  if (!(params.a_sig > 0.0))
    throw std::invalid_argument("link: a_sig must be > 0");
  if (!(params.k_int > 0.0))
    throw std::invalid_argument("link: k_int must be > 0");
  if (!(params.delta_frac >= 0.0 && params.delta_frac < 0.25))
    throw std::invalid_argument("link: delta_frac must be in [0, 0.25)");
}

BitSequence prbs(int order, std::uint64_t seed, std::size_t n) {
  if (order != 7 && order != 15)
    throw std::invalid_argument("prbs: order must be 7 or 15");
  if (n < 1) throw std::invalid_argument("prbs: n must be >= 1");
  const std::uint64_t mask = (1ULL << order) - 1;
  if (seed == 0) throw std::invalid_argument("prbs: zero seed (LFSR lockup state)");
  if (seed > mask)
    throw std::invalid_argument("prbs: seed does not fit in " +
                                std::to_string(order) + " bits");

  BitSequence out;
  out.reserve(n);
  std::uint64_t s = seed;
  const int msb = order - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = (s >> msb) & 1ULL;
    const std::uint64_t fb = bit ^ ((s >> (msb - 1)) & 1ULL);
    s = ((s << 1) | fb) & mask;
    out.push_back(static_cast<std::uint8_t>(bit));
  }
  return out;
}

Waveform nrz_modulate(const BitSequence& bits, const LinkParams& params) {
  validate(params);
  if (bits.empty()) throw std::invalid_argument("nrz_modulate: empty bit sequence");
  Waveform w;
  w.sample_rate = params.sample_rate();
  w.t0 = 0.0;
  w.samples.resize(bits.size() * params.samples_per_bit);
  std::size_t k = 0;
  for (std::uint8_t b : bits) {
    if (b > 1) throw std::invalid_argument("nrz_modulate: bits must be 0 or 1");
    const double level = b ? params.a_sig : -params.a_sig;
    for (std::size_t j = 0; j < params.samples_per_bit; ++j) w.samples[k++] = level;
  }
  return w;
}

double dbm_to_peak_amplitude(double power_dbm, double r_ref) {
  if (!(r_ref > 0.0))
    throw std::invalid_argument("dbm_to_peak_amplitude: r_ref must be > 0");
  const double watts = std::pow(10.0, (power_dbm - 30.0) / 10.0);
  return std::sqrt(2.0 * watts * r_ref);
}

double sig_amplitude_from_sir(double a_intf, double sir_db) {
  if (!(a_intf > 0.0))
    throw std::invalid_argument("sig_amplitude_from_sir: a_intf must be > 0");
  return a_intf / std::sqrt(2.0) * std::pow(10.0, sir_db / 20.0);
}

double noise_sigma_from_snr(double a_sig, double snr_db) {
  if (!(a_sig > 0.0))
    throw std::invalid_argument("noise_sigma_from_snr: a_sig must be > 0");
  return a_sig * std::pow(10.0, -snr_db / 20.0);
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) ^ (index + 0x1234567887654321ULL));
}

double unit_from_seed(std::uint64_t seed, std::uint64_t index) {
  // 53 high bits -> uniform double in [0, 1)
  return static_cast<double>(mix_seed(seed, index) >> 11) * 0x1.0p-53;
}

}  // namespace hbcsim

// SPDX-License-Identifier: Apache-2.0

#include "hbcsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hbcsim {

namespace {

constexpr double kPi = std::numbers::pi;

void check_wave(const Waveform& w, const char* who) {
  if (w.samples.empty()) throw std::invalid_argument(std::string(who) + ": empty waveform");
  if (!(w.sample_rate > 0.0))
    throw std::invalid_argument(std::string(who) + ": sample_rate must be > 0");
}

std::size_t sample_count(double sample_rate, double duration, const char* who) {
  if (!(sample_rate > 0.0))
    throw std::invalid_argument(std::string(who) + ": sample_rate must be > 0");
  if (!(duration > 0.0))
    throw std::invalid_argument(std::string(who) + ": duration must be > 0");
  const double n = duration * sample_rate;
  const auto count = static_cast<std::size_t>(std::llround(n));
  if (count < 1) throw std::invalid_argument(std::string(who) + ": duration too short");
  return count;
}

}  // namespace

Waveform rc_highpass(const Waveform& wave, double corner_hz) {
  check_wave(wave, "rc_highpass");
  if (corner_hz < 0.0)
    throw std::invalid_argument("rc_highpass: corner_hz must be >= 0");
  if (corner_hz == 0.0) return wave;
  if (corner_hz >= wave.sample_rate / 2.0)
    throw std::invalid_argument("rc_highpass: corner_hz at or above Nyquist");

  // Bilinear transform of H(s) = s/(s + w_c), prewarped so |H| = -3 dB lands
  // exactly on corner_hz: y[n] = (x[n] - x[n-1] + (1-c) y[n-1]) / (1+c),
  // c = tan(pi * corner / fs). State before the first sample is zero.
  const double c = std::tan(kPi * corner_hz / wave.sample_rate);
  const double a = 1.0 / (1.0 + c);
  const double b = (1.0 - c) * a;

  Waveform out = wave;
  double x_prev = 0.0;
  double y_prev = 0.0;
  for (double& v : out.samples) {
    const double x = v;
    const double y = (x - x_prev) * a + b * y_prev;
    v = y;
    x_prev = x;
    y_prev = y;
  }
  return out;
}

Waveform attenuate(const Waveform& wave, double attenuation_db) {
  check_wave(wave, "attenuate");
  if (attenuation_db < 0.0)
    throw std::invalid_argument("attenuate: attenuation_db must be >= 0");
  const double g = std::pow(10.0, -attenuation_db / 20.0);
  Waveform out = wave;
  for (double& v : out.samples) v *= g;
  return out;
}

Waveform cw_interference(const InterferenceSpec& spec, double sample_rate,
                         double duration, double r_ref) {
  if (!(spec.freq_hz > 0.0) || spec.freq_hz >= sample_rate / 2.0)
    throw std::invalid_argument("cw_interference: freq_hz must be in (0, Nyquist)");
  const std::size_t n = sample_count(sample_rate, duration, "cw_interference");
  const double a = dbm_to_peak_amplitude(spec.power_dbm, r_ref);
  const double w = 2.0 * kPi * spec.freq_hz;

  Waveform out;
  out.sample_rate = sample_rate;
  out.t0 = 0.0;
  out.samples.resize(n);
  const double dt = 1.0 / sample_rate;
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = a * std::sin(w * (static_cast<double>(i) * dt) + spec.phase_rad);
  return out;
}

Waveform am_interference(const InterferenceSpec& spec, double sample_rate,
                         double duration, double r_ref) {
  if (!(spec.carrier_hz > 0.0) || spec.carrier_hz >= sample_rate / 2.0)
    throw std::invalid_argument("am_interference: carrier_hz must be in (0, Nyquist)");
  if (!(spec.mod_hz > 0.0) || spec.mod_hz >= spec.carrier_hz)
    throw std::invalid_argument("am_interference: mod_hz must be in (0, carrier_hz)");
  if (!(spec.mod_index >= 0.0 && spec.mod_index <= 1.0))
    throw std::invalid_argument("am_interference: mod_index must be in [0, 1]");
  const std::size_t n = sample_count(sample_rate, duration, "am_interference");

  // Carrier amplitude scaled so the total average power (carrier + sidebands,
  // factor 1 + m^2/2) equals power_dbm.
  const double m = spec.mod_index;
  const double a_c =
      dbm_to_peak_amplitude(spec.power_dbm, r_ref) / std::sqrt(1.0 + m * m / 2.0);
  const double wc = 2.0 * kPi * spec.carrier_hz;
  const double wm = 2.0 * kPi * spec.mod_hz;

  Waveform out;
  out.sample_rate = sample_rate;
  out.t0 = 0.0;
  out.samples.resize(n);
  const double dt = 1.0 / sample_rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    out.samples[i] =
        a_c * (1.0 + m * std::cos(wm * t)) * std::sin(wc * t + spec.phase_rad);
  }
  return out;
}

Waveform multitone_fm_band(const InterferenceSpec& spec, double sample_rate,
                           double duration, double r_ref) {
  if (!(spec.band_lo_hz > 0.0) || !(spec.band_lo_hz < spec.band_hi_hz))
    throw std::invalid_argument("multitone_fm_band: need 0 < band_lo_hz < band_hi_hz");
  if (spec.band_hi_hz >= sample_rate / 2.0)
    throw std::invalid_argument("multitone_fm_band: band_hi_hz at or above Nyquist");
  if (spec.n_tones < 1)
    throw std::invalid_argument("multitone_fm_band: n_tones must be >= 1");
  const std::size_t n = sample_count(sample_rate, duration, "multitone_fm_band");

  const int k_tones = spec.n_tones;
  const double a_tone = dbm_to_peak_amplitude(spec.power_dbm, r_ref) /
                        std::sqrt(static_cast<double>(k_tones));
  std::vector<double> freqs(k_tones), phases(k_tones);
  for (int k = 0; k < k_tones; ++k) {
    freqs[k] = (k_tones == 1)
                   ? 0.5 * (spec.band_lo_hz + spec.band_hi_hz)
                   : spec.band_lo_hz + (spec.band_hi_hz - spec.band_lo_hz) *
                                           static_cast<double>(k) /
                                           static_cast<double>(k_tones - 1);
    phases[k] =
        2.0 * kPi * unit_from_seed(spec.phase_seed, static_cast<std::uint64_t>(k));
  }

  Waveform out;
  out.sample_rate = sample_rate;
  out.t0 = 0.0;
  out.samples.assign(n, 0.0);
  const double dt = 1.0 / sample_rate;
  for (int k = 0; k < k_tones; ++k) {
    const double w = 2.0 * kPi * freqs[k];
    for (std::size_t i = 0; i < n; ++i)
      out.samples[i] += a_tone * std::sin(w * (static_cast<double>(i) * dt) + phases[k]);
  }
  return out;
}

Waveform make_interference(const InterferenceSpec& spec, double sample_rate,
                           double duration, double r_ref) {
  switch (spec.kind) {
    case InterfererKind::cw:
      return cw_interference(spec, sample_rate, duration, r_ref);
    case InterfererKind::am:
      return am_interference(spec, sample_rate, duration, r_ref);
    case InterfererKind::multitone:
      return multitone_fm_band(spec, sample_rate, duration, r_ref);
  }
  throw std::invalid_argument("make_interference: unknown interferer kind");
}

Waveform add_awgn(const Waveform& wave, double sigma, std::uint64_t seed) {
  check_wave(wave, "add_awgn");
  if (sigma < 0.0) throw std::invalid_argument("add_awgn: sigma must be >= 0");
  if (sigma == 0.0) return wave;
  Waveform out = wave;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (double& v : out.samples) v += dist(gen);
  return out;
}

Waveform superpose(const std::vector<Waveform>& waves) {
  if (waves.empty()) throw std::invalid_argument("superpose: no waveforms");
  const Waveform& first = waves.front();
  check_wave(first, "superpose");
  Waveform out = first;
  for (std::size_t w = 1; w < waves.size(); ++w) {
    const Waveform& other = waves[w];
    if (other.sample_rate != first.sample_rate || other.t0 != first.t0 ||
        other.samples.size() != first.samples.size())
      throw std::invalid_argument(
          "superpose: waveforms must share sample_rate, t0, and length");
    for (std::size_t i = 0; i < out.samples.size(); ++i)
      out.samples[i] += other.samples[i];
  }
  return out;
}

}  // namespace hbcsim

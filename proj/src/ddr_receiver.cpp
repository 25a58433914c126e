// SPDX-License-Identifier: Apache-2.0

#include "hbcsim/ddr_receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hbcsim/analysis.hpp"

namespace hbcsim {

namespace {

// Closed Newton-Gregory quadrature (order-3 endpoint corrections) for
// integral_0^{(m-1)h} f dx given samples f[0..m-1]. Exact for constants and
// low-degree polynomials; the corrections push the smooth-integrand error to
// O(h^5) per window while leaving piecewise-constant content exact.
double closed_gregory(const double* f, std::size_t m, double h) {
  double acc = 0.5 * (f[0] + f[m - 1]);
  for (std::size_t i = 1; i + 1 < m; ++i) acc += f[i];
  double integral = h * acc;
  if (m >= 4) {
    const double d1a = f[1] - f[0];
    const double d1b = f[m - 1] - f[m - 2];
    const double d2a = f[2] - 2.0 * f[1] + f[0];
    const double d2b = f[m - 1] - 2.0 * f[m - 2] + f[m - 3];
    const double d3a = f[3] - 3.0 * f[2] + 3.0 * f[1] - f[0];
    const double d3b = f[m - 1] - 3.0 * f[m - 2] + 3.0 * f[m - 3] - f[m - 4];
    integral += -h / 12.0 * (d1b - d1a) - h / 24.0 * (d2b + d2a) -
                19.0 * h / 720.0 * (d3b - d3a);
  }
  return integral;
}

// Integral over the full bit window [0, m*h] from the window's own m samples.
// The sample at m*h belongs to the next bit (and does not exist for the last
// bit), so the final sub-interval [(m-1)h, m*h] is covered by an order-5
// Adams-Bashforth extrapolation step instead.
double window_integral(const double* f, std::size_t m, double h) {
  double integral = closed_gregory(f, m, h);
  integral += h / 720.0 *
              (1901.0 * f[m - 1] - 2774.0 * f[m - 2] + 2616.0 * f[m - 3] -
               1274.0 * f[m - 4] + 251.0 * f[m - 5]);
  return integral;
}

// Per-bit sampled integrator values for a waveform whose bit 0 starts at
// sample `offset`. Shared by demodulation and phase recovery (the latter runs
// it many times and needs no traces).
std::vector<double> ddr_samples_at(const Waveform& wave, std::size_t offset,
                                   const LinkParams& link,
                                   const ReceiverConfig& cfg) {
  const std::size_t spb = link.samples_per_bit;
  const std::size_t n_bits = (wave.samples.size() - offset) / spb;
  const double h = 1.0 / wave.sample_rate;
  const auto delta_samples =
      static_cast<std::size_t>(std::llround(cfg.delta_frac * static_cast<double>(spb)));

  std::vector<double> values(n_bits);
  const double* base = wave.samples.data() + offset;
  for (std::size_t k = 0; k < n_bits; ++k) {
    const double* w = base + k * spb;
    // Sampling at T_b - delta: delta = 0 reads the full-window integral;
    // delta > 0 stops at the interior sample index spb - delta_samples.
    values[k] = (delta_samples == 0)
                    ? cfg.k_int * window_integral(w, spb, h)
                    : cfg.k_int * closed_gregory(w, spb - delta_samples + 1, h);
  }
  return values;
}

}  // namespace

void validate(const ReceiverConfig& cfg) {
  if (!(cfg.k_int > 0.0))
    throw std::invalid_argument("receiver: k_int must be > 0");
  if (!(cfg.delta_frac >= 0.0 && cfg.delta_frac < 0.25))
    throw std::invalid_argument("receiver: delta_frac must be in [0, 0.25)");
  if (cfg.start_phase != 0 && cfg.start_phase != 180)
    throw std::invalid_argument("receiver: start_phase must be 0 or 180");
  if (!std::isfinite(cfg.threshold))
    throw std::invalid_argument("receiver: threshold must be finite");
}

std::pair<Waveform, double> integrate_and_dump(const Waveform& wave,
                                               double window_start,
                                               double window_len,
                                               double k_int) {
  if (wave.samples.empty() || !(wave.sample_rate > 0.0))
    throw std::invalid_argument("integrate_and_dump: invalid waveform");
  if (!(k_int > 0.0))
    throw std::invalid_argument("integrate_and_dump: k_int must be > 0");
  if (!(window_len > 0.0))
    throw std::invalid_argument("integrate_and_dump: window_len must be > 0");

  const double fs = wave.sample_rate;
  const auto i0 = static_cast<long long>(std::llround((window_start - wave.t0) * fs));
  const auto len = static_cast<long long>(std::llround(window_len * fs));
  const auto last = static_cast<long long>(wave.samples.size()) - 1;
  if (i0 < 0 || i0 + len > last)
    throw std::invalid_argument("integrate_and_dump: window out of range");
  if (len + 1 < 16)
    throw std::invalid_argument("integrate_and_dump: window must hold >= 16 samples");

  Waveform trace;
  trace.sample_rate = fs;
  trace.t0 = window_start;
  trace.samples.resize(static_cast<std::size_t>(len) + 1);
  const double h = 1.0 / fs;
  const double* f = wave.samples.data() + i0;
  double acc = 0.0;
  trace.samples[0] = 0.0;
  for (long long j = 1; j <= len; ++j) {
    acc += 0.5 * h * (f[j - 1] + f[j]);
    trace.samples[static_cast<std::size_t>(j)] = k_int * acc;
  }
  return {trace, trace.samples.back()};
}

DemodResult ddr_demodulate(const Waveform& wave, const LinkParams& link,
                           const ReceiverConfig& cfg) {
  validate(link);
  validate(cfg);
  if (wave.samples.empty() || !(wave.sample_rate > 0.0))
    throw std::invalid_argument("ddr_demodulate: invalid waveform");
  const std::size_t spb = link.samples_per_bit;
  const std::size_t n_bits = wave.samples.size() / spb;
  if (n_bits < 1)
    throw std::invalid_argument("ddr_demodulate: waveform shorter than one bit period");

  DemodResult result;
  result.samples = ddr_samples_at(wave, 0, link, cfg);
  result.bits.resize(n_bits);
  for (std::size_t k = 0; k < n_bits; ++k)
    result.bits[k] = result.samples[k] > cfg.threshold ? 1 : 0;

  // Per-path traces: the owner path shows its running integral across its own
  // bit window and 0 during the other path's window (its reset half-cycle).
  result.traces.assign(2, Waveform{});
  for (auto& t : result.traces) {
    t.sample_rate = wave.sample_rate;
    t.t0 = wave.t0;
    t.samples.assign(n_bits * spb, 0.0);
  }
  const double h = 1.0 / wave.sample_rate;
  const std::size_t phase_shift = cfg.start_phase == 180 ? 1 : 0;
  for (std::size_t k = 0; k < n_bits; ++k) {
    Waveform& path = result.traces[(k + phase_shift) % 2];
    const std::size_t base = k * spb;
    const double* f = wave.samples.data() + base;
    double acc = 0.0;
    path.samples[base] = 0.0;
    for (std::size_t j = 1; j < spb; ++j) {
      acc += 0.5 * h * (f[j - 1] + f[j]);
      path.samples[base + j] = cfg.k_int * acc;
    }
  }
  return result;
}

DemodResult direct_demodulate(const Waveform& wave, const LinkParams& link,
                              double sample_phase) {
  validate(link);
  if (wave.samples.empty() || !(wave.sample_rate > 0.0))
    throw std::invalid_argument("direct_demodulate: invalid waveform");
  if (!(sample_phase >= 0.0 && sample_phase < 1.0))
    throw std::invalid_argument("direct_demodulate: sample_phase must be in [0, 1)");
  const std::size_t spb = link.samples_per_bit;
  const std::size_t n_bits = wave.samples.size() / spb;
  if (n_bits < 1)
    throw std::invalid_argument("direct_demodulate: waveform shorter than one bit period");

  auto off = static_cast<std::size_t>(
      std::llround(sample_phase * static_cast<double>(spb)));
  off = std::min(off, spb - 1);

  DemodResult result;
  result.samples.resize(n_bits);
  result.bits.resize(n_bits);
  for (std::size_t k = 0; k < n_bits; ++k) {
    const double v = wave.samples[k * spb + off];
    result.samples[k] = v;
    result.bits[k] = v > 0.0 ? 1 : 0;
  }
  return result;
}

std::pair<double, double> recover_sampling_phase(const Waveform& wave,
                                                 const LinkParams& link,
                                                 const ReceiverConfig& cfg,
                                                 int n_steps) {
  validate(link);
  validate(cfg);
  if (n_steps < 8)
    throw std::invalid_argument("recover_sampling_phase: n_steps must be >= 8");
  const std::size_t spb = link.samples_per_bit;
  if (wave.samples.size() / spb < 32)
    throw std::invalid_argument(
        "recover_sampling_phase: waveform must span at least 32 bit periods");

  const auto [lo, hi] =
      std::minmax_element(wave.samples.begin(), wave.samples.end());
  if (*lo == *hi) throw std::runtime_error("no eye found");

  double best_height = 0.0;
  std::size_t best_offset = 0;
  bool have_best = false;
  for (int j = 0; j < n_steps; ++j) {
    const auto offset = static_cast<std::size_t>(std::llround(
        static_cast<double>(j) * static_cast<double>(spb) / n_steps));
    if (offset >= wave.samples.size() ||
        (wave.samples.size() - offset) / spb < 1)
      continue;
    const double height =
        sampled_eye_height(ddr_samples_at(wave, offset, link, cfg));
    if (!have_best || height > best_height) {
      have_best = true;
      best_height = height;
      best_offset = offset;
    }
  }
  return {static_cast<double>(best_offset) / wave.sample_rate, best_height};
}

}  // namespace hbcsim

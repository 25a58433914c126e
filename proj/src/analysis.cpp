// SPDX-License-Identifier: Apache-2.0

#include "hbcsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hbcsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 2.998e8;  // m/s

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

struct RailStats {
  double mean = 0.0;
  double sigma = 0.0;  // population standard deviation
  std::size_t count = 0;
};

RailStats rail_stats(const std::vector<double>& values) {
  RailStats s;
  s.count = values.size();
  if (s.count == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  double acc = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    acc += d * d;
  }
  s.sigma = std::sqrt(acc / static_cast<double>(s.count));
  return s;
}

// Rail-based opening of one column of values, membership given per value.
// Rail levels are robust 3-sigma bounds (mean -/+ 3 sigma); an empty rail
// falls back to the extreme over all values so one-sided columns report a
// closed (or zero) opening rather than being undefined.
double rail_opening(const std::vector<double>& upper,
                    const std::vector<double>& lower,
                    const std::vector<double>& all) {
  const RailStats up = rail_stats(upper);
  const RailStats lo = rail_stats(lower);
  double upper_level;
  double lower_level;
  if (up.count > 0)
    upper_level = up.mean - 3.0 * up.sigma;
  else
    upper_level = *std::max_element(all.begin(), all.end());
  if (lo.count > 0)
    lower_level = lo.mean + 3.0 * lo.sigma;
  else
    lower_level = *std::min_element(all.begin(), all.end());
  return upper_level - lower_level;
}

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

double integrated_interference_closed_form(double a_intf, double f_i,
                                           double phi, double t_b,
                                           double k_int) {
  if (!(f_i > 0.0))
    throw std::invalid_argument("integrated_interference_closed_form: f_i must be > 0");
  const double w = 2.0 * kPi * f_i;
  return k_int * a_intf * (std::cos(phi) - std::cos(w * t_b + phi)) / w;
}

double worst_case_rejection_db(double f_i, double t_b, double cap_db) {
  if (!(f_i > 0.0) || !(t_b > 0.0))
    throw std::invalid_argument("worst_case_rejection_db: f_i and t_b must be > 0");
  const double s = std::abs(sinc(f_i * t_b));
  if (s == 0.0) return cap_db;
  return std::min(cap_db, -20.0 * std::log10(s));
}

RejectionCurve rejection_curve(double t_b, double f_lo, double f_hi,
                               std::size_t n_points, double cap_db) {
  if (!(f_lo > 0.0) || !(f_lo < f_hi))
    throw std::invalid_argument("rejection_curve: need 0 < f_lo < f_hi");
  if (n_points < 2)
    throw std::invalid_argument("rejection_curve: n_points must be >= 2");
  RejectionCurve curve;
  curve.points.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double f = f_lo + (f_hi - f_lo) * static_cast<double>(k) /
                                static_cast<double>(n_points - 1);
    curve.points[k] = {f, worst_case_rejection_db(f, t_b, cap_db)};
  }
  return curve;
}

Waveform integrated_interference_trajectory(double a_intf, double f_i,
                                            double phi, double t_b,
                                            double k_int,
                                            std::size_t n_points) {
  if (!(f_i > 0.0))
    throw std::invalid_argument("integrated_interference_trajectory: f_i must be > 0");
  if (!(t_b > 0.0))
    throw std::invalid_argument("integrated_interference_trajectory: t_b must be > 0");
  if (n_points < 2)
    throw std::invalid_argument("integrated_interference_trajectory: n_points must be >= 2");
  const double w = 2.0 * kPi * f_i;
  Waveform out;
  out.sample_rate = static_cast<double>(n_points - 1) / t_b;
  out.t0 = 0.0;
  out.samples.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double t = t_b * static_cast<double>(k) / static_cast<double>(n_points - 1);
    out.samples[k] = -k_int * a_intf * (std::cos(w * t + phi) - std::cos(phi)) / w;
  }
  return out;
}

double sampled_eye_height(const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("sampled_eye_height: no values");
  std::vector<double> upper, lower;
  upper.reserve(values.size());
  lower.reserve(values.size());
  for (double v : values) (v > 0.0 ? upper : lower).push_back(v);
  return rail_opening(upper, lower, values);
}

EyeDiagram eye_diagram(const Waveform& wave, double fold_period, double offset,
                       double sampling_instant) {
  if (wave.samples.empty() || !(wave.sample_rate > 0.0))
    throw std::invalid_argument("eye_diagram: invalid waveform");
  if (!(fold_period > 0.0))
    throw std::invalid_argument("eye_diagram: fold_period must be > 0");
  if (offset < 0.0)
    throw std::invalid_argument("eye_diagram: offset must be >= 0");
  if (!(sampling_instant >= 0.0 && sampling_instant < fold_period))
    throw std::invalid_argument("eye_diagram: sampling_instant must be in [0, fold_period)");

  const double fs = wave.sample_rate;
  const auto fold_samples = static_cast<std::size_t>(std::llround(fold_period * fs));
  if (fold_samples < 2)
    throw std::invalid_argument("eye_diagram: fold_period too short for the sample rate");
  const auto offset_samples = static_cast<std::size_t>(std::llround(offset * fs));
  if (offset_samples >= wave.samples.size())
    throw std::invalid_argument("eye_diagram: offset beyond waveform");
  const std::size_t n_folds = (wave.samples.size() - offset_samples) / fold_samples;
  if (n_folds < 8)
    throw std::invalid_argument("eye_diagram: waveform must span at least 8 fold periods");

  EyeDiagram eye;
  eye.fold_period = fold_period;
  eye.sampling_instant = sampling_instant;
  eye.traces.resize(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    const double* src = wave.samples.data() + offset_samples + f * fold_samples;
    eye.traces[f].assign(src, src + fold_samples);
  }

  auto instant_idx =
      static_cast<std::size_t>(std::llround(sampling_instant * fs));
  instant_idx = std::min(instant_idx, fold_samples - 1);

  // Rail membership is fixed by each trace's sign at the sampling instant.
  std::vector<bool> is_upper(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f)
    is_upper[f] = eye.traces[f][instant_idx] > 0.0;

  std::vector<double> heights(fold_samples);
  std::vector<double> upper, lower, all(n_folds);
  for (std::size_t t = 0; t < fold_samples; ++t) {
    upper.clear();
    lower.clear();
    for (std::size_t f = 0; f < n_folds; ++f) {
      const double v = eye.traces[f][t];
      all[f] = v;
      (is_upper[f] ? upper : lower).push_back(v);
    }
    heights[t] = rail_opening(upper, lower, all);
  }
  eye.eye_height = heights[instant_idx];

  std::size_t best_run = 0, run = 0;
  for (std::size_t t = 0; t < fold_samples; ++t) {
    run = heights[t] > 0.0 ? run + 1 : 0;
    best_run = std::max(best_run, run);
  }
  eye.eye_width = static_cast<double>(best_run) / fs;
  return eye;
}

std::vector<PsdPoint> psd(const Waveform& wave, std::size_t segment_len,
                          double overlap_frac, const std::string& window) {
  if (wave.samples.empty() || !(wave.sample_rate > 0.0))
    throw std::invalid_argument("psd: invalid waveform");
  if (!is_power_of_two(segment_len))
    throw std::invalid_argument("psd: segment_len must be a power of two (>= 2)");
  if (segment_len > wave.samples.size())
    throw std::invalid_argument("psd: segment_len longer than waveform");
  if (!(overlap_frac >= 0.0 && overlap_frac <= 0.9))
    throw std::invalid_argument("psd: overlap_frac must be in [0, 0.9]");
  if (window != "rectangular" && window != "hann")
    throw std::invalid_argument("psd: window must be \"rectangular\" or \"hann\"");

  const std::size_t n = segment_len;
  std::vector<double> win(n, 1.0);
  if (window == "hann")
    for (std::size_t i = 0; i < n; ++i)
      win[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                     static_cast<double>(n)));
  double u = 0.0;  // window power (sum of squares)
  for (double w : win) u += w * w;

  const auto step = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(static_cast<double>(n) * (1.0 - overlap_frac))));
  const std::size_t n_bins = n / 2 + 1;
  std::vector<double> acc(n_bins, 0.0);
  std::size_t n_segments = 0;
  std::vector<std::complex<double>> buf(n);
  for (std::size_t start = 0; start + n <= wave.samples.size(); start += step) {
    for (std::size_t i = 0; i < n; ++i)
      buf[i] = {wave.samples[start + i] * win[i], 0.0};
    fft_inplace(buf);
    for (std::size_t k = 0; k < n_bins; ++k) acc[k] += std::norm(buf[k]);
    ++n_segments;
  }

  const double fs = wave.sample_rate;
  const double scale = 1.0 / (fs * u * static_cast<double>(n_segments));
  std::vector<PsdPoint> out(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    double density = acc[k] * scale;
    // One-sided: fold negative frequencies onto every interior bin.
    if (k != 0 && k != n / 2) density *= 2.0;
    density = std::max(density, 1e-40);  // keep CSVs free of -inf
    out[k] = {static_cast<double>(k) * fs / static_cast<double>(n),
              10.0 * std::log10(density)};
  }
  return out;
}

BerResult ber(const BitSequence& tx, const BitSequence& rx) {
  if (tx.size() != rx.size())
    throw std::invalid_argument("ber: sequences must have equal length");
  if (tx.empty()) throw std::invalid_argument("ber: empty sequences");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < tx.size(); ++i)
    if (tx[i] != rx[i]) ++errors;

  const double n = static_cast<double>(tx.size());
  const double p = static_cast<double>(errors) / n;
  const double z = 1.959963985;  // two-sided 95%
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double radius = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));

  BerResult result;
  result.errors = errors;
  result.rate = p;
  result.ci95_lo = std::max(0.0, (center - radius) / denom);
  result.ci95_hi = std::min(1.0, (center + radius) / denom);
  return result;
}

double body_resonance(double length_m, bool grounded) {
  if (!(length_m > 0.0))
    throw std::invalid_argument("body_resonance: length_m must be > 0");
  return grounded ? kSpeedOfLight / (4.0 * length_m)
                  : kSpeedOfLight / (2.0 * length_m);
}

double hack_probability(double eq, double p_touch, Medium medium) {
  if (!(eq >= 0.0 && eq <= 1.0))
    throw std::invalid_argument("hack_probability: eq must be in [0, 1]");
  if (!(p_touch >= 0.0 && p_touch <= 1.0))
    throw std::invalid_argument("hack_probability: p_touch must be in [0, 1]");
  return medium == Medium::HBC ? eq * p_touch : eq;
}

}  // namespace hbcsim

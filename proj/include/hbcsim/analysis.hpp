// SPDX-License-Identifier: Apache-2.0
//
// Closed-form notch/rejection math, eye-diagram extraction and metrics, Welch
// power spectral density, Monte-Carlo BER with Wilson intervals, body-antenna
// resonance, and touch-gated interception probability arithmetic.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hbcsim/signal_core.hpp"

namespace hbcsim {

// Waveform folded modulo fold_period. traces are the folded single-period
// segments; eye_height is measured at sampling_instant (seconds within the
// fold) and may be negative when the eye is closed; eye_width is the longest
// contiguous span of instants with positive opening.
struct EyeDiagram {
  double fold_period = 0.0;
  std::vector<std::vector<double>> traces;
  double sampling_instant = 0.0;
  double eye_height = 0.0;
  double eye_width = 0.0;
};

struct RejectionPoint {
  double freq_hz = 0.0;
  double rejection_db = 0.0;
};

struct RejectionCurve {
  std::vector<RejectionPoint> points;
};

struct PsdPoint {
  double freq_hz = 0.0;
  double density_dbhz = 0.0;  // one-sided power density, dB/Hz
};

struct BerResult {
  std::size_t errors = 0;
  double rate = 0.0;
  double ci95_lo = 0.0;  // Wilson 95% interval
  double ci95_hi = 0.0;
};

enum class Medium { WBAN, HBC };

// k_int * a_intf * [cos(phi) - cos(2*pi*f_i*t_b + phi)] / (2*pi*f_i):
// the sampled value of a unit-gain integrator fed a_intf*sin(2*pi*f_i*t + phi)
// over one bit window. Zero whenever f_i*t_b is a positive integer.
double integrated_interference_closed_form(double a_intf, double f_i,
                                           double phi, double t_b,
                                           double k_int);

// Worst case over phase of the integrated interferer, normalized by the
// integral of a same-amplitude DC interferer (k_int*A*t_b):
// -20*log10|sinc(f_i*t_b)| with sinc(x) = sin(pi x)/(pi x), clamped to cap_db
// at exact notches. 0 dB is the no-suppression baseline.
double worst_case_rejection_db(double f_i, double t_b, double cap_db = 120.0);

// worst_case_rejection_db sampled on a uniform frequency grid (endpoints
// inclusive). Requires 0 < f_lo < f_hi, n_points >= 2.
RejectionCurve rejection_curve(double t_b, double f_lo, double f_hi,
                               std::size_t n_points, double cap_db = 120.0);

// The running-integral closed form -k*A*[cos(w t + phi) - cos(phi)]/w sampled
// at n_points equally spaced instants over [0, t_b] (endpoints inclusive).
Waveform integrated_interference_trajectory(double a_intf, double f_i,
                                            double phi, double t_b,
                                            double k_int,
                                            std::size_t n_points);

// Robust rail-based eye opening of a set of values observed at one sampling
// instant: values are split by sign (> 0 upper rail, <= 0 lower rail);
// upper level = mean - 3*sigma of the upper rail, lower level = mean + 3*sigma
// of the lower rail (population sigma), height = upper - lower. For a noiseless
// two-level signal this reduces to min(upper) - max(lower). If a rail is empty
// the missing level falls back to the extreme over all values (max for the
// upper level, min for the lower), so one-sided signals report a closed eye.
double sampled_eye_height(const std::vector<double>& values);

// Folds the waveform modulo fold_period starting at offset (seconds from the
// start of the waveform) and computes rail-based metrics; rail membership of
// each trace is fixed by its sign at sampling_instant. Requires at least
// 8 whole fold periods after the offset.
EyeDiagram eye_diagram(const Waveform& wave, double fold_period, double offset,
                       double sampling_instant);

// Welch averaged periodogram, one-sided, density in dB/Hz. segment_len must be
// a power of two and <= wave length; overlap_frac in [0, 0.9]; window is
// "rectangular" or "hann". Total integrated linear density equals the waveform
// mean-square power within the usual Welch bias (window-gain corrected).
std::vector<PsdPoint> psd(const Waveform& wave, std::size_t segment_len,
                          double overlap_frac, const std::string& window);

// Error count, rate, and Wilson 95% interval; sequences must have equal length.
BerResult ber(const BitSequence& tx, const BitSequence& rx);

// Quarter/half-wave resonant pickup frequency of a conductive body of the
// given length: c/(2l) floating (ungrounded), c/(4l) grounded, c = 2.998e8 m/s.
double body_resonance(double length_m, bool grounded);

// Interception probability: eq for WBAN (always exposed), eq * p_touch for HBC
// (requires physical contact). Inputs must be probabilities in [0, 1].
double hack_probability(double eq, double p_touch, Medium medium);

}  // namespace hbcsim

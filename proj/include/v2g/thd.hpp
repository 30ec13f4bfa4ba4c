#pragma once

#include <string>
#include <vector>

namespace v2g {

/// Harmonic content of one sampled waveform.
struct ThdReport {
    std::string signal_name;
    double fundamental_frequency = 0.0;           ///< hertz, as used for the projection
    double fundamental_amplitude = 0.0;           ///< A_1
    std::vector<double> harmonic_amplitudes;      ///< A_2 .. A_n_max
    double thd_percent = 0.0;                     ///< 100 sqrt(sum A_h^2) / A_1, h >= 2
};

/// Per-harmonic amplitudes A_1..A_n_max by single-bin Fourier projection at
/// exact multiples of f0 over a truncated integer number of fundamental
/// periods (leakage-free; no window function).
///
/// Preconditions: signal spans >= 5 periods of f0; n_max * f0 < sample_rate/2.
std::vector<double> harmonic_spectrum(const std::vector<double>& signal, double sample_rate,
                                      double f0, int n_max);

/// Rising-zero-crossing frequency estimate: mean period between linearly
/// interpolated crossings, with a hysteresis band so additive noise near zero
/// does not produce spurious crossings. Needs >= 3 crossings.
double estimate_frequency(const std::vector<double>& signal, double sample_rate);

/// %THD through harmonic n_max. The fundamental is first refined via
/// estimate_frequency; if the estimate is absent or deviates from f0_hint by
/// more than 10% (as happens on raw switched waveforms) the hint is used.
double thd_percent(const std::vector<double>& signal, double sample_rate, double f0_hint,
                   int n_max = 50);

/// thd_percent plus the underlying spectrum and refined frequency.
ThdReport analyze_waveform(const std::vector<double>& signal, double sample_rate, double f0_hint,
                           int n_max = 50, const std::string& signal_name = "");

/// 100 (thd_without - thd_with) / thd_without. Requires thd_without > 0.
double improvement_percent(double thd_without, double thd_with);

/// Last round(fraction * n) samples of a record, the steady-state analysis
/// window.
std::vector<double> tail_window(const std::vector<double>& signal, double fraction);

}  // namespace v2g

#include "v2g/thd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace v2g {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

// Compensated summation; the projection sums run over 1e5..1e7 samples and
// the sub-1e-8% THD floor leaves no room for naive accumulation error.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Hysteresis band for crossing detection, as a fraction of peak amplitude.
constexpr double kCrossingBand = 0.1;

}  // namespace

std::vector<double> harmonic_spectrum(const std::vector<double>& signal, double sample_rate,
                                      double f0, int n_max) {
    require(sample_rate > 0.0 && std::isfinite(sample_rate), "thd: sample rate must be positive");
    require(f0 > 0.0 && std::isfinite(f0), "thd: fundamental frequency must be positive");
    require(n_max >= 1, "thd: n_max must be >= 1");
    if (!(n_max * f0 < sample_rate / 2.0))
        throw std::invalid_argument("thd: n_max * f0 violates the Nyquist limit");

    const auto n = static_cast<std::int64_t>(signal.size());
    const double samples_per_period = sample_rate / f0;
    // An integer samples-per-period grid permits an exactly periodic basis
    // table, which keeps the leakage floor at roundoff level.
    const auto m = static_cast<std::int64_t>(std::llround(samples_per_period));
    const bool aligned = m >= 2 && std::abs(samples_per_period - static_cast<double>(m)) <= 1e-3;

    std::vector<double> amplitudes(static_cast<std::size_t>(n_max), 0.0);
    if (aligned) {
        const std::int64_t periods = n / m;
        if (periods < 5)
            throw std::invalid_argument("thd: signal must span at least 5 fundamental periods");
        const std::int64_t nw = periods * m;
        std::vector<double> cos_tab(static_cast<std::size_t>(m));
        std::vector<double> sin_tab(static_cast<std::size_t>(m));
        for (std::int64_t k = 0; k < m; ++k) {
            const double a = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
            cos_tab[static_cast<std::size_t>(k)] = std::cos(a);
            sin_tab[static_cast<std::size_t>(k)] = std::sin(a);
        }
        for (int h = 1; h <= n_max; ++h) {
            const std::int64_t stride = h % m;
            std::int64_t idx = 0;
            KahanSum a, b;
            for (std::int64_t k = 0; k < nw; ++k) {
                const double s = signal[static_cast<std::size_t>(k)];
                a.add(s * cos_tab[static_cast<std::size_t>(idx)]);
                b.add(s * sin_tab[static_cast<std::size_t>(idx)]);
                idx += stride;
                if (idx >= m) idx -= m;
            }
            amplitudes[static_cast<std::size_t>(h - 1)] =
                2.0 * std::hypot(a.s, b.s) / static_cast<double>(nw);
        }
    } else {
        const auto periods = static_cast<std::int64_t>(static_cast<double>(n) * f0 / sample_rate);
        if (periods < 5)
            throw std::invalid_argument("thd: signal must span at least 5 fundamental periods");
        const std::int64_t nw =
            std::min(n, std::llround(static_cast<double>(periods) * samples_per_period));
        for (int h = 1; h <= n_max; ++h) {
            const double w = kTwoPi * h * f0 / sample_rate;
            KahanSum a, b;
            for (std::int64_t k = 0; k < nw; ++k) {
                const double angle = w * static_cast<double>(k);
                const double s = signal[static_cast<std::size_t>(k)];
                a.add(s * std::cos(angle));
                b.add(s * std::sin(angle));
            }
            amplitudes[static_cast<std::size_t>(h - 1)] =
                2.0 * std::hypot(a.s, b.s) / static_cast<double>(nw);
        }
    }
    return amplitudes;
}

double estimate_frequency(const std::vector<double>& signal, double sample_rate) {
    require(sample_rate > 0.0 && std::isfinite(sample_rate), "thd: sample rate must be positive");
    double peak = 0.0;
    for (double s : signal) peak = std::max(peak, std::abs(s));
    if (!(peak > 0.0))
        throw std::invalid_argument("thd: need at least 3 rising zero crossings");

    const double band = kCrossingBand * peak;
    const double dt = 1.0 / sample_rate;
    std::vector<double> crossings;
    bool armed = false;
    for (std::size_t k = 0; k + 1 < signal.size(); ++k) {
        if (!armed) {
            if (signal[k] <= -band) armed = true;
        } else if (signal[k] < 0.0 && signal[k + 1] >= 0.0) {
            const double frac = signal[k] / (signal[k] - signal[k + 1]);
            crossings.push_back((static_cast<double>(k) + frac) * dt);
            armed = false;
        }
    }
    if (crossings.size() < 3)
        throw std::invalid_argument("thd: need at least 3 rising zero crossings");
    const double mean_period =
        (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    return 1.0 / mean_period;
}

ThdReport analyze_waveform(const std::vector<double>& signal, double sample_rate, double f0_hint,
                           int n_max, const std::string& signal_name) {
    require(f0_hint > 0.0 && std::isfinite(f0_hint), "thd: f0 hint must be positive");
    double f0 = f0_hint;
    try {
        const double est = estimate_frequency(signal, sample_rate);
        if (std::abs(est - f0_hint) <= 0.1 * f0_hint) f0 = est;
    } catch (const std::invalid_argument&) {
        // No usable crossings (e.g. a raw switched waveform); keep the hint.
    }

    ThdReport report;
    report.signal_name = signal_name;
    report.fundamental_frequency = f0;
    const std::vector<double> amps = harmonic_spectrum(signal, sample_rate, f0, n_max);
    report.fundamental_amplitude = amps[0];
    report.harmonic_amplitudes.assign(amps.begin() + 1, amps.end());

    const double peak_amp = *std::max_element(amps.begin(), amps.end());
    if (!(peak_amp > 0.0) || amps[0] < 1e-9 * peak_amp)
        throw std::domain_error("thd: fundamental amplitude is zero, THD undefined");
    double sumsq = 0.0;
    for (double a : report.harmonic_amplitudes) sumsq += a * a;
    report.thd_percent = 100.0 * std::sqrt(sumsq) / amps[0];
    return report;
}

double thd_percent(const std::vector<double>& signal, double sample_rate, double f0_hint,
                   int n_max) {
    return analyze_waveform(signal, sample_rate, f0_hint, n_max).thd_percent;
}

double improvement_percent(double thd_without, double thd_with) {
    require(std::isfinite(thd_without) && std::isfinite(thd_with), "thd: values must be finite");
    if (!(thd_without > 0.0))
        throw std::invalid_argument("thd: improvement baseline must be positive");
    return 100.0 * (thd_without - thd_with) / thd_without;
}

std::vector<double> tail_window(const std::vector<double>& signal, double fraction) {
    require(fraction > 0.0 && fraction <= 1.0, "thd: window fraction must be in (0, 1]");
    require(!signal.empty(), "thd: empty signal");
    const auto n = static_cast<std::int64_t>(signal.size());
    const std::int64_t count =
        std::clamp<std::int64_t>(std::llround(fraction * static_cast<double>(n)), 1, n);
    return {signal.end() - count, signal.end()};
}

}  // namespace v2g

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "v2g/lti.hpp"

namespace testutil {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                     double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
    return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

/// Hurwitz by construction: shift the diagonal past the largest Gershgorin
/// row sum so every eigenvalue has negative real part.
inline Eigen::MatrixXd random_stable_A(std::mt19937_64& rng, Eigen::Index n) {
    Eigen::MatrixXd m = random_matrix(rng, n, n, 1.0);
    m.diagonal().array() -= m.cwiseAbs().rowwise().sum().maxCoeff() + 0.1;
    return m;
}

/// Singular by construction: the first column is zero, so 0 is an eigenvalue.
inline Eigen::MatrixXd random_singular_A(std::mt19937_64& rng, Eigen::Index n) {
    Eigen::MatrixXd m = random_stable_A(rng, n);
    m.col(0).setZero();
    return m;
}

/// Composite-Simpson quadrature of int_0^Ts exp(A tau) B dtau; the
/// independent oracle for the ZOH input matrix.
inline Eigen::MatrixXd simpson_zoh_H(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double Ts,
                                     int panels = 256) {
    const double h = Ts / panels;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(B.rows(), B.cols());
    for (int i = 0; i <= panels; ++i) {
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 != 0 ? 4.0 : 2.0);
        acc += w * (v2g::matrix_exponential(A * (h * i)) * B);
    }
    return acc * (h / 3.0);
}

inline std::vector<double> sampled_sine(double amplitude, double frequency, double sample_rate,
                                        double duration, double phase = 0.0) {
    const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
    std::vector<double> s(n);
    const double w = 2.0 * std::numbers::pi * frequency;
    for (std::size_t k = 0; k < n; ++k)
        s[k] = amplitude * std::sin(w * (static_cast<double>(k) / sample_rate) + phase);
    return s;
}

/// Unit square wave, +1 on the first half of each period.
inline std::vector<double> sampled_square(double frequency, double sample_rate, double duration) {
    const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) {
        double ph = static_cast<double>(k) * frequency / sample_rate;
        ph -= std::floor(ph);
        s[k] = ph < 0.5 ? 1.0 : -1.0;
    }
    return s;
}

}  // namespace testutil

#pragma once

#include <cstdint>
#include <Eigen/Dense>

#include "v2g/lti.hpp"

namespace v2g {

/// Receding-horizon controller parameters.
struct MpcConfig {
    int prediction_horizon = 10;  ///< N_p, output prediction steps
    int control_horizon = 3;      ///< N_c, optimized input moves, N_c <= N_p
    double move_weight = 0.0;     ///< r_w, scalar weight on du' du
    double sample_time = 10e-6;   ///< controller period, seconds

    /// Length of the optimization window in seconds.
    double window_duration() const { return prediction_horizon * sample_time; }

    void validate() const;
};

/// Free- and forced-response matrices of the stacked output prediction
///   Y = F x_aug + Phi dU
/// over the prediction horizon. Phi is block lower-triangular Toeplitz with
/// block(i, j) = Cm Gm^(i-j) Hm; row block i of F is Cm Gm^(i+1).
struct PredictionMatrices {
    Eigen::MatrixXd F;    ///< (q Np) x (n+q)
    Eigen::MatrixXd Phi;  ///< (q Np) x (m Nc)
};

/// Controller memory carried between samples.
struct MpcState {
    Eigen::VectorXd x_prev;  ///< plant state at the previous sample
    Eigen::VectorXd u_prev;  ///< input applied at the previous sample
    Eigen::VectorXd y_meas;  ///< most recent measured output
    std::int64_t k = 0;      ///< sample counter
};

/// Result of one receding-horizon update.
struct ControllerStep {
    Eigen::VectorXd mv;  ///< manipulated variable u(k) = u(k-1) + du(k)
    Eigen::VectorXd du;  ///< first move of the optimal sequence
    double cost = 0.0;   ///< J evaluated at the optimal move sequence
    bool regularized = false;
    MpcState state;      ///< advanced controller memory
};

PredictionMatrices build_prediction_matrices(const AugmentedModel& aug, const MpcConfig& cfg);

/// Stack the q-entry reference Np times into the horizon set-point vector.
Eigen::VectorXd build_setpoint_vector(const Eigen::VectorXd& r, const MpcConfig& cfg);

/// J = (Rs - Y)'(Rs - Y) + du' (r_w I) du with Y = F x_aug + Phi du.
double evaluate_cost(const PredictionMatrices& pm, double move_weight,
                     const Eigen::VectorXd& x_aug, const Eigen::VectorXd& setpoint,
                     const Eigen::VectorXd& du);

/// Closed-form unconstrained optimum dU = (Phi'Phi + r_w I)^-1 Phi'(Rs - F x_aug).
///
/// A singular normal matrix raises SingularMatrixError unless
/// `allow_regularization` is set, in which case a Tikhonov term
/// eps = 1e-10 * trace(Phi'Phi) / rows is added and *regularized reports it.
Eigen::VectorXd solve_optimal_du(const PredictionMatrices& pm, double move_weight,
                                 const Eigen::VectorXd& x_aug, const Eigen::VectorXd& setpoint,
                                 bool allow_regularization = true, bool* regularized = nullptr);

/// One full receding-horizon update with full-state feedback: assembles the
/// augmented state [x - x_prev; y], solves for dU, applies the first move.
ControllerStep controller_update(const MpcState& state, const MpcConfig& cfg,
                                 const AugmentedModel& aug, const PredictionMatrices& pm,
                                 const Eigen::VectorXd& y_meas, const Eigen::VectorXd& x_meas,
                                 const Eigen::VectorXd& reference);

/// Same math as controller_update with the prediction matrices and the
/// factorization of the normal matrix cached, for use in the sample loop.
class MpcController {
public:
    MpcController(AugmentedModel aug, MpcConfig cfg);

    ControllerStep update(const MpcState& state, const Eigen::VectorXd& y_meas,
                          const Eigen::VectorXd& x_meas, const Eigen::VectorXd& reference) const;

    /// Fresh controller memory for a plant starting at state x0 with output y0.
    MpcState initial_state(const Eigen::VectorXd& x0, const Eigen::VectorXd& y0) const;

    const PredictionMatrices& prediction_matrices() const { return pm_; }
    const MpcConfig& config() const { return cfg_; }
    bool regularization_engaged() const { return regularized_; }

private:
    AugmentedModel aug_;
    MpcConfig cfg_;
    PredictionMatrices pm_;
    Eigen::LDLT<Eigen::MatrixXd> normal_ldlt_;
    bool regularized_ = false;
};

}  // namespace v2g

#pragma once

#include <Eigen/Dense>

namespace v2g {

/// Continuous-time LTI plant  x' = A x + B u,  y = C x + D u.
///
/// The feedthrough D is required to be zero and the model must have at
/// least as many inputs as outputs (m >= q).
struct ContinuousStateSpace {
    Eigen::MatrixXd A;  ///< system matrix, n x n
    Eigen::MatrixXd B;  ///< input matrix, n x m
    Eigen::MatrixXd C;  ///< output matrix, q x n
    Eigen::MatrixXd D;  ///< feedthrough, q x m, always zero

    ContinuousStateSpace(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in, Eigen::MatrixXd C_in);
    ContinuousStateSpace(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in, Eigen::MatrixXd C_in,
                         Eigen::MatrixXd D_in);

    int num_states() const { return static_cast<int>(A.rows()); }
    int num_inputs() const { return static_cast<int>(B.cols()); }
    int num_outputs() const { return static_cast<int>(C.rows()); }
};

/// Zero-order-hold discretization  x(k+1) = G x(k) + H u(k),  y(k) = C x(k) + d(k).
struct DiscreteStateSpace {
    Eigen::MatrixXd G;
    Eigen::MatrixXd H;
    Eigen::MatrixXd C;
    double Ts;  ///< sampling period, seconds

    DiscreteStateSpace(Eigen::MatrixXd G_in, Eigen::MatrixXd H_in, Eigen::MatrixXd C_in,
                       double Ts_in);

    int num_states() const { return static_cast<int>(G.rows()); }
    int num_inputs() const { return static_cast<int>(H.cols()); }
    int num_outputs() const { return static_cast<int>(C.rows()); }
};

/// Incremental (velocity-form) model over the stacked state [dx(k); y(k)]:
///
///   Gm = [ G    0 ]    Hm = [ H  ]    Cm = [ 0  I ]
///        [ C*G  I ]         [ C*H ]
///
/// Driving it with du(k) = u(k) - u(k-1) reproduces the plain model's output
/// trajectory and cancels any constant output disturbance.
struct AugmentedModel {
    Eigen::MatrixXd Gm;  ///< (n+q) x (n+q)
    Eigen::MatrixXd Hm;  ///< (n+q) x m
    Eigen::MatrixXd Cm;  ///< q x (n+q)

    int num_states() const { return static_cast<int>(Gm.rows()); }
    int num_inputs() const { return static_cast<int>(Hm.cols()); }
    int num_outputs() const { return static_cast<int>(Cm.rows()); }
};

/// Matrix exponential by scaling-and-squaring with a fixed-order (6,6) Pade
/// approximant. `tol` is the relative accuracy target; anything at or above
/// 1e-15 is met by the fixed-order scheme.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M, double tol = 1e-12);

/// Exact ZOH discretization. G = exp(A*Ts) and H = int_0^Ts exp(A*tau) dtau * B,
/// both read off the exponential of the block matrix [[A, B], [0, 0]]*Ts, which
/// stays valid for singular A.
DiscreteStateSpace discretize(const ContinuousStateSpace& sys, double Ts);

struct StepResult {
    Eigen::VectorXd x_next;
    Eigen::VectorXd y;
};

/// One discrete step: x_next = G x + H u, y = C x + d.
StepResult step(const DiscreteStateSpace& sys, const Eigen::VectorXd& x,
                const Eigen::VectorXd& u, const Eigen::VectorXd& d);

/// Build the incremental model documented on AugmentedModel.
AugmentedModel augment(const DiscreteStateSpace& sys);

/// Largest eigenvalue magnitude of a square matrix.
double spectral_radius(const Eigen::MatrixXd& M);

}  // namespace v2g

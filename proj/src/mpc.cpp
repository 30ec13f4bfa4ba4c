#include "v2g/mpc.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "v2g/errors.hpp"

namespace v2g {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

// Relative pivot threshold below which the LDLT factors are treated as
// numerically singular.
constexpr double kPivotRatio = 1e-14;

bool ldlt_singular(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    const double dmax = d.maxCoeff();
    if (!(dmax > 0.0)) return true;
    return d.minCoeff() <= kPivotRatio * dmax;
}

double tikhonov_epsilon(const Eigen::MatrixXd& normal) {
    const double scale = normal.trace() / static_cast<double>(normal.rows());
    return scale > 0.0 ? 1e-10 * scale : 1e-10;
}

// Factor Phi'Phi + r_w I, adding a Tikhonov term only if the plain normal
// matrix is singular and the caller allows it.
Eigen::LDLT<Eigen::MatrixXd> factor_normal(const Eigen::MatrixXd& phi, double move_weight,
                                           bool allow_regularization, bool* regularized) {
    require(move_weight >= 0.0 && std::isfinite(move_weight), "mpc: move weight must be finite and >= 0");
    Eigen::MatrixXd normal = phi.transpose() * phi;
    normal.diagonal().array() += move_weight;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (regularized) *regularized = false;
    if (!ldlt_singular(ldlt)) return ldlt;
    if (!allow_regularization)
        throw SingularMatrixError("mpc: Phi'Phi + r_w I is singular; increase r_w or shorten the control horizon");
    normal.diagonal().array() += tikhonov_epsilon(normal);
    ldlt.compute(normal);
    if (ldlt_singular(ldlt))
        throw SingularMatrixError("mpc: normal matrix remains singular after regularization");
    if (regularized) *regularized = true;
    return ldlt;
}

}  // namespace

void MpcConfig::validate() const {
    require(prediction_horizon >= 1, "mpc: prediction horizon must be >= 1");
    require(control_horizon >= 1, "mpc: control horizon must be >= 1");
    require(control_horizon <= prediction_horizon, "mpc: control horizon must not exceed prediction horizon");
    require(std::isfinite(move_weight) && move_weight >= 0.0, "mpc: move weight must be finite and >= 0");
    require(std::isfinite(sample_time) && sample_time > 0.0, "mpc: sample time must be positive");
}

PredictionMatrices build_prediction_matrices(const AugmentedModel& aug, const MpcConfig& cfg) {
    cfg.validate();
    const auto np = static_cast<Eigen::Index>(cfg.prediction_horizon);
    const auto nc = static_cast<Eigen::Index>(cfg.control_horizon);
    const Eigen::Index q = aug.Cm.rows();
    const Eigen::Index na = aug.Gm.rows();
    const Eigen::Index m = aug.Hm.cols();

    // P[i] = Cm Gm^i, i = 0..Np.
    std::vector<Eigen::MatrixXd> P(static_cast<std::size_t>(np) + 1);
    P[0] = aug.Cm;
    for (Eigen::Index i = 1; i <= np; ++i)
        P[static_cast<std::size_t>(i)] = P[static_cast<std::size_t>(i - 1)] * aug.Gm;

    PredictionMatrices pm;
    pm.F.resize(q * np, na);
    pm.Phi = Eigen::MatrixXd::Zero(q * np, m * nc);

    std::vector<Eigen::MatrixXd> S(static_cast<std::size_t>(np));  // S[i] = Cm Gm^i Hm
    for (Eigen::Index i = 0; i < np; ++i) {
        pm.F.middleRows(i * q, q) = P[static_cast<std::size_t>(i + 1)];
        S[static_cast<std::size_t>(i)] = P[static_cast<std::size_t>(i)] * aug.Hm;
    }
    for (Eigen::Index i = 0; i < np; ++i)
        for (Eigen::Index j = 0; j <= i && j < nc; ++j)
            pm.Phi.block(i * q, j * m, q, m) = S[static_cast<std::size_t>(i - j)];
    return pm;
}

Eigen::VectorXd build_setpoint_vector(const Eigen::VectorXd& r, const MpcConfig& cfg) {
    cfg.validate();
    require(r.size() > 0, "mpc: reference must be non-empty");
    return r.replicate(cfg.prediction_horizon, 1);
}

double evaluate_cost(const PredictionMatrices& pm, double move_weight,
                     const Eigen::VectorXd& x_aug, const Eigen::VectorXd& setpoint,
                     const Eigen::VectorXd& du) {
    require(pm.F.rows() == pm.Phi.rows(), "mpc: F and Phi row counts differ");
    require(x_aug.size() == pm.F.cols(), "mpc: augmented state size mismatch");
    require(setpoint.size() == pm.F.rows(), "mpc: setpoint size mismatch");
    require(du.size() == pm.Phi.cols(), "mpc: move sequence size mismatch");
    const Eigen::VectorXd error = setpoint - pm.F * x_aug - pm.Phi * du;
    return error.squaredNorm() + move_weight * du.squaredNorm();
}

Eigen::VectorXd solve_optimal_du(const PredictionMatrices& pm, double move_weight,
                                 const Eigen::VectorXd& x_aug, const Eigen::VectorXd& setpoint,
                                 bool allow_regularization, bool* regularized) {
    require(x_aug.size() == pm.F.cols(), "mpc: augmented state size mismatch");
    require(setpoint.size() == pm.F.rows(), "mpc: setpoint size mismatch");
    const auto ldlt = factor_normal(pm.Phi, move_weight, allow_regularization, regularized);
    return ldlt.solve(pm.Phi.transpose() * (setpoint - pm.F * x_aug));
}

ControllerStep controller_update(const MpcState& state, const MpcConfig& cfg,
                                 const AugmentedModel& aug, const PredictionMatrices& pm,
                                 const Eigen::VectorXd& y_meas, const Eigen::VectorXd& x_meas,
                                 const Eigen::VectorXd& reference) {
    const Eigen::Index q = aug.Cm.rows();
    const Eigen::Index n = aug.Gm.rows() - q;
    const Eigen::Index m = aug.Hm.cols();
    require(x_meas.size() == n, "mpc: plant state size mismatch");
    require(state.x_prev.size() == n, "mpc: previous state size mismatch");
    require(state.u_prev.size() == m, "mpc: previous input size mismatch");
    require(y_meas.size() == q, "mpc: measured output size mismatch");
    require(reference.size() == q, "mpc: reference size mismatch");

    Eigen::VectorXd x_aug(n + q);
    x_aug << x_meas - state.x_prev, y_meas;
    const Eigen::VectorXd setpoint = build_setpoint_vector(reference, cfg);

    ControllerStep out;
    const Eigen::VectorXd du_seq =
        solve_optimal_du(pm, cfg.move_weight, x_aug, setpoint, true, &out.regularized);
    out.du = du_seq.head(m);
    out.mv = state.u_prev + out.du;
    out.cost = evaluate_cost(pm, cfg.move_weight, x_aug, setpoint, du_seq);
    out.state.x_prev = x_meas;
    out.state.u_prev = out.mv;
    out.state.y_meas = y_meas;
    out.state.k = state.k + 1;
    return out;
}

MpcController::MpcController(AugmentedModel aug, MpcConfig cfg)
    : aug_(std::move(aug)), cfg_(cfg), pm_(build_prediction_matrices(aug_, cfg_)) {
    normal_ldlt_ = factor_normal(pm_.Phi, cfg_.move_weight, true, &regularized_);
}

ControllerStep MpcController::update(const MpcState& state, const Eigen::VectorXd& y_meas,
                                     const Eigen::VectorXd& x_meas,
                                     const Eigen::VectorXd& reference) const {
    const Eigen::Index q = aug_.Cm.rows();
    const Eigen::Index n = aug_.Gm.rows() - q;
    const Eigen::Index m = aug_.Hm.cols();
    require(x_meas.size() == n, "mpc: plant state size mismatch");
    require(state.x_prev.size() == n, "mpc: previous state size mismatch");
    require(state.u_prev.size() == m, "mpc: previous input size mismatch");
    require(y_meas.size() == q, "mpc: measured output size mismatch");
    require(reference.size() == q, "mpc: reference size mismatch");

    Eigen::VectorXd x_aug(n + q);
    x_aug << x_meas - state.x_prev, y_meas;
    const Eigen::VectorXd setpoint = build_setpoint_vector(reference, cfg_);

    ControllerStep out;
    out.regularized = regularized_;
    const Eigen::VectorXd du_seq =
        normal_ldlt_.solve(pm_.Phi.transpose() * (setpoint - pm_.F * x_aug));
    out.du = du_seq.head(m);
    out.mv = state.u_prev + out.du;
    out.cost = evaluate_cost(pm_, cfg_.move_weight, x_aug, setpoint, du_seq);
    out.state.x_prev = x_meas;
    out.state.u_prev = out.mv;
    out.state.y_meas = y_meas;
    out.state.k = state.k + 1;
    return out;
}

MpcState MpcController::initial_state(const Eigen::VectorXd& x0, const Eigen::VectorXd& y0) const {
    const Eigen::Index q = aug_.Cm.rows();
    const Eigen::Index n = aug_.Gm.rows() - q;
    require(x0.size() == n, "mpc: initial state size mismatch");
    require(y0.size() == q, "mpc: initial output size mismatch");
    MpcState s;
    s.x_prev = x0;
    s.u_prev = Eigen::VectorXd::Zero(aug_.Hm.cols());
    s.y_meas = y0;
    s.k = 0;
    return s;
}

}  // namespace v2g

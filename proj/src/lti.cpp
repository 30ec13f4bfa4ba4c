#include "v2g/lti.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace v2g {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

ContinuousStateSpace::ContinuousStateSpace(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in,
                                           Eigen::MatrixXd C_in)
    : ContinuousStateSpace(std::move(A_in), std::move(B_in), std::move(C_in), Eigen::MatrixXd()) {}

ContinuousStateSpace::ContinuousStateSpace(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in,
                                           Eigen::MatrixXd C_in, Eigen::MatrixXd D_in)
    : A(std::move(A_in)), B(std::move(B_in)), C(std::move(C_in)), D(std::move(D_in)) {
    require(A.rows() > 0 && A.rows() == A.cols(), "state-space: A must be square and non-empty");
    require(B.rows() == A.rows(), "state-space: B must have as many rows as A");
    require(B.cols() > 0, "state-space: B must have at least one column");
    require(C.cols() == A.rows(), "state-space: C must have as many columns as A");
    require(C.rows() > 0, "state-space: C must have at least one row");
    require(B.cols() >= C.rows(), "state-space: need at least as many inputs as outputs (m >= q)");
    if (D.size() == 0) {
        D = Eigen::MatrixXd::Zero(C.rows(), B.cols());
    } else {
        require(D.rows() == C.rows() && D.cols() == B.cols(), "state-space: D has wrong shape");
        require(D.isZero(0.0), "state-space: feedthrough D must be zero");
    }
    require(A.allFinite() && B.allFinite() && C.allFinite(), "state-space: non-finite entries");
}

DiscreteStateSpace::DiscreteStateSpace(Eigen::MatrixXd G_in, Eigen::MatrixXd H_in,
                                       Eigen::MatrixXd C_in, double Ts_in)
    : G(std::move(G_in)), H(std::move(H_in)), C(std::move(C_in)), Ts(Ts_in) {
    require(G.rows() > 0 && G.rows() == G.cols(), "discrete model: G must be square");
    require(H.rows() == G.rows(), "discrete model: H must have as many rows as G");
    require(C.cols() == G.rows(), "discrete model: C must have as many columns as G");
    require(Ts > 0.0, "discrete model: sampling period must be positive");
    require(G.allFinite() && H.allFinite() && C.allFinite(), "discrete model: non-finite entries");
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M, double tol) {
    require(M.rows() == M.cols(), "matrix_exponential: input must be square");
    require(M.allFinite(), "matrix_exponential: non-finite entries");
    require(tol > 0.0, "matrix_exponential: tolerance must be positive");

    const Eigen::Index n = M.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

    // Scale so the (6,6) Pade approximant is in its accurate range; the
    // backward error at theta = 0.5 is far below 1e-15 relative.
    const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    const Eigen::MatrixXd As = M / std::ldexp(1.0, squarings);

    // Pade(6,6): N(A) = sum c_k A^k, D(A) = sum c_k (-A)^k.
    static const double c[7] = {1.0,       1.0 / 2.0,     5.0 / 44.0,    1.0 / 66.0,
                                1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
    const Eigen::MatrixXd A2 = As * As;
    const Eigen::MatrixXd A4 = A2 * A2;
    const Eigen::MatrixXd A6 = A4 * A2;
    const Eigen::MatrixXd U = As * (c[1] * I + c[3] * A2 + c[5] * A4);  // odd part
    const Eigen::MatrixXd V = c[0] * I + c[2] * A2 + c[4] * A4 + c[6] * A6;  // even part

    Eigen::MatrixXd E = (V - U).partialPivLu().solve(V + U);
    for (int i = 0; i < squarings; ++i) E = E * E;
    return E;
}

DiscreteStateSpace discretize(const ContinuousStateSpace& sys, double Ts) {
    require(Ts > 0.0, "discretize: sampling period must be positive");

    const int n = sys.num_states();
    const int m = sys.num_inputs();

    // exp([[A, B], [0, 0]] * Ts) = [[G, H], [0, I]] for any A, singular or not.
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n + m, n + m);
    block.topLeftCorner(n, n) = sys.A * Ts;
    block.topRightCorner(n, m) = sys.B * Ts;
    const Eigen::MatrixXd E = matrix_exponential(block);

    return DiscreteStateSpace(E.topLeftCorner(n, n), E.topRightCorner(n, m), sys.C, Ts);
}

StepResult step(const DiscreteStateSpace& sys, const Eigen::VectorXd& x,
                const Eigen::VectorXd& u, const Eigen::VectorXd& d) {
    require(x.size() == sys.num_states(), "step: state dimension mismatch");
    require(u.size() == sys.num_inputs(), "step: input dimension mismatch");
    require(d.size() == sys.num_outputs(), "step: disturbance dimension mismatch");
    return StepResult{sys.G * x + sys.H * u, sys.C * x + d};
}

AugmentedModel augment(const DiscreteStateSpace& sys) {
    const int n = sys.num_states();
    const int m = sys.num_inputs();
    const int q = sys.num_outputs();

    AugmentedModel aug;
    aug.Gm = Eigen::MatrixXd::Zero(n + q, n + q);
    aug.Gm.topLeftCorner(n, n) = sys.G;
    aug.Gm.bottomLeftCorner(q, n) = sys.C * sys.G;
    aug.Gm.bottomRightCorner(q, q) = Eigen::MatrixXd::Identity(q, q);

    aug.Hm = Eigen::MatrixXd::Zero(n + q, m);
    aug.Hm.topRows(n) = sys.H;
    aug.Hm.bottomRows(q) = sys.C * sys.H;

    aug.Cm = Eigen::MatrixXd::Zero(q, n + q);
    aug.Cm.rightCols(q) = Eigen::MatrixXd::Identity(q, q);
    return aug;
}

double spectral_radius(const Eigen::MatrixXd& M) {
    require(M.rows() == M.cols(), "spectral_radius: input must be square");
    require(M.allFinite(), "spectral_radius: non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace v2g

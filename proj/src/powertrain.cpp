#include "v2g/powertrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "v2g/errors.hpp"
#include "v2g/supervisor.hpp"

namespace v2g {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Phase offsets a, b, c: 0, -120, +120 degrees.
constexpr double kPhaseOffset[3] = {0.0, -kTwoPi / 3.0, kTwoPi / 3.0};

void config_require(bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
}

// Gate generator with turn-on delay: at each commutation the outgoing switch
// opens immediately and the incoming one waits dead_time, so both are off in
// between. The very first sample applies the comparator state directly.
class SpwmModulator {
public:
    explicit SpwmModulator(double dead_time) : dead_time_(dead_time) {}

    std::array<bool, 6> gates(const Eigen::Vector3d& mv, double carrier, double t) {
        std::array<bool, 6> g{};
        for (int ph = 0; ph < 3; ++ph) {
            const double m = std::clamp(mv[ph], -1.0, 1.0);
            const bool target = m > carrier;
            Leg& leg = legs_[static_cast<std::size_t>(ph)];
            if (!leg.initialized) {
                leg.initialized = true;
                leg.target = target;
                leg.t_flip = -std::numeric_limits<double>::infinity();
            } else if (target != leg.target) {
                leg.target = target;
                leg.t_flip = t;
            }
            const bool dead = (t - leg.t_flip) < dead_time_;
            g[static_cast<std::size_t>(2 * ph)] = leg.target && !dead;
            g[static_cast<std::size_t>(2 * ph + 1)] = !leg.target && !dead;
        }
        return g;
    }

private:
    struct Leg {
        bool initialized = false;
        bool target = false;
        double t_flip = 0.0;
    };
    double dead_time_;
    std::array<Leg, 3> legs_{};
};

}  // namespace

void Battery::validate() const {
    config_require(v_rated > 0.0 && std::isfinite(v_rated), "battery.v_rated must be positive");
    config_require(capacity_ah > 0.0 && std::isfinite(capacity_ah), "battery.capacity_ah must be positive");
    config_require(soc >= 0.0 && soc <= 1.0, "battery.soc0 must be in [0, 1]");
    config_require(r_int >= 0.0 && std::isfinite(r_int), "battery.r_int must be finite and >= 0");
}

void GridSource::validate() const {
    config_require(amplitude > 0.0 && std::isfinite(amplitude), "grid.amplitude must be positive");
    config_require(frequency > 0.0 && std::isfinite(frequency), "grid.frequency must be positive");
}

void SpwmConfig::validate(double grid_frequency) const {
    config_require(carrier_frequency > 0.0 && std::isfinite(carrier_frequency),
                   "spwm.carrier_hz must be positive");
    config_require(carrier_frequency >= 10.0 * grid_frequency,
                   "spwm.carrier_hz must be at least 10x the grid frequency");
    config_require(dead_time >= 0.0 && std::isfinite(dead_time), "spwm.dead_time must be finite and >= 0");
    config_require(dead_time * carrier_frequency < 0.5,
                   "spwm.dead_time must be shorter than half a carrier period");
}

void PowerProfile::validate(const char* label) const {
    config_require(!points.empty(), "power profile needs at least one breakpoint");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [t, w] : points) {
        if (!(std::isfinite(t) && std::isfinite(w)))
            throw ConfigError(std::string(label) + ": breakpoints must be finite");
        if (!(t > prev)) throw ConfigError(std::string(label) + ": breakpoint times must be strictly increasing");
        prev = t;
    }
}

double PowerProfile::at(double t) const {
    double value = points.front().second;
    for (const auto& [tb, w] : points) {
        if (tb <= t) value = w;
        else break;
    }
    return value;
}

void LclParams::validate() const {
    config_require(l1 > 0.0 && std::isfinite(l1), "plant.l1 must be positive");
    config_require(c > 0.0 && std::isfinite(c), "plant.c must be positive");
    config_require(l2 > 0.0 && std::isfinite(l2), "plant.l2 must be positive");
    config_require(r_damp >= 0.0 && std::isfinite(r_damp), "plant.r_damp must be finite and >= 0");
    config_require(r1 >= 0.0 && std::isfinite(r1), "plant.r1 must be finite and >= 0");
    config_require(r2 >= 0.0 && std::isfinite(r2), "plant.r2 must be finite and >= 0");
    config_require(r_load > 0.0 && std::isfinite(r_load), "plant.r_load must be positive");
}

ContinuousStateSpace lcl_three_phase_plant(const LclParams& p) {
    p.validate();
    // Per phase, states (i1, vc, i2):
    //   L1 di1/dt = u - (R1+Rd) i1 - vc + Rd i2
    //   C  dvc/dt = i1 - i2
    //   L2 di2/dt = Rd i1 + vc - (R2+Rd+Rload) i2
    // Measured voltage is the capacitor node: y = Rd i1 + vc - Rd i2.
    Eigen::Matrix3d a_ph;
    a_ph << -(p.r1 + p.r_damp) / p.l1, -1.0 / p.l1, p.r_damp / p.l1,
            1.0 / p.c, 0.0, -1.0 / p.c,
            p.r_damp / p.l2, 1.0 / p.l2, -(p.r2 + p.r_damp + p.r_load) / p.l2;
    const Eigen::Vector3d b_ph(1.0 / p.l1, 0.0, 0.0);
    const Eigen::RowVector3d c_ph(p.r_damp, 1.0, -p.r_damp);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(9, 9);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(9, 3);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 9);
    for (int ph = 0; ph < 3; ++ph) {
        A.block<3, 3>(3 * ph, 3 * ph) = a_ph;
        B.block<3, 1>(3 * ph, ph) = b_ph;
        C.block<1, 3>(ph, 3 * ph) = c_ph;
    }
    return ContinuousStateSpace(A, B, C);
}

Eigen::MatrixXd lcl_current_output(const LclParams& p) {
    p.validate();
    Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(3, 9);
    for (int ph = 0; ph < 3; ++ph) sel(ph, 3 * ph + 2) = 1.0;  // i2
    return sel;
}

Eigen::MatrixXd lcl_bridge_current_output(const LclParams& p) {
    p.validate();
    Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(3, 9);
    for (int ph = 0; ph < 3; ++ph) sel(ph, 3 * ph) = 1.0;  // i1
    return sel;
}

void Scenario::validate() const {
    grid.validate();
    battery.validate();
    spwm.validate(grid.frequency);
    p_load.validate("profiles.p_load");
    p_source.validate("profiles.p_source");
    if (lcl) lcl->validate();
    try {
        mpc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    config_require(charge_current_a >= 0.0 && std::isfinite(charge_current_a),
                   "battery.charge_current_a must be finite and >= 0");
    config_require(hysteresis >= 0.0 && std::isfinite(hysteresis),
                   "supervisor.hysteresis must be finite and >= 0");
    config_require(sim_step > 0.0 && std::isfinite(sim_step), "sim.step must be positive");
    config_require(duration > 0.0 && std::isfinite(duration), "sim.duration must be positive");
    config_require(sim_step <= mpc.sample_time, "sim.step must not exceed mpc.T_s");
    const double ratio = mpc.sample_time / sim_step;
    config_require(std::abs(ratio - std::round(ratio)) <= 1e-6 * ratio,
                   "mpc.T_s must be an integer multiple of sim.step");
    config_require(plant.num_inputs() == 3 && plant.num_outputs() == 3,
                   "plant must have three inputs and three outputs");
    config_require(c_current.rows() == 3 && c_current.cols() == plant.num_states(),
                   "current output matrix must be 3 x n_states");
    config_require(c_bridge.rows() == 3 && c_bridge.cols() == plant.num_states(),
                   "bridge current matrix must be 3 x n_states");
}

Eigen::Vector3d grid_voltages(const GridSource& src, double t) {
    const double w = kTwoPi * src.frequency;
    return {src.amplitude * std::sin(w * t + kPhaseOffset[0]),
            src.amplitude * std::sin(w * t + kPhaseOffset[1]),
            src.amplitude * std::sin(w * t + kPhaseOffset[2])};
}

double triangle_carrier(double t, double carrier_hz) {
    double phase = t * carrier_hz;
    phase -= std::floor(phase);
    return phase < 0.5 ? 4.0 * phase - 1.0 : 3.0 - 4.0 * phase;
}

std::array<bool, 6> spwm_switch_states(const Eigen::Vector3d& mv, double carrier_value) {
    if (!mv.allFinite() || !std::isfinite(carrier_value))
        throw std::invalid_argument("spwm: inputs must be finite");
    std::array<bool, 6> g{};
    for (int ph = 0; ph < 3; ++ph) {
        const bool upper = std::clamp(mv[ph], -1.0, 1.0) > carrier_value;
        g[static_cast<std::size_t>(2 * ph)] = upper;
        g[static_cast<std::size_t>(2 * ph + 1)] = !upper;
    }
    return g;
}

Eigen::Vector3d inverter_bridge_voltage(const std::array<bool, 6>& gates, double v_dc) {
    Eigen::Vector3d v;
    for (int ph = 0; ph < 3; ++ph) {
        const bool upper = gates[static_cast<std::size_t>(2 * ph)];
        const bool lower = gates[static_cast<std::size_t>(2 * ph + 1)];
        if (upper && lower)
            throw ShootThroughError("inverter: both switches commanded on in phase " +
                                    std::string(1, static_cast<char>('a' + ph)));
        v[ph] = upper ? v_dc / 2.0 : -v_dc / 2.0;
    }
    return v;
}

Battery battery_step(const Battery& batt, double current, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("battery: dt must be positive");
    if (!std::isfinite(current)) throw std::invalid_argument("battery: current must be finite");
    Battery next = batt;
    next.soc = std::clamp(batt.soc - current * dt / (3600.0 * batt.capacity_ah), 0.0, 1.0);
    return next;
}

TimeSeries simulate_scenario(const Scenario& sc, std::vector<MpcLogEntry>* mpc_log) {
    sc.validate();
    const double dt = sc.sim_step;
    const auto n_steps = static_cast<std::int64_t>(std::llround(sc.duration / dt));
    if (n_steps < 1) throw ConfigError("sim: duration must cover at least one step");
    const auto ratio = static_cast<std::int64_t>(std::llround(sc.mpc.sample_time / dt));

    const DiscreteStateSpace plant_d = discretize(sc.plant, dt);

    // The controller's internal model sees the averaged bridge: mv in [-1,1]
    // scaled by half the initial open-circuit voltage. Link sag during a run
    // is a modest gain error the incremental formulation absorbs.
    std::optional<MpcController> controller;
    if (sc.mpc_enabled) {
        ContinuousStateSpace ctrl_model = sc.plant;
        ctrl_model.B *= sc.battery.open_circuit_voltage() / 2.0;
        controller.emplace(augment(discretize(ctrl_model, sc.mpc.sample_time)), sc.mpc);
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(sc.plant.num_states());
    MpcState mpc_state;
    if (controller) mpc_state = controller->initial_state(x, Eigen::VectorXd::Zero(3));

    Battery batt = sc.battery;
    SpwmModulator modulator(sc.spwm.dead_time);
    Eigen::Vector3d mv = Eigen::Vector3d::Zero();
    const double w_grid = kTwoPi * sc.grid.frequency;
    int mode_c = 0;
    int prev_c = 0;

    TimeSeries ts;
    ts.reserve(static_cast<std::size_t>(n_steps));
    for (std::int64_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;

        if (k % ratio == 0) {
            const double x_net = compute_x(sc.p_load.at(t), sc.p_source.at(t));
            const ModeDecision decision =
                decide_mode(x_net, batt.open_circuit_voltage(), batt.v_rated, sc.hysteresis, prev_c);
            mode_c = decision.c;
            prev_c = decision.c;
            if (mode_c == 1) {
                const Eigen::Vector3d reference = grid_voltages(sc.grid, t);
                if (controller) {
                    const Eigen::VectorXd y = plant_d.C * x;
                    const ControllerStep step = controller->update(mpc_state, y, x, reference);
                    if (mpc_log)
                        mpc_log->push_back({mpc_state.k, t, reference, Eigen::Vector3d(y),
                                            Eigen::Vector3d(step.du), Eigen::Vector3d(step.mv),
                                            step.cost});
                    mv = step.mv;
                    mpc_state = step.state;
                } else {
                    for (int ph = 0; ph < 3; ++ph)
                        mv[ph] = std::sin(w_grid * t + kPhaseOffset[ph]);
                }
            } else {
                mv.setZero();
            }
        }

        Eigen::Vector3d u = Eigen::Vector3d::Zero();
        double i_dc = 0.0;
        if (mode_c == 1) {
            const double carrier = triangle_carrier(t, sc.spwm.carrier_frequency);
            const std::array<bool, 6> g = modulator.gates(mv, carrier, t);
            const Eigen::Vector3d i_bridge = sc.c_bridge * x;
            // Rail attachment per phase: switch command, or during dead time
            // the freewheeling diode picked by the current direction (ties go
            // to the lower rail).
            Eigen::Vector3d rail;
            for (int ph = 0; ph < 3; ++ph) {
                const bool upper = g[static_cast<std::size_t>(2 * ph)];
                const bool lower = g[static_cast<std::size_t>(2 * ph + 1)];
                if (upper) rail[ph] = 1.0;
                else if (lower) rail[ph] = -1.0;
                else rail[ph] = i_bridge[ph] < 0.0 ? 1.0 : -1.0;
            }
            // Midpoint-referenced split link: V_term i_dc = sum(u_ph i1_ph).
            i_dc = 0.5 * rail.dot(i_bridge);
            const double v_term = batt.terminal_voltage(i_dc);
            u = rail * (v_term / 2.0);
        } else {
            i_dc = -sc.charge_current_a;  // averaged rectifier, charge-negative
        }
        const double v_term = batt.terminal_voltage(i_dc);

        const Eigen::Vector3d vg = grid_voltages(sc.grid, t);
        const Eigen::VectorXd vi = plant_d.C * x;
        const Eigen::VectorXd ii = sc.c_current * x;
        TimeSeriesRow row;
        row.t = t;
        row.v_ga = vg[0]; row.v_gb = vg[1]; row.v_gc = vg[2];
        row.v_ia = vi[0]; row.v_ib = vi[1]; row.v_ic = vi[2];
        row.i_ia = ii[0]; row.i_ib = ii[1]; row.i_ic = ii[2];
        row.v_bridge_a = u[0]; row.v_bridge_b = u[1]; row.v_bridge_c = u[2];
        row.v_dc = v_term;
        row.soc = batt.soc;
        row.mode_c = mode_c;
        row.mv_a = mv[0]; row.mv_b = mv[1]; row.mv_c = mv[2];
        ts.push_back(row);

        batt = battery_step(batt, i_dc, dt);
        x = plant_d.G * x + plant_d.H * u;
    }
    return ts;
}

}  // namespace v2g

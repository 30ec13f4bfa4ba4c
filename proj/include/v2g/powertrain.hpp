#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "v2g/lti.hpp"
#include "v2g/mpc.hpp"
#include "v2g/timeseries.hpp"

namespace v2g {

/// Battery with linear open-circuit voltage V_oc = soc * V_rated, so the
/// supervisor thresholds 0.75/0.2 V_rated land at soc 0.75 and 0.2 exactly.
struct Battery {
    double v_rated = 800.0;     ///< volts
    double capacity_ah = 2.0;   ///< ampere-hours
    double soc = 0.9;           ///< in [0, 1]
    double r_int = 0.05;        ///< ohms

    double open_circuit_voltage() const { return soc * v_rated; }
    /// Loaded terminal voltage; current is discharge-positive.
    double terminal_voltage(double current) const {
        return open_circuit_voltage() - current * r_int;
    }
    void validate() const;
};

/// Balanced ideal three-phase source, phase offsets (0, -120, +120) degrees.
struct GridSource {
    double amplitude = 325.0;  ///< phase-voltage peak, volts
    double frequency = 50.0;   ///< hertz
    void validate() const;
};

/// Triangle-carrier SPWM parameters. The carrier is a symmetric triangle in
/// [-1, 1] starting at -1 at t = 0.
struct SpwmConfig {
    double carrier_frequency = 5000.0;  ///< hertz
    double dead_time = 0.0;             ///< seconds, both switches off at each commutation
    void validate(double grid_frequency) const;
};

/// Piecewise-constant power profile over (t, watts) breakpoints: the value at
/// t is that of the last breakpoint with time <= t (first value before it).
struct PowerProfile {
    std::vector<std::pair<double, double>> points;
    double at(double t) const;
    void validate(const char* label) const;
};

/// Per-phase LCL filter with a damping resistor in the capacitor branch and a
/// resistive load bank after the grid-side inductor. States per phase:
/// (i1, vc, i2); the measured inverter voltage is the capacitor-node voltage
/// Rd (i1 - i2) + vc.
struct LclParams {
    double l1 = 0.020;     ///< inverter-side inductance, henries
    double c = 42e-6;      ///< filter capacitance, farads
    double l2 = 0.020;     ///< grid-side inductance, henries
    double r_damp = 2.0;   ///< damping resistor in series with c, ohms
    double r1 = 0.5;       ///< series resistance of l1, ohms
    double r2 = 0.5;       ///< series resistance of l2, ohms
    double r_load = 25.0;  ///< load-bank resistance per phase, ohms
    void validate() const;
};

/// 9-state block-diagonal three-phase model of the LCL filter, inputs the
/// three bridge pole voltages, outputs the three capacitor-node voltages.
/// State order: (i1, vc, i2) for phase a, then b, then c.
ContinuousStateSpace lcl_three_phase_plant(const LclParams& p);

/// Output matrix selecting the delivered (grid-side) currents i2 per phase.
Eigen::MatrixXd lcl_current_output(const LclParams& p);

/// Output matrix selecting the bridge-side currents i1 per phase; these set
/// the DC-link current and the dead-time freewheeling direction.
Eigen::MatrixXd lcl_bridge_current_output(const LclParams& p);

/// Everything one closed-loop run needs. `plant` is the resolved continuous
/// model (from LclParams or given explicitly); `c_current` maps plant state
/// to the three delivered currents for logging.
struct Scenario {
    GridSource grid;
    Battery battery;
    double charge_current_a = 10.0;  ///< averaged G2V rectifier current, amperes
    std::optional<LclParams> lcl = LclParams{};  ///< set when the plant came from LCL parameters
    ContinuousStateSpace plant = lcl_three_phase_plant(LclParams{});
    Eigen::MatrixXd c_current = lcl_current_output(LclParams{});  ///< state -> delivered currents
    Eigen::MatrixXd c_bridge = lcl_bridge_current_output(LclParams{});  ///< state -> bridge currents
    SpwmConfig spwm;
    PowerProfile p_load;
    PowerProfile p_source;
    MpcConfig mpc;
    bool mpc_enabled = true;
    double sim_step = 1e-6;   ///< seconds
    double duration = 0.5;    ///< seconds
    std::int64_t seed = 0;    ///< reserved for randomized extensions
    double hysteresis = 0.0;  ///< supervisor band, volts

    void validate() const;
};

/// Instantaneous grid EMFs (v_a, v_b, v_c) at time t.
Eigen::Vector3d grid_voltages(const GridSource& src, double t);

/// Symmetric triangle in [-1, 1], value -1 at t = 0, period 1/carrier_hz.
double triangle_carrier(double t, double carrier_hz);

/// Gate signals ordered (upper_a, lower_a, upper_b, lower_b, upper_c,
/// lower_c). mv is clamped to [-1, 1]; upper on iff mv > carrier, lower
/// complementary, so no pair is ever both on.
std::array<bool, 6> spwm_switch_states(const Eigen::Vector3d& mv, double carrier_value);

/// Pole voltages referenced to the DC-link midpoint: +V_dc/2 with the upper
/// switch on, -V_dc/2 otherwise. A pair with both switches on is a
/// shoot-through and raises ShootThroughError.
Eigen::Vector3d inverter_bridge_voltage(const std::array<bool, 6>& gates, double v_dc);

/// Coulomb counting: soc' = clamp(soc - current dt / (3600 capacity), 0, 1).
/// Current is discharge-positive.
Battery battery_step(const Battery& batt, double current, double dt);

/// One controller-rate sample of the verbose MPC trace.
struct MpcLogEntry {
    std::int64_t k = 0;
    double t = 0.0;
    Eigen::Vector3d reference = Eigen::Vector3d::Zero();
    Eigen::Vector3d y = Eigen::Vector3d::Zero();
    Eigen::Vector3d du = Eigen::Vector3d::Zero();
    Eigen::Vector3d mv = Eigen::Vector3d::Zero();
    double cost = 0.0;
};

/// Fixed-step closed-loop run: the supervisor re-evaluates the mode every
/// T_s; V2G drives the SPWM bridge (MPC or fixed open-loop sinusoid), G2V
/// charges the battery at the configured current with the bridge idle.
/// Deterministic: equal scenarios produce identical series. When mpc_log is
/// non-null every controller update is appended to it.
TimeSeries simulate_scenario(const Scenario& sc, std::vector<MpcLogEntry>* mpc_log = nullptr);

}  // namespace v2g

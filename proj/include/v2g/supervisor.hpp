#pragma once

namespace v2g {

/// Outcome of one supervisory evaluation. c = 1 selects V2G (inverting),
/// c = 0 selects G2V (rectifying/charging).
struct ModeDecision {
    int c = 0;
    double x = 0.0;              ///< net demand P_L - P_S, watts
    double v_dc = 0.0;           ///< battery voltage used for the decision, volts
    double upper_bound = 0.0;    ///< 0.75 V_rated
    double lower_bound = 0.0;    ///< 0.20 V_rated
};

/// Net power demand x = P_L - P_S.
double compute_x(double p_load, double p_source);

/// Logic-table decision: c = 1 iff v_dc >= 0.75 V_rated, in both the x >= 0
/// and x < 0 branches. With hysteresis h > 0 a controller already in V2G
/// stays there until v_dc < 0.75 V_rated - h; entry is unchanged.
ModeDecision decide_mode(double x, double v_dc, double v_rated,
                         double hysteresis = 0.0, int prev_c = 0);

}  // namespace v2g

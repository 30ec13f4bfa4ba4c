#include "v2g/supervisor.hpp"

#include <cmath>
#include <stdexcept>

namespace v2g {

double compute_x(double p_load, double p_source) {
    if (!std::isfinite(p_load) || !std::isfinite(p_source))
        throw std::invalid_argument("supervisor: power values must be finite");
    return p_load - p_source;
}

ModeDecision decide_mode(double x, double v_dc, double v_rated, double hysteresis, int prev_c) {
    if (!(v_rated > 0.0) || !std::isfinite(v_rated))
        throw std::invalid_argument("supervisor: V_rated must be positive");
    if (!(hysteresis >= 0.0) || !std::isfinite(hysteresis))
        throw std::invalid_argument("supervisor: hysteresis must be finite and >= 0");
    if (!std::isfinite(x) || !std::isfinite(v_dc))
        throw std::invalid_argument("supervisor: x and v_dc must be finite");

    ModeDecision d;
    d.x = x;
    d.v_dc = v_dc;
    d.upper_bound = 0.75 * v_rated;
    d.lower_bound = 0.20 * v_rated;

    // The logic table reads the same for x >= 0 and x < 0; the branch is kept
    // explicit so a policy change stays local to this function.
    const bool discharging_allowed = (x >= 0.0) ? (v_dc >= d.upper_bound) : (v_dc >= d.upper_bound);
    if (discharging_allowed) {
        d.c = 1;
    } else if (prev_c == 1 && hysteresis > 0.0 && v_dc >= d.upper_bound - hysteresis) {
        d.c = 1;  // inside the hold band: stay in V2G until the band is left
    } else {
        d.c = 0;
    }
    return d;
}

}  // namespace v2g

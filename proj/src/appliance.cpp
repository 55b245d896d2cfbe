#include "drsim/appliance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace drsim {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double heat_step(double t_prev, double heat_power, double t_ext, double f_coeff, double g_coeff) {
    return t_prev + f_coeff * heat_power + g_coeff * (t_ext - t_prev);
}

UtilityPair light_utility(double power, const LightingSpec& spec, double u_max) {
    if (power <= 0.0) return {0.0, 0.0};
    // 1e-6 W of slack so exact-budget arithmetic cannot land a feasible
    // schedule on the wrong side of the vital breakpoint.
    if (power < spec.p_min - 1e-6)
        throw ScheduleError("lighting power " + std::to_string(power) +
                            " inside (0, p_min): unreachable operating point");
    double comfort;
    if (spec.p_max > spec.p_min)
        comfort = u_max * clamp01((power - spec.p_min) / (spec.p_max - spec.p_min));
    else
        comfort = u_max;  // degenerate range: comfort saturates with vital
    return {u_max, comfort};
}

UtilityPair heat_utility(double temp, const HomeSpec& home, double u_max) {
    const double floor = home.heat_vital_floor;
    const double vital = u_max * clamp01((temp - floor) / (home.t_min - floor));
    const double comfort = u_max * clamp01((temp - home.t_min) / (home.t_pref - home.t_min));
    return {vital, comfort};
}

UtilityPair wash_utility(std::optional<int> wash_start, const WashingSpec& spec, int horizon,
                         double u_max) {
    if (!wash_start) return {0.0, 0.0};
    const int s = *wash_start;
    const int s_latest = spec.latest_start();
    if (s < spec.earliest_start || s > s_latest)
        throw ScheduleError("washing start slot " + std::to_string(s + 1) + " outside window");
    const double weight = u_max * horizon;
    double comfort = weight;
    if (s_latest > spec.earliest_start)
        comfort = weight * static_cast<double>(s_latest - s) / (s_latest - spec.earliest_start);
    return {weight, comfort};
}

EvaluatedHome evaluate_home(const HomeSchedule& schedule, const HomeSpec& home,
                            std::span<const double> exterior_temp, double u_max) {
    const int horizon = static_cast<int>(exterior_temp.size());
    EvaluatedHome out;
    out.temperature.resize(horizon);

    auto check_bounds = [&](double p, double p_min, double p_max, const char* name, int t) {
        if (p == 0.0) return;
        if (p < p_min - 1e-9 || p > p_max + 1e-9)
            throw ScheduleError(std::string(name) + " power " + std::to_string(p) +
                                " outside [p_min, p_max] at slot " + std::to_string(t + 1));
    };

    UtilityPair total;
    double temp = home.t_init;
    for (int t = 0; t < horizon; ++t) {
        double light = schedule.light_power.empty() ? 0.0 : schedule.light_power[t];
        double heat = schedule.heat_power.empty() ? 0.0 : schedule.heat_power[t];
        if (light != 0.0) {
            if (!home.lighting) throw ScheduleError("lighting power on a home without lighting");
            check_bounds(light, home.lighting->p_min, home.lighting->p_max, "lighting", t);
        }
        if (heat != 0.0) {
            if (!home.heating) throw ScheduleError("heating power on a home without heating");
            check_bounds(heat, home.heating->p_min, home.heating->p_max, "heating", t);
        }
        const double f = home.heating ? home.heating->f_coeff : 0.0;
        const double g = home.heating ? home.heating->g_coeff : 0.0;
        temp = heat_step(temp, heat, exterior_temp[t], f, g);
        out.temperature[t] = temp;

        if (home.lighting) total += light_utility(light, *home.lighting, u_max);
        if (home.heating) total += heat_utility(temp, home, u_max);
    }
    if (schedule.wash_start) {
        if (!home.washing) throw ScheduleError("washing run on a home without a washing machine");
        if (*schedule.wash_start + home.washing->duration - 1 >= horizon)
            throw ScheduleError("washing run exceeds horizon");
    }
    if (home.washing) total += wash_utility(schedule.wash_start, *home.washing, horizon, u_max);
    out.utility = total;
    return out;
}

}  // namespace drsim

#pragma once

#include <span>
#include <vector>

#include "drsim/model.hpp"

namespace drsim {

// One step of the indoor temperature recurrence:
// T' = T + f_coeff * heat_power + g_coeff * (t_ext - T).
// The dynamics are never clamped; only the utilities saturate.
double heat_step(double t_prev, double heat_power, double t_ext, double f_coeff, double g_coeff);

// Lighting: vital saturates at p_min, comfort grows linearly on [p_min, p_max].
// power must be 0 or within [p_min, p_max]; anything strictly inside (0, p_min)
// is an unreachable operating point.
UtilityPair light_utility(double power, const LightingSpec& spec, double u_max);

// Heating: vital grows linearly from heat_vital_floor to t_min, comfort from
// t_min to t_pref; both flat beyond their targets.
UtilityPair heat_utility(double temp, const HomeSpec& home, double u_max);

// Washing: vital is granted in full once a run is scheduled; comfort decreases
// linearly from full at the earliest start to zero at the latest feasible
// start. Both carry weight u_max * horizon so the class contributes on the
// same scale as the per-slot appliances.
UtilityPair wash_utility(std::optional<int> wash_start, const WashingSpec& spec, int horizon,
                         double u_max);

struct EvaluatedHome {
    UtilityPair utility;
    std::vector<double> temperature;  // degC after each slot
};

// Raised when a schedule violates its power-bound invariants; the message
// names the offending appliance and slot.
class ScheduleError : public std::runtime_error {
  public:
    explicit ScheduleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Recompute the temperature trajectory from home.t_init and accumulate the
// utility of a complete schedule. Pure function of its inputs.
EvaluatedHome evaluate_home(const HomeSchedule& schedule, const HomeSpec& home,
                            std::span<const double> exterior_temp, double u_max);

}  // namespace drsim

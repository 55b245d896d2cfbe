#pragma once

#include <array>
#include <span>

#include "drsim/appliance.hpp"
#include "drsim/model.hpp"

namespace drsim {

struct SolverOptions {
    double temp_grid = 0.25;     // degC, dynamic-program discretization
    double temp_ceiling = 40.0;  // top of the tracked temperature band
};

// Per-slot best utility-per-watt improvement hints, with the per-appliance
// breakdown that produced them. Deliberately not a reliable gradient: the
// advertised gain holds only for the specific (undisclosed) increment.
struct Greedients {
    std::vector<double> per_slot;                      // g_ht
    std::array<std::vector<double>, 3> per_appliance;  // indexed by ApplianceClass

    bool all_zero() const {
        for (double g : per_slot)
            if (g != 0.0) return false;
        return true;
    }
};

struct HomeSolution {
    HomeSchedule schedule;
    UtilityPair utility;           // exact evaluation of the schedule
    std::vector<double> residual;  // caps[t] - total draw, always >= 0
    Greedients greedients;         // empty until greedient_home fills it
};

class InstanceTooLarge : public std::runtime_error {
  public:
    explicit InstanceTooLarge(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact lexicographic schedule for one home under per-slot capacity limits.
// Washing starts are tracked in a state machine and the temperature runs over
// a discretized grid (floor-quantized, so reported utility never exceeds what
// the schedule truly achieves... the returned utility is re-evaluated exactly).
// Deterministic: ties go to the earlier washing start, then lower powers.
HomeSolution solve_home(const HomeSpec& home, std::span<const double> caps,
                        std::span<const double> exterior_temp, double u_max,
                        const SolverOptions& options = {});

// Exhaustive enumeration over grid-quantized appliance powers; the
// independent oracle for solve_home. Power candidates per appliance are
// {0} and {p_min + k * power_grid} up to p_max. Throws InstanceTooLarge
// beyond 8 slots or ~1e8 combinations.
HomeSolution brute_force_home(const HomeSpec& home, std::span<const double> caps,
                              std::span<const double> exterior_temp, double u_max,
                              double power_grid);

// Best advertised utility/capacity ratio per slot, maximized over breakpoint
// increments per appliance. An appliance may also consume the home's existing
// residual capacity (including at other slots, which is what lets a washing
// run ever be funded). vital_weight scalarizes a (vital, comfort) gain as
// vital_weight * dv + dc.
Greedients greedient_home(const HomeSolution& solution, const HomeSpec& home,
                          std::span<const double> caps, std::span<const double> exterior_temp,
                          double u_max, double vital_weight);

// Utility when the home is capped only by its subscribed power.
UtilityPair max_utility_baseline(const HomeSpec& home, std::span<const double> exterior_temp,
                                 double u_max, const SolverOptions& options = {});

}  // namespace drsim

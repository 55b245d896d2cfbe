#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace drsim {

// Dimensionless (vital, comfort) utility. Ordered lexicographically:
// any vital gain dominates any comfort gain. Values are always finite
// and non-negative; comparisons are exact (no tolerance).
struct UtilityPair {
    double vital = 0.0;
    double comfort = 0.0;

    UtilityPair& operator+=(const UtilityPair& o) {
        vital += o.vital;
        comfort += o.comfort;
        return *this;
    }
    friend UtilityPair operator+(UtilityPair a, const UtilityPair& b) { return a += b; }
    friend bool operator==(const UtilityPair& a, const UtilityPair& b) {
        return a.vital == b.vital && a.comfort == b.comfort;
    }
};

// Lexicographic total order: vital first, comfort breaks ties.
std::strong_ordering utility_cmp(const UtilityPair& a, const UtilityPair& b);

inline bool lex_less(const UtilityPair& a, const UtilityPair& b) {
    return utility_cmp(a, b) == std::strong_ordering::less;
}
inline bool lex_greater(const UtilityPair& a, const UtilityPair& b) {
    return utility_cmp(a, b) == std::strong_ordering::greater;
}

struct LightingSpec {
    double p_min = 0.0;  // watts; vital saturates here
    double p_max = 0.0;  // watts; comfort saturates here
};

struct HeatingSpec {
    double p_min = 0.0;
    double p_max = 0.0;
    double f_coeff = 0.0;  // degC per watt per slot
    double g_coeff = 0.0;  // leakage toward exterior, per slot
};

struct WashingSpec {
    double power = 0.0;      // fixed draw while running (p_min == p_max)
    int duration = 0;        // slots, uninterruptible
    int earliest_start = 0;  // 0-based slot
    int deadline = 0;        // 0-based slot of last slot the run may occupy

    // Last feasible start slot.
    int latest_start() const { return deadline - duration + 1; }
};

struct HomeSpec {
    int id = 0;
    int class_label = 1;  // 1-based index of the config block this home came from
    std::optional<LightingSpec> lighting;
    std::optional<HeatingSpec> heating;
    std::optional<WashingSpec> washing;
    double t_min = 15.0;   // degC, vital temperature target
    double t_pref = 22.0;  // degC, comfort temperature target
    double t_init = 22.0;  // degC at the start of the period
    double t_max = 22.0;   // degC, carried but not enforced
    double heat_vital_floor = 0.0;  // degC anchor where heating vital reaches zero

    // Contractual power limit; sufficient for maximal utility.
    double subscribed_power() const {
        double s = 0.0;
        if (lighting) s += lighting->p_max;
        if (heating) s += heating->p_max;
        if (washing) s += washing->power;
        return s;
    }
};

struct Scenario {
    std::vector<HomeSpec> homes;
    int horizon = 0;  // slots in the response period
    double slot_minutes = 5.0;
    std::vector<double> exterior_temp;  // degC, one per slot
    std::vector<double> capacity;       // watts, one per slot
    double max_utility_per_slot = 1.0;

    int home_count() const { return static_cast<int>(homes.size()); }
    double total_subscribed() const {
        double s = 0.0;
        for (const auto& h : homes) s += h.subscribed_power();
        return s;
    }
};

// Per-home per-slot power limits proposed by the aggregator.
struct CapacityPlan {
    std::vector<std::vector<double>> limits;  // [home][slot]

    double column_sum(int slot) const {
        double s = 0.0;
        for (const auto& row : limits) s += row[slot];
        return s;
    }
};

// Whether the plan exhausts capacity exactly (sum == C(t) within tol) with
// non-negative entries.
bool plan_feasible(const CapacityPlan& plan, const Scenario& scenario, double tol = 1e-6);

enum class ApplianceClass { lighting = 0, heating = 1, washing = 2 };

// One home's committed schedule over the period.
struct HomeSchedule {
    std::vector<double> light_power;  // watts per slot (0 when off)
    std::vector<double> heat_power;
    std::optional<int> wash_start;  // 0-based slot, or none
    double wash_power = 0.0;        // fixed draw while the run is active
    int wash_duration = 0;

    std::vector<double> temperature;  // filled by evaluation
    UtilityPair utility;              // filled by evaluation

    bool wash_active(int slot) const {
        return wash_start && slot >= *wash_start && slot < *wash_start + wash_duration;
    }
    double power(ApplianceClass a, int slot) const {
        switch (a) {
            case ApplianceClass::lighting: return light_power[slot];
            case ApplianceClass::heating: return heat_power[slot];
            case ApplianceClass::washing: return wash_active(slot) ? wash_power : 0.0;
        }
        return 0.0;
    }
    bool active(ApplianceClass a, int slot) const { return power(a, slot) > 0.0; }
    double total_power(int slot) const {
        return light_power[slot] + heat_power[slot] + (wash_active(slot) ? wash_power : 0.0);
    }
};

// Raised on malformed or semantically invalid scenario documents.
class ScenarioError : public std::runtime_error {
  public:
    explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parse a scenario document (JSON). Field names are documented in the
// repository README; slots in the document are 1-based, internal slots
// 0-based. Throws ScenarioError with a position for syntax problems and
// with the violated rule for semantic ones.
Scenario parse_scenario(const std::string& text);

// Serialize back to the document format accepted by parse_scenario.
std::string render_scenario(const Scenario& scenario);

}  // namespace drsim

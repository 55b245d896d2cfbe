#pragma once

#include <cstdint>
#include <string>

#include "drsim/aggregator.hpp"

namespace drsim {

enum class Scheme { gm, lm, sg1, sg2 };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct ClassRelative {
    int class_label = 0;
    double rel_vital = 0.0;
    double rel_comfort = 0.0;
};

// Per-home utilities aggregated by class and normalized by the class's
// maximal feasible utility (every home capped only by its subscribed power).
// Throws std::domain_error when a class baseline component is zero.
std::vector<ClassRelative> relative_utility(const std::vector<UtilityPair>& per_home,
                                            const Scenario& scenario,
                                            const SolverOptions& options = {});

struct SweepRow {
    double capacity = 0.0;
    Scheme scheme = Scheme::lm;
    int class_label = 0;
    double rel_vital = 0.0;
    double rel_comfort = 0.0;
    int iters_to_best = 0;
    double wall_s = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // sorted by (scheme, capacity, class)
};

// Everything the experiment suite wants to know about one (scheme, capacity)
// run beyond the CSV columns.
struct RunDetail {
    Scheme scheme = Scheme::lm;
    double capacity = 0.0;
    UtilityPair total;
    std::vector<ClassRelative> per_class;
    int iters_to_best = 0;
    double wall_s = 0.0;
    SgTrace trace;  // empty for gm/lm
    int homes_washing = 0;
    int homes_heating = 0;
    double feas_pre_renorm_err = 0.0;  // worst over the run's iterates
    double feas_sum_err = 0.0;
    double feas_min_coord = 0.0;
};

struct SweepRequest {
    std::vector<Scheme> schemes;
    std::vector<double> capacities;  // constant per-slot capacity per point
    SgConfig config;
    double gm_power_grid = 50.0;
};

struct SweepOutcome {
    SweepResult result;
    std::vector<RunDetail> runs;
};

// Run every (scheme, capacity) combination on the scenario with its capacity
// series replaced by the point's constant value. Writes the CSV when a path
// is given. Deterministic up to the wall_s column.
SweepOutcome run_sweep(const Scenario& scenario, const SweepRequest& request,
                       const std::string& csv_path = "");

// CSV header: capacity,scheme,class,rel_vital,rel_comfort,iters_to_best,wall_s
// Values carry 6 significant digits.
std::string to_csv(const SweepResult& result);
SweepResult parse_sweep_csv(const std::string& text);

std::string trace_to_csv(const SgTrace& trace);
void export_trace(const SgTrace& trace, const std::string& path);

// 20 log-spaced capacities over [1e4, 2e5] scaled by H/100.
std::vector<double> default_capacity_grid(const Scenario& scenario);

// Randomized tiny scenario (H <= 2, horizon <= 3, grid-friendly parameter
// ranges) for cross-scheme oracle comparisons.
Scenario random_tiny_scenario(uint64_t seed);

struct OracleCheckReport {
    int instances = 0;
    int violations = 0;
    double max_vital_gap = 0.0;  // worst brute_vital - solve_vital observed
    double bound_vital = 0.0;    // documented discretization bound of the last instance
    std::string first_violation;
};

// Compare solve_home against the exhaustive oracle on randomized shrunken
// homes (horizon <= 4, 50 W-friendly ranges). A violation is a solver result
// below the oracle by more than the discretization bound
// horizon * u_max * temp_grid / t_min (vital; the comfort analog uses
// t_pref - t_min), or an infeasible schedule.
OracleCheckReport oracle_check(int instances, double temp_grid, double power_grid, uint64_t seed);

}  // namespace drsim

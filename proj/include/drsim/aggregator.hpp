#pragma once

#include <memory>
#include <optional>

#include "drsim/home_solver.hpp"
#include "drsim/model.hpp"

namespace drsim {

enum class StepRule {
    diminishing,      // alpha_k = a1 / sqrt(k)
    constant_length,  // alpha_k = a2 / ||g||_2
};

struct SgConfig {
    int k_max = 100;
    StepRule step_rule = StepRule::diminishing;
    double a1 = 1.2e6;
    double a2 = 6000.0;
    // Scalarization of a (vital, comfort) gain inside the feedback channel:
    // gain = vital_weight * dv + dc. Solution ordering stays lexicographic.
    double vital_weight = 1000.0;
    SolverOptions solver;
    int threads = 0;            // 0 = hardware concurrency
    bool record_plans = false;  // retain per-iteration plans and capped updates
};

struct SgIteration {
    int k = 0;
    double alpha = 0.0;
    UtilityPair total;
    std::vector<UtilityPair> per_home;
    bool is_best = false;
    // Feasibility bookkeeping of the plan this iteration evaluated.
    double sum_err = 0.0;         // max_t |sum_h C_ht - C(t)| as evaluated
    double pre_renorm_err = 0.0;  // max_t |sum - C(t)| before renormalization
    double min_coord = 0.0;       // min_{h,t} C_ht
    CapacityPlan plan;                      // populated when record_plans
    std::vector<std::vector<double>> beta;  // capped updates toward the next plan
};

struct SgTrace {
    std::vector<SgIteration> iterations;
    int best_iteration = 0;  // index of the last lexicographic improvement
};

struct SgResult {
    CapacityPlan best_plan;
    std::vector<HomeSolution> best_solutions;
    UtilityPair best_total;
    SgTrace trace;
};

// Memoizes solve_home + greedient results by (home parameters, caps row).
// Safe to share across runs with identical solver options and weights.
class SolveCache {
  public:
    SolveCache();
    ~SolveCache();
    SolveCache(const SolveCache&) = delete;
    SolveCache& operator=(const SolveCache&) = delete;

    std::shared_ptr<const HomeSolution> find(const HomeSpec& home, std::span<const double> caps,
                                             double u_max) const;
    void insert(const HomeSpec& home, std::span<const double> caps, double u_max,
                std::shared_ptr<const HomeSolution> solution);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Static proportional split: C_ht = L(h) / sum L * C(t).
CapacityPlan lm_allocate(const Scenario& scenario);

// Cyclic fill: at each slot grant homes their subscribed power until the
// capacity runs out, rotating the starting home by the number served. Any
// surplus beyond total subscribed power is spread uniformly so columns sum
// to C(t) exactly.
CapacityPlan round_robin_init(const Scenario& scenario);

// Step size for iteration k (1-based). Returns nullopt when the
// constant-length rule meets an all-zero greedient vector (converged;
// avoids the division).
std::optional<double> step_size(StepRule rule, int k, std::span<const double> flat_greedients,
                                double a1, double a2);

// beta_kht = min(alpha_k * g_ht, L_m, C(t)) with L_m the smallest subscribed
// power over the scenario's homes.
std::vector<std::vector<double>> cap_updates(double alpha,
                                             const std::vector<std::vector<double>>& greedients,
                                             const Scenario& scenario);

// One slot of the feasibility projection: add the capped updates, then remove
// a common lambda (protecting homes that would go negative) so the column sums
// to the budget again. Exact breakpoint scan; the residual fp error is folded
// into the largest coordinate. pre_renorm_err, when given, receives the
// pre-correction |sum - budget|.
std::vector<double> project_allocation(const std::vector<double>& current,
                                       const std::vector<double>& beta, double budget,
                                       double* pre_renorm_err = nullptr);

// The feedback loop: round-robin bootstrap, per-home solves, greedient
// feedback, capped updates, projection; keeps the lexicographic best plan
// over all iterations. Stops at k_max or when every greedient is zero.
SgResult sg_run(const Scenario& scenario, const SgConfig& config, SolveCache* cache = nullptr);

struct GmResult {
    CapacityPlan plan;  // per-home usage of the joint optimum
    std::vector<HomeSchedule> schedules;
    UtilityPair total;
};

// Exact joint optimum by exhaustive search over grid-quantized schedules with
// the shared capacity constraint; lighting is refined to the exact per-slot
// split. Only for tiny instances (H <= 3, horizon <= 4); used as the test
// oracle and for demo runs.
GmResult gm_solve_tiny(const Scenario& scenario, double power_grid);

// One restricted adjustment over >= 2 homes, using the subset's summed
// allocation as its capacity budget. Homes outside the subset are untouched,
// so global feasibility is preserved.
CapacityPlan async_reallocate(const Scenario& scenario, const std::vector<int>& subset,
                              const CapacityPlan& current, const SgConfig& config,
                              SolveCache* cache = nullptr);

}  // namespace drsim

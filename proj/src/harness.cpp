#include "drsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace drsim {

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::gm: return "gm";
        case Scheme::lm: return "lm";
        case Scheme::sg1: return "sg1";
        case Scheme::sg2: return "sg2";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "gm") return Scheme::gm;
    if (name == "lm") return Scheme::lm;
    if (name == "sg1") return Scheme::sg1;
    if (name == "sg2") return Scheme::sg2;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected gm|lm|sg1|sg2)");
}

std::vector<ClassRelative> relative_utility(const std::vector<UtilityPair>& per_home,
                                            const Scenario& scenario,
                                            const SolverOptions& options) {
    if (per_home.size() != scenario.homes.size())
        throw std::invalid_argument("relative_utility: one utility per home required");

    std::map<int, UtilityPair> totals, baselines;
    std::map<std::vector<double>, UtilityPair> baseline_cache;
    for (size_t h = 0; h < scenario.homes.size(); ++h) {
        const HomeSpec& home = scenario.homes[h];
        totals[home.class_label] += per_home[h];
        std::vector<double> sig{home.t_min, home.t_pref, home.t_init, home.heat_vital_floor};
        if (home.lighting) sig.insert(sig.end(), {1.0, home.lighting->p_min, home.lighting->p_max});
        if (home.heating)
            sig.insert(sig.end(), {2.0, home.heating->p_min, home.heating->p_max,
                                   home.heating->f_coeff, home.heating->g_coeff});
        if (home.washing)
            sig.insert(sig.end(),
                       {3.0, home.washing->power, static_cast<double>(home.washing->duration),
                        static_cast<double>(home.washing->earliest_start),
                        static_cast<double>(home.washing->deadline)});
        auto it = baseline_cache.find(sig);
        if (it == baseline_cache.end())
            it = baseline_cache
                     .emplace(sig, max_utility_baseline(home, scenario.exterior_temp,
                                                        scenario.max_utility_per_slot, options))
                     .first;
        baselines[home.class_label] += it->second;
    }

    std::vector<ClassRelative> out;
    for (const auto& [label, total] : totals) {
        const UtilityPair& base = baselines[label];
        if (base.vital <= 0.0 || base.comfort <= 0.0)
            throw std::domain_error("relative_utility: zero baseline for class " +
                                    std::to_string(label));
        out.push_back({label, total.vital / base.vital, total.comfort / base.comfort});
    }
    return out;
}

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int scheme_rank(Scheme s) { return static_cast<int>(s); }

}  // namespace

std::string to_csv(const SweepResult& result) {
    std::string out = "capacity,scheme,class,rel_vital,rel_comfort,iters_to_best,wall_s\n";
    for (const auto& r : result.rows) {
        out += fmt6(r.capacity);
        out += ',';
        out += scheme_name(r.scheme);
        out += ',';
        out += std::to_string(r.class_label);
        out += ',';
        out += fmt6(r.rel_vital);
        out += ',';
        out += fmt6(r.rel_comfort);
        out += ',';
        out += std::to_string(r.iters_to_best);
        out += ',';
        out += fmt6(r.wall_s);
        out += '\n';
    }
    return out;
}

SweepResult parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "capacity,scheme,class,rel_vital,rel_comfort,iters_to_best,wall_s")
        throw std::invalid_argument("sweep csv: bad header");
    SweepResult result;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        SweepRow row;
        std::getline(ls, field, ',');
        row.capacity = std::stod(field);
        std::getline(ls, field, ',');
        row.scheme = scheme_from_name(field);
        std::getline(ls, field, ',');
        row.class_label = std::stoi(field);
        std::getline(ls, field, ',');
        row.rel_vital = std::stod(field);
        std::getline(ls, field, ',');
        row.rel_comfort = std::stod(field);
        std::getline(ls, field, ',');
        row.iters_to_best = std::stoi(field);
        std::getline(ls, field, ',');
        row.wall_s = std::stod(field);
        result.rows.push_back(row);
    }
    return result;
}

std::string trace_to_csv(const SgTrace& trace) {
    std::string out = "k,alpha,total_vital,total_comfort,best\n";
    for (const auto& it : trace.iterations) {
        out += std::to_string(it.k);
        out += ',';
        out += fmt6(it.alpha);
        out += ',';
        out += fmt6(it.total.vital);
        out += ',';
        out += fmt6(it.total.comfort);
        out += ',';
        out += it.is_best ? '1' : '0';
        out += '\n';
    }
    return out;
}

void export_trace(const SgTrace& trace, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open trace file: " + path);
    f << trace_to_csv(trace);
    if (!f) throw std::runtime_error("failed writing trace file: " + path);
}

std::vector<double> default_capacity_grid(const Scenario& scenario) {
    const double scale = scenario.home_count() / 100.0;
    const double lo = 1e4 * scale;
    const double hi = 2e5 * scale;
    std::vector<double> out;
    for (int k = 0; k < 20; ++k) out.push_back(lo * std::pow(hi / lo, k / 19.0));
    return out;
}

SweepOutcome run_sweep(const Scenario& scenario, const SweepRequest& request,
                       const std::string& csv_path) {
    SweepOutcome outcome;
    for (Scheme scheme : request.schemes) {
        for (double capacity : request.capacities) {
            Scenario point = scenario;
            point.capacity.assign(scenario.horizon, capacity);

            const auto t0 = std::chrono::steady_clock::now();
            RunDetail detail;
            detail.scheme = scheme;
            detail.capacity = capacity;
            SolveCache cache;

            std::vector<UtilityPair> per_home(point.homes.size());
            if (scheme == Scheme::lm || scheme == Scheme::gm) {
                if (scheme == Scheme::gm) {
                    GmResult gm = gm_solve_tiny(point, request.gm_power_grid);
                    detail.total = gm.total;
                    for (size_t h = 0; h < gm.schedules.size(); ++h) {
                        per_home[h] = gm.schedules[h].utility;
                        if (gm.schedules[h].wash_start) ++detail.homes_washing;
                        for (double p : gm.schedules[h].heat_power)
                            if (p > 0.0) {
                                ++detail.homes_heating;
                                break;
                            }
                    }
                    detail.feas_min_coord = 0.0;
                } else {
                    CapacityPlan plan = lm_allocate(point);
                    double min_coord = std::numeric_limits<double>::infinity();
                    double sum_err = 0.0;
                    for (int t = 0; t < point.horizon; ++t)
                        sum_err = std::max(sum_err,
                                           std::abs(plan.column_sum(t) - point.capacity[t]));
                    for (const auto& row : plan.limits)
                        for (double v : row) min_coord = std::min(min_coord, v);
                    detail.feas_sum_err = sum_err;
                    detail.feas_min_coord = min_coord;
                    for (size_t h = 0; h < point.homes.size(); ++h) {
                        auto sol = cache.find(point.homes[h], plan.limits[h],
                                              point.max_utility_per_slot);
                        if (!sol) {
                            auto fresh = std::make_shared<HomeSolution>(
                                solve_home(point.homes[h], plan.limits[h], point.exterior_temp,
                                           point.max_utility_per_slot, request.config.solver));
                            cache.insert(point.homes[h], plan.limits[h],
                                         point.max_utility_per_slot, fresh);
                            sol = fresh;
                        }
                        per_home[h] = sol->utility;
                        detail.total += sol->utility;
                        if (sol->schedule.wash_start) ++detail.homes_washing;
                        for (double p : sol->schedule.heat_power)
                            if (p > 0.0) {
                                ++detail.homes_heating;
                                break;
                            }
                    }
                }
            } else {
                SgConfig config = request.config;
                config.step_rule =
                    scheme == Scheme::sg1 ? StepRule::diminishing : StepRule::constant_length;
                SgResult sg = sg_run(point, config, &cache);
                detail.total = sg.best_total;
                detail.iters_to_best = sg.trace.best_iteration;
                detail.trace = std::move(sg.trace);
                detail.feas_min_coord = std::numeric_limits<double>::infinity();
                for (const auto& it : detail.trace.iterations) {
                    detail.feas_pre_renorm_err = std::max(detail.feas_pre_renorm_err, it.pre_renorm_err);
                    detail.feas_sum_err = std::max(detail.feas_sum_err, it.sum_err);
                    detail.feas_min_coord = std::min(detail.feas_min_coord, it.min_coord);
                }
                for (size_t h = 0; h < sg.best_solutions.size(); ++h) {
                    per_home[h] = sg.best_solutions[h].utility;
                    if (sg.best_solutions[h].schedule.wash_start) ++detail.homes_washing;
                    for (double p : sg.best_solutions[h].schedule.heat_power)
                        if (p > 0.0) {
                            ++detail.homes_heating;
                            break;
                        }
                }
            }

            detail.per_class = relative_utility(per_home, point, request.config.solver);
            detail.wall_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            outcome.runs.push_back(std::move(detail));
        }
    }

    for (const auto& run : outcome.runs) {
        for (const auto& cls : run.per_class) {
            SweepRow row;
            row.capacity = run.capacity;
            row.scheme = run.scheme;
            row.class_label = cls.class_label;
            row.rel_vital = cls.rel_vital;
            row.rel_comfort = cls.rel_comfort;
            row.iters_to_best = run.iters_to_best;
            row.wall_s = run.wall_s;
            outcome.result.rows.push_back(row);
        }
    }
    std::stable_sort(outcome.result.rows.begin(), outcome.result.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) {
                         if (scheme_rank(a.scheme) != scheme_rank(b.scheme))
                             return scheme_rank(a.scheme) < scheme_rank(b.scheme);
                         if (a.capacity != b.capacity) return a.capacity < b.capacity;
                         return a.class_label < b.class_label;
                     });

    if (!csv_path.empty()) {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + csv_path);
        f << to_csv(outcome.result);
        if (!f) throw std::runtime_error("failed writing output file: " + csv_path);
    }
    return outcome;
}

namespace {

// Deterministic generator (splitmix64) so frozen seeds reproduce instances
// across standard libraries.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    int pick(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (next() >> 11) * 0x1.0p-53;
    }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
};

HomeSpec random_shrunken_home(Rng& rng, int horizon) {
    HomeSpec home;
    home.t_min = 15.0;
    home.t_pref = 22.0;
    home.t_max = 30.0;
    home.t_init = std::vector<double>{10.0, 18.0, 22.0}[rng.pick(3)];
    home.heat_vital_floor = 0.0;
    while (!home.lighting && !home.heating && !home.washing) {
        if (rng.chance(0.8)) {
            const double p_min = 50.0 * (1 + rng.pick(3));
            home.lighting = LightingSpec{p_min, p_min + 50.0 * rng.pick(5)};
        }
        if (rng.chance(0.7)) {
            const double p_min = 100.0 * (1 + rng.pick(3));
            home.heating = HeatingSpec{p_min, p_min + 50.0 * rng.pick(5),
                                       std::vector<double>{0.001, 0.002, 0.004}[rng.pick(3)],
                                       std::vector<double>{0.05, 0.1, 0.2}[rng.pick(3)]};
        }
        if (rng.chance(0.6)) {
            WashingSpec w;
            w.power = std::vector<double>{100.0, 200.0, 400.0}[rng.pick(3)];
            w.duration = 1 + rng.pick(2);
            w.earliest_start = rng.pick(2);
            w.deadline = std::min(horizon - 1, w.earliest_start + w.duration - 1 + rng.pick(3));
            if (w.earliest_start + w.duration - 1 <= w.deadline) home.washing = w;
        }
    }
    return home;
}

}  // namespace

Scenario random_tiny_scenario(uint64_t seed) {
    Rng rng(seed);
    Scenario s;
    s.horizon = 2 + rng.pick(2);
    s.slot_minutes = 5.0;
    s.exterior_temp.assign(s.horizon, rng.chance(0.5) ? 5.0 : 10.0);
    const int n = 1 + rng.pick(2);
    for (int h = 0; h < n; ++h) {
        HomeSpec home = random_shrunken_home(rng, s.horizon);
        home.id = h;
        home.class_label = h + 1;
        // keep the joint enumeration small: trim wide heating ladders
        if (home.heating && home.heating->p_max - home.heating->p_min > 150.0)
            home.heating->p_max = home.heating->p_min + 150.0;
        s.homes.push_back(std::move(home));
    }
    const double total = s.total_subscribed();
    s.capacity.resize(s.horizon);
    for (int t = 0; t < s.horizon; ++t) {
        double c = rng.uniform(0.0, 1.2 * total);
        if (rng.chance(0.5)) c = 50.0 * std::floor(c / 50.0);  // grid-aligned half the time
        s.capacity[t] = c;
    }
    return s;
}

OracleCheckReport oracle_check(int instances, double temp_grid, double power_grid, uint64_t seed) {
    Rng rng(seed);
    OracleCheckReport report;
    SolverOptions options;
    options.temp_grid = temp_grid;
    for (int i = 0; i < instances; ++i) {
        const int horizon = 3 + rng.pick(2);
        HomeSpec home = random_shrunken_home(rng, horizon);
        std::vector<double> te(horizon, rng.chance(0.5) ? 5.0 : 10.0);
        std::vector<double> caps(horizon);
        const double scale = home.subscribed_power();
        for (int t = 0; t < horizon; ++t) {
            double c = rng.uniform(0.0, 1.1 * scale);
            if (rng.chance(0.5)) c = 50.0 * std::floor(c / 50.0);
            caps[t] = c;
        }

        const double u_max = 1.0;
        HomeSolution fast = solve_home(home, caps, te, u_max, options);
        HomeSolution exact = brute_force_home(home, caps, te, u_max, power_grid);

        const double bound_vital = horizon * u_max * temp_grid / home.t_min;
        const double bound_comfort = horizon * u_max * temp_grid / (home.t_pref - home.t_min);
        report.bound_vital = bound_vital;
        ++report.instances;

        std::string problem;
        for (int t = 0; t < horizon && problem.empty(); ++t) {
            if (fast.schedule.total_power(t) > caps[t] + 1e-9) problem = "schedule exceeds caps";
            if (fast.residual[t] < -1e-9) problem = "negative residual";
        }
        const double gap = exact.utility.vital - fast.utility.vital;
        report.max_vital_gap = std::max(report.max_vital_gap, gap);
        if (problem.empty() && gap > bound_vital + 1e-9) problem = "vital below oracle bound";
        if (problem.empty() && fast.utility.vital <= exact.utility.vital + 1e-12 &&
            exact.utility.comfort - fast.utility.comfort > bound_comfort + 1e-9)
            problem = "comfort below oracle bound";
        if (!problem.empty()) {
            ++report.violations;
            if (report.first_violation.empty())
                report.first_violation = "instance " + std::to_string(i) + ": " + problem;
        }
    }
    return report;
}

}  // namespace drsim

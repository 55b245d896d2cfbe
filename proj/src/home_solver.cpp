#include "drsim/home_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace drsim {

namespace {

constexpr int16_t kNoWash = std::numeric_limits<int16_t>::max();

// Largest admissible lighting draw for a leftover budget, 0 if even the
// minimum cannot be met. The 1e-9 slack absorbs rounding from capacity
// arithmetic without ever exceeding the budget.
double best_light(const std::optional<LightingSpec>& ls, double remainder) {
    if (!ls) return 0.0;
    if (remainder >= ls->p_min) return std::min(remainder, ls->p_max);
    if (remainder >= ls->p_min - 1e-9) return remainder;
    return 0.0;
}

struct TempGrid {
    double lo = 0.0;
    double step = 0.25;
    int n = 1;

    int index(double t) const {
        if (n == 1) return 0;
        int i = static_cast<int>(std::floor((t - lo) / step));
        return std::clamp(i, 0, n - 1);
    }
    double value(int i) const { return lo + step * i; }
};

// Heat power candidates from quantized temperature t_q under budget `avail`:
// off, the power bounds, budget leftovers that preserve the lighting
// breakpoints, and the powers that land the temperature on the utility
// targets or the next grid line.
int heat_candidates(const HomeSpec& home, double avail, double t_q, double te,
                    const TempGrid& grid, double* out) {
    out[0] = 0.0;
    int n = 1;
    if (!home.heating) return n;
    const HeatingSpec& hs = *home.heating;
    const double p_hi = std::min(hs.p_max, avail);
    if (p_hi < hs.p_min) return n;

    auto push = [&](double p) {
        if (p >= hs.p_min && p <= p_hi) out[n++] = p;
    };
    push(hs.p_min);
    push(p_hi);
    if (home.lighting) {
        push(avail - home.lighting->p_min);
        push(avail - home.lighting->p_max);
    }
    if (hs.f_coeff > 0.0) {
        const double t_decay = t_q + hs.g_coeff * (te - t_q);
        auto push_target = [&](double target) {
            if (target > t_decay) push((target - t_decay) / hs.f_coeff);
        };
        push_target(home.t_min);
        push_target(home.t_pref);
        push_target(grid.lo + grid.step * (std::floor((t_decay - grid.lo) / grid.step) + 1.0));
        push_target(grid.value(grid.n - 1));
    }
    std::sort(out, out + n);
    n = static_cast<int>(std::unique(out, out + n) - out);
    return n;
}

struct Cell {
    double vital = -1.0;  // negative marks unreachable
    double comfort = 0.0;
    double heat = 0.0;  // heat power chosen on the slot leading here
    int16_t wash_start = kNoWash;
    int16_t prev_temp = 0;
    int8_t prev_wash = 0;

    bool reachable() const { return vital >= 0.0; }
};

// true when (v, c, ws) is strictly better than the cell under the
// deterministic order: lexicographic utility, then earlier washing start.
bool improves(const Cell& cell, double v, double c, int16_t ws) {
    if (!cell.reachable()) return true;
    if (v != cell.vital) return v > cell.vital;
    if (c != cell.comfort) return c > cell.comfort;
    return ws < cell.wash_start;
}

}  // namespace

HomeSolution solve_home(const HomeSpec& home, std::span<const double> caps,
                        std::span<const double> exterior_temp, double u_max,
                        const SolverOptions& options) {
    const int horizon = static_cast<int>(caps.size());
    if (horizon == 0 || exterior_temp.size() != caps.size())
        throw std::invalid_argument("solve_home: caps and exterior_temp must share the horizon");
    for (double c : caps)
        if (!(c >= 0.0)) throw std::invalid_argument("solve_home: caps must be non-negative");

    TempGrid grid;
    if (home.heating) {
        double lo = std::min(home.t_init, *std::min_element(exterior_temp.begin(), exterior_temp.end())) - 1.0;
        double hi = std::max(options.temp_ceiling, home.t_init);
        grid.lo = lo;
        grid.step = options.temp_grid;
        grid.n = static_cast<int>(std::ceil((hi - lo) / grid.step)) + 1;
    } else {
        grid.lo = home.t_init;
        grid.n = 1;
    }

    // Washing state machine: 0 = not started, 1..D = running with that many
    // slots left including the current one, D+1 = done.
    const int wash_d = home.washing ? home.washing->duration : 0;
    const int n_wash = home.washing ? wash_d + 2 : 1;
    const double wash_power = home.washing ? home.washing->power : 0.0;
    const int wash_done = wash_d + 1;

    // A run may start at s only if every slot of the window can fund it.
    std::vector<uint8_t> can_start(horizon, 0);
    if (home.washing) {
        for (int s = home.washing->earliest_start; s <= home.washing->latest_start(); ++s) {
            if (s < 0 || s + wash_d > horizon) continue;
            bool ok = true;
            for (int t = s; t < s + wash_d && ok; ++t) ok = caps[t] >= wash_power;
            can_start[s] = ok;
        }
    }

    const int n_states = grid.n * n_wash;
    std::vector<Cell> dp(static_cast<size_t>(horizon + 1) * n_states);
    auto cell = [&](int t, int wash, int temp) -> Cell& {
        return dp[static_cast<size_t>(t) * n_states + wash * grid.n + temp];
    };

    Cell& start = cell(0, 0, grid.index(home.t_init));
    start.vital = 0.0;
    start.comfort = 0.0;

    const double f = home.heating ? home.heating->f_coeff : 0.0;
    const double g = home.heating ? home.heating->g_coeff : 0.0;
    double cand[12];

    for (int t = 0; t < horizon; ++t) {
        const double cap_t = caps[t];
        const double te = exterior_temp[t];
        for (int ws = 0; ws < n_wash; ++ws) {
            for (int ti = 0; ti < grid.n; ++ti) {
                const Cell& cur = cell(t, ws, ti);
                if (!cur.reachable()) continue;
                const double t_q = grid.value(ti);

                // (wash draw this slot, next wash state, utility granted now,
                // wash-start slot for the tie-break)
                struct WashOption {
                    double draw;
                    int next;
                    UtilityPair bonus;
                    int16_t start;
                };
                WashOption opts[2];
                int n_opts = 0;
                if (ws == 0) {
                    if (home.washing && can_start[t] && t >= home.washing->earliest_start &&
                        t <= home.washing->latest_start()) {
                        opts[n_opts++] = {wash_power, wash_d == 1 ? wash_done : wash_d - 1,
                                          wash_utility(t, *home.washing, horizon, u_max),
                                          static_cast<int16_t>(t)};
                    }
                    opts[n_opts++] = {0.0, 0, {0.0, 0.0}, cur.wash_start};
                } else if (ws <= wash_d && ws >= 1) {
                    opts[n_opts++] = {wash_power, ws == 1 ? wash_done : ws - 1, {0.0, 0.0},
                                      cur.wash_start};
                } else {
                    opts[n_opts++] = {0.0, wash_done, {0.0, 0.0}, cur.wash_start};
                }

                for (int oi = 0; oi < n_opts; ++oi) {
                    const WashOption& wo = opts[oi];
                    const double avail = cap_t - wo.draw;
                    if (avail < -1e-12) continue;
                    const int nc = heat_candidates(home, avail, t_q, te, grid, cand);
                    for (int ci = 0; ci < nc; ++ci) {
                        const double heat = cand[ci];
                        const double light = best_light(home.lighting, avail - heat);
                        double t_next = t_q;
                        int ti_next = ti;
                        UtilityPair util = wo.bonus;
                        if (home.heating) {
                            t_next = heat_step(t_q, heat, te, f, g);
                            ti_next = grid.index(t_next);
                            util += heat_utility(grid.value(ti_next), home, u_max);
                        }
                        if (home.lighting && light > 0.0)
                            util += light_utility(light, *home.lighting, u_max);

                        const double v = cur.vital + util.vital;
                        const double c = cur.comfort + util.comfort;
                        const int16_t wstart = std::min(cur.wash_start, wo.start);
                        Cell& dst = cell(t + 1, wo.next, ti_next);
                        if (improves(dst, v, c, wstart)) {
                            dst.vital = v;
                            dst.comfort = c;
                            dst.heat = heat;
                            dst.wash_start = wstart;
                            dst.prev_temp = static_cast<int16_t>(ti);
                            dst.prev_wash = static_cast<int8_t>(ws);
                        }
                    }
                }
            }
        }
    }

    // Pick the deterministic best terminal cell.
    int best_ws = -1, best_ti = -1;
    {
        const Cell* best = nullptr;
        for (int ws = 0; ws < n_wash; ++ws) {
            for (int ti = 0; ti < grid.n; ++ti) {
                const Cell& c = cell(horizon, ws, ti);
                if (!c.reachable()) continue;
                if (!best || improves(*best, c.vital, c.comfort, c.wash_start)) {
                    best = &c;
                    best_ws = ws;
                    best_ti = ti;
                }
            }
        }
    }

    HomeSchedule sched;
    sched.light_power.assign(horizon, 0.0);
    sched.heat_power.assign(horizon, 0.0);
    sched.wash_power = wash_power;
    sched.wash_duration = wash_d;

    int ws = best_ws, ti = best_ti;
    for (int t = horizon - 1; t >= 0; --t) {
        const Cell& c = cell(t + 1, ws, ti);
        const int prev_ws = c.prev_wash;
        const bool started_here = prev_ws == 0 && ws != 0;
        const bool running = started_here || (prev_ws >= 1 && prev_ws <= wash_d);
        const double draw = running ? wash_power : 0.0;
        if (started_here) sched.wash_start = t;
        sched.heat_power[t] = c.heat;
        sched.light_power[t] = best_light(home.lighting, caps[t] - draw - c.heat);
        ws = prev_ws;
        ti = c.prev_temp;
    }

    HomeSolution sol;
    EvaluatedHome eval = evaluate_home(sched, home, exterior_temp, u_max);
    sched.temperature = std::move(eval.temperature);
    sched.utility = eval.utility;
    sol.utility = eval.utility;
    sol.residual.resize(horizon);
    for (int t = 0; t < horizon; ++t) sol.residual[t] = caps[t] - sched.total_power(t);
    sol.schedule = std::move(sched);
    return sol;
}

namespace {

// {0} plus the p_min-anchored grid ladder.
std::vector<double> grid_powers(double p_min, double p_max, double q) {
    std::vector<double> out{0.0};
    if (q <= 0.0) throw std::invalid_argument("power grid must be positive");
    for (double p = p_min; p <= p_max + 1e-9; p += q) out.push_back(std::min(p, p_max));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct BruteState {
    const HomeSpec& home;
    std::span<const double> caps;
    std::span<const double> te;
    double u_max;
    int horizon;
    std::vector<double> lights, heats;
    std::vector<double> optimistic_tail;  // utility still reachable after slot t
    std::optional<int> wash_start;
    double wash_power = 0.0;
    int wash_d = 0;

    std::vector<double> cur_light, cur_heat;
    UtilityPair best;
    bool have_best = false;
    std::optional<int> best_wash;
    std::vector<double> best_light_v, best_heat_v;

    void dfs(int t, double temp, UtilityPair acc) {
        if (t == horizon) {
            if (!have_best || lex_greater(acc, best)) {
                best = acc;
                have_best = true;
                best_wash = wash_start;
                best_light_v = cur_light;
                best_heat_v = cur_heat;
            }
            return;
        }
        if (have_best) {
            UtilityPair bound{acc.vital + optimistic_tail[t], acc.comfort + optimistic_tail[t]};
            if (!lex_greater(bound, best)) return;
        }
        const bool wash_on =
            wash_start && t >= *wash_start && t < *wash_start + wash_d;
        const double avail = caps[t] - (wash_on ? wash_power : 0.0);
        if (avail < 0.0) return;
        for (double heat : heats) {
            if (heat > avail) break;
            double t2 = temp;
            UtilityPair u;
            if (home.heating) {
                t2 = heat_step(temp, heat, te[t], home.heating->f_coeff, home.heating->g_coeff);
                u += heat_utility(t2, home, u_max);
            }
            for (double light : lights) {
                if (light > avail - heat) break;
                UtilityPair u2 = u;
                if (home.lighting && light > 0.0) u2 += light_utility(light, *home.lighting, u_max);
                cur_light[t] = light;
                cur_heat[t] = heat;
                dfs(t + 1, t2, acc + u2);
            }
        }
        cur_light[t] = 0.0;
        cur_heat[t] = 0.0;
    }
};

}  // namespace

HomeSolution brute_force_home(const HomeSpec& home, std::span<const double> caps,
                              std::span<const double> exterior_temp, double u_max,
                              double power_grid) {
    const int horizon = static_cast<int>(caps.size());
    if (horizon > 8) throw InstanceTooLarge("brute_force_home: horizon > 8 slots");

    BruteState st{home, caps, exterior_temp, u_max, horizon};
    st.lights = home.lighting ? grid_powers(home.lighting->p_min, home.lighting->p_max, power_grid)
                              : std::vector<double>{0.0};
    st.heats = home.heating ? grid_powers(home.heating->p_min, home.heating->p_max, power_grid)
                            : std::vector<double>{0.0};

    double combos = 1.0;
    for (int t = 0; t < horizon; ++t) combos *= static_cast<double>(st.lights.size() * st.heats.size());
    const int wash_options =
        home.washing ? home.washing->latest_start() - home.washing->earliest_start + 2 : 1;
    if (combos * wash_options > 1e8)
        throw InstanceTooLarge("brute_force_home: more than 1e8 grid schedules");

    const double per_slot =
        u_max * ((home.lighting ? 1.0 : 0.0) + (home.heating ? 1.0 : 0.0));
    st.optimistic_tail.assign(horizon + 1, 0.0);
    for (int t = horizon - 1; t >= 0; --t) st.optimistic_tail[t] = st.optimistic_tail[t + 1] + per_slot;

    st.cur_light.assign(horizon, 0.0);
    st.cur_heat.assign(horizon, 0.0);
    st.wash_d = home.washing ? home.washing->duration : 0;
    st.wash_power = home.washing ? home.washing->power : 0.0;

    std::vector<std::optional<int>> starts;
    if (home.washing) {
        for (int s = std::max(0, home.washing->earliest_start);
             s <= std::min(home.washing->latest_start(), horizon - st.wash_d); ++s) {
            bool ok = true;
            for (int t = s; t < s + st.wash_d && ok; ++t) ok = caps[t] >= st.wash_power;
            if (ok) starts.emplace_back(s);
        }
    }
    starts.emplace_back(std::nullopt);

    for (const auto& s : starts) {
        st.wash_start = s;
        UtilityPair w;
        if (home.washing) w = wash_utility(s, *home.washing, horizon, u_max);
        st.dfs(0, home.t_init, w);
    }

    HomeSchedule sched;
    sched.light_power = std::move(st.best_light_v);
    sched.heat_power = std::move(st.best_heat_v);
    if (sched.light_power.empty()) sched.light_power.assign(horizon, 0.0);
    if (sched.heat_power.empty()) sched.heat_power.assign(horizon, 0.0);
    sched.wash_start = st.best_wash;
    sched.wash_power = st.wash_power;
    sched.wash_duration = st.wash_d;

    HomeSolution sol;
    EvaluatedHome eval = evaluate_home(sched, home, exterior_temp, u_max);
    sched.temperature = std::move(eval.temperature);
    sched.utility = eval.utility;
    sol.utility = eval.utility;
    sol.residual.resize(horizon);
    for (int t = 0; t < horizon; ++t) sol.residual[t] = caps[t] - sched.total_power(t);
    sol.schedule = std::move(sched);
    return sol;
}

Greedients greedient_home(const HomeSolution& solution, const HomeSpec& home,
                          std::span<const double> caps, std::span<const double> exterior_temp,
                          double u_max, double vital_weight) {
    const int horizon = static_cast<int>(caps.size());
    Greedients g;
    g.per_slot.assign(horizon, 0.0);
    for (auto& v : g.per_appliance) v.assign(horizon, 0.0);

    const HomeSchedule& sched = solution.schedule;
    auto scal = [&](const UtilityPair& gain) {
        return vital_weight * gain.vital + gain.comfort;
    };

    for (int t = 0; t < horizon; ++t) {
        const double r = solution.residual[t];

        if (home.lighting) {
            const double x = sched.light_power[t];
            const UtilityPair u0 = x > 0.0 ? light_utility(x, *home.lighting, u_max) : UtilityPair{};
            double best = 0.0;
            for (double target : {home.lighting->p_min, home.lighting->p_max}) {
                const double dc = target - (x + r);
                if (dc <= 0.0) continue;
                const UtilityPair u1 = light_utility(target, *home.lighting, u_max);
                const double gain = scal({u1.vital - u0.vital, u1.comfort - u0.comfort});
                if (gain > 0.0) best = std::max(best, gain / dc);
            }
            g.per_appliance[0][t] = best;
        }

        if (home.heating) {
            const HeatingSpec& hs = *home.heating;
            const double x = sched.heat_power[t];
            const double t_before = t > 0 ? sched.temperature[t - 1] : home.t_init;
            const double t_decay = t_before + hs.g_coeff * (exterior_temp[t] - t_before);
            double best = 0.0;
            auto try_power = [&](double p) {
                p = std::min(p, hs.p_max);
                if (p < hs.p_min) p = hs.p_min;
                const double dc = p - (x + r);
                if (dc <= 0.0) return;
                // Re-propagate the trajectory with the single-slot boost.
                UtilityPair gain;
                double t_new = heat_step(t_before, p, exterior_temp[t], hs.f_coeff, hs.g_coeff);
                for (int k = t; k < horizon; ++k) {
                    if (k > t)
                        t_new = heat_step(t_new, sched.heat_power[k], exterior_temp[k], hs.f_coeff,
                                          hs.g_coeff);
                    const UtilityPair a = heat_utility(t_new, home, u_max);
                    const UtilityPair b = heat_utility(sched.temperature[k], home, u_max);
                    gain += {a.vital - b.vital, a.comfort - b.comfort};
                }
                const double s = scal(gain);
                if (s > 0.0) best = std::max(best, s / dc);
            };
            try_power(hs.p_min);
            try_power(hs.p_max);
            if (hs.f_coeff > 0.0) {
                for (double target : {home.t_min, home.t_pref})
                    if (target > t_decay) try_power((target - t_decay) / hs.f_coeff);
            }
            g.per_appliance[1][t] = best;
        }

        if (home.washing && !sched.wash_start) {
            const WashingSpec& w = *home.washing;
            const double dc = w.power - r;
            if (dc > 0.0) {
                double best = 0.0;
                for (int s = std::max(w.earliest_start, t - w.duration + 1);
                     s <= std::min(w.latest_start(), t); ++s) {
                    if (s < 0 || s + w.duration > horizon) continue;
                    bool funded = true;
                    for (int k = s; k < s + w.duration && funded; ++k)
                        funded = k == t || solution.residual[k] >= w.power;
                    if (!funded) continue;
                    const double gain = scal(wash_utility(s, w, horizon, u_max));
                    best = std::max(best, gain / dc);
                    break;  // starts scan earliest-first; later starts only lose comfort
                }
                g.per_appliance[2][t] = best;
            }
        }

        g.per_slot[t] =
            std::max({g.per_appliance[0][t], g.per_appliance[1][t], g.per_appliance[2][t]});
    }
    return g;
}

UtilityPair max_utility_baseline(const HomeSpec& home, std::span<const double> exterior_temp,
                                 double u_max, const SolverOptions& options) {
    std::vector<double> caps(exterior_temp.size(), home.subscribed_power());
    return solve_home(home, caps, exterior_temp, u_max, options).utility;
}

}  // namespace drsim

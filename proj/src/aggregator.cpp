#include "drsim/aggregator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <thread>
#include <unordered_map>

namespace drsim {

namespace {

// Everything a solve + greedient result depends on, flattened; the cache key.
std::vector<double> solve_signature(const HomeSpec& home, std::span<const double> caps,
                                    double u_max) {
    std::vector<double> sig;
    sig.reserve(caps.size() + 24);
    sig.push_back(u_max);
    sig.push_back(home.t_min);
    sig.push_back(home.t_pref);
    sig.push_back(home.t_init);
    sig.push_back(home.heat_vital_floor);
    if (home.lighting) {
        sig.push_back(1.0);
        sig.push_back(home.lighting->p_min);
        sig.push_back(home.lighting->p_max);
    } else {
        sig.push_back(0.0);
    }
    if (home.heating) {
        sig.push_back(1.0);
        sig.push_back(home.heating->p_min);
        sig.push_back(home.heating->p_max);
        sig.push_back(home.heating->f_coeff);
        sig.push_back(home.heating->g_coeff);
    } else {
        sig.push_back(0.0);
    }
    if (home.washing) {
        sig.push_back(1.0);
        sig.push_back(home.washing->power);
        sig.push_back(home.washing->duration);
        sig.push_back(home.washing->earliest_start);
        sig.push_back(home.washing->deadline);
    } else {
        sig.push_back(0.0);
    }
    sig.insert(sig.end(), caps.begin(), caps.end());
    return sig;
}

void run_parallel(int n, int threads, const std::function<void(int)>& body) {
    if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

struct SolveCache::Impl {
    struct Key {
        std::vector<double> sig;
        bool operator==(const Key& o) const { return sig == o.sig; }
    };
    struct KeyHash {
        size_t operator()(const Key& k) const {
            uint64_t h = 1469598103934665603ull;  // FNV-1a
            for (double d : k.sig) {
                uint64_t bits;
                std::memcpy(&bits, &d, sizeof(bits));
                h ^= bits;
                h *= 1099511628211ull;
            }
            return static_cast<size_t>(h);
        }
    };
    std::unordered_map<Key, std::shared_ptr<const HomeSolution>, KeyHash> map;
};

SolveCache::SolveCache() : impl_(std::make_unique<Impl>()) {}
SolveCache::~SolveCache() = default;

std::shared_ptr<const HomeSolution> SolveCache::find(const HomeSpec& home,
                                                     std::span<const double> caps,
                                                     double u_max) const {
    auto it = impl_->map.find(Impl::Key{solve_signature(home, caps, u_max)});
    return it == impl_->map.end() ? nullptr : it->second;
}

void SolveCache::insert(const HomeSpec& home, std::span<const double> caps, double u_max,
                        std::shared_ptr<const HomeSolution> solution) {
    impl_->map.emplace(Impl::Key{solve_signature(home, caps, u_max)}, std::move(solution));
}

CapacityPlan lm_allocate(const Scenario& scenario) {
    const double total = scenario.total_subscribed();
    if (!(total > 0.0)) throw std::invalid_argument("lm_allocate: total subscribed power is zero");
    CapacityPlan plan;
    plan.limits.resize(scenario.home_count());
    for (int h = 0; h < scenario.home_count(); ++h) {
        const double share = scenario.homes[h].subscribed_power() / total;
        plan.limits[h].resize(scenario.horizon);
        for (int t = 0; t < scenario.horizon; ++t)
            plan.limits[h][t] = share * scenario.capacity[t];
    }
    return plan;
}

CapacityPlan round_robin_init(const Scenario& scenario) {
    const int n = scenario.home_count();
    CapacityPlan plan;
    plan.limits.assign(n, std::vector<double>(scenario.horizon, 0.0));
    int offset = 0;
    for (int t = 0; t < scenario.horizon; ++t) {
        double remaining = scenario.capacity[t];
        int granted = 0;
        for (int i = 0; i < n && remaining > 0.0; ++i) {
            const int h = (offset + i) % n;
            const double give = std::min(scenario.homes[h].subscribed_power(), remaining);
            if (give > 0.0) {
                plan.limits[h][t] = give;
                remaining -= give;
                ++granted;
            }
        }
        if (remaining > 0.0) {
            // Capacity beyond total subscribed power: spread it so the column
            // still sums to C(t), as the projection precondition requires.
            const double extra = remaining / n;
            for (int h = 0; h < n; ++h) plan.limits[h][t] += extra;
        }
        offset = (offset + granted) % n;
    }
    return plan;
}

std::optional<double> step_size(StepRule rule, int k, std::span<const double> flat_greedients,
                                double a1, double a2) {
    if (k < 1) throw std::invalid_argument("step_size: iterations are 1-based");
    if (rule == StepRule::diminishing) return a1 / std::sqrt(static_cast<double>(k));
    double sq = 0.0;
    for (double g : flat_greedients) sq += g * g;
    if (sq == 0.0) return std::nullopt;  // converged; no division
    return a2 / std::sqrt(sq);
}

std::vector<std::vector<double>> cap_updates(double alpha,
                                             const std::vector<std::vector<double>>& greedients,
                                             const Scenario& scenario) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("cap_updates: alpha must be >= 0");
    double l_min = std::numeric_limits<double>::infinity();
    for (const auto& h : scenario.homes) l_min = std::min(l_min, h.subscribed_power());
    std::vector<std::vector<double>> beta(greedients.size());
    for (size_t h = 0; h < greedients.size(); ++h) {
        beta[h].resize(greedients[h].size());
        for (size_t t = 0; t < greedients[h].size(); ++t)
            beta[h][t] = std::min({alpha * greedients[h][t], l_min, scenario.capacity[t]});
    }
    return beta;
}

std::vector<double> project_allocation(const std::vector<double>& current,
                                       const std::vector<double>& beta, double budget,
                                       double* pre_renorm_err) {
    const int n = static_cast<int>(current.size());
    if (static_cast<int>(beta.size()) != n)
        throw std::invalid_argument("project_allocation: size mismatch");
    std::vector<char> protected_set(n, 0);
    std::vector<double> out(n);

    for (int round = 0; round <= n; ++round) {
        // Solve sum_I max(b - lambda, 0) + sum_rest (b - lambda) = 0 by
        // scanning the piecewise-linear segments between protected
        // breakpoints.
        double rest_sum = 0.0;
        int rest_cnt = 0;
        std::vector<double> prot;
        for (int h = 0; h < n; ++h) {
            if (protected_set[h]) {
                prot.push_back(beta[h]);
            } else {
                rest_sum += beta[h];
                ++rest_cnt;
            }
        }
        double lambda;
        if (rest_cnt == 0) {
            lambda = prot.empty() ? 0.0 : *std::max_element(prot.begin(), prot.end());
        } else {
            std::sort(prot.begin(), prot.end());
            std::vector<double> edges{0.0};
            for (double b : prot)
                if (b > 0.0) edges.push_back(b);
            lambda = 0.0;
            for (size_t e = 0; e < edges.size(); ++e) {
                const double lo = edges[e];
                const double hi =
                    e + 1 < edges.size() ? edges[e + 1] : std::numeric_limits<double>::infinity();
                double above_sum = 0.0;
                int above_cnt = 0;
                for (double b : prot) {
                    if (b > lo) {
                        above_sum += b;
                        ++above_cnt;
                    }
                }
                const double root = (above_sum + rest_sum) / (above_cnt + rest_cnt);
                if (root >= lo && root < hi) {
                    lambda = root;
                    break;
                }
                lambda = hi;  // equation still positive at hi; keep scanning
            }
        }

        bool negative = false;
        for (int h = 0; h < n; ++h) {
            const double upd = protected_set[h] ? std::max(beta[h] - lambda, 0.0) : beta[h] - lambda;
            out[h] = current[h] + upd;
            if (out[h] < 0.0) negative = true;
        }
        if (!negative) break;
        for (int h = 0; h < n; ++h)
            if (out[h] < 0.0) protected_set[h] = 1;
    }

    double sum = 0.0;
    for (double v : out) sum += v;
    const double err = budget - sum;
    if (pre_renorm_err) *pre_renorm_err = std::abs(err);
    if (err != 0.0 && n > 0) {
        int biggest = 0;
        for (int h = 1; h < n; ++h)
            if (out[h] > out[biggest]) biggest = h;
        out[biggest] = std::max(0.0, out[biggest] + err);
    }
    return out;
}

namespace {

// Solve every home under its capacity row, deduplicating identical
// (home, caps) pairs through the cache. Greedients are attached before a
// solution enters the cache so hits reuse them as well.
std::vector<std::shared_ptr<const HomeSolution>> solve_all(
    const Scenario& scenario, const CapacityPlan& plan, const SgConfig& config,
    SolveCache* cache) {
    const int n = scenario.home_count();
    std::vector<std::shared_ptr<const HomeSolution>> out(n);
    // Group cache misses by signature so identical (home, caps) rows are
    // solved once: an LM column over a homogeneous class is one solve.
    std::map<std::vector<double>, std::vector<int>> groups;
    for (int h = 0; h < n; ++h) {
        out[h] = cache ? cache->find(scenario.homes[h], plan.limits[h], scenario.max_utility_per_slot)
                       : nullptr;
        if (!out[h])
            groups[solve_signature(scenario.homes[h], plan.limits[h],
                                   scenario.max_utility_per_slot)]
                .push_back(h);
    }
    std::vector<int> reps;
    reps.reserve(groups.size());
    for (const auto& [sig, members] : groups) reps.push_back(members.front());
    std::vector<std::shared_ptr<HomeSolution>> fresh(reps.size());
    run_parallel(static_cast<int>(reps.size()), config.threads, [&](int i) {
        const int h = reps[i];
        auto sol = std::make_shared<HomeSolution>(
            solve_home(scenario.homes[h], plan.limits[h], scenario.exterior_temp,
                       scenario.max_utility_per_slot, config.solver));
        sol->greedients =
            greedient_home(*sol, scenario.homes[h], plan.limits[h], scenario.exterior_temp,
                           scenario.max_utility_per_slot, config.vital_weight);
        fresh[i] = std::move(sol);
    });
    size_t gi = 0;
    for (const auto& [sig, members] : groups) {
        for (int h : members) out[h] = fresh[gi];
        if (cache)
            cache->insert(scenario.homes[members.front()], plan.limits[members.front()],
                          scenario.max_utility_per_slot, fresh[gi]);
        ++gi;
    }
    return out;
}

}  // namespace

SgResult sg_run(const Scenario& scenario, const SgConfig& config, SolveCache* cache) {
    if (config.k_max < 1) throw std::invalid_argument("sg_run: k_max must be >= 1");
    const int n = scenario.home_count();
    const int horizon = scenario.horizon;

    SolveCache local_cache;
    if (!cache) cache = &local_cache;

    SgResult result;
    CapacityPlan plan = round_robin_init(scenario);
    double carried_pre_renorm = 0.0;

    for (int k = 1; k <= config.k_max; ++k) {
        auto solutions = solve_all(scenario, plan, config, cache);

        SgIteration it;
        it.k = k;
        it.per_home.resize(n);
        for (int h = 0; h < n; ++h) {
            it.per_home[h] = solutions[h]->utility;
            it.total += solutions[h]->utility;
        }
        it.pre_renorm_err = carried_pre_renorm;
        it.sum_err = 0.0;
        it.min_coord = std::numeric_limits<double>::infinity();
        for (int t = 0; t < horizon; ++t)
            it.sum_err = std::max(it.sum_err, std::abs(plan.column_sum(t) - scenario.capacity[t]));
        for (int h = 0; h < n; ++h)
            for (int t = 0; t < horizon; ++t) it.min_coord = std::min(it.min_coord, plan.limits[h][t]);
        if (config.record_plans) it.plan = plan;

        const bool first = result.trace.iterations.empty();
        if (first || lex_greater(it.total, result.best_total)) {
            result.best_total = it.total;
            result.best_plan = plan;
            result.best_solutions.clear();
            result.best_solutions.reserve(n);
            for (int h = 0; h < n; ++h) result.best_solutions.push_back(*solutions[h]);
            result.trace.best_iteration = k;
            it.is_best = true;
        }

        bool any_greedient = false;
        std::vector<std::vector<double>> g(n);
        std::vector<double> flat;
        flat.reserve(static_cast<size_t>(n) * horizon);
        for (int h = 0; h < n; ++h) {
            g[h] = solutions[h]->greedients.per_slot;
            for (double v : g[h]) {
                flat.push_back(v);
                any_greedient = any_greedient || v != 0.0;
            }
        }

        if (!any_greedient) {
            result.trace.iterations.push_back(std::move(it));
            break;  // local fixed point: no home advertises any gain
        }
        const auto alpha = step_size(config.step_rule, k, flat, config.a1, config.a2);
        if (!alpha) {
            result.trace.iterations.push_back(std::move(it));
            break;
        }
        it.alpha = *alpha;

        auto beta = cap_updates(*alpha, g, scenario);
        if (config.record_plans) it.beta = beta;
        result.trace.iterations.push_back(std::move(it));
        if (k == config.k_max) break;

        CapacityPlan next;
        next.limits.assign(n, std::vector<double>(horizon, 0.0));
        carried_pre_renorm = 0.0;
        std::vector<double> col(n), bcol(n);
        for (int t = 0; t < horizon; ++t) {
            for (int h = 0; h < n; ++h) {
                col[h] = plan.limits[h][t];
                bcol[h] = beta[h][t];
            }
            double err = 0.0;
            auto projected = project_allocation(col, bcol, scenario.capacity[t], &err);
            carried_pre_renorm = std::max(carried_pre_renorm, err);
            for (int h = 0; h < n; ++h) next.limits[h][t] = projected[h];
        }
        plan = std::move(next);
    }
    return result;
}

namespace {

struct GmSearch {
    const Scenario& scenario;
    double grid;
    double u_max;
    int horizon;
    int n;

    struct HomeCtx {
        std::vector<double> heat_ladder;  // grid-anchored heat candidates
        int wash_d = 0;
        double wash_power = 0.0;
    };
    std::vector<HomeCtx> ctx;

    // mutable search state
    std::vector<double> temp;
    std::vector<int> wash_state;  // 0 = not started, 1..D = remaining, D+1 = done
    std::vector<std::vector<double>> heat_ch, light_ch, wash_ch;
    std::vector<std::optional<int>> wash_start;
    std::vector<double> tail;  // optimistic utility after slot t

    UtilityPair best;
    bool have_best = false;
    std::vector<std::vector<double>> best_heat, best_light, best_wash_draw;
    std::vector<std::optional<int>> best_start;

    explicit GmSearch(const Scenario& s, double q)
        : scenario(s), grid(q), u_max(s.max_utility_per_slot), horizon(s.horizon),
          n(s.home_count()) {
        ctx.resize(n);
        for (int h = 0; h < n; ++h) {
            const HomeSpec& home = scenario.homes[h];
            auto& c = ctx[h];
            if (home.heating) {
                c.heat_ladder.push_back(0.0);
                for (double p = home.heating->p_min; p <= home.heating->p_max + 1e-9; p += grid)
                    c.heat_ladder.push_back(std::min(p, home.heating->p_max));
                c.heat_ladder.erase(std::unique(c.heat_ladder.begin(), c.heat_ladder.end()),
                                    c.heat_ladder.end());
            } else {
                c.heat_ladder.push_back(0.0);
            }
            if (home.washing) {
                c.wash_d = home.washing->duration;
                c.wash_power = home.washing->power;
            }
        }
        temp.resize(n);
        for (int h = 0; h < n; ++h) temp[h] = scenario.homes[h].t_init;
        wash_state.assign(n, 0);
        wash_start.assign(n, std::nullopt);
        heat_ch.assign(n, std::vector<double>(horizon, 0.0));
        light_ch.assign(n, std::vector<double>(horizon, 0.0));
        wash_ch.assign(n, std::vector<double>(horizon, 0.0));

        tail.assign(horizon + 1, 0.0);
        double per_slot = 0.0;
        for (int h = 0; h < n; ++h)
            per_slot += u_max * ((scenario.homes[h].lighting ? 1.0 : 0.0) +
                                 (scenario.homes[h].heating ? 1.0 : 0.0));
        for (int t = horizon - 1; t >= 0; --t) tail[t] = tail[t + 1] + per_slot;
    }

    double enumeration_estimate() const {
        double total = 1.0;
        for (int t = 0; t < horizon; ++t) {
            double per_slot = 1.0;
            for (int h = 0; h < n; ++h)
                per_slot *= static_cast<double>((ctx[h].heat_ladder.size() + 4) * 2);
            total *= per_slot;
            if (total > 1e12) break;
        }
        return total;
    }

    // Pending wash weight bounds what unstarted runs can still contribute.
    double pending_wash_bound(int t) const {
        double b = 0.0;
        for (int h = 0; h < n; ++h) {
            const HomeSpec& home = scenario.homes[h];
            if (home.washing && wash_state[h] == 0 && t <= home.washing->latest_start())
                b += u_max * horizon;
        }
        return b;
    }

    // Exact lexicographic split of the slot's leftover pool among lights:
    // maximize the number of vital grants, then waterfill comfort along the
    // steepest slopes. Subsets are tiny (H <= 3).
    UtilityPair fill_lights(int t, double pool) {
        std::vector<int> lit;
        for (int h = 0; h < n; ++h)
            if (scenario.homes[h].lighting) lit.push_back(h);
        for (int h : lit) light_ch[h][t] = 0.0;
        if (lit.empty()) return {};
        UtilityPair best_u{-1.0, 0.0};
        std::vector<double> best_pw(lit.size(), 0.0);
        const int subsets = 1 << lit.size();
        std::vector<double> pw(lit.size());
        for (int mask = 0; mask < subsets; ++mask) {
            double need = 0.0;
            int count = 0;
            for (size_t i = 0; i < lit.size(); ++i)
                if (mask & (1 << i)) {
                    need += scenario.homes[lit[i]].lighting->p_min;
                    ++count;
                }
            if (need > pool + 1e-12) continue;
            std::fill(pw.begin(), pw.end(), 0.0);
            double extra = pool - need;
            UtilityPair u{u_max * count, 0.0};
            // steepest comfort slope first; degenerate ranges saturate free
            std::vector<size_t> order;
            for (size_t i = 0; i < lit.size(); ++i)
                if (mask & (1 << i)) order.push_back(i);
            std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                const auto& la = *scenario.homes[lit[a]].lighting;
                const auto& lb = *scenario.homes[lit[b]].lighting;
                const double ra = la.p_max - la.p_min, rb = lb.p_max - lb.p_min;
                if ((ra == 0.0) != (rb == 0.0)) return ra == 0.0;
                if (ra == 0.0) return false;
                return 1.0 / ra > 1.0 / rb;
            });
            for (size_t i : order) {
                const auto& ls = *scenario.homes[lit[i]].lighting;
                pw[i] = ls.p_min;
                if (ls.p_max == ls.p_min) {
                    u.comfort += u_max;
                    continue;
                }
                const double add = std::min(extra, ls.p_max - ls.p_min);
                pw[i] += add;
                extra -= add;
                u.comfort += u_max * add / (ls.p_max - ls.p_min);
            }
            if (best_u.vital < 0.0 || lex_greater(u, best_u)) {
                best_u = u;
                best_pw = pw;
            }
        }
        for (size_t i = 0; i < lit.size(); ++i) light_ch[lit[i]][t] = best_pw[i];
        return best_u;
    }

    void record_if_best(const UtilityPair& acc) {
        if (!have_best || lex_greater(acc, best)) {
            best = acc;
            have_best = true;
            best_heat = heat_ch;
            best_light = light_ch;
            best_wash_draw = wash_ch;
            best_start = wash_start;
        }
    }

    void choose_home(int t, int h, double pool, UtilityPair acc, std::vector<double>& slot_temp) {
        if (pool < -1e-9) return;
        if (h == n) {
            UtilityPair with_lights = acc + fill_lights(t, pool);
            std::vector<double> saved = temp;
            temp = slot_temp;
            advance_slot(t + 1, with_lights);
            temp = saved;
            return;
        }
        const HomeSpec& home = scenario.homes[h];
        const HomeCtx& c = ctx[h];

        struct WashOpt {
            double draw;
            int next;
            UtilityPair bonus;
            std::optional<int> start;
        };
        WashOpt opts[2];
        int n_opts = 0;
        const int ws = wash_state[h];
        if (home.washing && ws == 0 && t >= home.washing->earliest_start &&
            t <= home.washing->latest_start() && t + c.wash_d <= horizon) {
            opts[n_opts++] = {c.wash_power, c.wash_d == 1 ? c.wash_d + 1 : c.wash_d - 1,
                              wash_utility(t, *home.washing, horizon, u_max), t};
        }
        if (ws >= 1 && ws <= c.wash_d) {
            opts[n_opts++] = {c.wash_power, ws == 1 ? c.wash_d + 1 : ws - 1, {}, wash_start[h]};
        } else {
            opts[n_opts++] = {0.0, ws == 0 ? 0 : c.wash_d + 1, {}, wash_start[h]};
        }

        for (int oi = 0; oi < n_opts; ++oi) {
            const WashOpt& wo = opts[oi];
            const double after_wash = pool - wo.draw;
            if (after_wash < -1e-9) continue;
            const int saved_ws = wash_state[h];
            const auto saved_start = wash_start[h];
            wash_state[h] = wo.next;
            wash_start[h] = wo.start;
            wash_ch[h][t] = wo.draw;

            // heat candidates: the grid ladder plus the temperature-target
            // powers reachable from the current trajectory
            double cands[24];
            int nc = 0;
            for (double p : c.heat_ladder)
                if (p <= after_wash) cands[nc++] = p;
            if (home.heating && home.heating->f_coeff > 0.0 && nc > 0) {
                const auto& hs = *home.heating;
                const double td = temp[h] + hs.g_coeff * (scenario.exterior_temp[t] - temp[h]);
                for (double target : {home.t_min, home.t_pref}) {
                    if (target <= td) continue;
                    double p = (target - td) / hs.f_coeff;
                    if (p >= hs.p_min && p <= std::min(hs.p_max, after_wash) &&
                        nc < 24)
                        cands[nc++] = p;
                }
                double hold = (temp[h] - td) / hs.f_coeff;
                if (hold >= hs.p_min && hold <= std::min(hs.p_max, after_wash) && nc < 24)
                    cands[nc++] = hold;
                std::sort(cands, cands + nc);
                nc = static_cast<int>(std::unique(cands, cands + nc) - cands);
            }

            for (int ci = 0; ci < nc; ++ci) {
                const double heat = cands[ci];
                UtilityPair u = wo.bonus;
                double t_new = temp[h];
                if (home.heating) {
                    t_new = heat_step(temp[h], heat, scenario.exterior_temp[t],
                                      home.heating->f_coeff, home.heating->g_coeff);
                    u += heat_utility(t_new, home, u_max);
                }
                heat_ch[h][t] = heat;
                slot_temp[h] = t_new;
                choose_home(t, h + 1, after_wash - heat, acc + u, slot_temp);
            }
            slot_temp[h] = temp[h];
            heat_ch[h][t] = 0.0;
            wash_ch[h][t] = 0.0;
            wash_state[h] = saved_ws;
            wash_start[h] = saved_start;
        }
    }

    void advance_slot(int t, UtilityPair acc) {
        if (t == horizon) {
            record_if_best(acc);
            return;
        }
        if (have_best) {
            const double slack = tail[t] + pending_wash_bound(t);
            UtilityPair bound{acc.vital + slack, acc.comfort + slack};
            if (!lex_greater(bound, best)) return;
        }
        std::vector<double> slot_temp = temp;
        choose_home(t, 0, scenario.capacity[t], acc, slot_temp);
    }
};

}  // namespace

GmResult gm_solve_tiny(const Scenario& scenario, double power_grid) {
    if (scenario.home_count() > 3 || scenario.horizon > 4)
        throw InstanceTooLarge("gm_solve_tiny: limited to H <= 3 and horizon <= 4");
    GmSearch search(scenario, power_grid);
    if (search.enumeration_estimate() > 1e8)
        throw InstanceTooLarge("gm_solve_tiny: more than 1e8 joint schedules");
    search.advance_slot(0, {});

    GmResult out;
    const int n = scenario.home_count();
    out.plan.limits.assign(n, std::vector<double>(scenario.horizon, 0.0));
    out.schedules.resize(n);
    for (int h = 0; h < n; ++h) {
        HomeSchedule s;
        s.light_power = search.best_light[h];
        s.heat_power = search.best_heat[h];
        s.wash_start = search.best_start[h];
        const HomeSpec& home = scenario.homes[h];
        s.wash_power = home.washing ? home.washing->power : 0.0;
        s.wash_duration = home.washing ? home.washing->duration : 0;
        EvaluatedHome eval =
            evaluate_home(s, home, scenario.exterior_temp, scenario.max_utility_per_slot);
        s.temperature = std::move(eval.temperature);
        s.utility = eval.utility;
        out.total += eval.utility;
        for (int t = 0; t < scenario.horizon; ++t) out.plan.limits[h][t] = s.total_power(t);
        out.schedules[h] = std::move(s);
    }
    return out;
}

CapacityPlan async_reallocate(const Scenario& scenario, const std::vector<int>& subset,
                              const CapacityPlan& current, const SgConfig& config,
                              SolveCache* cache) {
    if (subset.size() < 2)
        throw std::invalid_argument("async_reallocate: needs at least two homes");
    SolveCache local;
    if (!cache) cache = &local;

    const int horizon = scenario.horizon;
    const int m = static_cast<int>(subset.size());

    // Restricted problem: the subset's cumulated allocation is its budget.
    std::vector<double> budget(horizon, 0.0);
    for (int t = 0; t < horizon; ++t)
        for (int h : subset) budget[t] += current.limits[h][t];

    double l_min = std::numeric_limits<double>::infinity();
    for (int h : subset) l_min = std::min(l_min, scenario.homes[h].subscribed_power());

    std::vector<std::vector<double>> g(m);
    std::vector<double> flat;
    for (int i = 0; i < m; ++i) {
        const int h = subset[i];
        auto sol = cache->find(scenario.homes[h], current.limits[h], scenario.max_utility_per_slot);
        if (!sol) {
            auto fresh = std::make_shared<HomeSolution>(
                solve_home(scenario.homes[h], current.limits[h], scenario.exterior_temp,
                           scenario.max_utility_per_slot, config.solver));
            fresh->greedients = greedient_home(*fresh, scenario.homes[h], current.limits[h],
                                               scenario.exterior_temp,
                                               scenario.max_utility_per_slot, config.vital_weight);
            cache->insert(scenario.homes[h], current.limits[h], scenario.max_utility_per_slot, fresh);
            sol = fresh;
        }
        g[i] = sol->greedients.per_slot;
        for (double v : g[i]) flat.push_back(v);
    }

    CapacityPlan next = current;
    const auto alpha = step_size(config.step_rule, 1, flat, config.a1, config.a2);
    if (!alpha) return next;

    std::vector<double> col(m), bcol(m);
    for (int t = 0; t < horizon; ++t) {
        for (int i = 0; i < m; ++i) {
            col[i] = current.limits[subset[i]][t];
            bcol[i] = std::min({*alpha * g[i][t], l_min, budget[t]});
        }
        auto projected = project_allocation(col, bcol, budget[t]);
        for (int i = 0; i < m; ++i) next.limits[subset[i]][t] = projected[i];
    }
    return next;
}

}  // namespace drsim

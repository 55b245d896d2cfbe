#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drsim/harness.hpp"

namespace py = pybind11;
using namespace drsim;

namespace {

py::dict trace_to_dict(const SgTrace& trace) {
    py::list rows;
    for (const auto& it : trace.iterations) {
        py::dict row;
        row["k"] = it.k;
        row["alpha"] = it.alpha;
        row["total"] = py::make_tuple(it.total.vital, it.total.comfort);
        row["best"] = it.is_best;
        rows.append(row);
    }
    py::dict out;
    out["iterations"] = rows;
    out["best_iteration"] = trace.best_iteration;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Capacity-constrained demand-response scheduling and allocation engine";

    py::class_<UtilityPair>(m, "UtilityPair")
        .def(py::init<>())
        .def(py::init([](double v, double c) { return UtilityPair{v, c}; }), py::arg("vital"),
             py::arg("comfort"))
        .def_readwrite("vital", &UtilityPair::vital)
        .def_readwrite("comfort", &UtilityPair::comfort)
        .def("__add__", [](const UtilityPair& a, const UtilityPair& b) { return a + b; })
        .def("__eq__", [](const UtilityPair& a, const UtilityPair& b) { return a == b; })
        .def("__lt__", [](const UtilityPair& a, const UtilityPair& b) { return lex_less(a, b); })
        .def("__gt__", [](const UtilityPair& a, const UtilityPair& b) { return lex_greater(a, b); })
        .def("__repr__", [](const UtilityPair& u) {
            return "UtilityPair(vital=" + std::to_string(u.vital) +
                   ", comfort=" + std::to_string(u.comfort) + ")";
        });

    m.def("utility_cmp", [](const UtilityPair& a, const UtilityPair& b) {
        const auto c = utility_cmp(a, b);
        return c == std::strong_ordering::less ? -1 : (c == std::strong_ordering::greater ? 1 : 0);
    });

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("horizon", &Scenario::horizon)
        .def_readonly("slot_minutes", &Scenario::slot_minutes)
        .def_readonly("exterior_temp", &Scenario::exterior_temp)
        .def_property_readonly("capacity", [](const Scenario& s) { return s.capacity; })
        .def_property_readonly("home_count", &Scenario::home_count)
        .def_property_readonly("total_subscribed", &Scenario::total_subscribed)
        .def("__repr__", [](const Scenario& s) {
            return "Scenario(homes=" + std::to_string(s.home_count()) +
                   ", horizon=" + std::to_string(s.horizon) + ")";
        });

    m.def("parse_scenario", &parse_scenario, py::arg("text"));
    m.def("render_scenario", &render_scenario, py::arg("scenario"));
    m.def("heat_step", &heat_step, py::arg("t_prev"), py::arg("heat_power"), py::arg("t_ext"),
          py::arg("f_coeff"), py::arg("g_coeff"));

    m.def(
        "lm_allocate", [](const Scenario& s) { return lm_allocate(s).limits; }, py::arg("scenario"));
    m.def(
        "round_robin_init", [](const Scenario& s) { return round_robin_init(s).limits; },
        py::arg("scenario"));
    m.def("project_allocation",
          [](const std::vector<double>& current, const std::vector<double>& beta, double budget) {
              return project_allocation(current, beta, budget);
          },
          py::arg("current"), py::arg("beta"), py::arg("budget"));

    m.def(
        "solve_home",
        [](const Scenario& s, int home, const std::vector<double>& caps, double temp_grid) {
            if (home < 0 || home >= s.home_count()) throw std::out_of_range("home index");
            SolverOptions opt;
            opt.temp_grid = temp_grid;
            HomeSolution sol =
                solve_home(s.homes[home], caps, s.exterior_temp, s.max_utility_per_slot, opt);
            py::dict out;
            out["utility"] = py::make_tuple(sol.utility.vital, sol.utility.comfort);
            out["light_power"] = sol.schedule.light_power;
            out["heat_power"] = sol.schedule.heat_power;
            out["wash_start"] = sol.schedule.wash_start
                                    ? py::object(py::int_(*sol.schedule.wash_start + 1))
                                    : py::object(py::none());
            out["temperature"] = sol.schedule.temperature;
            out["residual"] = sol.residual;
            return out;
        },
        py::arg("scenario"), py::arg("home"), py::arg("caps"), py::arg("temp_grid") = 0.25);

    m.def(
        "sg_run",
        [](const Scenario& s, const std::string& rule, int k_max, double a1, double a2,
           double vital_weight, double temp_grid, int threads) {
            SgConfig cfg;
            cfg.step_rule = rule == "sg2" || rule == "constant_length" ? StepRule::constant_length
                                                                       : StepRule::diminishing;
            cfg.k_max = k_max;
            cfg.a1 = a1;
            cfg.a2 = a2;
            cfg.vital_weight = vital_weight;
            cfg.solver.temp_grid = temp_grid;
            cfg.threads = threads;
            SgResult r = sg_run(s, cfg);
            py::dict out;
            out["best_total"] = py::make_tuple(r.best_total.vital, r.best_total.comfort);
            out["best_plan"] = r.best_plan.limits;
            out["best_iteration"] = r.trace.best_iteration;
            out["iterations"] = static_cast<int>(r.trace.iterations.size());
            out["trace"] = trace_to_dict(r.trace);
            return out;
        },
        py::arg("scenario"), py::arg("rule") = "sg1", py::arg("k_max") = 100,
        py::arg("a1") = 1.2e6, py::arg("a2") = 6000.0, py::arg("vital_weight") = 1000.0,
        py::arg("temp_grid") = 0.25, py::arg("threads") = 0);

    m.def(
        "gm_solve_tiny",
        [](const Scenario& s, double power_grid) {
            GmResult r = gm_solve_tiny(s, power_grid);
            py::dict out;
            out["total"] = py::make_tuple(r.total.vital, r.total.comfort);
            out["plan"] = r.plan.limits;
            return out;
        },
        py::arg("scenario"), py::arg("power_grid") = 50.0);

    m.def(
        "run_sweep",
        [](const Scenario& s, const std::vector<std::string>& schemes,
           const std::vector<double>& capacities, int k_max, double a1, double a2,
           double vital_weight, double temp_grid, int threads, const std::string& out_path) {
            SweepRequest req;
            for (const auto& name : schemes) req.schemes.push_back(scheme_from_name(name));
            req.capacities = capacities.empty() ? default_capacity_grid(s) : capacities;
            req.config.k_max = k_max;
            req.config.a1 = a1;
            req.config.a2 = a2;
            req.config.vital_weight = vital_weight;
            req.config.solver.temp_grid = temp_grid;
            req.config.threads = threads;
            SweepOutcome outcome = run_sweep(s, req, out_path);
            py::list rows;
            for (const auto& r : outcome.result.rows) {
                py::dict row;
                row["capacity"] = r.capacity;
                row["scheme"] = scheme_name(r.scheme);
                row["class"] = r.class_label;
                row["rel_vital"] = r.rel_vital;
                row["rel_comfort"] = r.rel_comfort;
                row["iters_to_best"] = r.iters_to_best;
                row["wall_s"] = r.wall_s;
                rows.append(row);
            }
            return rows;
        },
        py::arg("scenario"), py::arg("schemes"), py::arg("capacities") = std::vector<double>{},
        py::arg("k_max") = 100, py::arg("a1") = 1.2e6, py::arg("a2") = 6000.0,
        py::arg("vital_weight") = 1000.0, py::arg("temp_grid") = 0.25, py::arg("threads") = 0,
        py::arg("out_path") = std::string{});

    m.def("oracle_check", [](int instances, double temp_grid, double power_grid, uint64_t seed) {
        const auto r = oracle_check(instances, temp_grid, power_grid, seed);
        py::dict out;
        out["instances"] = r.instances;
        out["violations"] = r.violations;
        out["max_vital_gap"] = r.max_vital_gap;
        out["bound_vital"] = r.bound_vital;
        return out;
    }, py::arg("instances") = 25, py::arg("temp_grid") = 0.25, py::arg("power_grid") = 50.0,
       py::arg("seed") = 20260810ull);
}

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drsim/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// "lo:hi:n" log-spaced, "lin:lo:hi:n" linear, or a comma list of watts.
std::vector<double> parse_capacity_spec(const std::string& spec) {
    std::vector<double> out;
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::istringstream in(s);
        std::string item;
        while (std::getline(in, item, sep)) parts.push_back(item);
        return parts;
    };
    if (spec.rfind("log:", 0) == 0 || spec.rfind("lin:", 0) == 0) {
        const bool log_spaced = spec[1] == 'o';
        auto parts = split(spec.substr(4), ':');
        if (parts.size() != 3) throw std::runtime_error("capacity range must be log:lo:hi:n or lin:lo:hi:n");
        const double lo = std::stod(parts[0]);
        const double hi = std::stod(parts[1]);
        const int n = std::stoi(parts[2]);
        if (n < 1 || lo <= 0 || hi < lo) throw std::runtime_error("bad capacity range");
        for (int k = 0; k < n; ++k) {
            const double f = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
            out.push_back(log_spaced ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
        }
        return out;
    }
    for (const auto& item : split(spec, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drsim — capacity-constrained demand-response allocation experiments"};

    std::string scenario_path;
    std::vector<std::string> scheme_names{"lm"};
    std::string capacity_spec;
    std::string out_path;
    std::string trace_path;
    int k_max = 100;
    double a1 = 1.2e6;
    double a2 = 6000.0;
    double vital_weight = 1000.0;
    double temp_grid = 0.25;
    double gm_grid = 50.0;
    int oracle_instances = 0;
    unsigned long long seed = 20260810ull;
    int threads = 0;

    app.add_option("--scenario", scenario_path, "Scenario file (JSON)");
    app.add_option("--scheme", scheme_names, "Allocation scheme(s): gm|lm|sg1|sg2")
        ->delimiter(',');
    app.add_option("--capacity", capacity_spec,
                   "Comma list of watts, or log:lo:hi:n / lin:lo:hi:n (default: 20 log points)");
    app.add_option("--kmax", k_max, "Feedback iterations for sg schemes");
    app.add_option("--a1", a1, "Diminishing step size numerator (sg1)");
    app.add_option("--a2", a2, "Constant step length (sg2)");
    app.add_option("--wv", vital_weight, "Vital weight in the greedient scalarization");
    app.add_option("--out", out_path, "CSV output path (default: stdout)");
    app.add_option("--trace", trace_path,
                   "Iteration trace CSV for the first sg run of the sweep");
    app.add_option("--temp-grid", temp_grid, "Temperature discretization, degC");
    app.add_option("--gm-grid", gm_grid, "Power grid for the gm oracle, watts");
    app.add_option("--threads", threads, "Worker threads (0 = hardware)");
    auto* oracle_opt = app.add_flag_function(
        "--oracle-check",
        [&](int64_t) {
            if (oracle_instances == 0) oracle_instances = 25;
        },
        "Validate the solver against the exhaustive oracle on shrunken instances");
    app.add_option("--oracle-instances", oracle_instances, "Instance count for --oracle-check");
    app.add_option("--seed", seed, "Seed for randomized validation instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*oracle_opt) {
            const auto report =
                drsim::oracle_check(oracle_instances ? oracle_instances : 25, temp_grid, 50.0, seed);
            std::printf("oracle check: %d instances, %d violations, worst vital gap %.6g (bound %.6g)\n",
                        report.instances, report.violations, report.max_vital_gap,
                        report.bound_vital);
            if (report.violations > 0) {
                std::printf("first violation: %s\n", report.first_violation.c_str());
                return 1;
            }
            return 0;
        }

        if (scenario_path.empty()) {
            std::fprintf(stderr, "error: --scenario is required (or use --oracle-check)\n");
            return 2;
        }
        const drsim::Scenario scenario = drsim::parse_scenario(read_file(scenario_path));

        drsim::SweepRequest request;
        for (const auto& name : scheme_names) request.schemes.push_back(drsim::scheme_from_name(name));
        request.capacities = capacity_spec.empty() ? drsim::default_capacity_grid(scenario)
                                                   : parse_capacity_spec(capacity_spec);
        request.config.k_max = k_max;
        request.config.a1 = a1;
        request.config.a2 = a2;
        request.config.vital_weight = vital_weight;
        request.config.solver.temp_grid = temp_grid;
        request.config.threads = threads;
        request.gm_power_grid = gm_grid;

        const drsim::SweepOutcome outcome = drsim::run_sweep(scenario, request, out_path);
        if (out_path.empty()) std::fputs(drsim::to_csv(outcome.result).c_str(), stdout);

        if (!trace_path.empty()) {
            bool exported = false;
            for (const auto& run : outcome.runs) {
                if (run.scheme == drsim::Scheme::sg1 || run.scheme == drsim::Scheme::sg2) {
                    drsim::export_trace(run.trace, trace_path);
                    exported = true;
                    break;
                }
            }
            if (!exported)
                std::fprintf(stderr, "warning: --trace ignored (no sg scheme in the sweep)\n");
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

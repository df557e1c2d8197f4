#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pexp4/runner.hpp"
#include "pexp4/scenario.hpp"

namespace {

struct CommonOpts {
    std::string scenario = "discrete";
    int runs = 20;
    std::uint64_t seed = 1;
    int iterations = 0;      // 0 = keep the scenario's value
    int period_max = 0;      // 0 = keep
    std::string variant;     // as-written | corrected
    std::string numeric;     // exact | max
    std::string availability;  // vanilla | aware
    std::string out_dir;
    int parallel = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--scenario", o.scenario, "builtin name or path to a scenario JSON");
    cmd->add_option("--runs", o.runs, "number of seeded simulation runs");
    cmd->add_option("--seed", o.seed, "master seed; per-run seeds are derived from it");
    cmd->add_option("--iterations", o.iterations, "override the scenario's iteration count");
    cmd->add_option("--period-max", o.period_max, "override the period set {1..P}");
    cmd->add_option("--variant", o.variant, "score variant: as-written | corrected");
    cmd->add_option("--numeric", o.numeric, "numeric mode: exact | max");
    cmd->add_option("--availability", o.availability,
                    "mobility variant for all devices: vanilla | aware");
    cmd->add_option("--out-dir", o.out_dir, "directory for per-run CSVs and summary JSON");
    cmd->add_option("--parallel", o.parallel, "concurrent runs");
}

pexp4::Scenario make_scenario(const CommonOpts& o) {
    pexp4::Scenario sc = pexp4::load_scenario(o.scenario);
    if (o.iterations > 0) sc.iterations = o.iterations;
    if (o.period_max > 0) {
        sc.period_set.explicit_labels.clear();
        sc.period_set.max_period = o.period_max;
    }
    if (o.variant == "as-written" || o.variant == "as_written")
        sc.variant = pexp4::Variant::as_written;
    else if (o.variant == "corrected")
        sc.variant = pexp4::Variant::corrected;
    else if (!o.variant.empty())
        throw pexp4::ConfigError("unknown --variant '" + o.variant + "'");
    if (o.numeric == "exact")
        sc.numeric_mode = pexp4::NumericMode::exact_logsumexp;
    else if (o.numeric == "max")
        sc.numeric_mode = pexp4::NumericMode::max_approx;
    else if (!o.numeric.empty())
        throw pexp4::ConfigError("unknown --numeric '" + o.numeric + "'");
    if (!o.availability.empty()) {
        pexp4::MobilityVariant v = pexp4::mobility_variant_from_string(o.availability);
        for (auto& d : sc.devices) d.variant = v;
    }
    sc.validate();
    return sc;
}

void print_summary(const pexp4::RunSummary& s) {
    std::cout << "scenario          " << s.scenario_name << "\n"
              << "runs              " << s.runs << "\n"
              << "median gain (GB)  " << s.median_gb << "\n"
              << "std gain (GB)     " << s.std_gb << "\n"
              << "mean regret       " << s.regret.regret << " (opt " << s.regret.opt_total
              << ", alg " << s.regret.alg_total << ")\n";
    if (!s.per_iteration_mean_distance.empty())
        std::cout << "distance-to-opt   first iter " << s.per_iteration_mean_distance.front()
                  << "%, last iter " << s.per_iteration_mean_distance.back() << "%\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic EXP4 wireless network selection simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    std::string run_policy = "periodic_exp4";
    CLI::App* run_cmd = app.add_subcommand("run", "run one scenario over seeded runs");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--policy", run_policy,
                        "policy for all devices: periodic_exp4 | exp3 | optimal_random | uniform_random");

    CommonOpts cmp_opts;
    std::vector<std::string> cmp_policies = {"periodic_exp4", "exp3", "optimal_random"};
    CLI::App* cmp_cmd =
        app.add_subcommand("compare", "run several policies on common environment seeds");
    add_common(cmp_cmd, cmp_opts);
    cmp_cmd->add_option("--policies", cmp_policies, "policies to compare");

    std::string dump_name;
    CLI::App* list_cmd = app.add_subcommand("scenarios", "list builtin scenarios");
    list_cmd->add_option("--dump", dump_name, "print a builtin scenario as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            if (dump_name.empty()) {
                for (const auto& n : pexp4::builtin_scenario_names()) std::cout << n << "\n";
            } else {
                std::cout << pexp4::scenario_to_json(pexp4::builtin_scenario(dump_name)).dump(2)
                          << "\n";
            }
            return 0;
        }
        if (run_cmd->parsed()) {
            pexp4::Scenario sc = make_scenario(run_opts);
            pexp4::PolicyKind kind = pexp4::policy_kind_from_string(run_policy);
            for (auto& d : sc.devices) d.policy = kind;
            pexp4::RunSummary s = pexp4::run_experiment(sc, run_opts.runs, run_opts.seed,
                                                        run_opts.parallel, run_opts.out_dir);
            print_summary(s);
            return 0;
        }
        if (cmp_cmd->parsed()) {
            pexp4::Scenario sc = make_scenario(cmp_opts);
            std::vector<pexp4::PolicyKind> kinds;
            for (const auto& p : cmp_policies) kinds.push_back(pexp4::policy_kind_from_string(p));
            pexp4::PolicyComparison cmp = pexp4::compare_policies(
                sc, kinds, cmp_opts.runs, cmp_opts.seed, cmp_opts.parallel, cmp_opts.out_dir);
            for (std::size_t p = 0; p < kinds.size(); ++p) {
                std::cout << pexp4::to_string(kinds[p]) << ": first iter "
                          << cmp.distance_by_iteration[p].front() << "%, last iter "
                          << cmp.distance_by_iteration[p].back() << "%\n";
            }
            return 0;
        }
    } catch (const pexp4::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

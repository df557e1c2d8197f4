#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pexp4/netsim.hpp"
#include "pexp4/regret.hpp"
#include "pexp4/scenario.hpp"

namespace pexp4 {

inline constexpr double slot_seconds = 60.0;
inline constexpr const char* step_csv_format_version = "pexp4-steps/1";

inline double mbps_slots_to_gb(double mbps_slots) {
    return mbps_slots * slot_seconds / 8000.0;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double stddev(const std::vector<double>& xs) {
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace detail

inline std::string step_csv_header(int num_devices, int num_networks) {
    std::string h = "slot,iteration";
    for (int d = 0; d < num_devices; ++d)
        h += ",dev" + std::to_string(d + 1) + "_choice,dev" + std::to_string(d + 1) + "_gain";
    h += ",min_rate,opt_min,distance_pct";
    for (int j = 0; j < num_networks; ++j) h += ",net" + std::to_string(j + 1) + "_prob";
    return h;
}

inline void write_step_csv(std::ostream& os, const SimResult& result) {
    if (result.records.empty()) return;
    int num_devices = static_cast<int>(result.records.front().choice.size());
    int num_networks = static_cast<int>(result.records.front().combined_prob.size());
    os << step_csv_header(num_devices, num_networks) << "\n";
    for (const auto& r : result.records) {
        os << r.slot << "," << r.iteration;
        for (int d = 0; d < num_devices; ++d)
            os << "," << r.choice[static_cast<std::size_t>(d)] + 1 << ","
               << detail::fmt(r.gain[static_cast<std::size_t>(d)]);
        os << "," << detail::fmt(r.min_rate) << "," << detail::fmt(r.opt_min) << ","
           << detail::fmt(r.distance_pct);
        for (int j = 0; j < num_networks; ++j)
            os << "," << detail::fmt(r.combined_prob[static_cast<std::size_t>(j)]);
        os << "\n";
    }
}

// What a device would have earned on each network each slot, had it alone
// switched: realized client counts with the device's own pick removed.
// Networks unavailable to the device earn zero, matching the vanilla rule.
inline RewardMatrix counterfactual_rewards(const Scenario& sc, const SimResult& result,
                                           int device) {
    long horizon = static_cast<long>(result.records.size());
    double scale = sc.effective_reward_scale();
    std::vector<int> phase_of_slot(static_cast<std::size_t>(sc.iteration_length), -1);
    for (std::size_t p = 0; p < sc.phases.size(); ++p)
        for (long s = sc.phases[p].first_slot; s <= sc.phases[p].last_slot; ++s)
            phase_of_slot[static_cast<std::size_t>(s - 1)] = static_cast<int>(p);

    RewardMatrix rm;
    rm.values.assign(static_cast<std::size_t>(sc.num_networks()),
                     std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
    for (long t = 1; t <= horizon; ++t) {
        const auto& rec = result.records[static_cast<std::size_t>(t - 1)];
        long slot_in_iter = (t - 1) % sc.iteration_length;
        int phase_idx = phase_of_slot[static_cast<std::size_t>(slot_in_iter)];
        const Phase* phase = phase_idx >= 0 ? &sc.phases[static_cast<std::size_t>(phase_idx)] : nullptr;
        std::vector<char> mask = detail::phase_mask(sc, phase, device);
        int own = rec.choice[static_cast<std::size_t>(device)];
        bool own_counted = mask[static_cast<std::size_t>(own)];
        for (int j = 0; j < sc.num_networks(); ++j) {
            if (!mask[static_cast<std::size_t>(j)]) continue;
            int others = result.client_counts[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(j)];
            if (own_counted && own == j) --others;
            double gain = result.bandwidth[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(j)] /
                          static_cast<double>(others + 1);
            rm.values[static_cast<std::size_t>(j)][static_cast<std::size_t>(t - 1)] =
                std::clamp(gain / scale, 0.0, 1.0);
        }
    }
    return rm;
}

struct RunSummary {
    std::string scenario_name;
    int runs = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> run_seeds;
    std::vector<std::vector<double>> cumulative_gb;   // [run][device]
    double median_gb = 0.0;
    double std_gb = 0.0;                              // across devices and runs
    std::vector<double> per_iteration_mean_distance;  // mean over slots and runs
    RegretReport regret;                              // mean over devices and runs
};

inline nlohmann::ordered_json summary_to_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["scenario"] = s.scenario_name;
    j["runs"] = s.runs;
    j["master_seed"] = s.master_seed;
    j["run_seeds"] = s.run_seeds;
    j["cumulative_gb"] = s.cumulative_gb;
    j["median_gb"] = s.median_gb;
    j["std_gb"] = s.std_gb;
    j["per_iteration_mean_distance"] = s.per_iteration_mean_distance;
    j["regret"] = {{"opt_total", s.regret.opt_total},
                   {"alg_total", s.regret.alg_total},
                   {"regret", s.regret.regret}};
    return j;
}

inline std::vector<double> per_iteration_mean_distance(const Scenario& sc,
                                                       const SimResult& result) {
    std::vector<double> out(static_cast<std::size_t>(sc.iterations), 0.0);
    for (const auto& r : result.records)
        out[static_cast<std::size_t>(r.iteration - 1)] +=
            r.distance_pct / static_cast<double>(sc.iteration_length);
    return out;
}

namespace detail {

template <typename Fn>
void parallel_runs(int runs, int parallelism, Fn&& body) {
    if (parallelism < 1) parallelism = 1;
    for (int start = 0; start < runs; start += parallelism) {
        std::vector<std::future<void>> batch;
        int end = std::min(runs, start + parallelism);
        for (int i = start; i < end; ++i)
            batch.push_back(std::async(std::launch::async, body, i));
        for (auto& f : batch) f.get();
    }
}

}  // namespace detail

// Executes `runs` seeded simulations, writes one CSV per run plus a summary
// JSON when out_dir is non-empty, and aggregates the results.
inline RunSummary run_experiment(const Scenario& sc, int runs, std::uint64_t master_seed,
                                 int parallelism = 1, const std::string& out_dir = "",
                                 std::uint64_t policy_salt = 0) {
    sc.validate();
    if (runs < 1) throw std::invalid_argument("run_experiment: runs must be >= 1");

    RunSummary summary;
    summary.scenario_name = sc.name;
    summary.runs = runs;
    summary.master_seed = master_seed;
    for (int i = 0; i < runs; ++i)
        summary.run_seeds.push_back(derive_seed(master_seed, static_cast<std::uint64_t>(i)));

    PartitionSet opt_set = sc.build_period_set();
    std::vector<SimResult> results(static_cast<std::size_t>(runs));
    detail::parallel_runs(runs, parallelism, [&](int i) {
        results[static_cast<std::size_t>(i)] =
            run_simulation(sc, summary.run_seeds[static_cast<std::size_t>(i)], policy_salt);
    });

    summary.per_iteration_mean_distance.assign(static_cast<std::size_t>(sc.iterations), 0.0);
    std::vector<double> all_gb;
    double regret_acc = 0.0, opt_acc = 0.0, alg_acc = 0.0;
    for (int i = 0; i < runs; ++i) {
        const SimResult& res = results[static_cast<std::size_t>(i)];
        std::vector<double> gb;
        for (double g : res.cumulative_gain) {
            gb.push_back(mbps_slots_to_gb(g));
            all_gb.push_back(gb.back());
        }
        summary.cumulative_gb.push_back(std::move(gb));
        std::vector<double> dist = per_iteration_mean_distance(sc, res);
        for (std::size_t it = 0; it < dist.size(); ++it)
            summary.per_iteration_mean_distance[it] += dist[it] / static_cast<double>(runs);
        for (int d = 0; d < sc.num_devices(); ++d) {
            RewardMatrix rm = counterfactual_rewards(sc, res, d);
            GeneralizedOpt opt = generalized_periodic_opt(opt_set, rm);
            RegretReport rep = regret_of_trace(opt.witness.total,
                                               res.reward_trace[static_cast<std::size_t>(d)]);
            double w = 1.0 / (static_cast<double>(runs) * sc.num_devices());
            regret_acc += rep.regret * w;
            opt_acc += rep.opt_total * w;
            alg_acc += rep.alg_total * w;
        }
    }
    summary.median_gb = detail::median(all_gb);
    summary.std_gb = detail::stddev(all_gb);
    summary.regret = {opt_acc, alg_acc, regret_acc};

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (int i = 0; i < runs; ++i) {
            std::ofstream csv(out_dir + "/run_" + std::to_string(i) + ".csv");
            csv << "# " << step_csv_format_version << "\n";
            write_step_csv(csv, results[static_cast<std::size_t>(i)]);
        }
        std::ofstream js(out_dir + "/summary.json");
        js << summary_to_json(summary).dump(2) << "\n";
    }
    return summary;
}

struct PolicyComparison {
    std::vector<PolicyKind> policies;
    std::vector<RunSummary> summaries;                       // aligned with policies
    std::vector<std::vector<double>> distance_by_iteration;  // [policy][iteration]
};

// Runs each policy on identical environment seeds (common random numbers for
// the environment generator; independent policy generators).
inline PolicyComparison compare_policies(Scenario sc, const std::vector<PolicyKind>& policies,
                                         int runs, std::uint64_t master_seed, int parallelism = 1,
                                         const std::string& out_dir = "") {
    PolicyComparison cmp;
    cmp.policies = policies;
    for (std::size_t p = 0; p < policies.size(); ++p) {
        for (auto& d : sc.devices) d.policy = policies[p];
        std::string sub_dir =
            out_dir.empty() ? "" : out_dir + "/" + to_string(policies[p]);
        RunSummary s = run_experiment(sc, runs, master_seed, parallelism, sub_dir,
                                      /*policy_salt=*/p + 1);
        cmp.distance_by_iteration.push_back(s.per_iteration_mean_distance);
        cmp.summaries.push_back(std::move(s));
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/compare.csv");
        csv << "iteration";
        for (auto p : policies) csv << "," << to_string(p);
        csv << "\n";
        for (int it = 0; it < sc.iterations; ++it) {
            csv << it + 1;
            for (std::size_t p = 0; p < policies.size(); ++p)
                csv << "," << detail::fmt(cmp.distance_by_iteration[p][static_cast<std::size_t>(it)]);
            csv << "\n";
        }
    }
    return cmp;
}

}  // namespace pexp4

// End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
// process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pexp4/exp3.hpp"
#include "pexp4/maxmin.hpp"
#include "pexp4/netsim.hpp"
#include "pexp4/numeric.hpp"
#include "pexp4/partition.hpp"
#include "pexp4/periodic_exp4.hpp"
#include "pexp4/policy.hpp"
#include "pexp4/reference_exp4.hpp"
#include "pexp4/regret.hpp"
#include "pexp4/runner.hpp"
#include "pexp4/scenario.hpp"

using namespace pexp4;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

PartitionFunction random_partition(std::mt19937_64& rng, long horizon, int max_labels) {
    std::vector<int> raw(static_cast<std::size_t>(horizon));
    for (auto& l : raw) l = static_cast<int>(rng() % static_cast<unsigned>(max_labels)) + 1;
    return PartitionFunction::from_labels(raw);
}

// 1. The aggregate-form learner must be numerically indistinguishable from
// EXP4 run over the fully enumerated expert set.
Outcome check_oracle_equivalence() {
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int trace = 0; trace < 50; ++trace) {
        int k = 2 + static_cast<int>(rng() % 2);
        long horizon = 20;
        std::vector<PartitionFunction> fs;
        int count = 2 + static_cast<int>(rng() % 2);
        for (int f = 0; f < count; ++f) fs.push_back(random_partition(rng, horizon, 3));
        PartitionSet set(std::move(fs));

        PolicyConfig cfg;
        cfg.num_arms = k;
        cfg.variant = Variant::corrected;
        cfg.numeric_mode = NumericMode::exact_logsumexp;
        cfg.gamma.fixed = 0.3;

        PeriodicExp4 fast(set, cfg);
        ReferenceExp4 slow(set, cfg);
        for (long t = 1; t <= horizon; ++t) {
            ArmDistribution a = fast.distribution();
            ArmDistribution b = slow.distribution();
            for (int i = 0; i < k; ++i)
                worst = std::max(worst, std::abs(a.probs[static_cast<std::size_t>(i)] -
                                                 b.probs[static_cast<std::size_t>(i)]));
            int arm = static_cast<int>(rng() % static_cast<unsigned>(k));
            double reward = uniform01(rng);
            fast.update(arm, reward);
            slow.update(arm, reward);
        }
    }
    double elapsed = seconds_since(start);
    Outcome out;
    out.ok = worst <= 1e-9 && elapsed < 5.0;
    out.detail = "max |dp| " + num(worst) + ", " + num(elapsed) + "s";
    return out;
}

// 2. With the single trivial partition the learner must collapse to plain
// EXP3; compare against an independent direct implementation.
Outcome check_exp3_reduction() {
    std::mt19937_64 rng(202);
    const int k = 3;
    const long horizon = 200;
    double worst = 0.0;
    for (int trace = 0; trace < 20; ++trace) {
        PolicyConfig cfg;
        cfg.num_arms = k;
        Exp3 wrapped(cfg, horizon);
        std::vector<double> log_w(k, 0.0);
        for (long t = 1; t <= horizon; ++t) {
            ArmDistribution a = wrapped.distribution();
            double norm = log_sum_exp(log_w);
            for (int i = 0; i < k; ++i)
                worst = std::max(worst, std::abs(a.probs[static_cast<std::size_t>(i)] -
                                                 std::exp(log_w[static_cast<std::size_t>(i)] - norm)));
            int arm = sample_arm(a, rng);
            double reward = uniform01(rng);
            double p = a.probs[static_cast<std::size_t>(arm)];
            wrapped.update(arm, reward);
            log_w[static_cast<std::size_t>(arm)] += cfg.gamma.at(t) / k * reward / p;
        }
    }
    Outcome out;
    out.ok = worst <= 1e-12;
    out.detail = "max |dp| " + num(worst);
    return out;
}

// 3. Maintained running aggregates must track their from-scratch recomputation
// over a long update stream, and the naive product form must agree with them.
Outcome check_aggregate_consistency() {
    std::mt19937_64 rng(303);
    const long horizon = 10000;
    const int k = 4;
    std::vector<PartitionFunction> fs;
    for (int tau = 1; tau <= 6; ++tau) fs.push_back(PartitionFunction::modular(tau, horizon));
    PartitionSet set(std::move(fs));
    PolicyConfig cfg;
    cfg.num_arms = k;
    cfg.variant = Variant::corrected;
    PeriodicExp4 learner(set, cfg);

    double worst_rel = 0.0, worst_prob = 0.0;
    for (long t = 1; t <= horizon; ++t) {
        ArmDistribution dist = learner.distribution();
        if (t % 1000 == 0 || t == horizon) {
            for (std::size_t f = 0; f < set.size(); ++f) {
                for (int l = 1; l <= set[f].num_labels(); ++l) {
                    double a = learner.log_s(f, l), b = learner.recompute_log_s(f, l);
                    worst_rel = std::max(worst_rel, std::abs(a - b) / std::max(1.0, std::abs(b)));
                }
                double a = learner.log_b_aggregate(f), b = learner.recompute_log_b_aggregate(f);
                worst_rel = std::max(worst_rel, std::abs(a - b) / std::max(1.0, std::abs(b)));
            }
            ArmDistribution naive = normalize_scores(learner.scores_naive(), 0.0);
            for (int i = 0; i < k; ++i)
                worst_prob = std::max(worst_prob, std::abs(dist.probs[static_cast<std::size_t>(i)] -
                                                           naive.probs[static_cast<std::size_t>(i)]));
        }
        int arm = sample_arm(dist, rng);
        learner.update(arm, uniform01(rng));
    }
    Outcome out;
    out.ok = worst_rel <= 1e-9 && worst_prob <= 1e-9;
    out.detail = "aggregate rel err " + num(worst_rel) + ", naive |dp| " + num(worst_prob);
    return out;
}

// 4. On a strictly alternating two-arm stream the periodic learner must lock
// onto the pattern while EXP3, blind to time, stays near chance level.
Outcome check_alternating_toy() {
    auto start = std::chrono::steady_clock::now();
    const long horizon = 5000;
    const int seeds = 20;
    double periodic_mean = 0.0, exp3_mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
        std::mt19937_64 rng(derive_seed(4000, static_cast<std::uint64_t>(s)));
        PolicyConfig cfg;
        cfg.num_arms = 2;
        PartitionSet set({PartitionFunction::modular(1, horizon),
                          PartitionFunction::modular(2, horizon)});
        PeriodicExp4 periodic(set, cfg);
        Exp3 flat(cfg, horizon);
        double tail_p = 0.0, tail_e = 0.0;
        for (long t = 1; t <= horizon; ++t) {
            int good = t % 2 == 1 ? 0 : 1;
            ArmDistribution dp = periodic.distribution();
            int ap = sample_arm(dp, rng);
            double rp = ap == good ? 1.0 : 0.0;
            periodic.update(ap, rp);
            ArmDistribution de = flat.distribution();
            int ae = sample_arm(de, rng);
            double re = ae == good ? 1.0 : 0.0;
            flat.update(ae, re);
            if (t > horizon - 1000) {
                tail_p += rp;
                tail_e += re;
            }
        }
        periodic_mean += tail_p / 1000.0 / seeds;
        exp3_mean += tail_e / 1000.0 / seeds;
    }
    double elapsed = seconds_since(start);
    Outcome out;
    out.ok = periodic_mean >= 0.9 && exp3_mean <= 0.6 && elapsed < 30.0;
    out.detail = "periodic tail reward " + num(periodic_mean) + ", exp3 " + num(exp3_mean) +
                 ", " + num(elapsed) + "s";
    return out;
}

// 5. The flow-based max-min rate must match exhaustive assignment search.
Outcome check_maxmin_against_exhaustive() {
    std::mt19937_64 rng(505);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        int num_networks = 2 + static_cast<int>(rng() % 3);
        int num_devices = 1 + static_cast<int>(rng() % 6);
        std::vector<double> bw(static_cast<std::size_t>(num_networks));
        for (auto& b : bw) b = 1.0 + 20.0 * uniform01(rng);
        std::vector<std::vector<char>> masks(static_cast<std::size_t>(num_devices));
        for (auto& m : masks) {
            m.assign(static_cast<std::size_t>(num_networks), 0);
            bool any = false;
            for (auto& a : m) {
                a = rng() % 2 ? 1 : 0;
                any = any || a;
            }
            if (!any) m[rng() % static_cast<unsigned>(num_networks)] = 1;
        }

        std::vector<AvailabilityGroup> groups;
        for (const auto& m : masks) {
            bool merged = false;
            for (auto& g : groups)
                if (g.networks == m) {
                    ++g.device_count;
                    merged = true;
                }
            if (!merged) groups.push_back({m, 1});
        }

        // Exhaustive search over all device-to-network assignments.
        std::vector<int> assignment(static_cast<std::size_t>(num_devices), 0);
        double best = 0.0;
        while (true) {
            bool valid = true;
            for (int d = 0; d < num_devices && valid; ++d)
                valid = masks[static_cast<std::size_t>(d)]
                             [static_cast<std::size_t>(assignment[static_cast<std::size_t>(d)])] != 0;
            if (valid) {
                std::vector<int> counts(static_cast<std::size_t>(num_networks), 0);
                for (int a : assignment) ++counts[static_cast<std::size_t>(a)];
                double worst_rate = std::numeric_limits<double>::infinity();
                for (int d = 0; d < num_devices; ++d) {
                    int j = assignment[static_cast<std::size_t>(d)];
                    worst_rate = std::min(worst_rate, bw[static_cast<std::size_t>(j)] /
                                                          counts[static_cast<std::size_t>(j)]);
                }
                best = std::max(best, worst_rate);
            }
            int d = 0;
            while (d < num_devices &&
                   ++assignment[static_cast<std::size_t>(d)] == num_networks) {
                assignment[static_cast<std::size_t>(d)] = 0;
                ++d;
            }
            if (d == num_devices) break;
        }

        double got = optimal_min_rate(bw, groups);
        worst = std::max(worst, std::abs(got - best) / std::max(1.0, best));
    }
    Outcome out;
    out.ok = worst <= 1e-9;
    out.detail = "max rel err " + num(worst);
    return out;
}

// 6. Bandwidth-proportional sampling and the distance metric are exact on
// their defining examples.
Outcome check_baseline_formulas() {
    std::vector<char> all = {1, 1, 1};
    ArmDistribution d = optimal_random_distribution({4.0, 10.0, 6.0}, all);
    bool probs_ok = d.probs == std::vector<double>{0.2, 0.5, 0.3};
    double distance = 100.0 * (5.0 - 3.0) / 5.0;
    bool dist_ok = distance == 40.0;
    Outcome out;
    out.ok = probs_ok && dist_ok;
    out.detail = std::string("probs ") + (probs_ok ? "exact" : "off") + ", distance " +
                 num(distance) + "%";
    return out;
}

struct ComparisonCache {
    bool ran = false;
    bool failed = false;
    std::string error;
    PolicyComparison cmp;
    double elapsed = 0.0;
};

ComparisonCache& discrete_comparison() {
    static ComparisonCache cache;
    if (!cache.ran) {
        cache.ran = true;
        try {
            auto start = std::chrono::steady_clock::now();
            Scenario sc = builtin_scenario("discrete");
            sc.iterations = 20;
            cache.cmp = compare_policies(sc, {PolicyKind::periodic_exp4, PolicyKind::exp3}, 5, 7);
            cache.elapsed = seconds_since(start);
        } catch (const std::exception& e) {
            cache.failed = true;
            cache.error = e.what();
        }
    }
    return cache;
}

// 7. In the shared-network game the periodic learner must close most of the
// gap to the per-slot optimum and end ahead of EXP3.
Outcome check_discrete_convergence() {
    ComparisonCache& cache = discrete_comparison();
    Outcome out;
    if (cache.failed) {
        out.detail = cache.error;
        return out;
    }
    const auto& periodic = cache.cmp.distance_by_iteration[0];
    const auto& exp3 = cache.cmp.distance_by_iteration[1];
    double first = periodic.front(), last = periodic.back();
    out.ok = last <= 0.5 * first && last < exp3.back() && cache.elapsed < 600.0;
    out.detail = "distance " + num(first) + "% -> " + num(last) + "%, exp3 final " +
                 num(exp3.back()) + "%, " + num(cache.elapsed) + "s";
    return out;
}

// 8. The periodic learner must also spread throughput more evenly across
// devices than EXP3 does.
Outcome check_fairness() {
    ComparisonCache& cache = discrete_comparison();
    Outcome out;
    if (cache.failed) {
        out.detail = cache.error;
        return out;
    }
    double periodic_std = cache.cmp.summaries[0].std_gb;
    double exp3_std = cache.cmp.summaries[1].std_gb;
    out.ok = periodic_std < exp3_std;
    out.detail = "per-device GB std " + num(periodic_std) + " vs " + num(exp3_std);
    return out;
}

// 9. Realized regret against the best periodic strategy must stay within a
// sqrt(T)-type envelope on random reward tables.
Outcome check_regret_envelope() {
    const int k = 3, max_period = 4;
    const long horizon = 4000;
    std::vector<PartitionFunction> fs;
    for (int tau = 1; tau <= max_period; ++tau)
        fs.push_back(PartitionFunction::modular(tau, horizon));
    PartitionSet set(std::move(fs));
    double bound = 10.0 * std::sqrt(max_period * k * horizon * std::log(k) +
                                    k * horizon * std::log(static_cast<double>(set.size())));
    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        std::mt19937_64 rng(derive_seed(9000, static_cast<std::uint64_t>(instance)));
        RewardMatrix rm;
        rm.values.assign(k, std::vector<double>(static_cast<std::size_t>(horizon)));
        if (instance % 2 == 0) {
            for (auto& row : rm.values)
                for (auto& v : row) v = uniform01(rng);
        } else {
            // Periodic structure with a random favoured arm per phase.
            int tau = 2 + instance % 3;
            std::vector<int> fav(static_cast<std::size_t>(tau));
            for (auto& a : fav) a = static_cast<int>(rng() % k);
            for (long t = 1; t <= horizon; ++t)
                for (int i = 0; i < k; ++i)
                    rm.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - 1)] =
                        i == fav[static_cast<std::size_t>((t - 1) % tau)] ? 1.0 : 0.2;
        }

        PolicyConfig cfg;
        cfg.num_arms = k;
        cfg.variant = Variant::corrected;
        PeriodicExp4 learner(set, cfg);
        double total = 0.0;
        for (long t = 1; t <= horizon; ++t) {
            ArmDistribution dist = learner.distribution();
            int arm = sample_arm(dist, rng);
            double reward = rm.at(arm, t);
            total += reward;
            learner.update(arm, reward);
        }
        double opt = generalized_periodic_opt(set, rm).witness.total;
        worst = std::max(worst, opt - total);
    }
    Outcome out;
    out.ok = worst <= bound;
    out.detail = "max regret " + num(worst) + " vs bound " + num(bound);
    return out;
}

// 10. Restricting sampling to currently available networks must help early
// and wash out once the learner adapts.
Outcome check_mobility_variants() {
    Scenario vanilla = builtin_scenario("mobility");
    vanilla.iterations = 10;
    Scenario aware = vanilla;
    for (auto& d : aware.devices) d.variant = MobilityVariant::availability_aware;
    RunSummary sv = run_experiment(vanilla, 5, 13);
    RunSummary sa = run_experiment(aware, 5, 13);
    double v_first = sv.per_iteration_mean_distance.front();
    double a_first = sa.per_iteration_mean_distance.front();
    double v_last = sv.per_iteration_mean_distance.back();
    double a_last = sa.per_iteration_mean_distance.back();
    Outcome out;
    out.ok = a_first < v_first && std::abs(v_last - a_last) <= 5.0;
    out.detail = "iter1 " + num(v_first) + "% vs " + num(a_first) + "%, final " + num(v_last) +
                 "% vs " + num(a_last) + "%";
    return out;
}

// 11. Repeated runs with identical inputs must produce byte-identical output
// files, noise included.
Outcome check_determinism() {
    Scenario sc = builtin_scenario("noisy_discrete");
    sc.iterations = 2;
    fs::path base = fs::temp_directory_path() / "pexp4_acceptance";
    fs::remove_all(base);
    fs::path a = base / "a", b = base / "b";
    run_experiment(sc, 2, 21, 2, a.string());
    run_experiment(sc, 2, 21, 1, b.string());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool ok = true;
    for (const char* file : {"run_0.csv", "run_1.csv", "summary.json"}) {
        std::string left = slurp(a / file);
        ok = ok && !left.empty() && left == slurp(b / file);
    }
    fs::remove_all(base);
    Outcome out;
    out.ok = ok;
    out.detail = ok ? "CSV and JSON byte-identical" : "outputs differ";
    return out;
}

}  // namespace

int main() {
    struct Check {
        const char* label;
        std::function<Outcome()> fn;
    };
    const std::vector<Check> checks = {
        {"optimized learner matches the expert-enumeration oracle", check_oracle_equivalence},
        {"trivial partition set reduces to plain EXP3", check_exp3_reduction},
        {"running aggregates stay consistent over long streams", check_aggregate_consistency},
        {"periodic learner beats EXP3 on the alternating toy", check_alternating_toy},
        {"max-min rate matches exhaustive assignment search", check_maxmin_against_exhaustive},
        {"baseline distribution and distance formulas are exact", check_baseline_formulas},
        {"learner converges toward the optimum in the shared game", check_discrete_convergence},
        {"learner shares throughput more fairly than EXP3", check_fairness},
        {"regret stays within the sqrt(T) envelope", check_regret_envelope},
        {"availability-aware sampling helps early, then washes out", check_mobility_variants},
        {"identical inputs give byte-identical outputs", check_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        Outcome out;
        try {
            out = checks[i].fn();
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %2zu %s (%s)\n", out.ok ? "PASS" : "FAIL", i + 1, checks[i].label,
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.ok) ++failures;
    }
    if (failures > 0) std::printf("%d of %zu checks failed\n", failures, checks.size());
    return failures == 0 ? 0 : 1;
}

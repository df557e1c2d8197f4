#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pexp4/exp3.hpp"
#include "pexp4/maxmin.hpp"
#include "pexp4/numeric.hpp"
#include "pexp4/partition.hpp"
#include "pexp4/periodic_exp4.hpp"
#include "pexp4/policy.hpp"

namespace pexp4 {

// Data rate over one iteration, in Mbps; repeats every iteration.
struct NetworkProfile {
    std::string name;
    std::vector<double> curve;
    double noise_pct = 0.0;  // relative Gaussian noise, 0 = exact

    void validate(long iteration_length) const {
        if (static_cast<long>(curve.size()) != iteration_length)
            throw std::invalid_argument("network '" + name + "': curve length != iteration length");
        for (double b : curve)
            if (b < 0.0)
                throw std::invalid_argument("network '" + name + "': negative bandwidth");
        if (noise_pct < 0.0)
            throw std::invalid_argument("network '" + name + "': negative noise");
    }
};

// Curve value at the slot's position within the iteration, perturbed by
// multiplicative Gaussian noise and clamped at zero.
inline double bandwidth_at(const NetworkProfile& profile, long slot, std::mt19937_64& rng) {
    if (slot < 1) throw std::out_of_range("bandwidth_at: slot must be >= 1");
    long l = static_cast<long>(profile.curve.size());
    double base = profile.curve[static_cast<std::size_t>((slot - 1) % l)];
    if (profile.noise_pct == 0.0) return base;
    double z = standard_normal(rng);
    return base * std::max(0.0, 1.0 + profile.noise_pct * z);
}

enum class PolicyKind { periodic_exp4, exp3, optimal_random, uniform_random };
enum class MobilityVariant { vanilla, availability_aware };

struct DeviceSpec {
    PolicyKind policy = PolicyKind::periodic_exp4;
    MobilityVariant variant = MobilityVariant::vanilla;
};

// One availability phase within an iteration; slots are 1-based inclusive.
struct Phase {
    long first_slot = 1;
    long last_slot = 1;
    std::vector<std::vector<int>> available;  // [device] -> network indices
};

struct PeriodSetSpec {
    PartitionStyle style = PartitionStyle::contiguous;
    int max_period = 24;
    std::vector<std::vector<int>> explicit_labels;  // overrides style/max_period when set
};

struct Scenario {
    std::string name;
    std::vector<NetworkProfile> networks;
    std::vector<DeviceSpec> devices;
    long iteration_length = 1440;
    int iterations = 60;
    PeriodSetSpec period_set;
    Variant variant = Variant::as_written;
    NumericMode numeric_mode = NumericMode::max_approx;
    GammaSchedule gamma;
    double mixing = 0.0;
    double reward_scale = 0.0;  // 0 selects the max of the noiseless curves

    long horizon() const { return iteration_length * iterations; }
    int num_networks() const { return static_cast<int>(networks.size()); }
    int num_devices() const { return static_cast<int>(devices.size()); }

    std::vector<Phase> phases;  // empty = every network always available

    double effective_reward_scale() const {
        if (reward_scale > 0.0) return reward_scale;
        double m = 0.0;
        for (const auto& n : networks)
            for (double b : n.curve) m = std::max(m, b);
        return m;
    }

    PartitionSet build_period_set() const {
        if (!period_set.explicit_labels.empty()) {
            std::vector<PartitionFunction> fs;
            for (const auto& labels : period_set.explicit_labels) {
                if (static_cast<long>(labels.size()) == iteration_length && horizon() != iteration_length) {
                    // One iteration's worth of labels, tiled over the horizon.
                    std::vector<int> full(static_cast<std::size_t>(horizon()));
                    for (long t = 0; t < horizon(); ++t)
                        full[static_cast<std::size_t>(t)] =
                            labels[static_cast<std::size_t>(t % iteration_length)];
                    fs.push_back(PartitionFunction::from_labels(std::move(full)));
                } else {
                    fs.push_back(PartitionFunction::from_labels(labels));
                }
            }
            return PartitionSet(std::move(fs));
        }
        return PartitionSet::period_range(period_set.max_period, iteration_length, horizon(),
                                          period_set.style);
    }

    void validate() const {
        if (networks.size() < 1) throw std::invalid_argument("scenario: no networks");
        if (devices.empty()) throw std::invalid_argument("scenario: no devices");
        if (iteration_length < 1) throw std::invalid_argument("scenario: iteration_length < 1");
        if (iterations < 1) throw std::invalid_argument("scenario: iterations < 1");
        if (period_set.explicit_labels.empty() && period_set.max_period > iteration_length)
            throw std::invalid_argument("scenario: period set max period > iteration length");
        for (const auto& n : networks) n.validate(iteration_length);
        gamma.validate();
        if (mixing < 0.0 || mixing >= 1.0) throw std::invalid_argument("scenario: bad mixing");
        if (reward_scale < 0.0) throw std::invalid_argument("scenario: negative reward scale");
        long covered = 0;
        for (const auto& ph : phases) {
            if (ph.first_slot != covered + 1 || ph.last_slot < ph.first_slot ||
                ph.last_slot > iteration_length)
                throw std::invalid_argument("scenario: phases must tile the iteration in order");
            if (static_cast<int>(ph.available.size()) != num_devices())
                throw std::invalid_argument("scenario: phase availability must list every device");
            for (std::size_t d = 0; d < ph.available.size(); ++d) {
                if (ph.available[d].empty() &&
                    devices[d].variant == MobilityVariant::availability_aware)
                    throw std::invalid_argument("scenario: aware device with empty phase");
                for (int j : ph.available[d])
                    if (j < 0 || j >= num_networks())
                        throw std::invalid_argument("scenario: phase references unknown network");
            }
            covered = ph.last_slot;
        }
        if (!phases.empty() && covered != iteration_length)
            throw std::invalid_argument("scenario: phases do not cover the iteration");
    }
};

// Per-slot simulation output row.
struct StepRecord {
    long slot = 0;
    int iteration = 0;
    std::vector<int> choice;         // per device, network index
    std::vector<double> gain;        // per device, Mbps
    double min_rate = 0.0;
    double opt_min = 0.0;
    double distance_pct = 0.0;
    std::vector<double> combined_prob;  // per network, mean over devices
    bool uniform_fallback = false;      // any device hit the degenerate restrict case
};

struct SimResult {
    std::vector<StepRecord> records;
    std::vector<double> cumulative_gain;            // per device, Mbps-slots
    std::vector<std::vector<double>> bandwidth;     // [t-1][network], post-noise
    std::vector<std::vector<int>> client_counts;    // [t-1][network]
    std::vector<std::vector<double>> reward_trace;  // [device][t-1], normalized
};

struct RoundOutcome {
    std::vector<double> gains;        // per device, Mbps
    std::vector<int> client_counts;   // per network
};

// Equal sharing among a round's clients: gain = bandwidth_j / n_j. Picks of
// unavailable networks earn 0 and do not count as clients.
inline RoundOutcome simulate_round(const std::vector<double>& bandwidths,
                                   const std::vector<int>& choices,
                                   const std::vector<std::vector<char>>& masks) {
    RoundOutcome out;
    out.client_counts.assign(bandwidths.size(), 0);
    out.gains.assign(choices.size(), 0.0);
    for (std::size_t d = 0; d < choices.size(); ++d) {
        int j = choices[d];
        if (j < 0 || j >= static_cast<int>(bandwidths.size()))
            throw std::out_of_range("simulate_round: network index out of range");
        if (masks[d][static_cast<std::size_t>(j)]) ++out.client_counts[static_cast<std::size_t>(j)];
    }
    for (std::size_t d = 0; d < choices.size(); ++d) {
        int j = choices[d];
        if (masks[d][static_cast<std::size_t>(j)])
            out.gains[d] = bandwidths[static_cast<std::size_t>(j)] /
                           out.client_counts[static_cast<std::size_t>(j)];
    }
    return out;
}

namespace detail {

struct DeviceRuntime {
    DeviceSpec spec;
    std::optional<PeriodicExp4> learner;
    std::mt19937_64 rng;
};

inline std::vector<char> phase_mask(const Scenario& sc, const Phase* phase, int device) {
    std::vector<char> mask(static_cast<std::size_t>(sc.num_networks()), 1);
    if (phase) {
        std::fill(mask.begin(), mask.end(), 0);
        for (int j : phase->available[static_cast<std::size_t>(device)])
            mask[static_cast<std::size_t>(j)] = 1;
    }
    return mask;
}

}  // namespace detail

// Lock-step deterministic simulation: one distribution/sample/share/update
// round per slot. Identical (scenario, seed, policy_salt) triples produce
// identical output. The environment generator depends on the seed only, so
// runs with different salts see common random numbers for the environment
// but independent policy sampling streams.
inline SimResult run_simulation(const Scenario& sc, std::uint64_t seed,
                                std::uint64_t policy_salt = 0) {
    sc.validate();
    const int num_networks = sc.num_networks();
    const int num_devices = sc.num_devices();
    const long horizon = sc.horizon();
    const double scale = sc.effective_reward_scale();
    if (scale <= 0.0)
        throw std::invalid_argument("scenario: reward scale resolves to zero");

    std::mt19937_64 env_rng(derive_seed(seed, 0));

    std::optional<PartitionSet> period_set;
    bool needs_learner = false;
    for (const auto& d : sc.devices)
        needs_learner = needs_learner || d.policy == PolicyKind::periodic_exp4;
    if (needs_learner) period_set = sc.build_period_set();

    std::vector<detail::DeviceRuntime> devs;
    devs.reserve(static_cast<std::size_t>(num_devices));
    for (int d = 0; d < num_devices; ++d) {
        detail::DeviceRuntime rt;
        rt.spec = sc.devices[static_cast<std::size_t>(d)];
        rt.rng.seed(derive_seed(seed, (policy_salt << 20) + static_cast<std::uint64_t>(d) + 1));
        PolicyConfig cfg;
        cfg.num_arms = num_networks;
        cfg.gamma = sc.gamma;
        cfg.variant = sc.variant;
        cfg.numeric_mode = sc.numeric_mode;
        cfg.mixing = sc.mixing;
        if (rt.spec.policy == PolicyKind::periodic_exp4)
            rt.learner.emplace(*period_set, cfg);
        else if (rt.spec.policy == PolicyKind::exp3)
            rt.learner.emplace(
                PartitionSet({PartitionFunction::from_labels(
                    std::vector<int>(static_cast<std::size_t>(horizon), 1))}),
                cfg);
        devs.push_back(std::move(rt));
    }

    // Phase lookup per slot-in-iteration (index into sc.phases, -1 = none).
    std::vector<int> phase_of_slot(static_cast<std::size_t>(sc.iteration_length), -1);
    for (std::size_t p = 0; p < sc.phases.size(); ++p)
        for (long s = sc.phases[p].first_slot; s <= sc.phases[p].last_slot; ++s)
            phase_of_slot[static_cast<std::size_t>(s - 1)] = static_cast<int>(p);

    bool noiseless = true;
    for (const auto& n : sc.networks) noiseless = noiseless && n.noise_pct == 0.0;
    std::vector<double> opt_cache(static_cast<std::size_t>(sc.iteration_length), -1.0);

    SimResult result;
    result.records.reserve(static_cast<std::size_t>(horizon));
    result.cumulative_gain.assign(static_cast<std::size_t>(num_devices), 0.0);
    result.bandwidth.reserve(static_cast<std::size_t>(horizon));
    result.client_counts.reserve(static_cast<std::size_t>(horizon));
    result.reward_trace.assign(static_cast<std::size_t>(num_devices), {});
    for (auto& tr : result.reward_trace) tr.reserve(static_cast<std::size_t>(horizon));

    std::vector<ArmDistribution> played(static_cast<std::size_t>(num_devices));

    for (long t = 1; t <= horizon; ++t) {
        long slot_in_iter = (t - 1) % sc.iteration_length;
        int phase_idx = phase_of_slot[static_cast<std::size_t>(slot_in_iter)];
        const Phase* phase = phase_idx >= 0 ? &sc.phases[static_cast<std::size_t>(phase_idx)] : nullptr;

        // One true rate per network per slot, shared by all devices.
        std::vector<double> bw(static_cast<std::size_t>(num_networks));
        for (int j = 0; j < num_networks; ++j)
            bw[static_cast<std::size_t>(j)] =
                bandwidth_at(sc.networks[static_cast<std::size_t>(j)], t, env_rng);

        StepRecord rec;
        rec.slot = t;
        rec.iteration = static_cast<int>((t - 1) / sc.iteration_length) + 1;
        rec.choice.resize(static_cast<std::size_t>(num_devices));
        rec.gain.resize(static_cast<std::size_t>(num_devices));
        rec.combined_prob.assign(static_cast<std::size_t>(num_networks), 0.0);

        std::vector<std::vector<char>> masks(static_cast<std::size_t>(num_devices));
        for (int d = 0; d < num_devices; ++d)
            masks[static_cast<std::size_t>(d)] = detail::phase_mask(sc, phase, d);

        for (int d = 0; d < num_devices; ++d) {
            auto& rt = devs[static_cast<std::size_t>(d)];
            const auto& mask = masks[static_cast<std::size_t>(d)];
            ArmDistribution dist;
            switch (rt.spec.policy) {
                case PolicyKind::periodic_exp4:
                case PolicyKind::exp3: {
                    ArmDistribution raw = rt.learner->distribution();
                    if (rt.spec.variant == MobilityVariant::availability_aware) {
                        RestrictedDistribution rr = restrict_to_available(raw, mask);
                        rec.uniform_fallback = rec.uniform_fallback || rr.uniform_fallback;
                        dist = std::move(rr.dist);
                    } else {
                        dist = std::move(raw);
                    }
                    break;
                }
                case PolicyKind::optimal_random: {
                    double total = 0.0;
                    for (int j = 0; j < num_networks; ++j)
                        if (mask[static_cast<std::size_t>(j)]) total += bw[static_cast<std::size_t>(j)];
                    if (total > 0.0) {
                        dist = optimal_random_distribution(bw, mask);
                    } else {
                        ArmDistribution flat;
                        flat.probs.assign(static_cast<std::size_t>(num_networks), 1.0);
                        flat.scores.assign(static_cast<std::size_t>(num_networks), 0.0);
                        RestrictedDistribution rr = restrict_to_available(flat, mask);
                        dist = std::move(rr.dist);
                        rec.uniform_fallback = true;
                    }
                    break;
                }
                case PolicyKind::uniform_random: {
                    ArmDistribution flat;
                    flat.probs.assign(static_cast<std::size_t>(num_networks),
                                      1.0 / num_networks);
                    flat.scores.assign(static_cast<std::size_t>(num_networks),
                                       -std::log(static_cast<double>(num_networks)));
                    if (rt.spec.variant == MobilityVariant::availability_aware)
                        dist = restrict_to_available(flat, mask).dist;
                    else
                        dist = std::move(flat);
                    break;
                }
            }
            int arm = sample_arm(dist, rt.rng);
            rec.choice[static_cast<std::size_t>(d)] = arm;
            for (int j = 0; j < num_networks; ++j)
                rec.combined_prob[static_cast<std::size_t>(j)] +=
                    dist.probs[static_cast<std::size_t>(j)] / num_devices;
            played[static_cast<std::size_t>(d)] = std::move(dist);
        }

        RoundOutcome round = simulate_round(bw, rec.choice, masks);
        std::vector<int> counts = std::move(round.client_counts);
        double min_rate = std::numeric_limits<double>::infinity();
        for (int d = 0; d < num_devices; ++d) {
            double gain = round.gains[static_cast<std::size_t>(d)];
            rec.gain[static_cast<std::size_t>(d)] = gain;
            result.cumulative_gain[static_cast<std::size_t>(d)] += gain;
            min_rate = std::min(min_rate, gain);

            auto& rt = devs[static_cast<std::size_t>(d)];
            double reward = std::clamp(gain / scale, 0.0, 1.0);
            result.reward_trace[static_cast<std::size_t>(d)].push_back(reward);
            if (rt.learner) {
                // Importance weight uses the distribution actually sampled from.
                rt.learner->update(rec.choice[static_cast<std::size_t>(d)], reward);
            }
        }
        rec.min_rate = min_rate;

        double opt = -1.0;
        if (noiseless && opt_cache[static_cast<std::size_t>(slot_in_iter)] >= 0.0)
            opt = opt_cache[static_cast<std::size_t>(slot_in_iter)];
        if (opt < 0.0) {
            std::vector<AvailabilityGroup> groups;
            for (int d = 0; d < num_devices; ++d) {
                bool merged = false;
                for (auto& g : groups)
                    if (g.networks == masks[static_cast<std::size_t>(d)]) {
                        ++g.device_count;
                        merged = true;
                        break;
                    }
                if (!merged) groups.push_back({masks[static_cast<std::size_t>(d)], 1});
            }
            opt = optimal_min_rate(bw, groups);
            if (noiseless) opt_cache[static_cast<std::size_t>(slot_in_iter)] = opt;
        }
        rec.opt_min = opt;
        rec.distance_pct = opt > 0.0 ? std::max(0.0, 100.0 * (opt - min_rate) / opt) : 0.0;

        result.bandwidth.push_back(std::move(bw));
        result.client_counts.push_back(std::move(counts));
        result.records.push_back(std::move(rec));
    }
    return result;
}

// Per-slot per-network means of the devices' pre-sampling distributions.
inline std::vector<std::vector<double>> combined_probabilities(
    const std::vector<StepRecord>& records) {
    std::vector<std::vector<double>> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.combined_prob);
    return out;
}

}  // namespace pexp4

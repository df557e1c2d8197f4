#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "pexp4/numeric.hpp"

namespace pexp4 {

enum class Variant { as_written, corrected };
enum class NumericMode { exact_logsumexp, max_approx };

// Learning rate schedule: either a fixed value or gamma(t) = t^(-exponent).
struct GammaSchedule {
    double fixed = 0.0;      // > 0 selects the fixed schedule
    double exponent = 0.1;   // used when fixed == 0

    double at(long t) const {
        if (fixed > 0.0) return fixed;
        return std::pow(static_cast<double>(t), -exponent);
    }

    void validate() const {
        if (fixed < 0.0 || fixed > 1.0)
            throw std::invalid_argument("gamma: fixed value must be in (0,1]");
        if (fixed == 0.0 && exponent < 0.0)
            throw std::invalid_argument("gamma: exponent must be >= 0");
    }
};

struct PolicyConfig {
    int num_arms = 2;
    GammaSchedule gamma;
    Variant variant = Variant::as_written;
    NumericMode numeric_mode = NumericMode::exact_logsumexp;
    double mixing = 0.0;  // uniform-exploration weight, 0 = none

    void validate() const {
        if (num_arms < 2)
            throw std::invalid_argument("policy config: need at least 2 arms");
        gamma.validate();
        if (mixing < 0.0 || mixing >= 1.0)
            throw std::invalid_argument("policy config: mixing must be in [0,1)");
    }
};

// Probabilities over arms plus the log-domain scores they were derived from.
struct ArmDistribution {
    std::vector<double> probs;
    std::vector<double> scores;

    std::size_t num_arms() const { return probs.size(); }
};

inline ArmDistribution normalize_scores(std::vector<double> scores, double mixing) {
    double norm = log_sum_exp(scores);
    std::vector<double> probs(scores.size());
    int k = static_cast<int>(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        probs[i] = std::exp(scores[i] - norm);
        if (mixing > 0.0) probs[i] = (1.0 - mixing) * probs[i] + mixing / k;
    }
    return ArmDistribution{std::move(probs), std::move(scores)};
}

// Inverse-CDF sampling over the cumulative vector in arm-index order.
inline int sample_arm(const ArmDistribution& dist, std::mt19937_64& rng) {
    double u = uniform01(rng);
    double acc = 0.0;
    int last = 0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        if (dist.probs[i] <= 0.0) continue;
        acc += dist.probs[i];
        last = static_cast<int>(i);
        if (u < acc) return last;
    }
    return last;  // guard against rounding at the top of the CDF
}

// Omniscient baseline: p_j proportional to bandwidth over available networks.
inline ArmDistribution optimal_random_distribution(const std::vector<double>& bandwidths,
                                                   const std::vector<char>& available) {
    if (bandwidths.size() != available.size())
        throw std::invalid_argument("optimal random: size mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < bandwidths.size(); ++j)
        if (available[j]) total += bandwidths[j];
    if (total <= 0.0)
        throw std::invalid_argument("optimal random: no available network with positive bandwidth");
    ArmDistribution out;
    out.probs.resize(bandwidths.size(), 0.0);
    out.scores.resize(bandwidths.size(), neg_inf);
    for (std::size_t j = 0; j < bandwidths.size(); ++j) {
        if (!available[j]) continue;
        out.probs[j] = bandwidths[j] / total;
        if (out.probs[j] > 0.0) out.scores[j] = std::log(out.probs[j]);
    }
    return out;
}

struct RestrictedDistribution {
    ArmDistribution dist;
    bool uniform_fallback = false;  // set when the available mass was zero
};

// Zeroes out unavailable arms and renormalizes; falls back to uniform over
// the available arms when they carry no mass.
inline RestrictedDistribution restrict_to_available(const ArmDistribution& dist,
                                                    const std::vector<char>& available) {
    if (dist.probs.size() != available.size())
        throw std::invalid_argument("restrict: size mismatch");
    int num_available = 0;
    double mass = 0.0;
    for (std::size_t i = 0; i < available.size(); ++i) {
        if (!available[i]) continue;
        ++num_available;
        mass += dist.probs[i];
    }
    if (num_available == 0)
        throw std::invalid_argument("restrict: no available arm");
    if (num_available == static_cast<int>(available.size()))
        return RestrictedDistribution{dist, false};

    RestrictedDistribution out;
    out.dist.probs.assign(dist.probs.size(), 0.0);
    out.dist.scores.assign(dist.probs.size(), neg_inf);
    if (mass <= 0.0) {
        out.uniform_fallback = true;
        for (std::size_t i = 0; i < available.size(); ++i)
            if (available[i]) {
                out.dist.probs[i] = 1.0 / num_available;
                out.dist.scores[i] = -std::log(static_cast<double>(num_available));
            }
        return out;
    }
    for (std::size_t i = 0; i < available.size(); ++i) {
        if (!available[i]) continue;
        out.dist.probs[i] = dist.probs[i] / mass;
        if (out.dist.probs[i] > 0.0) out.dist.scores[i] = std::log(out.dist.probs[i]);
    }
    return out;
}

}  // namespace pexp4

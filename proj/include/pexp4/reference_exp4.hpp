#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pexp4/numeric.hpp"
#include "pexp4/partition.hpp"
#include "pexp4/policy.hpp"

namespace pexp4 {

// Brute-force EXP4 over the fully materialized expert set
// { theta . f : f in F, theta : labels(f) -> arms }.
// Exponential in the label count; intended as a test oracle only.
class ReferenceExp4 {
public:
    ReferenceExp4(PartitionSet partitions, PolicyConfig config,
                  std::uint64_t expert_cap = 1'000'000)
        : partitions_(std::move(partitions)), config_(config) {
        config_.validate();
        std::uint64_t total = 0;
        for (const auto& f : partitions_) {
            std::uint64_t n = 1;
            for (int l = 0; l < f.num_labels(); ++l) {
                n *= static_cast<std::uint64_t>(config_.num_arms);
                if (n > expert_cap)
                    throw std::invalid_argument("reference oracle infeasible");
            }
            total += n;
            if (total > expert_cap)
                throw std::invalid_argument("reference oracle infeasible");
        }
        for (std::size_t f = 0; f < partitions_.size(); ++f) {
            int labels = partitions_[f].num_labels();
            std::vector<int> theta(static_cast<std::size_t>(labels), 0);
            while (true) {
                experts_.push_back({f, theta});
                int pos = 0;
                while (pos < labels && ++theta[static_cast<std::size_t>(pos)] == config_.num_arms)
                    theta[static_cast<std::size_t>(pos++)] = 0;
                if (pos == labels) break;
            }
        }
        log_w_.assign(experts_.size(), 0.0);
    }

    std::size_t num_experts() const { return experts_.size(); }
    long step() const { return t_; }

    ArmDistribution distribution() {
        std::size_t k = static_cast<std::size_t>(config_.num_arms);
        std::vector<std::vector<double>> buckets(k);
        for (std::size_t e = 0; e < experts_.size(); ++e)
            buckets[static_cast<std::size_t>(advice(e))].push_back(log_w_[e]);
        std::vector<double> scores(k, neg_inf);
        for (std::size_t i = 0; i < k; ++i)
            if (!buckets[i].empty()) scores[i] = log_sum_exp(buckets[i]);
        ArmDistribution out = normalize_scores(std::move(scores), config_.mixing);
        last_probs_ = out.probs;
        have_probs_ = true;
        return out;
    }

    void update(int arm, double reward) {
        if (!have_probs_)
            throw std::logic_error("reference exp4: update without a preceding distribution call");
        if (reward < 0.0 || reward > 1.0)
            throw std::invalid_argument("reference exp4: reward outside [0,1]");
        double p = last_probs_[static_cast<std::size_t>(arm)];
        if (p <= 0.0)
            throw std::invalid_argument("reference exp4: chosen arm has zero probability");
        double delta = config_.gamma.at(t_) / config_.num_arms * reward / p;
        for (std::size_t e = 0; e < experts_.size(); ++e)
            if (advice(e) == arm) log_w_[e] += delta;
        ++t_;
        have_probs_ = false;
    }

private:
    struct Expert {
        std::size_t partition_index;
        std::vector<int> arm_for_label;  // indexed by label-1
    };

    int advice(std::size_t e) const {
        const Expert& ex = experts_[e];
        int label = partitions_[ex.partition_index].label_at(t_);
        return ex.arm_for_label[static_cast<std::size_t>(label) - 1];
    }

    PartitionSet partitions_;
    PolicyConfig config_;
    std::vector<Expert> experts_;
    std::vector<double> log_w_;
    long t_ = 1;
    std::vector<double> last_probs_;
    bool have_probs_ = false;
};

}  // namespace pexp4

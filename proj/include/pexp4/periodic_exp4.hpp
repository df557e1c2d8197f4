#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "pexp4/numeric.hpp"
#include "pexp4/partition.hpp"
#include "pexp4/policy.hpp"

namespace pexp4 {

// Exponential-weights learner over a family of partition functions.
//
// All weights live in log domain. For each partition f it keeps
//   log_b[f][l][i]  per-label per-arm weight,
//   log_s[f][l]     log of the sum of that label's row over arms,
//   log_b_agg[f]    log of the product of log_s over ALL labels of f
//                   (unseen labels contribute log K).
//
// The per-step score of arm i aggregates, over partitions,
//   log_b[f][l_t][i] + log_b_agg[f] - log_s[f][l_t]    (corrected)
// which counts experts' free arm choices on labels not yet seen; the
// as_written variant removes that factor, scoring only over seen labels.
class PeriodicExp4 {
public:
    PeriodicExp4(PartitionSet partitions, PolicyConfig config)
        : partitions_(std::move(partitions)), config_(config) {
        config_.validate();
        double log_k = std::log(static_cast<double>(config_.num_arms));
        log_b_.resize(partitions_.size());
        log_s_.resize(partitions_.size());
        log_b_agg_.resize(partitions_.size());
        for (std::size_t f = 0; f < partitions_.size(); ++f) {
            int labels = partitions_[f].num_labels();
            log_b_[f].assign(static_cast<std::size_t>(labels),
                             std::vector<double>(static_cast<std::size_t>(config_.num_arms), 0.0));
            log_s_[f].assign(static_cast<std::size_t>(labels), log_k);
            log_b_agg_[f] = labels * log_k;
        }
    }

    int num_arms() const { return config_.num_arms; }
    long step() const { return t_; }
    long horizon() const { return partitions_.horizon(); }
    const PartitionSet& partitions() const { return partitions_; }
    const PolicyConfig& config() const { return config_; }

    ArmDistribution distribution() {
        if (t_ > horizon())
            throw std::out_of_range("periodic exp4: past the horizon");
        ArmDistribution out = normalize_scores(scores_aggregate(), config_.mixing);
        last_probs_ = out.probs;
        have_probs_ = true;
        return out;
    }

    void update(int arm, double reward) {
        if (!have_probs_)
            throw std::logic_error("periodic exp4: update without a preceding distribution call");
        if (arm < 0 || arm >= config_.num_arms)
            throw std::out_of_range("periodic exp4: arm index out of range");
        if (reward < 0.0 || reward > 1.0)
            throw std::invalid_argument("periodic exp4: reward outside [0,1]");
        double p = last_probs_[static_cast<std::size_t>(arm)];
        if (p <= 0.0)
            throw std::invalid_argument("periodic exp4: chosen arm has zero probability");

        double delta = config_.gamma.at(t_) / config_.num_arms * reward / p;
        for (std::size_t f = 0; f < partitions_.size(); ++f) {
            std::size_t l = static_cast<std::size_t>(partitions_[f].label_at(t_)) - 1;
            auto& row = log_b_[f][l];
            row[static_cast<std::size_t>(arm)] += delta;
            double fresh = log_sum_exp(row);
            log_b_agg_[f] += fresh - log_s_[f][l];
            log_s_[f][l] = fresh;
        }
        ++t_;
        have_probs_ = false;
    }

    // Log-domain scores via the maintained aggregates; O(K |F|) per call.
    std::vector<double> scores_aggregate() const {
        return scores_impl(false, config_.numeric_mode);
    }

    // Same scores recomputed from raw weights with the explicit product over
    // seen labels; used to cross-check the aggregate path.
    std::vector<double> scores_naive() const {
        return scores_impl(true, config_.numeric_mode);
    }

    // Scores under an explicit numeric mode, for the exact-vs-max bounds.
    std::vector<double> scores_with_mode(NumericMode mode) const {
        return scores_impl(false, mode);
    }

    // Test hooks: aggregates and their from-scratch counterparts.
    double log_s(std::size_t f, int label) const {
        return log_s_[f][static_cast<std::size_t>(label) - 1];
    }
    double log_b_aggregate(std::size_t f) const { return log_b_agg_[f]; }
    double log_weight(std::size_t f, int label, int arm) const {
        return log_b_[f][static_cast<std::size_t>(label) - 1][static_cast<std::size_t>(arm)];
    }
    double recompute_log_s(std::size_t f, int label) const {
        return log_sum_exp(log_b_[f][static_cast<std::size_t>(label) - 1]);
    }
    double recompute_log_b_aggregate(std::size_t f) const {
        double acc = 0.0;
        for (int l = 1; l <= partitions_[f].num_labels(); ++l) acc += recompute_log_s(f, l);
        return acc;
    }

    // Per-(f, label, arm) log-weights as text rows, for golden tests.
    void dump_state(std::ostream& os) const {
        os << "t " << t_ << "\n";
        for (std::size_t f = 0; f < partitions_.size(); ++f)
            for (int l = 1; l <= partitions_[f].num_labels(); ++l)
                for (int i = 0; i < config_.num_arms; ++i)
                    os << f << " " << l << " " << i << " " << log_weight(f, l, i) << "\n";
    }

private:
    std::vector<double> scores_impl(bool naive, NumericMode mode) const {
        double log_k = std::log(static_cast<double>(config_.num_arms));
        std::size_t k = static_cast<std::size_t>(config_.num_arms);
        std::vector<double> terms(partitions_.size());
        std::vector<double> scores(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t f = 0; f < partitions_.size(); ++f) {
                const auto& part = partitions_[f];
                int label = part.label_at(t_);
                int seen = part.labels_seen_count(t_);
                double term = log_b_[f][static_cast<std::size_t>(label) - 1][i];
                if (naive) {
                    for (int l = 1; l <= seen; ++l)
                        if (l != label) term += recompute_log_s(f, l);
                    if (config_.variant == Variant::corrected)
                        term += (part.num_labels() - seen) * log_k;
                } else {
                    term += log_b_agg_[f] - log_s_[f][static_cast<std::size_t>(label) - 1];
                    if (config_.variant == Variant::as_written)
                        term -= (part.num_labels() - seen) * log_k;
                }
                terms[f] = term;
            }
            scores[i] = mode == NumericMode::exact_logsumexp
                            ? log_sum_exp(terms)
                            : *std::max_element(terms.begin(), terms.end());
        }
        return scores;
    }

    PartitionSet partitions_;
    PolicyConfig config_;
    std::vector<std::vector<std::vector<double>>> log_b_;  // [f][label-1][arm]
    std::vector<std::vector<double>> log_s_;               // [f][label-1]
    std::vector<double> log_b_agg_;                        // [f]
    long t_ = 1;
    std::vector<double> last_probs_;
    bool have_probs_ = false;
};

}  // namespace pexp4

#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pexp4 {

// A labeling of time steps 1..T into labels 1..P, stored in canonical
// first-use order: label L's first occurrence precedes label L+1's.
// Two labelings that are permutations of each other canonicalize to the
// same sequence. Immutable after construction.
class PartitionFunction {
public:
    // Accepts any positive labels and relabels them into canonical form.
    static PartitionFunction from_labels(std::vector<int> raw) {
        if (raw.empty())
            throw std::invalid_argument("partition: empty label sequence");
        std::unordered_map<int, int> remap;
        std::vector<int> labels(raw.size());
        int next = 0;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] <= 0)
                throw std::invalid_argument("partition: labels must be positive");
            auto [it, inserted] = remap.emplace(raw[i], next + 1);
            if (inserted) ++next;
            labels[i] = it->second;
        }
        return PartitionFunction(std::move(labels), next);
    }

    // f_tau(t) = (t mod tau) + 1, then canonical relabeling.
    static PartitionFunction modular(int tau, long horizon) {
        if (tau <= 0)
            throw std::invalid_argument("modular partition: tau must be positive");
        if (tau > horizon)
            throw std::invalid_argument("modular partition: label never used (tau > T)");
        std::vector<int> raw(static_cast<std::size_t>(horizon));
        for (long t = 1; t <= horizon; ++t)
            raw[static_cast<std::size_t>(t - 1)] = static_cast<int>(t % tau) + 1;
        return from_labels(std::move(raw));
    }

    // Divides each iteration into tau contiguous segments (sizes differing by
    // at most 1 when tau does not divide iteration_length); labels repeat
    // every iteration.
    static PartitionFunction contiguous(int tau, long iteration_length, long horizon) {
        if (tau <= 0)
            throw std::invalid_argument("contiguous partition: tau must be positive");
        if (tau > iteration_length)
            throw std::invalid_argument("contiguous partition: tau > iteration length");
        if (iteration_length <= 0 || horizon % iteration_length != 0)
            throw std::invalid_argument("contiguous partition: iteration length must divide T");
        std::vector<int> raw(static_cast<std::size_t>(horizon));
        for (long t = 1; t <= horizon; ++t) {
            long s = (t - 1) % iteration_length + 1;  // 1-based slot within iteration
            raw[static_cast<std::size_t>(t - 1)] =
                static_cast<int>((s * tau + iteration_length - 1) / iteration_length);
        }
        return from_labels(std::move(raw));
    }

    long horizon() const { return static_cast<long>(labels_.size()); }
    int num_labels() const { return num_labels_; }

    int label_at(long t) const {
        check_step(t);
        return labels_[static_cast<std::size_t>(t - 1)];
    }

    // f([t]) as a count. In canonical form the seen set is always the
    // prefix {1..m}, so the count determines the set.
    int labels_seen_count(long t) const {
        check_step(t);
        return prefix_max_[static_cast<std::size_t>(t - 1)];
    }

    std::vector<int> labels_seen(long t) const {
        int m = labels_seen_count(t);
        std::vector<int> out(static_cast<std::size_t>(m));
        for (int l = 1; l <= m; ++l) out[static_cast<std::size_t>(l - 1)] = l;
        return out;
    }

    const std::vector<int>& labels() const { return labels_; }

    friend bool canonical_equal(const PartitionFunction& f, const PartitionFunction& g) {
        if (f.horizon() != g.horizon())
            throw std::invalid_argument("canonical_equal: horizon mismatch");
        return f.labels_ == g.labels_;
    }

private:
    PartitionFunction(std::vector<int> labels, int num_labels)
        : labels_(std::move(labels)), num_labels_(num_labels) {
        prefix_max_.resize(labels_.size());
        int m = 0;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            m = std::max(m, labels_[i]);
            prefix_max_[i] = m;
        }
    }

    void check_step(long t) const {
        if (t < 1 || t > horizon())
            throw std::out_of_range("partition: time step out of range [1, T]");
    }

    std::vector<int> labels_;
    std::vector<int> prefix_max_;
    int num_labels_;
};

enum class PartitionStyle { modular, contiguous };

// Ordered family of canonically distinct partition functions over one horizon.
class PartitionSet {
public:
    explicit PartitionSet(std::vector<PartitionFunction> functions) {
        if (functions.empty())
            throw std::invalid_argument("partition set: empty");
        long horizon = functions.front().horizon();
        for (auto& f : functions) {
            if (f.horizon() != horizon)
                throw std::invalid_argument("partition set: mixed horizons");
            bool dup = false;
            for (auto& g : functions_)
                if (canonical_equal(f, g)) { dup = true; break; }
            if (!dup) functions_.push_back(std::move(f));
        }
    }

    // The set {partition(tau) : tau = 1..max_period}, deduplicated.
    static PartitionSet period_range(int max_period, long iteration_length, long horizon,
                                     PartitionStyle style) {
        if (max_period < 1)
            throw std::invalid_argument("period range: max period must be >= 1");
        std::vector<PartitionFunction> fs;
        fs.reserve(static_cast<std::size_t>(max_period));
        for (int tau = 1; tau <= max_period; ++tau)
            fs.push_back(style == PartitionStyle::modular
                             ? PartitionFunction::modular(tau, horizon)
                             : PartitionFunction::contiguous(tau, iteration_length, horizon));
        return PartitionSet(std::move(fs));
    }

    std::size_t size() const { return functions_.size(); }
    const PartitionFunction& operator[](std::size_t i) const { return functions_[i]; }
    long horizon() const { return functions_.front().horizon(); }

    int max_labels() const {
        int p = 0;
        for (auto& f : functions_) p = std::max(p, f.num_labels());
        return p;
    }

    auto begin() const { return functions_.begin(); }
    auto end() const { return functions_.end(); }

private:
    std::vector<PartitionFunction> functions_;
};

}  // namespace pexp4

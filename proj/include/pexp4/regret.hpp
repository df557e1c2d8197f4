#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pexp4/partition.hpp"

namespace pexp4 {

// Full K x T reward table; only the offline regret oracles ever see it.
struct RewardMatrix {
    std::vector<std::vector<double>> values;  // [arm][t-1]

    int num_arms() const { return static_cast<int>(values.size()); }
    long horizon() const { return values.empty() ? 0 : static_cast<long>(values.front().size()); }

    double at(int arm, long t) const {
        return values[static_cast<std::size_t>(arm)][static_cast<std::size_t>(t - 1)];
    }

    void validate() const {
        if (values.empty() || values.front().empty())
            throw std::invalid_argument("reward matrix: empty");
        for (const auto& row : values) {
            if (static_cast<long>(row.size()) != horizon())
                throw std::invalid_argument("reward matrix: ragged rows");
            for (double v : row)
                if (v < 0.0 || v > 1.0)
                    throw std::invalid_argument("reward matrix: entry outside [0,1]");
        }
    }

    // CSV layout: one row per arm, one column per time step.
    void to_csv(std::ostream& os) const {
        char buf[40];
        for (const auto& row : values) {
            for (std::size_t t = 0; t < row.size(); ++t) {
                std::snprintf(buf, sizeof buf, "%.17g", row[t]);
                os << (t ? "," : "") << buf;
            }
            os << "\n";
        }
    }

    static RewardMatrix from_csv(std::istream& is) {
        RewardMatrix rm;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
            rm.values.push_back(std::move(row));
        }
        rm.validate();
        return rm;
    }
};

struct WeakOpt {
    int arm = 0;
    double total = 0.0;
};

// Best single fixed arm; ties broken by lowest index.
inline WeakOpt weak_opt(const RewardMatrix& rm) {
    WeakOpt best;
    double best_total = -1.0;
    for (int i = 0; i < rm.num_arms(); ++i) {
        double total = std::accumulate(rm.values[static_cast<std::size_t>(i)].begin(),
                                       rm.values[static_cast<std::size_t>(i)].end(), 0.0);
        if (total > best_total) {
            best_total = total;
            best = {i, total};
        }
    }
    return best;
}

// Per-step best arm.
inline double full_opt(const RewardMatrix& rm) {
    double total = 0.0;
    for (long t = 1; t <= rm.horizon(); ++t) {
        double m = rm.at(0, t);
        for (int i = 1; i < rm.num_arms(); ++i) m = std::max(m, rm.at(i, t));
        total += m;
    }
    return total;
}

struct PeriodicOpt {
    std::vector<int> arm_for_label;  // indexed by label-1
    double total = 0.0;
};

// Best assignment of one arm per label of f; ties broken by lowest arm index.
inline PeriodicOpt periodic_opt(const PartitionFunction& f, const RewardMatrix& rm) {
    if (f.horizon() != rm.horizon())
        throw std::invalid_argument("periodic opt: horizon mismatch");
    std::vector<std::vector<double>> label_sums(
        static_cast<std::size_t>(f.num_labels()),
        std::vector<double>(static_cast<std::size_t>(rm.num_arms()), 0.0));
    for (long t = 1; t <= rm.horizon(); ++t) {
        std::size_t l = static_cast<std::size_t>(f.label_at(t)) - 1;
        for (int i = 0; i < rm.num_arms(); ++i)
            label_sums[l][static_cast<std::size_t>(i)] += rm.at(i, t);
    }
    PeriodicOpt out;
    for (const auto& sums : label_sums) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < sums.size(); ++i)
            if (sums[i] > sums[best]) best = i;
        out.arm_for_label.push_back(static_cast<int>(best));
        out.total += sums[best];
    }
    return out;
}

struct GeneralizedOpt {
    std::size_t partition_index = 0;
    PeriodicOpt witness;
};

// Max over the set's members; ties broken by lowest set index.
inline GeneralizedOpt generalized_periodic_opt(const PartitionSet& fs, const RewardMatrix& rm) {
    GeneralizedOpt best;
    bool first = true;
    for (std::size_t f = 0; f < fs.size(); ++f) {
        PeriodicOpt cand = periodic_opt(fs[f], rm);
        if (first || cand.total > best.witness.total) {
            best = {f, std::move(cand)};
            first = false;
        }
    }
    return best;
}

struct RegretReport {
    double opt_total = 0.0;
    double alg_total = 0.0;
    double regret = 0.0;
};

inline RegretReport regret_of_trace(double opt_total, std::span<const double> trace) {
    RegretReport r;
    r.opt_total = opt_total;
    r.alg_total = std::accumulate(trace.begin(), trace.end(), 0.0);
    r.regret = r.opt_total - r.alg_total;
    return r;
}

}  // namespace pexp4

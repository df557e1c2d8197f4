#pragma once

#include <utility>
#include <vector>

#include "pexp4/partition.hpp"
#include "pexp4/periodic_exp4.hpp"

namespace pexp4 {

// EXP3 as the singleton-period-set special case of PeriodicExp4: one
// all-ones partition means one weight per arm and identical updates.
class Exp3 {
public:
    Exp3(PolicyConfig config, long horizon)
        : inner_(PartitionSet({PartitionFunction::from_labels(
                     std::vector<int>(static_cast<std::size_t>(horizon), 1))}),
                 config) {}

    ArmDistribution distribution() { return inner_.distribution(); }
    void update(int arm, double reward) { inner_.update(arm, reward); }
    long step() const { return inner_.step(); }
    int num_arms() const { return inner_.num_arms(); }

    PeriodicExp4& underlying() { return inner_; }

private:
    PeriodicExp4 inner_;
};

}  // namespace pexp4

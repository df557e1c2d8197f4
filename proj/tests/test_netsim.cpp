#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "pexp4/netsim.hpp"

using namespace pexp4;

namespace {

Scenario tiny_scenario(int num_devices, PolicyKind policy = PolicyKind::periodic_exp4) {
    Scenario sc;
    sc.name = "tiny";
    sc.iteration_length = 4;
    sc.iterations = 3;
    sc.networks = {{"a", {10, 40, 10, 40}, 0.0}, {"b", {40, 10, 40, 10}, 0.0}};
    sc.devices.assign(static_cast<std::size_t>(num_devices), DeviceSpec{policy});
    sc.period_set.max_period = 4;
    return sc;
}

}  // namespace

TEST_CASE("bandwidth repeats the curve every iteration") {
    std::mt19937_64 rng(1);
    NetworkProfile p{"n", {5.0, 7.0, 9.0}, 0.0};
    CHECK(bandwidth_at(p, 1, rng) == 5.0);
    CHECK(bandwidth_at(p, 2, rng) == 7.0);
    CHECK(bandwidth_at(p, 3, rng) == 9.0);
    CHECK(bandwidth_at(p, 4, rng) == 5.0);
    CHECK(bandwidth_at(p, 3 * 99 + 2, rng) == 7.0);
    CHECK_THROWS(bandwidth_at(p, 0, rng));
}

TEST_CASE("bandwidth noise is unbiased, relative, and never negative") {
    std::mt19937_64 rng(42);
    NetworkProfile p{"n", {20.0}, 0.1};
    const int draws = 100000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
        double b = bandwidth_at(p, 1, rng);
        REQUIRE(b >= 0.0);
        sum += b;
    }
    double mean = sum / draws;
    CHECK_THAT(mean, Catch::Matchers::WithinRel(20.0, 0.005));

    // Relative scaling: the spread grows with the base value.
    std::mt19937_64 rng_a(7), rng_b(7);
    NetworkProfile small{"s", {2.0}, 0.1}, big{"b", {30.0}, 0.1};
    double a = bandwidth_at(small, 1, rng_a);
    double b = bandwidth_at(big, 1, rng_b);
    CHECK_THAT(a / 2.0, Catch::Matchers::WithinAbs(b / 30.0, 1e-12));
}

TEST_CASE("equal sharing splits bandwidth among counted clients") {
    std::vector<std::vector<char>> all = {{1, 1}, {1, 1}};
    auto r = simulate_round({12.0, 6.0}, {0, 0}, all);
    CHECK(r.gains == std::vector<double>{6.0, 6.0});
    CHECK(r.client_counts == std::vector<int>{2, 0});

    auto split = simulate_round({12.0, 6.0}, {0, 1}, all);
    CHECK(split.gains == std::vector<double>{12.0, 6.0});
    CHECK(split.client_counts == std::vector<int>{1, 1});
}

TEST_CASE("picking an unavailable network earns nothing and frees the share") {
    std::vector<std::vector<char>> masks = {{1, 1}, {0, 1}};
    auto r = simulate_round({12.0, 6.0}, {0, 0}, masks);
    CHECK(r.gains == std::vector<double>{12.0, 0.0});
    CHECK(r.client_counts == std::vector<int>{1, 0});
    CHECK_THROWS(simulate_round({12.0}, {1}, {{1}}));
}

TEST_CASE("shared bandwidth is conserved") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        int num_networks = 2 + static_cast<int>(rng() % 3);
        int num_devices = 1 + static_cast<int>(rng() % 6);
        std::vector<double> bw(static_cast<std::size_t>(num_networks));
        for (auto& b : bw) b = 30.0 * uniform01(rng);
        std::vector<int> choices(static_cast<std::size_t>(num_devices));
        for (auto& c : choices) c = static_cast<int>(rng() % static_cast<unsigned>(num_networks));
        std::vector<std::vector<char>> masks(static_cast<std::size_t>(num_devices),
                                             std::vector<char>(static_cast<std::size_t>(num_networks), 1));
        auto r = simulate_round(bw, choices, masks);
        for (int j = 0; j < num_networks; ++j) {
            double together = 0.0;
            for (int d = 0; d < num_devices; ++d)
                if (choices[static_cast<std::size_t>(d)] == j)
                    together += r.gains[static_cast<std::size_t>(d)];
            if (r.client_counts[static_cast<std::size_t>(j)] > 0)
                CHECK_THAT(together, Catch::Matchers::WithinRel(bw[static_cast<std::size_t>(j)], 1e-12));
        }
    }
}

TEST_CASE("identical seeds give identical simulations") {
    Scenario sc = tiny_scenario(3);
    SimResult a = run_simulation(sc, 123);
    SimResult b = run_simulation(sc, 123);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t t = 0; t < a.records.size(); ++t) {
        CHECK(a.records[t].choice == b.records[t].choice);
        CHECK(a.records[t].gain == b.records[t].gain);
        CHECK(a.records[t].combined_prob == b.records[t].combined_prob);
    }
    CHECK(a.cumulative_gain == b.cumulative_gain);

    SimResult c = run_simulation(sc, 124);
    bool same = true;
    for (std::size_t t = 0; t < a.records.size(); ++t)
        same = same && a.records[t].choice == c.records[t].choice;
    CHECK_FALSE(same);
}

TEST_CASE("simulation bookkeeping is internally consistent") {
    Scenario sc = tiny_scenario(4);
    SimResult r = run_simulation(sc, 5);
    REQUIRE(static_cast<long>(r.records.size()) == sc.horizon());
    std::vector<double> totals(4, 0.0);
    for (const auto& rec : r.records) {
        double prob_sum = 0.0;
        for (double p : rec.combined_prob) prob_sum += p;
        CHECK_THAT(prob_sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
        for (std::size_t d = 0; d < 4; ++d) totals[d] += rec.gain[d];
        CHECK(rec.min_rate <= rec.opt_min + 1e-9);
        CHECK(rec.distance_pct >= 0.0);
    }
    for (std::size_t d = 0; d < 4; ++d)
        CHECK_THAT(totals[d], Catch::Matchers::WithinRel(r.cumulative_gain[d], 1e-12));
    for (std::size_t d = 0; d < 4; ++d)
        REQUIRE(static_cast<long>(r.reward_trace[d].size()) == sc.horizon());
}

TEST_CASE("a lone device on one network always hits the optimum") {
    Scenario sc;
    sc.name = "lone";
    sc.iteration_length = 3;
    sc.iterations = 2;
    sc.networks = {{"only", {8, 4, 2}, 0.0}};
    sc.devices = {DeviceSpec{PolicyKind::optimal_random}};
    sc.period_set.max_period = 3;
    SimResult r = run_simulation(sc, 1);
    for (const auto& rec : r.records) {
        CHECK(rec.distance_pct == 0.0);
        CHECK(rec.min_rate == rec.opt_min);
    }
}

TEST_CASE("vanilla and aware runs coincide without phase restrictions") {
    Scenario vanilla = tiny_scenario(3);
    Scenario aware = vanilla;
    for (auto& d : aware.devices) d.variant = MobilityVariant::availability_aware;
    SimResult a = run_simulation(vanilla, 77);
    SimResult b = run_simulation(aware, 77);
    for (std::size_t t = 0; t < a.records.size(); ++t) {
        REQUIRE(a.records[t].choice == b.records[t].choice);
        REQUIRE(a.records[t].gain == b.records[t].gain);
    }
}

TEST_CASE("aware devices never pick unavailable networks") {
    Scenario sc = tiny_scenario(2);
    for (auto& d : sc.devices) d.variant = MobilityVariant::availability_aware;
    sc.phases = {{1, 2, {{0}, {0}}}, {3, 4, {{1}, {1}}}};
    SimResult r = run_simulation(sc, 3);
    for (const auto& rec : r.records) {
        long slot_in_iter = (rec.slot - 1) % sc.iteration_length;
        int allowed = slot_in_iter < 2 ? 0 : 1;
        for (int c : rec.choice) CHECK(c == allowed);
    }
}

TEST_CASE("phase validation rejects gaps and bad indices") {
    Scenario sc = tiny_scenario(2);
    sc.phases = {{1, 2, {{0}, {0}}}};
    CHECK_THROWS(run_simulation(sc, 1));  // does not cover the iteration

    Scenario bad = tiny_scenario(2);
    bad.phases = {{1, 4, {{0, 5}, {0}}}};
    CHECK_THROWS(run_simulation(bad, 1));
}

TEST_CASE("environment noise is shared across policy salts") {
    Scenario sc = tiny_scenario(1, PolicyKind::uniform_random);
    for (auto& n : sc.networks) n.noise_pct = 0.1;
    SimResult a = run_simulation(sc, 11, 1);
    SimResult b = run_simulation(sc, 11, 2);
    for (std::size_t t = 0; t < a.bandwidth.size(); ++t)
        REQUIRE(a.bandwidth[t] == b.bandwidth[t]);
}

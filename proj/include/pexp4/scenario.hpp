#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pexp4/netsim.hpp"

namespace pexp4 {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) config_fail(path + "." + key, "missing field");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        config_fail(path + "." + key, e.what());
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& path, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return get_field<T>(j, path, key);
}

}  // namespace detail

inline std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::periodic_exp4: return "periodic_exp4";
        case PolicyKind::exp3: return "exp3";
        case PolicyKind::optimal_random: return "optimal_random";
        case PolicyKind::uniform_random: return "uniform_random";
    }
    return "periodic_exp4";
}

inline PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "periodic_exp4") return PolicyKind::periodic_exp4;
    if (s == "exp3") return PolicyKind::exp3;
    if (s == "optimal_random") return PolicyKind::optimal_random;
    if (s == "uniform_random") return PolicyKind::uniform_random;
    throw ConfigError("unknown policy '" + s + "'");
}

inline std::string to_string(MobilityVariant v) {
    return v == MobilityVariant::vanilla ? "vanilla" : "availability_aware";
}

inline MobilityVariant mobility_variant_from_string(const std::string& s) {
    if (s == "vanilla") return MobilityVariant::vanilla;
    if (s == "availability_aware" || s == "aware") return MobilityVariant::availability_aware;
    throw ConfigError("unknown mobility variant '" + s + "'");
}

inline nlohmann::ordered_json scenario_to_json(const Scenario& sc) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["name"] = sc.name;
    j["iteration_length"] = sc.iteration_length;
    j["iterations"] = sc.iterations;
    j["networks"] = nlohmann::ordered_json::array();
    for (const auto& n : sc.networks) {
        nlohmann::ordered_json nj;
        nj["name"] = n.name;
        nj["curve"] = n.curve;
        nj["noise_pct"] = n.noise_pct;
        j["networks"].push_back(std::move(nj));
    }
    j["devices"] = nlohmann::ordered_json::array();
    for (const auto& d : sc.devices) {
        nlohmann::ordered_json dj;
        dj["policy"] = to_string(d.policy);
        dj["variant"] = to_string(d.variant);
        j["devices"].push_back(std::move(dj));
    }
    if (sc.period_set.explicit_labels.empty()) {
        j["period_set"] = {{"style", sc.period_set.style == PartitionStyle::modular
                                         ? "modular"
                                         : "contiguous"},
                           {"max_period", sc.period_set.max_period}};
    } else {
        j["period_set"] = {{"labels", sc.period_set.explicit_labels}};
    }
    j["algorithm"] = {{"variant", sc.variant == Variant::as_written ? "as_written" : "corrected"},
                      {"numeric_mode", sc.numeric_mode == NumericMode::exact_logsumexp
                                           ? "exact_logsumexp"
                                           : "max_approx"},
                      {"gamma_fixed", sc.gamma.fixed},
                      {"gamma_exponent", sc.gamma.exponent},
                      {"mixing", sc.mixing}};
    j["reward_scale"] = sc.reward_scale;
    j["phases"] = nlohmann::ordered_json::array();
    for (const auto& ph : sc.phases) {
        nlohmann::ordered_json pj;
        pj["first_slot"] = ph.first_slot;
        pj["last_slot"] = ph.last_slot;
        pj["available"] = nlohmann::ordered_json::array();
        for (const auto& nets : ph.available) {
            std::vector<int> one_based;
            for (int n : nets) one_based.push_back(n + 1);
            pj["available"].push_back(one_based);
        }
        j["phases"].push_back(std::move(pj));
    }
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using detail::config_fail;
    using detail::get_field;
    using detail::get_or;
    Scenario sc;
    int version = get_or<int>(j, "$", "version", 1);
    if (version != 1) config_fail("$.version", "unsupported version");
    sc.name = get_or<std::string>(j, "$", "name", "unnamed");
    sc.iteration_length = get_or<long>(j, "$", "iteration_length", 1440);
    sc.iterations = get_or<int>(j, "$", "iterations", 60);

    if (!j.contains("networks") || !j.at("networks").is_array() || j.at("networks").empty())
        config_fail("$.networks", "must be a non-empty array");
    for (std::size_t i = 0; i < j.at("networks").size(); ++i) {
        const auto& nj = j.at("networks")[i];
        std::string path = "$.networks[" + std::to_string(i) + "]";
        NetworkProfile n;
        n.name = get_or<std::string>(nj, path, "name", "net" + std::to_string(i + 1));
        n.noise_pct = get_or<double>(nj, path, "noise_pct", 0.0);
        if (nj.contains("curve")) {
            n.curve = get_field<std::vector<double>>(nj, path, "curve");
        } else if (nj.contains("constant")) {
            n.curve.assign(static_cast<std::size_t>(sc.iteration_length),
                           get_field<double>(nj, path, "constant"));
        } else if (nj.contains("segments")) {
            // [[slot_count, value], ...]
            auto segs = get_field<std::vector<std::vector<double>>>(nj, path, "segments");
            for (const auto& seg : segs) {
                if (seg.size() != 2) config_fail(path + ".segments", "each segment is [count, value]");
                for (long c = 0; c < static_cast<long>(seg[0]); ++c) n.curve.push_back(seg[1]);
            }
        } else {
            config_fail(path, "needs one of curve/constant/segments");
        }
        sc.networks.push_back(std::move(n));
    }

    if (!j.contains("devices")) config_fail("$.devices", "missing field");
    const auto& dj = j.at("devices");
    auto parse_spec = [&](const nlohmann::json& sj, const std::string& path) {
        DeviceSpec spec;
        spec.policy = policy_kind_from_string(get_or<std::string>(sj, path, "policy", "periodic_exp4"));
        spec.variant =
            mobility_variant_from_string(get_or<std::string>(sj, path, "variant", "vanilla"));
        return spec;
    };
    if (dj.is_array()) {
        for (std::size_t i = 0; i < dj.size(); ++i)
            sc.devices.push_back(parse_spec(dj[i], "$.devices[" + std::to_string(i) + "]"));
    } else if (dj.is_object()) {
        int count = get_field<int>(dj, "$.devices", "count");
        if (count < 1) config_fail("$.devices.count", "must be >= 1");
        DeviceSpec spec = parse_spec(dj, "$.devices");
        sc.devices.assign(static_cast<std::size_t>(count), spec);
    } else {
        config_fail("$.devices", "must be an array or an object with a count");
    }

    if (j.contains("period_set")) {
        const auto& pj = j.at("period_set");
        if (pj.contains("labels")) {
            sc.period_set.explicit_labels =
                get_field<std::vector<std::vector<int>>>(pj, "$.period_set", "labels");
        } else {
            std::string style = get_or<std::string>(pj, "$.period_set", "style", "contiguous");
            if (style == "modular")
                sc.period_set.style = PartitionStyle::modular;
            else if (style == "contiguous")
                sc.period_set.style = PartitionStyle::contiguous;
            else
                config_fail("$.period_set.style", "must be modular or contiguous");
            sc.period_set.max_period = get_or<int>(pj, "$.period_set", "max_period", 24);
        }
    }

    if (j.contains("algorithm")) {
        const auto& aj = j.at("algorithm");
        std::string variant = get_or<std::string>(aj, "$.algorithm", "variant", "as_written");
        if (variant == "as_written")
            sc.variant = Variant::as_written;
        else if (variant == "corrected")
            sc.variant = Variant::corrected;
        else
            config_fail("$.algorithm.variant", "must be as_written or corrected");
        std::string mode = get_or<std::string>(aj, "$.algorithm", "numeric_mode", "max_approx");
        if (mode == "exact_logsumexp" || mode == "exact")
            sc.numeric_mode = NumericMode::exact_logsumexp;
        else if (mode == "max_approx" || mode == "max")
            sc.numeric_mode = NumericMode::max_approx;
        else
            config_fail("$.algorithm.numeric_mode", "must be exact_logsumexp or max_approx");
        sc.gamma.fixed = get_or<double>(aj, "$.algorithm", "gamma_fixed", 0.0);
        sc.gamma.exponent = get_or<double>(aj, "$.algorithm", "gamma_exponent", 0.1);
        sc.mixing = get_or<double>(aj, "$.algorithm", "mixing", 0.0);
    }
    sc.reward_scale = get_or<double>(j, "$", "reward_scale", 0.0);

    if (j.contains("phases")) {
        const auto& phs = j.at("phases");
        for (std::size_t p = 0; p < phs.size(); ++p) {
            std::string path = "$.phases[" + std::to_string(p) + "]";
            Phase ph;
            ph.first_slot = get_field<long>(phs[p], path, "first_slot");
            ph.last_slot = get_field<long>(phs[p], path, "last_slot");
            auto av = get_field<std::vector<std::vector<int>>>(phs[p], path, "available");
            for (auto& nets : av) {
                std::vector<int> zero_based;
                for (int n : nets) {
                    if (n < 1 || n > sc.num_networks())
                        config_fail(path + ".available", "network index out of range (1-based)");
                    zero_based.push_back(n - 1);
                }
                ph.available.push_back(std::move(zero_based));
            }
            sc.phases.push_back(std::move(ph));
        }
    }

    try {
        sc.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    return sc;
}

// ---------------------------------------------------------------------------
// Built-in scenarios. Bandwidth curves are illustrative shapes and are
// treated as overridable config data.

namespace builtin {

inline std::vector<double> piecewise(long length, const std::vector<double>& quarter_values) {
    std::vector<double> curve(static_cast<std::size_t>(length));
    long q = length / static_cast<long>(quarter_values.size());
    for (long s = 0; s < length; ++s)
        curve[static_cast<std::size_t>(s)] =
            quarter_values[static_cast<std::size_t>(std::min<long>(s / q, static_cast<long>(quarter_values.size()) - 1))];
    return curve;
}

inline std::vector<double> sampled(long length, auto&& fn) {
    std::vector<double> curve(static_cast<std::size_t>(length));
    for (long s = 0; s < length; ++s) {
        double x = static_cast<double>(s) / static_cast<double>(length);
        curve[static_cast<std::size_t>(s)] = std::max(0.0, fn(x));
    }
    return curve;
}

inline Scenario base(const std::string& name, int num_devices) {
    Scenario sc;
    sc.name = name;
    sc.iteration_length = 1440;
    sc.iterations = 60;
    sc.devices.assign(static_cast<std::size_t>(num_devices), DeviceSpec{});
    return sc;
}

inline Scenario discrete() {
    Scenario sc = base("discrete", 20);
    sc.networks = {{"wifi1", piecewise(1440, {10, 40, 10, 40}), 0.0},
                   {"wifi2", piecewise(1440, {40, 10, 40, 10}), 0.0},
                   {"cellular", piecewise(1440, {20, 20, 20, 20}), 0.0}};
    return sc;
}

inline Scenario continuous() {
    Scenario sc = base("continuous", 20);
    sc.networks = {
        {"wifi1", sampled(1440, [](double x) { return 25.0 + 15.0 * std::sin(2 * M_PI * x); }), 0.0},
        {"wifi2",
         sampled(1440, [](double x) { return 25.0 + 15.0 * std::sin(2 * M_PI * x + 2 * M_PI / 3); }),
         0.0},
        {"cellular", sampled(1440, [](double) { return 20.0; }), 0.0}};
    return sc;
}

inline Scenario continuous_hard() {
    Scenario sc = base("continuous_hard", 20);
    sc.networks = {
        {"wifi1",
         sampled(1440,
                 [](double x) { return 25.0 + 10.0 * std::sin(2 * M_PI * x) + 8.0 * std::sin(6 * M_PI * x); }),
         0.0},
        {"wifi2",
         sampled(1440,
                 [](double x) { return 25.0 + 10.0 * std::cos(4 * M_PI * x) + 6.0 * std::sin(10 * M_PI * x); }),
         0.0},
        {"cellular", sampled(1440, [](double x) { return 18.0 + 6.0 * std::sin(8 * M_PI * x); }), 0.0}};
    return sc;
}

inline Scenario with_noise(Scenario sc, double noise_pct, const std::string& name) {
    for (auto& n : sc.networks) n.noise_pct = noise_pct;
    sc.name = name;
    return sc;
}

// 20 devices, 9 networks, 6 phases per iteration; devices 1-5 stay home,
// 6-20 commute, with a split during lunch.
inline Scenario mobility() {
    Scenario sc = base("mobility", 20);
    const std::vector<double> rates = {30, 20, 10, 25, 25, 20, 20, 15, 15};
    for (std::size_t j = 0; j < rates.size(); ++j)
        sc.networks.push_back({"net" + std::to_string(j + 1),
                               std::vector<double>(1440, rates[j]), 0.0});

    auto avail = [&](std::initializer_list<std::pair<std::pair<int, int>, std::vector<int>>> ranges) {
        std::vector<std::vector<int>> out(20);
        for (const auto& [span, nets] : ranges)
            for (int d = span.first; d <= span.second; ++d) {
                std::vector<int> zero_based;
                for (int n : nets) zero_based.push_back(n - 1);
                out[static_cast<std::size_t>(d - 1)] = zero_based;
            }
        return out;
    };
    // With 20 devices sharing each network, per-device rates sit far below
    // the 30 Mbps curve maximum; scale rewards to the shared-rate range so
    // the learners see usable gradients.
    sc.reward_scale = 6.0;
    sc.phases = {
        {1, 780, avail({{{1, 10}, {1, 2, 3}}, {{11, 20}, {1, 2}}})},
        {781, 840, avail({{{1, 5}, {1, 2, 3}}, {{6, 20}, {4, 5}}})},
        {841, 1020, avail({{{1, 5}, {1, 2, 3}}, {{6, 20}, {6, 7, 8}}})},
        {1021, 1080, avail({{{1, 5}, {1, 2, 3}}, {{6, 10}, {6, 7, 8}}, {{11, 20}, {8, 9}}})},
        {1081, 1380, avail({{{1, 5}, {1, 2, 3}}, {{6, 20}, {6, 7, 8}}})},
        {1381, 1440, avail({{{1, 5}, {1, 2, 3}}, {{6, 20}, {4, 5}}})},
    };
    return sc;
}

// The two-arm slot machine with strictly alternating rewards.
inline Scenario alternating_toy() {
    Scenario sc;
    sc.name = "alternating_toy";
    sc.iteration_length = 2;
    sc.iterations = 2500;
    sc.devices = {DeviceSpec{}};
    sc.networks = {{"odd", {1.0, 0.0}, 0.0}, {"even", {0.0, 1.0}, 0.0}};
    sc.period_set.max_period = 2;
    sc.reward_scale = 1.0;
    return sc;
}

}  // namespace builtin

inline std::vector<std::string> builtin_scenario_names() {
    return {"discrete",       "continuous",      "continuous_hard", "noisy_discrete",
            "noisy_continuous", "mobility",      "alternating_toy"};
}

inline Scenario builtin_scenario(const std::string& name) {
    if (name == "discrete") return builtin::discrete();
    if (name == "continuous") return builtin::continuous();
    if (name == "continuous_hard") return builtin::continuous_hard();
    if (name == "noisy_discrete")
        return builtin::with_noise(builtin::discrete(), 0.1, "noisy_discrete");
    if (name == "noisy_continuous")
        return builtin::with_noise(builtin::continuous(), 0.1, "noisy_continuous");
    if (name == "mobility") return builtin::mobility();
    if (name == "alternating_toy") return builtin::alternating_toy();
    throw ConfigError("unknown builtin scenario '" + name + "'");
}

// Accepts a builtin name or a path to a JSON config file.
inline Scenario load_scenario(const std::string& name_or_path) {
    for (const auto& n : builtin_scenario_names())
        if (n == name_or_path) return builtin_scenario(name_or_path);
    std::ifstream in(name_or_path);
    if (!in) throw ConfigError("cannot open scenario '" + name_or_path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse scenario '" + name_or_path + "': " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace pexp4

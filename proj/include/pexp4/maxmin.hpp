#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace pexp4 {

// Devices sharing one availability mask, compressed into a group.
struct AvailabilityGroup {
    std::vector<char> networks;  // mask over network indices
    int device_count = 1;
};

namespace detail {

// Small Dinic max-flow, integer capacities.
class MaxFlow {
public:
    explicit MaxFlow(int nodes) : head_(static_cast<std::size_t>(nodes), -1) {}

    void add_edge(int from, int to, long cap) {
        edges_.push_back({to, head_[static_cast<std::size_t>(from)], cap});
        head_[static_cast<std::size_t>(from)] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({from, head_[static_cast<std::size_t>(to)], 0});
        head_[static_cast<std::size_t>(to)] = static_cast<int>(edges_.size()) - 1;
    }

    long run(int source, int sink) {
        long flow = 0;
        while (bfs(source, sink)) {
            iter_ = head_;
            while (long pushed = dfs(source, sink, std::numeric_limits<long>::max()))
                flow += pushed;
        }
        return flow;
    }

private:
    struct Edge {
        int to;
        int next;
        long cap;
    };

    bool bfs(int source, int sink) {
        level_.assign(head_.size(), -1);
        level_[static_cast<std::size_t>(source)] = 0;
        std::queue<int> q;
        q.push(source);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int e = head_[static_cast<std::size_t>(u)]; e != -1; e = edges_[static_cast<std::size_t>(e)].next) {
                const Edge& ed = edges_[static_cast<std::size_t>(e)];
                if (ed.cap > 0 && level_[static_cast<std::size_t>(ed.to)] < 0) {
                    level_[static_cast<std::size_t>(ed.to)] = level_[static_cast<std::size_t>(u)] + 1;
                    q.push(ed.to);
                }
            }
        }
        return level_[static_cast<std::size_t>(sink)] >= 0;
    }

    long dfs(int u, int sink, long limit) {
        if (u == sink) return limit;
        for (int& e = iter_[static_cast<std::size_t>(u)]; e != -1; e = edges_[static_cast<std::size_t>(e)].next) {
            Edge& ed = edges_[static_cast<std::size_t>(e)];
            if (ed.cap <= 0 || level_[static_cast<std::size_t>(ed.to)] != level_[static_cast<std::size_t>(u)] + 1)
                continue;
            long pushed = dfs(ed.to, sink, std::min(limit, ed.cap));
            if (pushed > 0) {
                ed.cap -= pushed;
                edges_[static_cast<std::size_t>(e ^ 1)].cap += pushed;
                return pushed;
            }
        }
        return 0;
    }

    std::vector<Edge> edges_;
    std::vector<int> head_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

}  // namespace detail

// Can every device be assigned an available network so that no network j
// carries more than cap[j] clients?
inline bool assignment_feasible(const std::vector<AvailabilityGroup>& groups,
                                const std::vector<long>& caps) {
    int num_networks = static_cast<int>(caps.size());
    int num_groups = static_cast<int>(groups.size());
    int source = 0;
    int sink = 1 + num_groups + num_networks;
    detail::MaxFlow flow(sink + 1);
    long demand = 0;
    for (int g = 0; g < num_groups; ++g) {
        demand += groups[static_cast<std::size_t>(g)].device_count;
        flow.add_edge(source, 1 + g, groups[static_cast<std::size_t>(g)].device_count);
        for (int j = 0; j < num_networks; ++j)
            if (groups[static_cast<std::size_t>(g)].networks[static_cast<std::size_t>(j)])
                flow.add_edge(1 + g, 1 + num_groups + j, groups[static_cast<std::size_t>(g)].device_count);
    }
    for (int j = 0; j < num_networks; ++j)
        flow.add_edge(1 + num_groups + j, sink, caps[static_cast<std::size_t>(j)]);
    return flow.run(source, sink) == demand;
}

// Exact max-min rate under equal sharing: the best achievable value of
// min over devices of bandwidth_j / clients_j. Candidate rates are
// bandwidth_j / n for n = 1..N; binary search over the sorted candidates
// with a bipartite feasibility check at each probe.
inline double optimal_min_rate(const std::vector<double>& bandwidths,
                               const std::vector<AvailabilityGroup>& groups) {
    int num_networks = static_cast<int>(bandwidths.size());
    long total_devices = 0;
    for (const auto& g : groups) {
        if (static_cast<int>(g.networks.size()) != num_networks)
            throw std::invalid_argument("optimal_min_rate: mask size mismatch");
        if (g.device_count <= 0)
            throw std::invalid_argument("optimal_min_rate: empty group");
        bool any = false;
        for (char a : g.networks) any = any || a;
        if (!any)
            throw std::invalid_argument("optimal_min_rate: device with no available network");
        total_devices += g.device_count;
    }

    auto caps_at = [&](double rate) {
        std::vector<long> caps(static_cast<std::size_t>(num_networks), 0);
        for (int j = 0; j < num_networks; ++j) {
            double b = bandwidths[static_cast<std::size_t>(j)];
            caps[static_cast<std::size_t>(j)] =
                b <= 0.0 ? 0 : static_cast<long>(std::floor(b / rate + 1e-9));
        }
        return caps;
    };

    std::vector<double> candidates;
    for (int j = 0; j < num_networks; ++j)
        for (long n = 1; n <= total_devices; ++n)
            if (bandwidths[static_cast<std::size_t>(j)] > 0.0)
                candidates.push_back(bandwidths[static_cast<std::size_t>(j)] / static_cast<double>(n));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.empty()) return 0.0;

    // Largest index whose rate is feasible; rates below index 0 degenerate to 0.
    std::size_t lo = 0, hi = candidates.size();  // feasible range is a prefix
    if (!assignment_feasible(groups, caps_at(candidates[0]))) return 0.0;
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (assignment_feasible(groups, caps_at(candidates[mid])))
            lo = mid;
        else
            hi = mid;
    }
    return candidates[lo];
}

}  // namespace pexp4

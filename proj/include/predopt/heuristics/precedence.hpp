#pragma once

#include "predopt/core/model.hpp"

#include <functional>
#include <queue>
#include <vector>

namespace predopt::heuristics {

inline std::vector<std::vector<int>> successors(Instance const& inst) {
    std::vector<std::vector<int>> succ(inst.activities.size());
    for (auto const& a : inst.activities)
        for (int p : a.prerequisites) succ[p].push_back(a.id);
    return succ;
}

/// Kahn order, taking the lowest ready id first.
inline std::vector<int> topological_order(Instance const& inst) {
    int n = int(inst.activities.size());
    auto succ = successors(inst);
    std::vector<int> indeg(n, 0);
    for (auto const& a : inst.activities) indeg[a.id] = int(a.prerequisites.size());
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push(i);
    std::vector<int> order;
    while (!ready.empty()) {
        int u = ready.top();
        ready.pop();
        order.push_back(u);
        for (int v : succ[u])
            if (--indeg[v] == 0) ready.push(v);
    }
    return order;
}

}  // namespace predopt::heuristics

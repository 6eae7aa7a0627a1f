#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cyberdyn/temporal_graph.hpp"

namespace cyberdyn {

// Strongly connected components in an order compatible with the condensation:
// every condensation arc (j -> k) satisfies j < k, so the coupling matrix of
// the ordered blocks is lower block-triangular.
struct SccDecomposition {
    std::vector<std::vector<int>> components;
    std::vector<int> component_of;                    // node -> component index
    std::vector<std::pair<int, int>> condensation_arcs;
    std::vector<std::vector<int>> upstream_sets;      // R_k: components with arcs into k

    std::size_t size() const { return components.size(); }
};

inline SccDecomposition scc_decompose(std::span<const Arc> arcs, int n) {
    if (n < 1) throw std::invalid_argument("scc_decompose requires at least one node");

    std::vector<int> head(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> dest(arcs.size());
    for (const Arc& a : arcs) head[static_cast<std::size_t>(a.from) + 1]++;
    for (int v = 0; v < n; ++v) head[static_cast<std::size_t>(v) + 1] += head[static_cast<std::size_t>(v)];
    {
        std::vector<int> cursor(head.begin(), head.end() - 1);
        for (const Arc& a : arcs) dest[static_cast<std::size_t>(cursor[static_cast<std::size_t>(a.from)]++)] = a.to;
    }

    // Iterative Tarjan; recursion depth would be O(n) otherwise.
    constexpr int kUnvisited = -1;
    std::vector<int> index(static_cast<std::size_t>(n), kUnvisited);
    std::vector<int> low(static_cast<std::size_t>(n), 0);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    std::vector<int> tarjan_comp(static_cast<std::size_t>(n), -1);
    int next_index = 0;
    int comp_count = 0;

    struct Frame {
        int v;
        int edge;
    };
    std::vector<Frame> frames;

    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != kUnvisited) continue;
        frames.push_back({root, head[static_cast<std::size_t>(root)]});
        index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            int v = f.v;
            if (f.edge < head[static_cast<std::size_t>(v) + 1]) {
                int w = dest[static_cast<std::size_t>(f.edge++)];
                if (index[static_cast<std::size_t>(w)] == kUnvisited) {
                    index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = next_index++;
                    stack.push_back(w);
                    on_stack[static_cast<std::size_t>(w)] = 1;
                    frames.push_back({w, head[static_cast<std::size_t>(w)]});
                } else if (on_stack[static_cast<std::size_t>(w)]) {
                    low[static_cast<std::size_t>(v)] =
                        std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
                }
            } else {
                if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = 0;
                        tarjan_comp[static_cast<std::size_t>(w)] = comp_count;
                    } while (w != v);
                    ++comp_count;
                }
                frames.pop_back();
                if (!frames.empty()) {
                    int parent = frames.back().v;
                    low[static_cast<std::size_t>(parent)] =
                        std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(v)]);
                }
            }
        }
    }

    // Tarjan emits downstream components first; flip to put sources first.
    SccDecomposition out;
    out.component_of.resize(static_cast<std::size_t>(n));
    out.components.assign(static_cast<std::size_t>(comp_count), {});
    for (int v = 0; v < n; ++v) {
        int c = comp_count - 1 - tarjan_comp[static_cast<std::size_t>(v)];
        out.component_of[static_cast<std::size_t>(v)] = c;
        out.components[static_cast<std::size_t>(c)].push_back(v);
    }
    for (auto& comp : out.components) std::sort(comp.begin(), comp.end());

    std::vector<std::pair<int, int>> cond;
    for (const Arc& a : arcs) {
        int cf = out.component_of[static_cast<std::size_t>(a.from)];
        int ct = out.component_of[static_cast<std::size_t>(a.to)];
        if (cf != ct) cond.emplace_back(cf, ct);
    }
    std::sort(cond.begin(), cond.end());
    cond.erase(std::unique(cond.begin(), cond.end()), cond.end());
    out.condensation_arcs = std::move(cond);

    out.upstream_sets.assign(static_cast<std::size_t>(comp_count), {});
    for (auto& [j, k] : out.condensation_arcs)
        out.upstream_sets[static_cast<std::size_t>(k)].push_back(j);
    return out;
}

inline SccDecomposition scc_decompose(const std::vector<Arc>& arcs, int n) {
    return scc_decompose(std::span<const Arc>(arcs.data(), arcs.size()), n);
}

}  // namespace cyberdyn

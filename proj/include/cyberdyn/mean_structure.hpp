#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cyberdyn/param_process.hpp"
#include "cyberdyn/scc.hpp"
#include "cyberdyn/temporal_graph.hpp"

namespace cyberdyn {

// Entrywise time average of gamma_vu(t) * a_vu(t); the weighted mean attack
// structure that drives connectivity arguments.
struct MeanStructure {
    int n = 0;
    std::vector<Arc> arcs;            // support, sorted
    std::vector<double> weights;      // aligned with arcs

    double weight(int from, int to) const {
        Arc probe{from, to};
        auto it = std::lower_bound(arcs.begin(), arcs.end(), probe);
        if (it == arcs.end() || !(*it == probe)) return 0.0;
        return weights[static_cast<std::size_t>(it - arcs.begin())];
    }

    std::vector<Arc> positive_arcs(double eps = 1e-12) const {
        std::vector<Arc> out;
        for (std::size_t k = 0; k < arcs.size(); ++k)
            if (weights[k] > eps) out.push_back(arcs[k]);
        return out;
    }

    bool strongly_connected(double eps = 1e-12) const {
        if (n == 0) return false;
        auto scc = scc_decompose(positive_arcs(eps), n);
        return scc.size() == 1;
    }
};

inline MeanStructure mean_structure(const TemporalGraph& graph, const ParamProcess& gamma,
                                    double T, double step = 0.05) {
    if (T <= 0) throw std::invalid_argument("horizon must be positive");
    if (step <= 0) throw std::invalid_argument("step must be positive");

    std::unordered_map<std::uint64_t, double> acc;
    auto steps = static_cast<std::size_t>(std::llround(T / step));
    if (steps == 0) steps = 1;
    const bool time_only = gamma.time_only();
    for (std::size_t k = 0; k < steps; ++k) {
        double t = static_cast<double>(k) * step;
        const auto& arcs = graph.arcs_at(t);
        double g_scalar = time_only ? gamma.eval(t, 0) : 0.0;
        for (const Arc& a : arcs) {
            double g = time_only ? g_scalar : gamma.eval(t, ParamProcess::arc_code(a.to, a.from));
            acc[arc_key(a.from, a.to)] += g;
        }
    }

    MeanStructure m;
    m.n = graph.n();
    m.arcs.reserve(acc.size());
    for (const auto& [key, sum] : acc)
        m.arcs.push_back(Arc{static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffULL)});
    std::sort(m.arcs.begin(), m.arcs.end());
    m.weights.resize(m.arcs.size());
    for (std::size_t k = 0; k < m.arcs.size(); ++k)
        m.weights[k] = acc[arc_key(m.arcs[k].from, m.arcs[k].to)] / static_cast<double>(steps);
    return m;
}

}  // namespace cyberdyn

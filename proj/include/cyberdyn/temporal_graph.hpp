#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "cyberdyn/rng.hpp"

namespace cyberdyn {

// Directed arc: `from` may wage push-based attacks against `to`.
struct Arc {
    int from = 0;
    int to = 0;

    friend bool operator==(const Arc& a, const Arc& b) { return a.from == b.from && a.to == b.to; }
    friend bool operator<(const Arc& a, const Arc& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    }
};

struct Perturbation {
    double interval = 10.0;   // simulated time units per arc epoch
    double fraction = 0.02;   // share of arcs replaced at each epoch boundary
    std::uint64_t seed = 0;
};

struct LoadReport {
    int node_count = 0;
    std::size_t arc_count = 0;
    int self_loops_dropped = 0;
    int duplicates_dropped = 0;
};

inline std::uint64_t arc_key(int from, int to) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
           static_cast<std::uint32_t>(to);
}

// Time-varying directed attack structure. Immutable after construction; the
// per-epoch arc sets are derived deterministically from the perturbation seed
// and cached on first use.
class TemporalGraph {
public:
    struct Epoch {
        double start_time = 0.0;
        std::vector<Arc> arcs;          // sorted by (from, to), no duplicates, no self-loops
        std::vector<int> in_offsets;    // size n+1
        std::vector<int> in_attackers;  // attackers of v, ascending, at [in_offsets[v], in_offsets[v+1])
        std::uint64_t hash = 0;

        std::span<const int> attackers_of(int v) const {
            return {in_attackers.data() + in_offsets[static_cast<std::size_t>(v)],
                    in_attackers.data() + in_offsets[static_cast<std::size_t>(v) + 1]};
        }
    };

    TemporalGraph() = default;

    TemporalGraph(TemporalGraph&& other) noexcept
        : n_(other.n_),
          perturbation_(other.perturbation_),
          explicit_schedule_(other.explicit_schedule_),
          epochs_(std::move(other.epochs_)) {
        ready_.store(other.ready_.load(std::memory_order_acquire), std::memory_order_release);
    }

    TemporalGraph& operator=(TemporalGraph&& other) noexcept {
        if (this != &other) {
            n_ = other.n_;
            perturbation_ = other.perturbation_;
            explicit_schedule_ = other.explicit_schedule_;
            epochs_ = std::move(other.epochs_);
            ready_.store(other.ready_.load(std::memory_order_acquire), std::memory_order_release);
        }
        return *this;
    }

    TemporalGraph(const TemporalGraph&) = delete;
    TemporalGraph& operator=(const TemporalGraph&) = delete;

    TemporalGraph(int node_count, std::vector<Arc> arcs,
                  std::optional<Perturbation> perturbation = std::nullopt)
        : n_(node_count), perturbation_(perturbation) {
        if (node_count < 0) throw std::invalid_argument("node count must be nonnegative");
        std::sort(arcs.begin(), arcs.end());
        arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
        for (const Arc& a : arcs) {
            if (a.from < 0 || a.from >= n_ || a.to < 0 || a.to >= n_)
                throw std::invalid_argument("arc endpoint out of range");
            if (a.from == a.to) throw std::invalid_argument("self-loop arc rejected");
        }
        if (perturbation_ && perturbation_->interval <= 0)
            throw std::invalid_argument("perturbation interval must be positive");
        if (perturbation_ && (perturbation_->fraction < 0 || perturbation_->fraction > 1))
            throw std::invalid_argument("perturbation fraction must lie in [0,1]");
        epochs_.reserve(kMaxEpochs);
        epochs_.push_back(make_epoch(0.0, std::move(arcs)));
        ready_.store(1, std::memory_order_release);
    }

    // Explicit epoch schedule, mainly for tests and piecewise structures.
    static TemporalGraph with_epochs(int node_count,
                                     std::vector<std::pair<double, std::vector<Arc>>> schedule) {
        if (schedule.empty()) throw std::invalid_argument("epoch schedule must be nonempty");
        TemporalGraph g(node_count, schedule.front().second);
        for (std::size_t k = 1; k < schedule.size(); ++k) {
            if (schedule[k].first <= schedule[k - 1].first)
                throw std::invalid_argument("epoch start times must increase");
            auto arcs = schedule[k].second;
            std::sort(arcs.begin(), arcs.end());
            arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
            for (const Arc& a : arcs) {
                if (a.from < 0 || a.from >= node_count || a.to < 0 || a.to >= node_count)
                    throw std::invalid_argument("arc endpoint out of range");
                if (a.from == a.to) throw std::invalid_argument("self-loop arc rejected");
            }
            g.epochs_.push_back(g.make_epoch(schedule[k].first, std::move(arcs)));
        }
        g.explicit_schedule_ = true;
        g.ready_.store(g.epochs_.size(), std::memory_order_release);
        return g;
    }

    int n() const { return n_; }
    const std::vector<Arc>& base_arcs() const { return epochs_.front()->arcs; }
    const std::optional<Perturbation>& perturbation() const { return perturbation_; }

    std::size_t epoch_index(double t) const {
        if (t < 0) throw std::invalid_argument("time must be nonnegative");
        if (explicit_schedule_) {
            std::size_t k = 0;
            while (k + 1 < epochs_.size() && epochs_[k + 1]->start_time <= t) ++k;
            return k;
        }
        if (!perturbation_) return 0;
        return static_cast<std::size_t>(t / perturbation_->interval);
    }

    const Epoch& epoch_at(double t) const {
        std::size_t idx = epoch_index(t);
        if (idx < ready_.load(std::memory_order_acquire)) return *epochs_[idx];
        std::lock_guard<std::mutex> lock(build_mutex_);
        while (epochs_.size() <= idx) {
            if (epochs_.size() >= kMaxEpochs)
                throw std::runtime_error("epoch horizon cap exceeded");
            build_next_epoch();
        }
        ready_.store(epochs_.size(), std::memory_order_release);
        return *epochs_[idx];
    }

    const std::vector<Arc>& arcs_at(double t) const { return epoch_at(t).arcs; }

    std::uint64_t arc_hash_at(double t) const { return epoch_at(t).hash; }

    // Arcs present in every epoch / any epoch intersecting [0, t_end].
    std::vector<Arc> arcs_intersection(double t_end) const {
        std::vector<Arc> acc = epoch_at(0.0).arcs;
        for_each_epoch(t_end, [&](const Epoch& ep) {
            std::vector<Arc> next;
            next.reserve(acc.size());
            std::set_intersection(acc.begin(), acc.end(), ep.arcs.begin(), ep.arcs.end(),
                                  std::back_inserter(next));
            acc.swap(next);
        });
        return acc;
    }

    std::vector<Arc> arcs_union(double t_end) const {
        std::vector<Arc> acc = epoch_at(0.0).arcs;
        for_each_epoch(t_end, [&](const Epoch& ep) {
            std::vector<Arc> next;
            next.reserve(acc.size() + ep.arcs.size());
            std::set_union(acc.begin(), acc.end(), ep.arcs.begin(), ep.arcs.end(),
                           std::back_inserter(next));
            acc.swap(next);
        });
        return acc;
    }

    nlohmann::json sidecar_json() const {
        nlohmann::json j;
        j["n"] = n_;
        j["arc_count"] = base_arcs().size();
        if (perturbation_) {
            j["perturbation"] = {{"interval", perturbation_->interval},
                                 {"fraction", perturbation_->fraction},
                                 {"seed", perturbation_->seed}};
        } else {
            j["perturbation"] = nullptr;
        }
        return j;
    }

private:
    static constexpr std::size_t kMaxEpochs = 65536;

    int n_ = 0;
    std::optional<Perturbation> perturbation_;
    bool explicit_schedule_ = false;
    mutable std::vector<std::unique_ptr<Epoch>> epochs_;
    mutable std::atomic<std::size_t> ready_{0};
    mutable std::mutex build_mutex_;

    template <class Fn>
    void for_each_epoch(double t_end, Fn&& fn) const {
        if (explicit_schedule_) {
            for (const auto& ep : epochs_)
                if (ep->start_time <= t_end) fn(*ep);
            return;
        }
        if (!perturbation_) {
            fn(*epochs_.front());
            return;
        }
        std::size_t last = epoch_index(t_end);
        for (std::size_t k = 0; k <= last; ++k)
            fn(epoch_at(k * perturbation_->interval + perturbation_->interval * 0.5));
    }

    std::unique_ptr<Epoch> make_epoch(double start, std::vector<Arc> arcs) const {
        auto ep = std::make_unique<Epoch>();
        ep->start_time = start;
        ep->arcs = std::move(arcs);
        ep->in_offsets.assign(static_cast<std::size_t>(n_) + 1, 0);
        for (const Arc& a : ep->arcs) ep->in_offsets[static_cast<std::size_t>(a.to) + 1]++;
        for (int v = 0; v < n_; ++v)
            ep->in_offsets[static_cast<std::size_t>(v) + 1] += ep->in_offsets[static_cast<std::size_t>(v)];
        ep->in_attackers.resize(ep->arcs.size());
        std::vector<int> cursor(ep->in_offsets.begin(), ep->in_offsets.end() - 1);
        for (const Arc& a : ep->arcs)
            ep->in_attackers[static_cast<std::size_t>(cursor[static_cast<std::size_t>(a.to)]++)] = a.from;
        std::uint64_t h = hash2(0x9e3779b97f4a7c15ULL, static_cast<std::uint64_t>(n_));
        for (const Arc& a : ep->arcs) h = hash2(h, arc_key(a.from, a.to));
        ep->hash = h;
        return ep;
    }

    // One perturbation step: delete m existing arcs, add m arcs absent from the
    // previous epoch; |E| stays constant and added/deleted sets are disjoint.
    void build_next_epoch() const {
        const Epoch& prev = *epochs_.back();
        std::size_t k = epochs_.size();
        const Perturbation& p = *perturbation_;
        std::vector<Arc> arcs = prev.arcs;
        std::size_t m = static_cast<std::size_t>(
            std::ceil(p.fraction * static_cast<double>(arcs.size())));
        if (m > arcs.size()) m = arcs.size();
        Rng rng(hash2(p.seed, static_cast<std::uint64_t>(k)));

        std::unordered_set<std::uint64_t> present;
        present.reserve(arcs.size() * 2);
        for (const Arc& a : arcs) present.insert(arc_key(a.from, a.to));

        // Partial Fisher-Yates selects m distinct deletions.
        for (std::size_t i = 0; i < m && !arcs.empty(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.below(arcs.size() - i));
            std::swap(arcs[i], arcs[j]);
        }
        std::vector<Arc> kept(arcs.begin() + static_cast<std::ptrdiff_t>(std::min(m, arcs.size())),
                              arcs.end());

        std::vector<Arc> added;
        added.reserve(m);
        std::unordered_set<std::uint64_t> chosen;
        std::uint64_t possible = static_cast<std::uint64_t>(n_) * (n_ - 1);
        std::size_t want = std::min<std::size_t>(m, possible > present.size()
                                                        ? static_cast<std::size_t>(possible - present.size())
                                                        : 0);
        std::size_t guard = 0;
        while (added.size() < want && guard < 1000000) {
            int from = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_)));
            int to = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_)));
            ++guard;
            if (from == to) continue;
            std::uint64_t key = arc_key(from, to);
            if (present.count(key) || chosen.count(key)) continue;
            chosen.insert(key);
            added.push_back(Arc{from, to});
        }
        kept.insert(kept.end(), added.begin(), added.end());
        std::sort(kept.begin(), kept.end());
        epochs_.push_back(make_epoch(k * p.interval, std::move(kept)));
    }
};

inline const std::vector<Arc>& arcs_at(const TemporalGraph& g, double t) { return g.arcs_at(t); }

struct LoadedGraph {
    TemporalGraph graph;
    LoadReport report;
};

// Whitespace-separated "from to" pairs; '#' lines are comments. Node ids are
// remapped to dense 0..n-1 in sorted original order.
inline LoadedGraph load_edge_list(const std::string& path,
                                  std::optional<Perturbation> perturbation = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);
    std::vector<std::pair<long long, long long>> raw;
    std::string line;
    int lineno = 0;
    int self_loops = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '#') continue;
        std::istringstream ls(line);
        long long from = 0, to = 0;
        if (!(ls >> from >> to)) {
            throw std::runtime_error("malformed edge list line " + std::to_string(lineno) +
                                     " in " + path);
        }
        std::string rest;
        if (ls >> rest) {
            throw std::runtime_error("malformed edge list line " + std::to_string(lineno) +
                                     " in " + path);
        }
        if (from == to) {
            ++self_loops;
            continue;
        }
        raw.emplace_back(from, to);
    }
    std::vector<long long> ids;
    ids.reserve(raw.size() * 2);
    for (auto& [f, t] : raw) {
        ids.push_back(f);
        ids.push_back(t);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::unordered_map<long long, int> remap;
    remap.reserve(ids.size() * 2);
    for (std::size_t i = 0; i < ids.size(); ++i) remap[ids[i]] = static_cast<int>(i);

    std::vector<Arc> arcs;
    arcs.reserve(raw.size());
    for (auto& [f, t] : raw) arcs.push_back(Arc{remap[f], remap[t]});
    std::sort(arcs.begin(), arcs.end());
    std::size_t before = arcs.size();
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

    LoadReport report;
    report.node_count = static_cast<int>(ids.size());
    report.arc_count = arcs.size();
    report.self_loops_dropped = self_loops;
    report.duplicates_dropped = static_cast<int>(before - arcs.size());
    return LoadedGraph{TemporalGraph(report.node_count, std::move(arcs), perturbation), report};
}

// Directed Erdos-Renyi draw: every ordered pair (u,v), u != v, independently
// with probability p. Geometric skipping keeps it linear in the arc count.
inline TemporalGraph er_directed(int n, double p, std::uint64_t seed,
                                 std::optional<Perturbation> perturbation = std::nullopt) {
    if (n < 0) throw std::invalid_argument("node count must be nonnegative");
    if (p < 0 || p > 1) throw std::invalid_argument("edge probability must lie in [0,1]");
    std::vector<Arc> arcs;
    if (n > 1 && p > 0) {
        Rng rng(hash2(seed, 0x45520001ULL));
        const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1);
        arcs.reserve(static_cast<std::size_t>(p * static_cast<double>(total) * 1.1) + 16);
        if (p >= 1.0) {
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (u != v) arcs.push_back(Arc{u, v});
        } else {
            const double log1mp = std::log1p(-p);
            std::uint64_t idx = 0;
            while (true) {
                double u = rng.uniform();
                double skip = std::floor(std::log1p(-u) / log1mp);
                if (skip >= static_cast<double>(total - idx)) break;
                idx += static_cast<std::uint64_t>(skip);
                int from = static_cast<int>(idx / static_cast<std::uint64_t>(n - 1));
                int rem = static_cast<int>(idx % static_cast<std::uint64_t>(n - 1));
                int to = rem >= from ? rem + 1 : rem;
                arcs.push_back(Arc{from, to});
                ++idx;
                if (idx >= total) break;
            }
        }
    }
    return TemporalGraph(n, std::move(arcs), perturbation);
}

inline void export_edge_list(const TemporalGraph& g, const std::string& txt_path,
                             const std::string& json_path) {
    std::ofstream out(txt_path);
    if (!out) throw std::runtime_error("cannot write edge list: " + txt_path);
    out << "# directed arc list: from to\n";
    for (const Arc& a : g.base_arcs()) out << a.from << '\t' << a.to << '\n';
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot write sidecar: " + json_path);
    js << g.sidecar_json().dump(2) << '\n';
}

inline std::size_t symmetric_difference_size(const std::vector<Arc>& a, const std::vector<Arc>& b) {
    std::vector<Arc> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
    return diff.size();
}

}  // namespace cyberdyn

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyberdyn/integrator.hpp"
#include "cyberdyn/mean_structure.hpp"
#include "cyberdyn/model.hpp"
#include "cyberdyn/parallel.hpp"
#include "cyberdyn/scc.hpp"
#include "cyberdyn/spectral.hpp"

namespace cyberdyn {

// ---------------------------------------------------------------------------
// Attractivity experiments

struct PairDistance {
    int a = 0;
    int b = 0;
    double final_distance = 0.0;
    double min_final_half = 0.0;
    double max_final_half = 0.0;
    bool tail_decreasing = false;
};

struct AttractivityVerdict {
    std::string config_id;
    std::vector<double> fractions;
    std::vector<PairDistance> pairs;
    std::string verdict;      // "attractive" | "not_attractive" | "inconclusive"
    std::string limit_kind;   // "zero" | "positive" | "mixed"
    std::vector<double> final_means;
    double tolerance = 1e-3;
    int positive_nodes = 0;
    int node_count = 0;

    nlohmann::json to_json() const {
        nlohmann::json pj = nlohmann::json::array();
        for (const auto& p : pairs)
            pj.push_back({{"a", p.a},
                          {"b", p.b},
                          {"final_distance", p.final_distance},
                          {"min_final_half", p.min_final_half},
                          {"max_final_half", p.max_final_half},
                          {"tail_decreasing", p.tail_decreasing}});
        return {{"config_id", config_id}, {"fractions", fractions},
                {"pairs", pj},           {"verdict", verdict},
                {"limit_kind", limit_kind}, {"final_means", final_means},
                {"tolerance", tolerance},   {"positive_nodes", positive_nodes},
                {"node_count", node_count}};
    }
};

struct AttractivityOptions {
    double t_end = 100.0;
    double dt = 0.05;
    double tolerance = 1e-3;
    std::uint64_t init_seed = 1;
    StepMethod method = StepMethod::euler;
    std::string config_id;
};

struct AttractivityRun {
    double fraction = 0.5;
    const ParamBundle* bundle = nullptr;  // may differ per run for realization studies
    std::uint64_t init_seed = 0;
};

namespace detail {

inline AttractivityVerdict judge_runs(const std::vector<Trajectory>& trajs,
                                      std::vector<double> fractions,
                                      const AttractivityOptions& opt) {
    AttractivityVerdict verdict;
    verdict.config_id = opt.config_id;
    verdict.fractions = std::move(fractions);
    verdict.tolerance = opt.tolerance;
    verdict.node_count = trajs.front().n();

    const std::size_t steps = trajs.front().times.size();
    if (steps < 20) throw std::invalid_argument("horizon too short for a verdict");
    const std::size_t half_start = steps / 2;
    const std::size_t last_decile = steps - steps / 10 - 1;
    const std::size_t ref_decile_end = (steps * 3) / 4;
    const std::size_t ref_decile_start = ref_decile_end - steps / 10;

    bool all_final_small = true;
    bool all_tails_decreasing = true;
    bool some_pair_persistent = false;
    // The persistence bar never shrinks below the default tolerance, so
    // tightening the tolerance cannot flip an attractive verdict to
    // not_attractive.
    const double persist_bar = 10.0 * std::max(opt.tolerance, 1e-3);
    for (std::size_t a = 0; a < trajs.size(); ++a) {
        for (std::size_t b = a + 1; b < trajs.size(); ++b) {
            auto d = trajectory_distance(trajs[a], trajs[b]);
            PairDistance pd;
            pd.a = static_cast<int>(a);
            pd.b = static_cast<int>(b);
            pd.final_distance = d.back();
            double lo = d[half_start], hi = d[half_start];
            for (std::size_t k = half_start; k < d.size(); ++k) {
                lo = std::min(lo, d[k]);
                hi = std::max(hi, d[k]);
            }
            pd.min_final_half = lo;
            pd.max_final_half = hi;
            double tail_mean = 0.0, ref_mean = 0.0;
            for (std::size_t k = last_decile; k < steps; ++k) tail_mean += d[k];
            tail_mean /= static_cast<double>(steps - last_decile);
            for (std::size_t k = ref_decile_start; k < ref_decile_end; ++k) ref_mean += d[k];
            ref_mean /= static_cast<double>(ref_decile_end - ref_decile_start);
            pd.tail_decreasing = tail_mean <= ref_mean * 1.5 + 1e-12;

            all_final_small = all_final_small && pd.final_distance < opt.tolerance;
            all_tails_decreasing = all_tails_decreasing && pd.tail_decreasing;
            some_pair_persistent = some_pair_persistent || pd.min_final_half > persist_bar;
            verdict.pairs.push_back(pd);
        }
    }

    if (all_final_small && all_tails_decreasing) verdict.verdict = "attractive";
    else if (some_pair_persistent) verdict.verdict = "not_attractive";
    else verdict.verdict = "inconclusive";

    // Per-node limit positivity of the first trajectory over the last 10%.
    const Trajectory& ref = trajs.front();
    int n = ref.n();
    int positive = 0;
    if (ref.has_full_states()) {
        for (int v = 0; v < n; ++v) {
            double lo = 1.0;
            for (std::size_t k = last_decile; k < steps; ++k) lo = std::min(lo, ref.value(k, v));
            if (lo > 1e-4) ++positive;
        }
        verdict.positive_nodes = positive;
        if (positive == n) verdict.limit_kind = "positive";
        else if (positive == 0) verdict.limit_kind = "zero";
        else verdict.limit_kind = "mixed";
    } else {
        int tracked = 0;
        for (int v : ref.probe_nodes()) {
            ++tracked;
            double lo = 1.0;
            for (std::size_t k = last_decile; k < steps; ++k) lo = std::min(lo, ref.value(k, v));
            if (lo > 1e-4) ++positive;
        }
        verdict.positive_nodes = positive;
        if (positive == tracked) verdict.limit_kind = "positive";
        else if (positive == 0) verdict.limit_kind = "zero";
        else verdict.limit_kind = "mixed";
    }

    for (const auto& tr : trajs) verdict.final_means.push_back(tr.mean_series.back());
    return verdict;
}

}  // namespace detail

// Integrates one trajectory per run spec (in parallel) and applies the verdict
// rule: attractive needs every pairwise sup distance below tolerance at t_end
// with a non-increasing tail; not_attractive needs a pair persistently above
// ten times the tolerance over the final half.
inline AttractivityVerdict attractivity_runs(const DynamicsModel& model,
                                             const std::vector<AttractivityRun>& runs,
                                             const AttractivityOptions& opt,
                                             std::vector<Trajectory>* out_trajs = nullptr) {
    if (runs.size() < 2) throw std::invalid_argument("need at least two runs");
    std::vector<Trajectory> trajs(runs.size());
    parallel_for(static_cast<int>(runs.size()), [&](int idx) {
        const AttractivityRun& run = runs[static_cast<std::size_t>(idx)];
        IntegrateOptions io;
        io.dt = opt.dt;
        io.method = opt.method;
        io.store_full = run.bundle->n() <= 4000 ? 1 : 0;
        io.init_seed = run.init_seed;
        auto i0 = random_initial(run.bundle->n(), run.fraction, run.init_seed);
        trajs[static_cast<std::size_t>(idx)] = integrate(model, *run.bundle, i0, opt.t_end, io);
    });
    std::vector<double> fractions;
    for (const auto& r : runs) fractions.push_back(r.fraction);
    AttractivityVerdict v = detail::judge_runs(trajs, std::move(fractions), opt);
    if (out_trajs) *out_trajs = std::move(trajs);
    return v;
}

// All runs share one parameter realization; only the initial sets differ.
inline AttractivityVerdict attractivity_experiment(const DynamicsModel& model,
                                                   const ParamBundle& bundle,
                                                   const std::vector<double>& fractions,
                                                   const AttractivityOptions& opt = {},
                                                   std::vector<Trajectory>* out_trajs = nullptr) {
    if (fractions.size() < 2) throw std::invalid_argument("need at least two initial fractions");
    bool any_positive = false;
    for (double f : fractions) any_positive = any_positive || f > 0;
    if (!any_positive) throw std::invalid_argument("at least one fraction must be positive");
    std::vector<AttractivityRun> runs;
    for (std::size_t k = 0; k < fractions.size(); ++k)
        runs.push_back(AttractivityRun{fractions[k], &bundle,
                                       hash2(opt.init_seed, 0x1717ULL + k)});
    return attractivity_runs(model, runs, opt, out_trajs);
}

// ---------------------------------------------------------------------------
// SCC-wise classification

struct SccBlockReport {
    std::vector<int> nodes;
    double mu = 0.0;
    bool has_alpha = false;
    std::vector<int> upstream;
    std::string label;  // "zero-attractive" | "positive-attractive" | "attractive-possibly-zero"
};

struct SccClassification {
    SccDecomposition decomposition;
    std::vector<SccBlockReport> blocks;

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& b : blocks)
            arr.push_back({{"nodes", b.nodes},
                           {"mu", b.mu},
                           {"has_alpha", b.has_alpha},
                           {"upstream", b.upstream},
                           {"label", b.label}});
        return {{"component_count", blocks.size()}, {"blocks", arr}};
    }
};

// Labels each strongly connected block of the mean attack structure by the
// block exponent, the presence of mean pull-based attacks, and the labels of
// its upstream blocks.
inline SccClassification scc_classification(const DynamicsModel& model, const ParamBundle& bundle,
                                            double T, double mle_horizon = 200.0,
                                            double near_band = 0.01, double dt = 0.05) {
    const int n = bundle.n();
    if (n == 0) throw std::invalid_argument("classification on an empty graph");
    MeanStructure mean = mean_structure(*bundle.graph, bundle.gamma, T, dt);
    SccClassification out;
    out.decomposition = scc_decompose(mean.positive_arcs(), n);

    const std::size_t K = out.decomposition.size();
    out.blocks.resize(K);

    // Restriction of the zero-state linearization to one block.
    for (std::size_t k = 0; k < K; ++k) {
        const auto& nodes = out.decomposition.components[k];
        SccBlockReport& blk = out.blocks[k];
        blk.nodes = nodes;
        blk.upstream = out.decomposition.upstream_sets[k];

        const ParamBundle* b = &bundle;
        DynamicsModel m = model;
        std::vector<int> block_nodes = nodes;
        auto cache = std::make_shared<std::pair<double, SparseMatrix>>(-1.0, SparseMatrix{});
        LinearSystem sys{static_cast<int>(nodes.size()),
                         [m, b, block_nodes, cache](double t, std::span<const double> x,
                                                    std::span<double> y) {
                             if (cache->first != t || cache->second.n == 0) {
                                 cache->second = jacobian_at_zero(m, *b, t);
                                 cache->first = t;
                             }
                             const SparseMatrix& jac = cache->second;
                             for (std::size_t r = 0; r < block_nodes.size(); ++r) {
                                 int g = block_nodes[r];
                                 double s = 0.0;
                                 for (int p = jac.row_ptr[static_cast<std::size_t>(g)];
                                      p < jac.row_ptr[static_cast<std::size_t>(g) + 1]; ++p) {
                                     int col = jac.cols[static_cast<std::size_t>(p)];
                                     // local index lookup by binary search on block_nodes
                                     auto it = std::lower_bound(block_nodes.begin(), block_nodes.end(), col);
                                     if (it != block_nodes.end() && *it == col)
                                         s += jac.vals[static_cast<std::size_t>(p)] *
                                              x[static_cast<std::size_t>(it - block_nodes.begin())];
                                 }
                                 y[r] = s;
                             }
                         }};
        blk.mu = mle(sys, mle_horizon, 1.0, dt).mu;

        for (int v : nodes) {
            if (mean_value(bundle.alpha, static_cast<std::uint64_t>(v), 0.0, T, dt) > 1e-9) {
                blk.has_alpha = true;
                break;
            }
        }
    }

    // Decision list, upstream blocks first (the order guarantees j < k for
    // every condensation arc j -> k).
    for (std::size_t k = 0; k < K; ++k) {
        SccBlockReport& blk = out.blocks[k];
        bool upstream_positive = false;
        bool upstream_all_zero = true;
        for (int j : blk.upstream) {
            const std::string& lj = out.blocks[static_cast<std::size_t>(j)].label;
            if (lj == "positive-attractive") upstream_positive = true;
            if (lj != "zero-attractive") upstream_all_zero = false;
        }
        if (blk.has_alpha || upstream_positive) blk.label = "positive-attractive";
        else if (blk.mu > near_band) blk.label = "positive-attractive";
        else if (blk.mu < -near_band && upstream_all_zero) blk.label = "zero-attractive";
        else blk.label = "attractive-possibly-zero";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trajectory envelopes

// Per-node scalar comparison systems: the true component is squeezed between
// d/dt x = -A x + B built from parameter extremes at the box corners.
struct BoundEnvelope {
    int n = 0;
    std::vector<double> a_lo, b_lo;  // lower envelope coefficients
    std::vector<double> a_hi, b_hi;  // upper envelope coefficients
    std::vector<double> i0_lo, i0_hi;
    std::vector<char> degenerate_lo, degenerate_hi;  // A == 0 (no decay; B is 0 too)

    // Closed forms: exp(-A t) (i0 - B/A) + B/A, with the A -> 0 limit i0 + B t.
    double lower(int v, double t) const {
        return eval(a_lo[static_cast<std::size_t>(v)], b_lo[static_cast<std::size_t>(v)],
                    i0_lo[static_cast<std::size_t>(v)], t);
    }
    double upper(int v, double t) const {
        return eval(a_hi[static_cast<std::size_t>(v)], b_hi[static_cast<std::size_t>(v)],
                    i0_hi[static_cast<std::size_t>(v)], t);
    }

    bool any_degenerate() const {
        for (char c : degenerate_lo)
            if (c) return true;
        for (char c : degenerate_hi)
            if (c) return true;
        return false;
    }

private:
    static double eval(double a, double b, double x0, double t) {
        if (a == 0.0) return x0 + b * t;
        return std::exp(-a * t) * (x0 - b / a) + b / a;
    }
};

// Extreme attack rates use the arcs that are always present for the lower
// corner and the union over epochs for the upper corner.
inline BoundEnvelope bound_envelope(const DynamicsModel& model, const ParamBundle& bundle,
                                    std::span<const double> i_min, std::span<const double> i_max,
                                    std::span<const double> i0, double structure_horizon = 100.0) {
    const int n = bundle.n();
    if (n == 0) throw std::invalid_argument("envelope on an empty graph");
    if (static_cast<int>(i_min.size()) != n || static_cast<int>(i_max.size()) != n ||
        static_cast<int>(i0.size()) != n)
        throw std::invalid_argument("envelope vector dimension mismatch");
    for (int v = 0; v < n; ++v)
        if (i_min[static_cast<std::size_t>(v)] > i_max[static_cast<std::size_t>(v)])
            throw std::invalid_argument("i_min must not exceed i_max");

    auto lower_arcs = bundle.graph->arcs_intersection(structure_horizon);
    auto upper_arcs = bundle.graph->arcs_union(structure_horizon);

    auto build_adj = [n](const std::vector<Arc>& arcs) {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (const Arc& a : arcs) adj[static_cast<std::size_t>(a.to)].push_back(a.from);
        for (auto& row : adj) std::sort(row.begin(), row.end());
        return adj;
    };
    auto adj_lo = build_adj(lower_arcs);
    auto adj_hi = build_adj(upper_arcs);

    BoundEnvelope env;
    env.n = n;
    env.a_lo.resize(static_cast<std::size_t>(n));
    env.b_lo.resize(static_cast<std::size_t>(n));
    env.a_hi.resize(static_cast<std::size_t>(n));
    env.b_hi.resize(static_cast<std::size_t>(n));
    env.i0_lo.assign(i0.begin(), i0.end());
    env.i0_hi.assign(i0.begin(), i0.end());
    env.degenerate_lo.assign(static_cast<std::size_t>(n), 0);
    env.degenerate_hi.assign(static_cast<std::size_t>(n), 0);

    std::vector<double> gammas;
    for (int v = 0; v < n; ++v) {
        double alpha_lo = bundle.alpha.support_lo(static_cast<std::uint64_t>(v));
        double alpha_hi = bundle.alpha.support_hi(static_cast<std::uint64_t>(v));
        double beta_lo = bundle.beta.support_lo(static_cast<std::uint64_t>(v));
        double beta_hi = bundle.beta.support_hi(static_cast<std::uint64_t>(v));

        auto gamma_bound = [&](int u, bool hi) {
            std::uint64_t code = bundle.gamma.shape() == ParamShape::per_arc
                                     ? ParamProcess::arc_code(v, u)
                                     : 0;
            return hi ? bundle.gamma.support_hi(code) : bundle.gamma.support_lo(code);
        };

        // g at the lower corner: i_min with the floor rates on always-present arcs.
        const auto& lo_ids = adj_lo[static_cast<std::size_t>(v)];
        gammas.resize(lo_ids.size());
        for (std::size_t k = 0; k < lo_ids.size(); ++k) gammas[k] = gamma_bound(lo_ids[k], false);
        double g_lo = model.eval_g(i_min, alpha_lo,
                                   NeighborView{{lo_ids.data(), lo_ids.size()},
                                                {gammas.data(), gammas.size()}});

        const auto& hi_ids = adj_hi[static_cast<std::size_t>(v)];
        gammas.resize(hi_ids.size());
        for (std::size_t k = 0; k < hi_ids.size(); ++k) gammas[k] = gamma_bound(hi_ids[k], true);
        double g_hi = model.eval_g(i_max, alpha_hi,
                                   NeighborView{{hi_ids.data(), hi_ids.size()},
                                                {gammas.data(), gammas.size()}});

        // Recovery extremes over the state box; identity-in-beta reduces to the
        // beta support. Custom h is probed on 16^min(n,3) corner-biased box
        // states, which only brackets the true extremes for well-behaved h.
        double h_hi, h_lo;
        if (model.h_family == HFamily::beta_identity) {
            h_hi = beta_hi;
            h_lo = beta_lo;
        } else {
            h_hi = 0.0;
            h_lo = 1.0;
            int probes = 16;
            for (int d = 1; d < std::min(n, 3); ++d) probes *= 16;
            std::vector<double> probe(static_cast<std::size_t>(n));
            for (int s = 0; s < probes; ++s) {
                for (int u = 0; u < n; ++u) {
                    std::uint64_t h = hash3(0xB0BDULL, static_cast<std::uint64_t>(s),
                                            static_cast<std::uint64_t>(u));
                    double lo_u = i_min[static_cast<std::size_t>(u)];
                    double hi_u = i_max[static_cast<std::size_t>(u)];
                    // half the draws snap to a face of the box
                    double w = u01(h);
                    if (h & 1) w = w < 0.5 ? 0.0 : 1.0;
                    probe[static_cast<std::size_t>(u)] = lo_u + w * (hi_u - lo_u);
                }
                h_hi = std::max(h_hi, model.eval_h(probe, beta_hi, v));
                h_lo = std::min(h_lo, model.eval_h(probe, beta_lo, v));
            }
        }

        env.a_lo[static_cast<std::size_t>(v)] = h_hi + g_lo;
        env.b_lo[static_cast<std::size_t>(v)] = g_lo;
        env.a_hi[static_cast<std::size_t>(v)] = h_lo + g_hi;
        env.b_hi[static_cast<std::size_t>(v)] = g_hi;
        if (env.a_lo[static_cast<std::size_t>(v)] == 0.0) env.degenerate_lo[static_cast<std::size_t>(v)] = 1;
        if (env.a_hi[static_cast<std::size_t>(v)] == 0.0) env.degenerate_hi[static_cast<std::size_t>(v)] = 1;
    }
    return env;
}

inline BoundEnvelope bound_envelope(const DynamicsModel& model, const ParamBundle& bundle,
                                    std::span<const double> i0, double structure_horizon = 100.0) {
    std::vector<double> zeros(static_cast<std::size_t>(bundle.n()), 0.0);
    std::vector<double> ones(static_cast<std::size_t>(bundle.n()), 1.0);
    return bound_envelope(model, bundle, zeros, ones, i0, structure_horizon);
}

struct SandwichViolation {
    double t = 0.0;
    int node = 0;
    double value = 0.0;
    double bound = 0.0;
    bool lower_side = false;
};

struct SandwichReport {
    long violations = 0;
    std::optional<SandwichViolation> first;
    bool ok() const { return violations == 0; }
};

enum class EnvelopeEval { discrete, closed_form };

// Checks lower(t) - 1e-9 <= i_v(t) <= upper(t) + 1e-9 on the whole grid. In
// discrete mode the envelope ODEs are stepped with the trajectory's own grid,
// which keeps the comparison scheme-consistent for forward-Euler trajectories;
// closed-form mode compares against the exact exponentials.
inline SandwichReport sandwich_check(const Trajectory& traj, const BoundEnvelope& env,
                                     EnvelopeEval mode = EnvelopeEval::discrete,
                                     double slack = 1e-9) {
    if (!traj.has_full_states())
        throw std::invalid_argument("sandwich check needs full per-node states");
    if (traj.n() != env.n) throw std::invalid_argument("envelope dimension mismatch");

    SandwichReport report;
    const int n = traj.n();
    const double dt = traj.meta.dt;
    std::vector<double> lo(env.i0_lo.begin(), env.i0_lo.end());
    std::vector<double> hi(env.i0_hi.begin(), env.i0_hi.end());

    auto note = [&](double t, int v, double value, double bound, bool lower_side) {
        ++report.violations;
        if (!report.first) report.first = SandwichViolation{t, v, value, bound, lower_side};
    };

    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        double t = traj.times[k];
        auto row = traj.state_row(k);
        for (int v = 0; v < n; ++v) {
            double lo_v, hi_v;
            if (mode == EnvelopeEval::closed_form) {
                lo_v = env.lower(v, t);
                hi_v = env.upper(v, t);
            } else {
                lo_v = lo[static_cast<std::size_t>(v)];
                hi_v = hi[static_cast<std::size_t>(v)];
            }
            double x = row[static_cast<std::size_t>(v)];
            if (x < lo_v - slack) note(t, v, x, lo_v, true);
            if (x > hi_v + slack) note(t, v, x, hi_v, false);
        }
        if (mode == EnvelopeEval::discrete && k + 1 < traj.times.size()) {
            for (int v = 0; v < n; ++v) {
                std::size_t vi = static_cast<std::size_t>(v);
                lo[vi] += dt * (-env.a_lo[vi] * lo[vi] + env.b_lo[vi]);
                hi[vi] += dt * (-env.a_hi[vi] * hi[vi] + env.b_hi[vi]);
                if (lo[vi] < 0.0) lo[vi] = 0.0;
            }
        }
    }
    return report;
}

// CSV: "t,lower_v,upper_v" columns for the selected nodes.
inline void write_envelope_csv(const BoundEnvelope& env, const std::vector<int>& nodes,
                               double t_end, double dt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write envelope csv: " + path);
    out << 't';
    for (int v : nodes) out << ",lower_" << v << ",upper_" << v;
    out << '\n';
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        out << buf;
    };
    auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t k = 0; k <= steps; ++k) {
        double t = static_cast<double>(k) * dt;
        put(t);
        for (int v : nodes) {
            out << ',';
            put(env.lower(v, t));
            out << ',';
            put(env.upper(v, t));
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Periodicity of the settled trajectory

struct PeriodicityReport {
    bool pass = false;
    double max_defect = 0.0;
    double period = 0.0;
    double burn_in = 0.0;
    double epsilon = 0.0;

    nlohmann::json to_json() const {
        return {{"pass", pass}, {"max_defect", max_defect}, {"period", period},
                {"burn_in", burn_in}, {"epsilon", epsilon}};
    }
};

// After burn-in, the defect sup_t ||i(t+w) - i(t)|| over the grid; i(t+w) is
// linearly interpolated when w is not a grid multiple.
inline PeriodicityReport periodicity_check(const Trajectory& traj, double period, double burn_in,
                                           double epsilon) {
    if (!traj.has_full_states())
        throw std::invalid_argument("periodicity check needs full per-node states");
    double t_end = traj.times.back();
    if (t_end < burn_in + 3 * period)
        throw std::invalid_argument("horizon too short: need burn_in + 3 periods");

    PeriodicityReport rep;
    rep.period = period;
    rep.burn_in = burn_in;
    rep.epsilon = epsilon;

    const double dt = traj.meta.dt;
    const int n = traj.n();
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        double t = traj.times[k];
        if (t < burn_in) continue;
        double ts = t + period;
        if (ts > t_end) break;
        double pos = ts / dt;
        auto j = static_cast<std::size_t>(pos);
        if (j + 1 >= traj.times.size()) break;
        double w = pos - static_cast<double>(j);
        auto row = traj.state_row(k);
        auto rj = traj.state_row(j);
        auto rj1 = traj.state_row(j + 1);
        for (int v = 0; v < n; ++v) {
            std::size_t vi = static_cast<std::size_t>(v);
            double shifted = (1.0 - w) * rj[vi] + w * rj1[vi];
            worst = std::max(worst, std::fabs(shifted - row[vi]));
        }
    }
    rep.max_defect = worst;
    rep.pass = worst < epsilon;
    return rep;
}

}  // namespace cyberdyn

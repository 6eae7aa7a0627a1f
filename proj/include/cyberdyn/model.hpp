#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyberdyn/linalg.hpp"
#include "cyberdyn/param_process.hpp"
#include "cyberdyn/temporal_graph.hpp"

namespace cyberdyn {

enum class GFamily { prod, sum, custom };
enum class HFamily { beta_identity, custom };

// In-neighborhood of one node with its push probabilities, matched by position.
struct NeighborView {
    std::span<const int> ids;        // ascending node ids
    std::span<const double> gammas;  // gamma_{v,ids[k]}
};

struct CustomG {
    std::string name;
    std::function<double(std::span<const double>, double, const NeighborView&)> value;
    // d g_v / d i_{ids[k]}; empty means no analytic partials
    std::function<double(std::span<const double>, double, const NeighborView&, int)> partial;
    bool allow_fd = false;
};

struct CustomH {
    std::string name;
    // h_v(i, beta_v) for node v; may depend on the node's own state but not on
    // other nodes' states.
    std::function<double(std::span<const double>, double, int)> value;
};

// Attack success probability, product form: compromise escapes every
// independent defense. Neighbor order is ascending id, so the product is
// bit-reproducible. The arrangement alpha + (1-alpha)(1-P) keeps g(0) == alpha
// exact in floating point.
inline double g_prod(std::span<const double> state, double alpha_v, const NeighborView& nb) {
    double prod = 1.0;
    for (std::size_t k = 0; k < nb.ids.size(); ++k)
        prod *= 1.0 - nb.gammas[k] * state[static_cast<std::size_t>(nb.ids[k])];
    return alpha_v + (1.0 - alpha_v) * (1.0 - prod);
}

// Additive form. May exceed 1; it is consumed as a rate inside the drift, and
// the (1 - i_v) factor plus the integrator clamp keep the state in [0,1].
inline double g_sum(std::span<const double> state, double alpha_v, const NeighborView& nb) {
    double sum = alpha_v;
    for (std::size_t k = 0; k < nb.ids.size(); ++k)
        sum += nb.gammas[k] * state[static_cast<std::size_t>(nb.ids[k])];
    return sum;
}

namespace detail {

inline double squared_mean_g(std::span<const double> state, double alpha_v, const NeighborView& nb) {
    double s = 0.0;
    for (std::size_t k = 0; k < nb.ids.size(); ++k)
        s += nb.gammas[k] * state[static_cast<std::size_t>(nb.ids[k])];
    double m = static_cast<double>(std::max<std::size_t>(nb.ids.size(), 1));
    double q = s / m;
    return alpha_v + q * q;
}

inline double squared_mean_g_partial(std::span<const double> state, double /*alpha_v*/,
                                     const NeighborView& nb, int k) {
    double s = 0.0;
    for (std::size_t j = 0; j < nb.ids.size(); ++j)
        s += nb.gammas[j] * state[static_cast<std::size_t>(nb.ids[j])];
    double m = static_cast<double>(std::max<std::size_t>(nb.ids.size(), 1));
    return 2.0 * (s / m) * (nb.gammas[static_cast<std::size_t>(k)] / m);
}

}  // namespace detail

struct DynamicsModel {
    GFamily g_family = GFamily::sum;
    HFamily h_family = HFamily::beta_identity;
    CustomG g_custom;
    CustomH h_custom;

    std::string name() const {
        switch (g_family) {
            case GFamily::prod: return "prod";
            case GFamily::sum: return "sum";
            case GFamily::custom: return "custom:" + g_custom.name;
        }
        return "?";
    }

    static DynamicsModel prod() {
        DynamicsModel m;
        m.g_family = GFamily::prod;
        return m;
    }

    static DynamicsModel sum() {
        DynamicsModel m;
        m.g_family = GFamily::sum;
        return m;
    }

    static DynamicsModel custom(CustomG g) {
        DynamicsModel m;
        m.g_family = GFamily::custom;
        m.g_custom = std::move(g);
        return m;
    }

    // Built-in custom attack functions, addressable as "custom:<name>".
    static const std::map<std::string, CustomG>& registry() {
        static const std::map<std::string, CustomG> reg = [] {
            std::map<std::string, CustomG> r;
            r["squared_mean"] = CustomG{"squared_mean", detail::squared_mean_g,
                                        detail::squared_mean_g_partial, true};
            return r;
        }();
        return reg;
    }

    static DynamicsModel from_string(const std::string& s) {
        if (s == "prod") return prod();
        if (s == "sum") return sum();
        if (s.rfind("custom:", 0) == 0) {
            std::string name = s.substr(7);
            auto it = registry().find(name);
            if (it == registry().end())
                throw std::invalid_argument("unknown custom attack function: " + name);
            return custom(it->second);
        }
        throw std::invalid_argument("unknown model family: " + s);
    }

    double eval_g(std::span<const double> state, double alpha_v, const NeighborView& nb) const {
        switch (g_family) {
            case GFamily::prod: return g_prod(state, alpha_v, nb);
            case GFamily::sum: return g_sum(state, alpha_v, nb);
            case GFamily::custom: return g_custom.value(state, alpha_v, nb);
        }
        return 0.0;
    }

    double eval_h(std::span<const double> state, double beta_v, int v = 0) const {
        return h_family == HFamily::beta_identity ? beta_v : h_custom.value(state, beta_v, v);
    }
};

// Reusable scratch buffers for the per-node neighbor views.
struct Workspace {
    std::vector<double> gammas;
};

namespace detail {

inline NeighborView neighbor_view(const TemporalGraph::Epoch& ep, const ParamBundle& b, double t,
                                  int v, Workspace& ws, double gamma_scalar, bool gamma_time_only) {
    auto ids = ep.attackers_of(v);
    ws.gammas.resize(ids.size());
    if (gamma_time_only) {
        for (std::size_t k = 0; k < ids.size(); ++k) ws.gammas[k] = gamma_scalar;
    } else {
        for (std::size_t k = 0; k < ids.size(); ++k) ws.gammas[k] = b.gamma_at(t, v, ids[k]);
    }
    return NeighborView{ids, {ws.gammas.data(), ws.gammas.size()}};
}

}  // namespace detail

// di_v/dt = -h_v(i, beta_v(t)) * i_v + g_v(i, alpha_v(t), Gamma(t)) * (1 - i_v)
inline void drift(const DynamicsModel& model, const ParamBundle& bundle, double t,
                  std::span<const double> state, std::span<double> out, Workspace& ws) {
    const int n = bundle.n();
    if (n == 0) throw std::invalid_argument("drift on an empty graph");
    if (static_cast<int>(state.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("state dimension mismatch");
    const TemporalGraph::Epoch& ep = bundle.graph->epoch_at(t);
    const bool gamma_time_only = bundle.gamma.time_only();
    const double gamma_scalar = gamma_time_only ? bundle.gamma.eval(t, 0) : 0.0;
    const bool alpha_time_only = bundle.alpha.time_only();
    const double alpha_scalar = alpha_time_only ? bundle.alpha.eval(t, 0) : 0.0;
    const bool beta_time_only = bundle.beta.time_only();
    const double beta_scalar = beta_time_only ? bundle.beta.eval(t, 0) : 0.0;

    for (int v = 0; v < n; ++v) {
        NeighborView nb = detail::neighbor_view(ep, bundle, t, v, ws, gamma_scalar, gamma_time_only);
        double alpha_v = alpha_time_only ? alpha_scalar : bundle.alpha_at(t, v);
        double beta_v = beta_time_only ? beta_scalar : bundle.beta_at(t, v);
        double g = model.eval_g(state, alpha_v, nb);
        double h = model.eval_h(state, beta_v, v);
        out[static_cast<std::size_t>(v)] =
            -h * state[static_cast<std::size_t>(v)] + g * (1.0 - state[static_cast<std::size_t>(v)]);
    }
}

inline std::vector<double> drift(const DynamicsModel& model, const ParamBundle& bundle, double t,
                                 std::span<const double> state) {
    std::vector<double> out(state.size());
    Workspace ws;
    drift(model, bundle, t, state, out, ws);
    return out;
}

namespace detail {

inline double g_partial(const DynamicsModel& model, std::span<const double> state, double alpha_v,
                        const NeighborView& nb, int k, std::vector<double>& scratch) {
    switch (model.g_family) {
        case GFamily::prod: {
            double prod = 1.0;
            for (std::size_t j = 0; j < nb.ids.size(); ++j) {
                if (static_cast<int>(j) == k) continue;
                prod *= 1.0 - nb.gammas[j] * state[static_cast<std::size_t>(nb.ids[j])];
            }
            return (1.0 - alpha_v) * nb.gammas[static_cast<std::size_t>(k)] * prod;
        }
        case GFamily::sum:
            return nb.gammas[static_cast<std::size_t>(k)];
        case GFamily::custom: {
            if (model.g_custom.partial)
                return model.g_custom.partial(state, alpha_v, nb, k);
            if (!model.g_custom.allow_fd)
                throw std::invalid_argument(
                    "custom attack function has no analytic partials and finite differences are "
                    "not enabled");
            // Central difference, step scaled to the state magnitude.
            scratch.assign(state.begin(), state.end());
            int u = nb.ids[static_cast<std::size_t>(k)];
            double h = 1e-6 * std::max(1.0, std::fabs(state[static_cast<std::size_t>(u)]));
            scratch[static_cast<std::size_t>(u)] = state[static_cast<std::size_t>(u)] + h;
            double up = model.g_custom.value(scratch, alpha_v, nb);
            scratch[static_cast<std::size_t>(u)] = state[static_cast<std::size_t>(u)] - h;
            double dn = model.g_custom.value(scratch, alpha_v, nb);
            scratch[static_cast<std::size_t>(u)] = state[static_cast<std::size_t>(u)];
            return (up - dn) / (2 * h);
        }
    }
    return 0.0;
}

}  // namespace detail

// Jacobian of the drift at an arbitrary state, in sparse row form. Row v holds
// the couplings to the attackers of v plus the diagonal.
inline SparseMatrix jacobian(const DynamicsModel& model, const ParamBundle& bundle, double t,
                             std::span<const double> state) {
    const int n = bundle.n();
    if (n == 0) throw std::invalid_argument("jacobian on an empty graph");
    const TemporalGraph::Epoch& ep = bundle.graph->epoch_at(t);
    const bool gamma_time_only = bundle.gamma.time_only();
    const double gamma_scalar = gamma_time_only ? bundle.gamma.eval(t, 0) : 0.0;

    SparseMatrix jac;
    jac.n = n;
    jac.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    Workspace ws;
    std::vector<double> scratch;

    std::size_t nnz = ep.arcs.size() + static_cast<std::size_t>(n);
    jac.cols.reserve(nnz);
    jac.vals.reserve(nnz);
    for (int v = 0; v < n; ++v) {
        NeighborView nb = detail::neighbor_view(ep, bundle, t, v, ws, gamma_scalar, gamma_time_only);
        double alpha_v = bundle.alpha_at(t, v);
        double beta_v = bundle.beta_at(t, v);
        double g = model.eval_g(state, alpha_v, nb);
        double h = model.eval_h(state, beta_v, v);
        double iv = state[static_cast<std::size_t>(v)];
        bool diag_done = false;
        // No self-arcs, so d g_v / d i_v = 0; a custom h may still depend on
        // the node's own state.
        double diag = -h - g;
        if (model.h_family == HFamily::custom) {
            scratch.assign(state.begin(), state.end());
            const double step = 1e-6 * std::max(1.0, std::fabs(iv));
            scratch[static_cast<std::size_t>(v)] = iv + step;
            double up = model.eval_h(scratch, beta_v, v);
            scratch[static_cast<std::size_t>(v)] = iv - step;
            double dn = model.eval_h(scratch, beta_v, v);
            diag -= iv * (up - dn) / (2 * step);
        }
        for (std::size_t k = 0; k < nb.ids.size(); ++k) {
            int u = nb.ids[k];
            if (!diag_done && u > v) {
                jac.cols.push_back(v);
                jac.vals.push_back(diag);
                diag_done = true;
            }
            jac.cols.push_back(u);
            jac.vals.push_back((1.0 - iv) *
                               detail::g_partial(model, state, alpha_v, nb, static_cast<int>(k), scratch));
        }
        if (!diag_done) {
            jac.cols.push_back(v);
            jac.vals.push_back(diag);
        }
        jac.row_ptr[static_cast<std::size_t>(v) + 1] = static_cast<int>(jac.cols.size());
    }
    return jac;
}

// Linearization at the origin: off-diagonal (v,u) couples each present arc,
// diagonal is -(beta_v + alpha_v).
inline SparseMatrix jacobian_at_zero(const DynamicsModel& model, const ParamBundle& bundle,
                                     double t) {
    std::vector<double> zero(static_cast<std::size_t>(bundle.n()), 0.0);
    return jacobian(model, bundle, t, zero);
}

struct PropertyCheck {
    std::string name;
    bool pass = true;
    long samples = 0;
    std::string witness;  // first counterexample, empty when pass

    PropertyCheck() = default;
    explicit PropertyCheck(std::string check_name) : name(std::move(check_name)) {}
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    std::string notes;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    const PropertyCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks)
            arr.push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"samples", c.samples},
                           {"witness", c.witness}});
        return {{"all_pass", all_pass()}, {"checks", arr}, {"notes", notes}};
    }
};

// Sampled validation of the structural properties the attractivity theory
// rests on: cooperativity, subhomogeneity of g, the anchors g(0) = alpha and
// dg/di_u = 0 for absent arcs, and monotonicity in alpha, gamma, beta.
inline PropertyReport validate_properties(const DynamicsModel& model, const ParamBundle& bundle,
                                          int sample_count, std::uint64_t seed) {
    if (sample_count < 1) throw std::invalid_argument("sample count must be positive");
    const int n = bundle.n();
    if (n == 0) throw std::invalid_argument("property validation on an empty graph");

    PropertyReport report;
    PropertyCheck coop{"cooperativity"};
    PropertyCheck subhom{"subhomogeneity"};
    PropertyCheck anchor_zero{"g_at_zero_equals_alpha"};
    PropertyCheck anchor_absent{"absent_arc_has_zero_partial"};
    PropertyCheck mono_alpha{"monotone_in_alpha"};
    PropertyCheck mono_gamma{"monotone_in_gamma"};
    PropertyCheck mono_beta{"monotone_in_beta"};
    PropertyCheck recovery{"recovery_nonnegative"};

    Rng rng(seed);
    Workspace ws;
    std::vector<double> state(static_cast<std::size_t>(n));
    std::vector<double> scaled_state(static_cast<std::size_t>(n));
    std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    std::vector<double> gbuf;

    auto witness = [](std::initializer_list<std::pair<const char*, double>> kv) {
        std::ostringstream os;
        os.precision(12);
        bool first = true;
        for (auto& [k, v] : kv) {
            if (!first) os << ", ";
            os << k << "=" << v;
            first = false;
        }
        return os.str();
    };

    const double tol = 1e-9;
    for (int s = 0; s < sample_count; ++s) {
        double t = rng.uniform() * 100.0;
        for (int v = 0; v < n; ++v) state[static_cast<std::size_t>(v)] = rng.uniform();
        double eta = 0.05 + 0.9 * rng.uniform();
        int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));

        const TemporalGraph::Epoch& ep = bundle.graph->epoch_at(t);
        NeighborView nb =
            detail::neighbor_view(ep, bundle, t, v, ws, bundle.gamma.time_only() ? bundle.gamma.eval(t, 0) : 0.0,
                                  bundle.gamma.time_only());
        double alpha_v = bundle.alpha_at(t, v);
        double beta_v = bundle.beta_at(t, v);

        // Cooperativity: off-diagonal Jacobian entries are nonnegative.
        if (coop.pass) {
            coop.samples++;
            std::vector<double> scratch;
            for (std::size_t k = 0; k < nb.ids.size() && coop.pass; ++k) {
                double p = detail::g_partial(model, state, alpha_v, nb, static_cast<int>(k), scratch);
                double off = (1.0 - state[static_cast<std::size_t>(v)]) * p;
                if (off < -tol) {
                    coop.pass = false;
                    coop.witness = witness({{"t", t}, {"v", v}, {"u", nb.ids[k]}, {"entry", off}});
                }
            }
        }

        // Subhomogeneity of g: g(eta * i) >= eta * g(i).
        if (subhom.pass) {
            subhom.samples++;
            for (int u = 0; u < n; ++u)
                scaled_state[static_cast<std::size_t>(u)] = eta * state[static_cast<std::size_t>(u)];
            double lhs = model.eval_g(scaled_state, alpha_v, nb);
            double rhs = eta * model.eval_g(state, alpha_v, nb);
            if (lhs < rhs - tol) {
                subhom.pass = false;
                subhom.witness = witness({{"t", t}, {"v", v}, {"eta", eta}, {"lhs", lhs}, {"rhs", rhs}});
            }
        }

        // g(0, alpha, Gamma) == alpha, exactly.
        if (anchor_zero.pass) {
            anchor_zero.samples++;
            double g0 = model.eval_g(zero, alpha_v, nb);
            if (g0 != alpha_v) {
                anchor_zero.pass = false;
                anchor_zero.witness = witness({{"t", t}, {"v", v}, {"g0", g0}, {"alpha", alpha_v}});
            }
        }

        // dg_v/di_u = 0 when u is not an attacker of v: central difference on a
        // non-neighbor coordinate.
        if (anchor_absent.pass && nb.ids.size() + 1 < static_cast<std::size_t>(n)) {
            anchor_absent.samples++;
            int u = -1;
            for (int trial = 0; trial < 8 && u < 0; ++trial) {
                int cand = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
                if (cand == v) continue;
                bool neighbor = false;
                for (int id : nb.ids)
                    if (id == cand) neighbor = true;
                if (!neighbor) u = cand;
            }
            if (u >= 0) {
                double h = 1e-6;
                double saved = state[static_cast<std::size_t>(u)];
                state[static_cast<std::size_t>(u)] = saved + h;
                double up = model.eval_g(state, alpha_v, nb);
                state[static_cast<std::size_t>(u)] = saved - h;
                double dn = model.eval_g(state, alpha_v, nb);
                state[static_cast<std::size_t>(u)] = saved;
                double d = (up - dn) / (2 * h);
                if (std::fabs(d) > 1e-7) {
                    anchor_absent.pass = false;
                    anchor_absent.witness = witness({{"t", t}, {"v", v}, {"u", u}, {"partial", d}});
                }
            }
        }

        // Monotonicity in alpha, gamma, beta by central differences.
        {
            const double h = 1e-6;
            if (mono_alpha.pass) {
                mono_alpha.samples++;
                double up = model.eval_g(state, std::min(1.0, alpha_v + h), nb);
                double dn = model.eval_g(state, std::max(0.0, alpha_v - h), nb);
                if (up < dn - tol) {
                    mono_alpha.pass = false;
                    mono_alpha.witness = witness({{"t", t}, {"v", v}, {"up", up}, {"dn", dn}});
                }
            }
            if (mono_gamma.pass && !nb.ids.empty()) {
                mono_gamma.samples++;
                gbuf.assign(nb.gammas.begin(), nb.gammas.end());
                std::size_t k = static_cast<std::size_t>(rng.below(nb.ids.size()));
                NeighborView nb2{nb.ids, {gbuf.data(), gbuf.size()}};
                gbuf[k] = std::min(1.0, nb.gammas[k] + h);
                double up = model.eval_g(state, alpha_v, nb2);
                gbuf[k] = std::max(0.0, nb.gammas[k] - h);
                double dn = model.eval_g(state, alpha_v, nb2);
                if (up < dn - tol) {
                    mono_gamma.pass = false;
                    mono_gamma.witness = witness({{"t", t}, {"v", v}, {"k", double(k)}, {"up", up}, {"dn", dn}});
                }
            }
            if (mono_beta.pass) {
                mono_beta.samples++;
                double up = model.eval_h(state, std::min(1.0, beta_v + h), v);
                double dn = model.eval_h(state, std::max(0.0, beta_v - h), v);
                if (up < dn - tol) {
                    mono_beta.pass = false;
                    mono_beta.witness = witness({{"t", t}, {"v", v}, {"up", up}, {"dn", dn}});
                }
            }
            if (recovery.pass) {
                recovery.samples++;
                double hv = model.eval_h(state, beta_v, v);
                if (hv < -tol) {
                    recovery.pass = false;
                    recovery.witness = witness({{"t", t}, {"v", v}, {"h", hv}});
                }
            }
        }
    }

    report.checks = {coop, subhom, anchor_zero, anchor_absent, mono_alpha, mono_gamma, mono_beta,
                     recovery};
    report.notes =
        "strict positivity of D_i(g+h) is checked in the weaker form: cooperativity plus "
        "nonnegative recovery";
    return report;
}

}  // namespace cyberdyn

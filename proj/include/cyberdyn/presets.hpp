#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyberdyn/linalg.hpp"
#include "cyberdyn/model.hpp"
#include "cyberdyn/param_process.hpp"
#include "cyberdyn/temporal_graph.hpp"

namespace cyberdyn {

inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kSqrt3 = 1.7320508075688772;
inline constexpr double kPi = 3.141592653589793;

// Reference spectral scale for transplanting the push rates onto a substitute
// graph: the bundled parameter sets straddle the stability threshold on a
// structure whose effective spectral radius is about 4, so desk runs multiply
// gamma by lambda_ref / lambda1(substitute graph) to land the same exponent
// regimes. Slightly below 4 keeps the near-critical set contracting fast
// enough to settle within the default horizon.
inline constexpr double kDeskLambdaRef = 3.7;

struct PresetSpec {
    std::string name;
    std::string model = "sum";
    std::string experiment = "attractivity";  // attractivity | bounds | sweep
    bool rescale_gamma = true;    // false for the degree-normalized attack form
    bool perturb_graph = true;    // arc churn every 10 time units
    bool per_run_realizations = false;  // each run draws its own parameter realization
    bool reconstruction = false;  // offsets list below is a documented reconstruction
    std::vector<double> beta_offsets;   // sweep presets only

    PresetSpec() = default;
    explicit PresetSpec(std::string preset_name) : name(std::move(preset_name)) {}
};

inline const std::vector<PresetSpec>& preset_table() {
    static const std::vector<PresetSpec> table = [] {
        std::vector<PresetSpec> t;
        t.push_back(PresetSpec("p1"));
        t.push_back(PresetSpec("p2"));
        t.push_back(PresetSpec("p3"));
        {
            PresetSpec p4{"p4"};
            p4.experiment = "sweep";
            p4.reconstruction = true;
            p4.beta_offsets = {0.1, 0.3, 0.5, 0.7};
            t.push_back(p4);
        }
        for (const char* name : {"p5", "p6", "p7", "p8"}) {
            PresetSpec p{name};
            p.experiment = "bounds";
            t.push_back(p);
        }
        for (const char* name : {"p9", "p10"}) {
            PresetSpec p{name};
            p.model = "custom:squared_mean";
            p.rescale_gamma = false;
            p.perturb_graph = false;
            t.push_back(p);
        }
        {
            PresetSpec p11{"p11"};
            p11.perturb_graph = false;
            p11.per_run_realizations = true;
            t.push_back(p11);
        }
        return t;
    }();
    return table;
}

inline const PresetSpec& preset(const std::string& name) {
    for (const auto& p : preset_table())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown preset: " + name);
}

inline std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& p : preset_table()) names.push_back(p.name);
    return names;
}

// lambda1 of the initial adjacency, for the desk-scale gamma mapping.
inline double adjacency_spectral_radius(const TemporalGraph& graph) {
    const auto& ep = graph.epoch_at(0.0);
    const int n = graph.n();
    return perron_value(n, [&](std::span<const double> x, std::span<double> y) {
        for (int v = 0; v < n; ++v) {
            double s = 0.0;
            for (int u : ep.attackers_of(v)) s += x[static_cast<std::size_t>(u)];
            y[static_cast<std::size_t>(v)] = s;
        }
    });
}

inline double desk_gamma_scale(const TemporalGraph& graph, double lambda_ref = kDeskLambdaRef) {
    double lambda = adjacency_spectral_radius(graph);
    if (lambda <= 0) return 1.0;
    return std::min(1.0, lambda_ref / lambda);
}

namespace detail {

inline ParamProcess beta_two_tone(double a, double offset) {
    return ParamProcess::sinusoidal(offset, {{a, 1.0, 0.0}, {a, kSqrt2, 0.0}});
}

inline ParamProcess alpha_two_tone(double a, double offset) {
    return ParamProcess::sinusoidal(offset, {{a, 3.0, 0.0}, {a, kSqrt3, 0.0}});
}

inline ParamProcess gamma_tone(double a, double offset) {
    return ParamProcess::sinusoidal(offset, {{a, kPi / 5.0, 0.0}});
}

}  // namespace detail

// Materializes the parameter processes of one preset on a concrete graph.
// beta_offset overrides the recovery offset for sweep presets.
inline ParamBundle preset_bundle(const PresetSpec& spec, const TemporalGraph& graph,
                                 std::uint64_t seed, double gamma_scale = 1.0,
                                 std::optional<double> beta_offset = std::nullopt) {
    const int n = graph.n();
    const std::uint64_t beta_seed = hash2(seed, 12);
    const std::uint64_t gamma_seed = hash2(seed, 13);
    const std::uint64_t alpha_seed = hash2(seed, 11);
    const std::uint64_t indicator_seed = hash2(seed, 14);

    ParamBundle b;
    b.graph = &graph;
    b.alpha = ParamProcess::constant(0.0);

    const std::string& name = spec.name;
    if (name == "p1" || name == "p2" || name == "p3") {
        double offset = name == "p1" ? 0.5 : name == "p2" ? 0.4 : 0.1;
        b.beta = detail::beta_two_tone(0.1, offset);
        b.gamma = detail::gamma_tone(0.05, 0.1);
    } else if (name == "p4") {
        b.beta = detail::beta_two_tone(0.1, beta_offset.value_or(spec.beta_offsets.front()));
        b.gamma = detail::gamma_tone(0.3, 0.7);
    } else if (name == "p5") {
        b.alpha = ParamProcess::with_indicator(detail::alpha_two_tone(0.05, 0.5), n, 0.5,
                                               indicator_seed);
        b.beta = detail::beta_two_tone(0.05, 0.5);
        b.gamma = detail::gamma_tone(0.1, 0.5);
    } else if (name == "p6") {
        b.beta = detail::beta_two_tone(0.1, 0.4);
        b.gamma = detail::gamma_tone(0.1, 0.5);
    } else if (name == "p7") {
        b.alpha = ParamProcess::with_indicator(
            ParamProcess::piecewise_uniform(0.1, 0.3, alpha_seed, ParamShape::per_node), n, 0.5,
            indicator_seed);
        b.beta = ParamProcess::piecewise_uniform(0.4, 0.7, beta_seed, ParamShape::per_node);
        b.gamma = ParamProcess::constant(0.1);
    } else if (name == "p8") {
        b.beta = ParamProcess::piecewise_uniform(0.4, 0.7, beta_seed, ParamShape::per_node);
        b.gamma = ParamProcess::constant(0.1);
    } else if (name == "p9" || name == "p10") {
        if (name == "p10")
            b.alpha = ParamProcess::with_indicator(detail::alpha_two_tone(0.1, 0.1), n, 0.2,
                                                   indicator_seed);
        b.beta = detail::beta_two_tone(0.05, 0.1);
        b.gamma = detail::gamma_tone(0.1, 0.7);
    } else if (name == "p11") {
        b.beta = ParamProcess::mixture_uniform({{0.1, 0.2}, {0.1, 1.0}}, beta_seed,
                                               ParamShape::per_node);
        b.gamma = ParamProcess::constant(0.3);
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }

    (void)gamma_seed;
    if (spec.rescale_gamma && gamma_scale != 1.0) b.gamma = b.gamma.scaled(gamma_scale);
    return b;
}

inline ParamBundle preset_bundle(const std::string& name, const TemporalGraph& graph,
                                 std::uint64_t seed, double gamma_scale = 1.0,
                                 std::optional<double> beta_offset = std::nullopt) {
    return preset_bundle(preset(name), graph, seed, gamma_scale, beta_offset);
}

// Pull-based attack study: a chosen share of nodes faces a two-tone pull rate
// on top of the p2 recovery and push rates.
inline ParamBundle pull_attack_bundle(const TemporalGraph& graph, double fraction,
                                      std::uint64_t seed, double gamma_scale = 1.0) {
    ParamBundle b = preset_bundle("p2", graph, seed, gamma_scale);
    b.alpha = ParamProcess::with_indicator(detail::alpha_two_tone(0.1, 0.2), graph.n(), fraction,
                                           hash2(seed, 14));
    return b;
}

}  // namespace cyberdyn

// Command-line front end: preventive/reactive compromise dynamics on
// time-varying directed networks. Subcommands cover single simulations,
// attractivity experiments, trajectory envelopes, Lyapunov-exponent
// estimation, SCC classification, structural property validation, and the
// bundled experiment presets p1..p11.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cyberdyn/cyberdyn.hpp"

using namespace cyberdyn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string graph_path;
    std::string er_spec;
    std::string model;
    std::string preset;
    std::vector<double> fractions{0.25, 0.5, 0.75};
    double t_end = 100.0;
    double dt = 0.05;
    std::uint64_t seed = 7;
    bool svg = false;
    std::string out = ".";
    std::string scale = "desk";        // reproduce: desk | full
    std::string gamma_scale = "auto";  // auto | none | <number>
    std::string perturb = "preset";    // preset | none | interval,fraction[,seed]
    bool full_states = false;
    bool export_graph = false;
    double renorm_every = 1.0;
    std::string config_path;
    json param_descriptors;  // optional alpha/beta/gamma from the config file
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_common_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--graph", opt.graph_path,
                    "edge-list file, or builtin:{triangle,cycle3,two-blocks}");
    cmd->add_option("--er", opt.er_spec, "Erdos-Renyi spec n,p,seed");
    cmd->add_option("--model", opt.model, "prod | sum | custom:<name>");
    cmd->add_option("--preset", opt.preset, "parameter set p1..p11");
    cmd->add_option("--fractions", opt.fractions, "initial compromised fractions")
        ->delimiter(',');
    cmd->add_option("--t-end", opt.t_end, "simulation horizon");
    cmd->add_option("--dt", opt.dt, "integration step");
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_flag("--svg", opt.svg, "emit an SVG chart");
    cmd->add_option("--out", opt.out, "output directory");
    cmd->add_option("--gamma-scale", opt.gamma_scale,
                    "push-rate mapping: auto (spectral), none, or a factor");
    cmd->add_option("--perturb", opt.perturb,
                    "arc churn: preset | none | interval,fraction[,seed]");
    cmd->add_flag("--full-states", opt.full_states, "force full per-node storage");
    cmd->add_flag("--export-graph", opt.export_graph, "write graph.txt + graph.json");
    cmd->add_option("--renorm-every", opt.renorm_every, "renormalization interval");
    cmd->add_option("--config", opt.config_path, "JSON config mirroring the flags");
}

// Config files mirror the flags; explicit command-line values win.
void merge_config(CLI::App* cmd, Options& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot open config: " + opt.config_path);
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    static const std::set<std::string> known{
        "graph",        "er",          "model",   "preset",      "fractions",
        "t_end",        "dt",          "seed",    "svg",         "out",
        "scale",        "gamma_scale", "perturb", "full_states", "export_graph",
        "renorm_every", "alpha",       "beta",    "gamma"};
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError("unknown config key: " + it.key());
    }
    auto unset = [&](const char* flag) { return cmd->count(flag) == 0; };
    if (cfg.contains("graph") && unset("--graph")) opt.graph_path = cfg["graph"].get<std::string>();
    if (cfg.contains("er") && unset("--er")) {
        if (cfg["er"].is_array()) {
            std::ostringstream os;
            os << cfg["er"][0].get<long long>() << ',' << cfg["er"][1].get<double>() << ','
               << cfg["er"][2].get<long long>();
            opt.er_spec = os.str();
        } else {
            opt.er_spec = cfg["er"].get<std::string>();
        }
    }
    if (cfg.contains("model") && unset("--model")) opt.model = cfg["model"].get<std::string>();
    if (cfg.contains("preset") && unset("--preset")) opt.preset = cfg["preset"].get<std::string>();
    if (cfg.contains("fractions") && unset("--fractions"))
        opt.fractions = cfg["fractions"].get<std::vector<double>>();
    if (cfg.contains("t_end") && unset("--t-end")) opt.t_end = cfg["t_end"].get<double>();
    if (cfg.contains("dt") && unset("--dt")) opt.dt = cfg["dt"].get<double>();
    if (cfg.contains("seed") && unset("--seed")) opt.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("svg") && unset("--svg")) opt.svg = cfg["svg"].get<bool>();
    if (cfg.contains("out") && unset("--out")) opt.out = cfg["out"].get<std::string>();
    if (cfg.contains("scale")) opt.scale = cfg["scale"].get<std::string>();
    if (cfg.contains("gamma_scale") && unset("--gamma-scale")) {
        opt.gamma_scale = cfg["gamma_scale"].is_number()
                              ? std::to_string(cfg["gamma_scale"].get<double>())
                              : cfg["gamma_scale"].get<std::string>();
    }
    if (cfg.contains("perturb") && unset("--perturb")) {
        if (cfg["perturb"].is_null()) {
            opt.perturb = "none";
        } else if (cfg["perturb"].is_array()) {
            std::ostringstream os;
            os << cfg["perturb"][0].get<double>() << ',' << cfg["perturb"][1].get<double>();
            if (cfg["perturb"].size() > 2) os << ',' << cfg["perturb"][2].get<long long>();
            opt.perturb = os.str();
        } else {
            opt.perturb = cfg["perturb"].get<std::string>();
        }
    }
    if (cfg.contains("full_states") && unset("--full-states"))
        opt.full_states = cfg["full_states"].get<bool>();
    if (cfg.contains("export_graph") && unset("--export-graph"))
        opt.export_graph = cfg["export_graph"].get<bool>();
    if (cfg.contains("renorm_every") && unset("--renorm-every"))
        opt.renorm_every = cfg["renorm_every"].get<double>();
    for (const char* key : {"alpha", "beta", "gamma"})
        if (cfg.contains(key)) opt.param_descriptors[key] = cfg[key];
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, sep)) parts.push_back(item);
    return parts;
}

std::optional<Perturbation> parse_perturbation(const Options& opt, bool preset_wants_churn) {
    if (opt.perturb == "none") return std::nullopt;
    if (opt.perturb == "preset") {
        if (!preset_wants_churn) return std::nullopt;
        return Perturbation{10.0, 0.02, hash2(opt.seed, 0xC0FFEEULL)};
    }
    auto parts = split(opt.perturb, ',');
    if (parts.size() < 2 || parts.size() > 3)
        throw ConfigError("perturb expects interval,fraction[,seed]");
    Perturbation p;
    p.interval = std::stod(parts[0]);
    p.fraction = std::stod(parts[1]);
    p.seed = parts.size() > 2 ? std::stoull(parts[2]) : hash2(opt.seed, 0xC0FFEEULL);
    return p;
}

TemporalGraph builtin_graph(const std::string& name, std::optional<Perturbation> perturb) {
    if (name == "triangle") return TemporalGraph(3, {{0, 1}, {1, 0}, {1, 2}}, perturb);
    if (name == "cycle3") return TemporalGraph(3, {{0, 1}, {1, 2}, {2, 0}}, perturb);
    if (name == "two-blocks")
        return TemporalGraph(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}, {1, 2}}, perturb);
    throw ConfigError("unknown builtin graph: " + name);
}

TemporalGraph build_graph(const Options& opt, bool preset_wants_churn) {
    auto perturb = parse_perturbation(opt, preset_wants_churn);
    if (!opt.graph_path.empty() && !opt.er_spec.empty())
        throw ConfigError("choose one graph source: --graph or --er");
    if (!opt.graph_path.empty()) {
        if (opt.graph_path.rfind("builtin:", 0) == 0)
            return builtin_graph(opt.graph_path.substr(8), perturb);
        auto loaded = load_edge_list(opt.graph_path, perturb);
        std::fprintf(stderr, "loaded %s: n=%d arcs=%zu (self-loops dropped: %d)\n",
                     opt.graph_path.c_str(), loaded.report.node_count, loaded.report.arc_count,
                     loaded.report.self_loops_dropped);
        return std::move(loaded.graph);
    }
    if (!opt.er_spec.empty()) {
        auto parts = split(opt.er_spec, ',');
        if (parts.size() != 3) throw ConfigError("er expects n,p,seed");
        return er_directed(std::stoi(parts[0]), std::stod(parts[1]), std::stoull(parts[2]),
                           perturb);
    }
    throw ConfigError("a graph source is required: --graph or --er");
}

double resolve_gamma_scale(const Options& opt, const TemporalGraph& graph, bool preset_rescales) {
    if (opt.gamma_scale == "none") return 1.0;
    if (opt.gamma_scale == "auto") return preset_rescales ? desk_gamma_scale(graph) : 1.0;
    return std::stod(opt.gamma_scale);
}

struct Resolved {
    TemporalGraph graph;
    ParamBundle bundle;
    DynamicsModel model;
    PresetSpec spec;
    double gamma_scale = 1.0;
    bool has_preset = false;
};

Resolved resolve(const Options& opt) {
    Resolved r;
    r.has_preset = !opt.preset.empty();
    if (r.has_preset) r.spec = preset(opt.preset);
    r.graph = build_graph(opt, r.has_preset && r.spec.perturb_graph);
    r.gamma_scale = resolve_gamma_scale(opt, r.graph, r.has_preset && r.spec.rescale_gamma);
    if (r.has_preset) {
        r.bundle = preset_bundle(r.spec, r.graph, opt.seed, r.gamma_scale);
        r.model = DynamicsModel::from_string(opt.model.empty() ? r.spec.model : opt.model);
    } else if (!opt.param_descriptors.empty()) {
        r.bundle.graph = &r.graph;
        if (opt.param_descriptors.contains("alpha"))
            r.bundle.alpha = ParamProcess::from_json(opt.param_descriptors["alpha"]);
        if (opt.param_descriptors.contains("beta"))
            r.bundle.beta = ParamProcess::from_json(opt.param_descriptors["beta"]);
        if (opt.param_descriptors.contains("gamma"))
            r.bundle.gamma = ParamProcess::from_json(opt.param_descriptors["gamma"]);
        r.model = DynamicsModel::from_string(opt.model.empty() ? "sum" : opt.model);
    } else {
        throw ConfigError("a preset or alpha/beta/gamma descriptors are required");
    }
    return r;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t digest(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = mix64(h ^ c);
    return h;
}

fs::path ensure_out(const Options& opt) {
    fs::path dir(opt.out);
    fs::create_directories(dir);
    return dir;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

void write_metadata(const fs::path& dir, const std::string& command, const Options& opt,
                    const Resolved& r) {
    json meta;
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["seed"] = opt.seed;
    meta["preset"] = opt.preset;
    meta["model"] = r.model.name();
    meta["dt"] = opt.dt;
    meta["t_end"] = opt.t_end;
    meta["fractions"] = opt.fractions;
    meta["gamma_scale"] = r.gamma_scale;
    meta["graph"] = r.graph.sidecar_json();
    meta["graph_source"] = !opt.graph_path.empty() ? opt.graph_path : ("er:" + opt.er_spec);
    meta["parameters"] = r.bundle.descriptor();
    meta["threads"] = worker_count();
    if (r.has_preset && r.spec.name == "p4") meta["p4_reconstruction"] = true;
    meta["preset_hash"] = hex64(digest(meta["parameters"].dump() + meta["graph"].dump()));
    write_json_file(dir / "metadata.json", meta);
    if (opt.export_graph)
        export_edge_list(r.graph, (dir / "graph.txt").string(), (dir / "graph.json").string());
}

void chart_means(const fs::path& path, const std::vector<Trajectory>& trajs,
                 const std::vector<std::string>& labels, const std::string& title) {
    std::vector<ChartSeries> series;
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        ChartSeries s;
        s.label = labels[k];
        s.xs = trajs[k].times;
        s.ys = trajs[k].mean_series;
        series.push_back(std::move(s));
    }
    write_line_chart(path.string(), series, title, "t", "mean compromise");
}

int cmd_simulate(const Options& opt) {
    Resolved r = resolve(opt);
    fs::path dir = ensure_out(opt);
    double fraction = opt.fractions.empty() ? 0.5 : opt.fractions.front();
    IntegrateOptions io;
    io.dt = opt.dt;
    io.preset = opt.preset;
    io.init_seed = hash2(opt.seed, 0x51ULL);
    if (opt.full_states) io.store_full = 1;
    auto i0 = random_initial(r.graph.n(), fraction, io.init_seed);
    auto traj = integrate(r.model, r.bundle, i0, opt.t_end, io);
    write_trajectory_csv(traj, (dir / "trajectory.csv").string(), traj.has_full_states());
    if (opt.svg) chart_means(dir / "chart.svg", {traj}, {"mean"}, "compromise dynamics");
    write_metadata(dir, "simulate", opt, r);
    std::printf("final <i> = %.6g\n", traj.mean_series.back());
    return 0;
}

int run_attractivity(const Options& opt, const Resolved& r, const std::string& command) {
    fs::path dir = ensure_out(opt);
    AttractivityOptions ao;
    ao.t_end = opt.t_end;
    ao.dt = opt.dt;
    ao.init_seed = hash2(opt.seed, 0xA77ULL);
    ao.config_id = opt.preset.empty() ? "custom" : opt.preset;
    std::vector<Trajectory> trajs;
    AttractivityVerdict verdict;
    std::vector<ParamBundle> realizations;
    if (r.has_preset && r.spec.per_run_realizations) {
        // one stochastic parameter realization per run
        std::vector<AttractivityRun> runs;
        realizations.reserve(opt.fractions.size());
        for (std::size_t k = 0; k < opt.fractions.size(); ++k)
            realizations.push_back(r.bundle.reseeded_params(k));
        for (std::size_t k = 0; k < opt.fractions.size(); ++k)
            runs.push_back(
                {opt.fractions[k], &realizations[k], hash2(ao.init_seed, 0x1717ULL + k)});
        verdict = attractivity_runs(r.model, runs, ao, &trajs);
    } else {
        verdict = attractivity_experiment(r.model, r.bundle, opt.fractions, ao, &trajs);
    }
    write_json_file(dir / "verdict.json", verdict.to_json());
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        std::ostringstream name;
        name << "trajectory_" << opt.fractions[k] << ".csv";
        write_trajectory_csv(trajs[k], (dir / name.str()).string(), false);
        std::ostringstream label;
        label << "i(0)=" << opt.fractions[k];
        labels.push_back(label.str());
    }
    if (opt.svg) chart_means(dir / "chart.svg", trajs, labels, ao.config_id);
    write_metadata(dir, command, opt, r);
    std::printf("verdict: %s (limit %s)\n", verdict.verdict.c_str(), verdict.limit_kind.c_str());
    if (command == "reproduce") return 0;
    if (verdict.verdict == "attractive") return 0;
    if (verdict.verdict == "not_attractive") return 1;
    return 2;
}

int cmd_attractivity(const Options& opt) {
    Resolved r = resolve(opt);
    return run_attractivity(opt, r, "attractivity");
}

int cmd_bounds(const Options& opt, const char* command = "bounds") {
    Resolved r = resolve(opt);
    fs::path dir = ensure_out(opt);
    double fraction = opt.fractions.empty() ? 0.5 : opt.fractions.front();
    IntegrateOptions io;
    io.dt = opt.dt;
    io.store_full = 1;
    io.init_seed = hash2(opt.seed, 0xB0ULL);
    auto i0 = random_initial(r.graph.n(), fraction, io.init_seed);
    auto traj = integrate(r.model, r.bundle, i0, opt.t_end, io);
    auto env = bound_envelope(r.model, r.bundle, i0, opt.t_end);
    auto rep = sandwich_check(traj, env);

    json out;
    out["violations"] = rep.violations;
    out["ok"] = rep.ok();
    if (rep.first) {
        out["first_violation"] = {{"t", rep.first->t},
                                  {"node", rep.first->node},
                                  {"value", rep.first->value},
                                  {"bound", rep.first->bound},
                                  {"side", rep.first->lower_side ? "lower" : "upper"}};
    }
    out["degenerate_nodes"] = env.any_degenerate();
    write_json_file(dir / "bounds.json", out);

    std::vector<int> nodes;
    for (int v = 0; v < std::min(3, r.graph.n()); ++v) nodes.push_back(v);
    write_envelope_csv(env, nodes, opt.t_end, opt.dt, (dir / "envelope.csv").string());
    write_trajectory_csv(traj, (dir / "trajectory.csv").string(), false);
    if (opt.svg) {
        ChartSeries mean{"mean", traj.times, traj.mean_series};
        ChartSeries lo{"lower bound", traj.times, {}};
        ChartSeries hi{"upper bound", traj.times, {}};
        for (double t : traj.times) {
            double l = 0, h = 0;
            for (int v = 0; v < r.graph.n(); ++v) {
                l += env.lower(v, t);
                h += env.upper(v, t);
            }
            lo.ys.push_back(l / r.graph.n());
            hi.ys.push_back(h / r.graph.n());
        }
        write_line_chart((dir / "chart.svg").string(), {mean, lo, hi}, "trajectory envelope", "t",
                         "mean compromise");
    }
    write_metadata(dir, command, opt, r);
    std::printf("sandwich violations: %ld\n", rep.violations);
    return rep.ok() ? 0 : 1;
}

int cmd_mle(const Options& opt) {
    Resolved r = resolve(opt);
    fs::path dir = ensure_out(opt);
    auto rep = threshold_report(r.model, r.bundle, opt.t_end, opt.renorm_every, opt.dt);
    write_json_file(dir / "estimate.json", rep.to_json());
    write_renorm_csv(rep.estimate, (dir / "renorm.csv").string());
    write_metadata(dir, "mle", opt, r);
    std::printf("{\"mu\": %.6g, \"regime\": \"%s\"}\n", rep.estimate.mu, rep.regime.c_str());
    return 0;
}

int cmd_scc(const Options& opt) {
    Resolved r = resolve(opt);
    fs::path dir = ensure_out(opt);
    auto cls =
        scc_classification(r.model, r.bundle, opt.t_end, std::max(opt.t_end, 100.0), 0.01, opt.dt);
    json out = cls.to_json();
    json arcs = json::array();
    for (auto& [j, k] : cls.decomposition.condensation_arcs) arcs.push_back({j, k});
    out["condensation_arcs"] = arcs;
    write_json_file(dir / "scc.json", out);
    write_metadata(dir, "scc", opt, r);
    std::printf("components: %zu\n", cls.blocks.size());
    for (std::size_t k = 0; k < cls.blocks.size(); ++k)
        std::printf("  block %zu: size=%zu mu=%.4f alpha=%d label=%s\n", k,
                    cls.blocks[k].nodes.size(), cls.blocks[k].mu, cls.blocks[k].has_alpha ? 1 : 0,
                    cls.blocks[k].label.c_str());
    return 0;
}

int cmd_properties(const Options& opt) {
    Resolved r = resolve(opt);
    fs::path dir = ensure_out(opt);
    auto rep = validate_properties(r.model, r.bundle, 1000, hash2(opt.seed, 0x909ULL));
    write_json_file(dir / "properties.json", rep.to_json());
    write_metadata(dir, "properties", opt, r);
    std::printf("properties: %s\n", rep.all_pass() ? "all pass" : "counterexample found");
    for (const auto& c : rep.checks)
        if (!c.pass) std::printf("  %s failed: %s\n", c.name.c_str(), c.witness.c_str());
    return rep.all_pass() ? 0 : 1;
}

int cmd_reproduce(const Options& opt_in) {
    Options opt = opt_in;
    if (opt.preset.empty()) throw ConfigError("reproduce requires --preset p1..p11");
    const PresetSpec& spec = preset(opt.preset);
    const bool desk = opt.scale != "full";
    const bool needs_reference_network = spec.rescale_gamma;  // p1..p8 ran on the network file

    if (desk) {
        if (opt.er_spec.empty() && opt.graph_path.empty())
            opt.er_spec = "200,0.1," + std::to_string(opt.seed);
    } else if (needs_reference_network) {
        if (opt.graph_path.empty())
            throw ConfigError("full-scale " + spec.name +
                              " requires --graph <edge list>; the network file is not bundled");
    } else if (opt.er_spec.empty() && opt.graph_path.empty()) {
        opt.er_spec = "1000,0.1," + std::to_string(opt.seed);
    }
    if (!desk && opt.gamma_scale == "auto") opt.gamma_scale = "none";

    Resolved r = resolve(opt);

    if (spec.experiment == "attractivity") return run_attractivity(opt, r, "reproduce");

    if (spec.experiment == "sweep") {
        fs::path dir = ensure_out(opt);
        std::vector<Trajectory> trajs(spec.beta_offsets.size());
        std::vector<std::string> labels;
        parallel_for(static_cast<int>(spec.beta_offsets.size()), [&](int k) {
            auto b = preset_bundle(spec, r.graph, opt.seed, r.gamma_scale,
                                   spec.beta_offsets[static_cast<std::size_t>(k)]);
            IntegrateOptions io;
            io.dt = opt.dt;
            io.init_seed = hash2(opt.seed, 0x51ULL);
            auto i0 = random_initial(r.graph.n(), 0.5, io.init_seed);
            trajs[static_cast<std::size_t>(k)] = integrate(r.model, b, i0, opt.t_end, io);
        });
        std::ofstream csv(dir / "sweep.csv");
        csv << 't';
        for (double off : spec.beta_offsets) {
            csv << ",mean_offset_" << off;
            std::ostringstream label;
            label << "offset " << off;
            labels.push_back(label.str());
        }
        csv << '\n';
        for (std::size_t row = 0; row < trajs[0].times.size(); ++row) {
            csv << trajs[0].times[row];
            for (auto& tr : trajs) csv << ',' << tr.mean_series[row];
            csv << '\n';
        }
        if (opt.svg) chart_means(dir / "chart.svg", trajs, labels, spec.name);
        write_metadata(dir, "reproduce", opt, r);
        std::printf("%s sweep: final means", spec.name.c_str());
        for (auto& tr : trajs) std::printf(" %.4f", tr.mean_series.back());
        std::printf("\n");
        return 0;
    }

    // envelope experiments (p5..p8)
    Options bopt = opt;
    bopt.fractions = {0.5};
    bopt.full_states = true;
    return cmd_bounds(bopt, "reproduce");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and analysis toolkit for preventive/reactive compromise dynamics "
                 "on time-varying directed networks"};
    app.require_subcommand(1);

    Options opt;
    auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
    auto* attract = app.add_subcommand("attractivity", "compare trajectories across initial sets");
    auto* bounds = app.add_subcommand("bounds", "trajectory envelopes and the sandwich check");
    auto* mle = app.add_subcommand("mle", "top Lyapunov exponent of the zero-state linearization");
    auto* scc = app.add_subcommand("scc", "mean-structure SCC decomposition and classification");
    auto* properties = app.add_subcommand("properties", "structural property validation");
    auto* reproduce = app.add_subcommand("reproduce", "run a bundled experiment preset");
    for (auto* cmd : {simulate, attract, bounds, mle, scc, properties, reproduce})
        add_common_options(cmd, opt);
    reproduce->add_option("--scale", opt.scale, "desk | full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        merge_config(cmd, opt);
        if (cmd == simulate) return cmd_simulate(opt);
        if (cmd == attract) return cmd_attractivity(opt);
        if (cmd == bounds) return cmd_bounds(opt);
        if (cmd == mle) return cmd_mle(opt);
        if (cmd == scc) return cmd_scc(opt);
        if (cmd == properties) return cmd_properties(opt);
        if (cmd == reproduce) return cmd_reproduce(opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}

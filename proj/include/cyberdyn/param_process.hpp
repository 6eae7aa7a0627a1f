#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyberdyn/rng.hpp"
#include "cyberdyn/temporal_graph.hpp"

namespace cyberdyn {

enum class ParamKind {
    constant,
    sinusoidal_sum,
    piecewise_iid_uniform,
    mixture,
    product_with_indicator,
};

enum class ParamShape { scalar, per_node, per_arc };

struct SinTerm {
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
};

struct UniformBranch {
    double lo = 0.0;
    double hi = 0.0;
};

// A scalar-, node-, or arc-indexed function of time. Deterministic kinds are
// closed-form; stochastic kinds are reproducible from (seed, index, interval),
// so evaluation is random-access with no stored history. Values are clamped to
// [0,1] because every parameter here is a probability.
class ParamProcess {
public:
    static constexpr double kDefaultUnitInterval = 1.0;

    static ParamProcess constant(double value, ParamShape shape = ParamShape::scalar) {
        ParamProcess p;
        p.kind_ = ParamKind::constant;
        p.shape_ = shape;
        p.value_ = value;
        return p;
    }

    static ParamProcess sinusoidal(double offset, std::vector<SinTerm> terms,
                                   ParamShape shape = ParamShape::scalar) {
        ParamProcess p;
        p.kind_ = ParamKind::sinusoidal_sum;
        p.shape_ = shape;
        p.offset_ = offset;
        p.terms_ = std::move(terms);
        return p;
    }

    static ParamProcess piecewise_uniform(double lo, double hi, std::uint64_t seed,
                                          ParamShape shape,
                                          double unit_interval = kDefaultUnitInterval) {
        if (hi < lo) throw std::invalid_argument("uniform support inverted");
        if (unit_interval <= 0) throw std::invalid_argument("unit interval must be positive");
        ParamProcess p;
        p.kind_ = ParamKind::piecewise_iid_uniform;
        p.shape_ = shape;
        p.branches_ = {UniformBranch{lo, hi}};
        p.seed_ = seed;
        p.unit_interval_ = unit_interval;
        return p;
    }

    // The branch is drawn once per realization (per seed); within the branch the
    // values are piecewise i.i.d. uniform. One realization therefore has a
    // branch-dependent long-run mean.
    static ParamProcess mixture_uniform(std::vector<UniformBranch> branches, std::uint64_t seed,
                                        ParamShape shape,
                                        double unit_interval = kDefaultUnitInterval) {
        if (branches.empty()) throw std::invalid_argument("mixture needs at least one branch");
        if (unit_interval <= 0) throw std::invalid_argument("unit interval must be positive");
        ParamProcess p;
        p.kind_ = ParamKind::mixture;
        p.shape_ = shape;
        p.branches_ = std::move(branches);
        p.seed_ = seed;
        p.unit_interval_ = unit_interval;
        return p;
    }

    // base(t) on the flagged nodes, identically zero elsewhere.
    static ParamProcess with_indicator(ParamProcess base, int n, double fraction,
                                       std::uint64_t indicator_seed) {
        ParamProcess p;
        p.kind_ = ParamKind::product_with_indicator;
        p.shape_ = ParamShape::per_node;
        p.base_ = std::make_shared<ParamProcess>(std::move(base));
        p.indicator_ = indicator_sample(n, fraction, indicator_seed);
        p.indicator_fraction_ = fraction;
        p.indicator_seed_ = indicator_seed;
        p.indicator_n_ = n;
        return p;
    }

    static ParamProcess with_indicator_flags(ParamProcess base, std::vector<std::uint8_t> flags) {
        ParamProcess p;
        p.kind_ = ParamKind::product_with_indicator;
        p.shape_ = ParamShape::per_node;
        p.base_ = std::make_shared<ParamProcess>(std::move(base));
        int ones = 0;
        for (auto f : flags) ones += f ? 1 : 0;
        p.indicator_n_ = static_cast<int>(flags.size());
        p.indicator_fraction_ = flags.empty() ? 0.0 : static_cast<double>(ones) / flags.size();
        p.indicator_ = std::move(flags);
        p.explicit_indicator_ = true;
        return p;
    }

    ParamKind kind() const { return kind_; }
    ParamShape shape() const { return shape_; }
    std::uint64_t seed() const { return seed_; }
    double unit_interval() const { return unit_interval_; }

    bool stochastic() const {
        if (kind_ == ParamKind::product_with_indicator) return base_->stochastic();
        return kind_ == ParamKind::piecewise_iid_uniform || kind_ == ParamKind::mixture;
    }

    // True when the value at a fixed t is the same for every index.
    bool time_only() const {
        switch (kind_) {
            case ParamKind::constant:
            case ParamKind::sinusoidal_sum:
                return true;
            case ParamKind::piecewise_iid_uniform:
            case ParamKind::mixture:
                return shape_ == ParamShape::scalar;
            case ParamKind::product_with_indicator:
                return false;
        }
        return false;
    }

    static std::uint64_t arc_code(int to, int from) { return arc_key(from, to); }

    double eval(double t, std::uint64_t index = 0) const {
        if (t < 0) throw std::invalid_argument("time must be nonnegative");
        return clamp(scale_ * raw_eval(t, index));
    }

    double support_lo(std::uint64_t index = 0) const { return clamp(scale_ * raw_lo(index)); }
    double support_hi(std::uint64_t index = 0) const { return clamp(scale_ * raw_hi(index)); }

    ParamProcess scaled(double factor) const {
        if (factor < 0) throw std::invalid_argument("scale factor must be nonnegative");
        ParamProcess p = *this;
        if (kind_ == ParamKind::product_with_indicator) {
            p.base_ = std::make_shared<ParamProcess>(base_->scaled(factor));
        } else {
            p.scale_ *= factor;
        }
        return p;
    }

    // Lipschitz bound of t -> p(t); zero for the piecewise-constant kinds.
    double slope_bound() const {
        if (kind_ == ParamKind::sinusoidal_sum) {
            double s = 0.0;
            for (const SinTerm& term : terms_) s += std::fabs(term.amplitude * term.omega);
            return scale_ * s;
        }
        if (kind_ == ParamKind::product_with_indicator) return base_->slope_bound();
        return 0.0;
    }

    // Widens or narrows the clamp window (default [0,1]); a signed window lets
    // a rate dip below zero where a formula demands it.
    ParamProcess with_clamp(double lo, double hi) const {
        ParamProcess p = *this;
        if (kind_ == ParamKind::product_with_indicator)
            p.base_ = std::make_shared<ParamProcess>(base_->with_clamp(lo, hi));
        p.clamp_lo_ = lo;
        p.clamp_hi_ = hi;
        return p;
    }

    // Derives a fresh stochastic stream; deterministic kinds are unaffected.
    ParamProcess reseeded(std::uint64_t realization) const {
        ParamProcess p = *this;
        if (kind_ == ParamKind::product_with_indicator) {
            p.base_ = std::make_shared<ParamProcess>(base_->reseeded(realization));
        } else if (stochastic()) {
            p.seed_ = hash2(seed_, 0xACCE55ULL + realization);
        }
        return p;
    }

    const std::vector<std::uint8_t>& indicator() const { return indicator_; }

    std::size_t mixture_branch() const {
        if (kind_ != ParamKind::mixture) throw std::logic_error("not a mixture process");
        return branch_index();
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        switch (kind_) {
            case ParamKind::constant:
                j["kind"] = "constant";
                j["value"] = value_;
                break;
            case ParamKind::sinusoidal_sum: {
                j["kind"] = "sinusoidal_sum";
                j["offset"] = offset_;
                nlohmann::json terms = nlohmann::json::array();
                for (const SinTerm& s : terms_) terms.push_back({s.amplitude, s.omega, s.phase});
                j["terms"] = terms;
                break;
            }
            case ParamKind::piecewise_iid_uniform:
                j["kind"] = "piecewise_iid_uniform";
                j["lo"] = branches_[0].lo;
                j["hi"] = branches_[0].hi;
                j["seed"] = seed_;
                j["unit_interval"] = unit_interval_;
                break;
            case ParamKind::mixture: {
                j["kind"] = "mixture";
                nlohmann::json b = nlohmann::json::array();
                for (const UniformBranch& br : branches_) b.push_back({br.lo, br.hi});
                j["branches"] = b;
                j["seed"] = seed_;
                j["unit_interval"] = unit_interval_;
                break;
            }
            case ParamKind::product_with_indicator:
                j["kind"] = "product_with_indicator";
                if (explicit_indicator_) {
                    j["flags"] = indicator_;
                } else {
                    j["fraction"] = indicator_fraction_;
                    j["indicator_seed"] = indicator_seed_;
                    j["n"] = indicator_n_;
                }
                j["base"] = base_->to_json();
                break;
        }
        if (shape_ != ParamShape::scalar) j["shape"] = shape_ == ParamShape::per_node ? "per_node" : "per_arc";
        if (scale_ != 1.0) j["scale"] = scale_;
        return j;
    }

    static ParamProcess from_json(const nlohmann::json& j) {
        const std::string kind = j.at("kind").get<std::string>();
        ParamShape shape = ParamShape::scalar;
        if (j.contains("shape")) {
            const std::string s = j["shape"].get<std::string>();
            if (s == "per_node") shape = ParamShape::per_node;
            else if (s == "per_arc") shape = ParamShape::per_arc;
            else if (s != "scalar") throw std::invalid_argument("unknown shape: " + s);
        }
        ParamProcess p;
        if (kind == "constant") {
            p = constant(j.at("value").get<double>(), shape);
        } else if (kind == "sinusoidal_sum") {
            std::vector<SinTerm> terms;
            for (const auto& t : j.at("terms"))
                terms.push_back(SinTerm{t.at(0).get<double>(), t.at(1).get<double>(),
                                        t.size() > 2 ? t.at(2).get<double>() : 0.0});
            p = sinusoidal(j.at("offset").get<double>(), std::move(terms), shape);
        } else if (kind == "piecewise_iid_uniform") {
            p = piecewise_uniform(j.at("lo").get<double>(), j.at("hi").get<double>(),
                                  j.at("seed").get<std::uint64_t>(), shape,
                                  j.value("unit_interval", kDefaultUnitInterval));
        } else if (kind == "mixture") {
            std::vector<UniformBranch> branches;
            for (const auto& b : j.at("branches"))
                branches.push_back(UniformBranch{b.at(0).get<double>(), b.at(1).get<double>()});
            p = mixture_uniform(std::move(branches), j.at("seed").get<std::uint64_t>(), shape,
                                j.value("unit_interval", kDefaultUnitInterval));
        } else if (kind == "product_with_indicator") {
            if (j.contains("flags")) {
                p = with_indicator_flags(from_json(j.at("base")),
                                         j.at("flags").get<std::vector<std::uint8_t>>());
            } else {
                p = with_indicator(from_json(j.at("base")), j.at("n").get<int>(),
                                   j.at("fraction").get<double>(),
                                   j.at("indicator_seed").get<std::uint64_t>());
            }
        } else {
            throw std::invalid_argument("unknown process kind: " + kind);
        }
        if (j.contains("scale")) p.scale_ = j["scale"].get<double>();
        return p;
    }

private:
    ParamKind kind_ = ParamKind::constant;
    ParamShape shape_ = ParamShape::scalar;
    double value_ = 0.0;
    double offset_ = 0.0;
    std::vector<SinTerm> terms_;
    std::vector<UniformBranch> branches_;
    std::uint64_t seed_ = 0;
    double unit_interval_ = kDefaultUnitInterval;
    double scale_ = 1.0;
    double clamp_lo_ = 0.0;
    double clamp_hi_ = 1.0;
    std::shared_ptr<const ParamProcess> base_;
    std::vector<std::uint8_t> indicator_;
    double indicator_fraction_ = 0.0;
    std::uint64_t indicator_seed_ = 0;
    int indicator_n_ = 0;
    bool explicit_indicator_ = false;

    double clamp(double v) const { return std::min(clamp_hi_, std::max(clamp_lo_, v)); }

    std::uint64_t stream_of(std::uint64_t index) const {
        return shape_ == ParamShape::scalar ? 0 : index;
    }

    std::size_t branch_index() const {
        if (branches_.size() == 1) return 0;
        double u = u01(hash2(seed_, 0xB7A9C4ULL));
        auto idx = static_cast<std::size_t>(u * static_cast<double>(branches_.size()));
        return std::min(idx, branches_.size() - 1);
    }

    double raw_eval(double t, std::uint64_t index) const {
        switch (kind_) {
            case ParamKind::constant:
                return value_;
            case ParamKind::sinusoidal_sum: {
                double v = offset_;
                for (const SinTerm& s : terms_) v += s.amplitude * std::sin(s.omega * t + s.phase);
                return v;
            }
            case ParamKind::piecewise_iid_uniform: {
                const UniformBranch& b = branches_[0];
                auto k = static_cast<std::uint64_t>(t / unit_interval_);
                return b.lo + (b.hi - b.lo) * counter_uniform(seed_, stream_of(index), k);
            }
            case ParamKind::mixture: {
                const UniformBranch& b = branches_[branch_index()];
                auto k = static_cast<std::uint64_t>(t / unit_interval_);
                return b.lo + (b.hi - b.lo) * counter_uniform(seed_, stream_of(index), k);
            }
            case ParamKind::product_with_indicator: {
                if (index >= indicator_.size()) throw std::out_of_range("node index out of range");
                return indicator_[static_cast<std::size_t>(index)] ? base_->eval(t, index) : 0.0;
            }
        }
        return 0.0;
    }

    double raw_lo(std::uint64_t index) const {
        switch (kind_) {
            case ParamKind::constant:
                return value_;
            case ParamKind::sinusoidal_sum: {
                double a = 0.0;
                for (const SinTerm& s : terms_) a += std::fabs(s.amplitude);
                return offset_ - a;
            }
            case ParamKind::piecewise_iid_uniform:
                return branches_[0].lo;
            case ParamKind::mixture: {
                double lo = std::numeric_limits<double>::infinity();
                for (const UniformBranch& b : branches_) lo = std::min(lo, b.lo);
                return lo;
            }
            case ParamKind::product_with_indicator:
                if (index >= indicator_.size()) throw std::out_of_range("node index out of range");
                return indicator_[static_cast<std::size_t>(index)] ? base_->support_lo(index) : 0.0;
        }
        return 0.0;
    }

    double raw_hi(std::uint64_t index) const {
        switch (kind_) {
            case ParamKind::constant:
                return value_;
            case ParamKind::sinusoidal_sum: {
                double a = 0.0;
                for (const SinTerm& s : terms_) a += std::fabs(s.amplitude);
                return offset_ + a;
            }
            case ParamKind::piecewise_iid_uniform:
                return branches_[0].hi;
            case ParamKind::mixture: {
                double hi = -std::numeric_limits<double>::infinity();
                for (const UniformBranch& b : branches_) hi = std::max(hi, b.hi);
                return hi;
            }
            case ParamKind::product_with_indicator:
                if (index >= indicator_.size()) throw std::out_of_range("node index out of range");
                return indicator_[static_cast<std::size_t>(index)] ? base_->support_hi(index) : 0.0;
        }
        return 0.0;
    }
};

// Quadrature mean over [a, a+T] on the simulation grid (left endpoints).
inline double mean_value(const ParamProcess& p, std::uint64_t index, double a, double T,
                         double step = 0.05) {
    if (T <= 0) throw std::invalid_argument("horizon must be positive");
    if (step <= 0) throw std::invalid_argument("step must be positive");
    if (p.kind() == ParamKind::constant) return p.eval(a, index);
    auto steps = static_cast<std::size_t>(std::llround(T / step));
    if (steps == 0) steps = 1;
    double sum = 0.0;
    for (std::size_t k = 0; k < steps; ++k) sum += p.eval(a + static_cast<double>(k) * step, index);
    return sum / static_cast<double>(steps);
}

struct MeanReport {
    double estimate = 0.0;
    double spread = 0.0;                 // max - min across start points
    std::vector<double> start_means;
};

// Mean estimate plus a uniformity probe over a sweep of window start points.
inline MeanReport mean_value_report(const ParamProcess& p, std::uint64_t index, double T,
                                    int starts = 5, double step = 0.05) {
    if (starts < 1) throw std::invalid_argument("need at least one start point");
    MeanReport r;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < starts; ++s) {
        double a = static_cast<double>(s) * T / static_cast<double>(starts);
        double m = mean_value(p, index, a, T, step);
        r.start_means.push_back(m);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    double sum = 0.0;
    for (double m : r.start_means) sum += m;
    r.estimate = sum / static_cast<double>(r.start_means.size());
    r.spread = hi - lo;
    return r;
}

struct ErgodicityReport {
    bool pass = false;
    double dispersion = 0.0;             // max - min of realization means
    double threshold = 0.0;
    std::vector<double> realization_means;
};

// Heuristic falsifier: a process whose long-run mean depends on the
// realization cannot be ergodic. PASS is not a proof.
inline ErgodicityReport ergodicity_diagnostic(const ParamProcess& p, std::uint64_t index,
                                              double window, std::vector<double> starts,
                                              int realizations, double threshold = 0.02,
                                              double step = 0.05) {
    if (window <= 0) throw std::invalid_argument("window must be positive");
    if (p.stochastic() && realizations < 2)
        throw std::invalid_argument("stochastic kinds need at least two realizations");
    if (realizations < 1) realizations = 1;
    if (starts.empty()) starts.push_back(0.0);
    ErgodicityReport r;
    r.threshold = threshold;
    for (int k = 0; k < realizations; ++k) {
        ParamProcess q = p.reseeded(static_cast<std::uint64_t>(k));
        double acc = 0.0;
        for (double a : starts) acc += mean_value(q, index, a, window, step);
        r.realization_means.push_back(acc / static_cast<double>(starts.size()));
    }
    auto [lo, hi] = std::minmax_element(r.realization_means.begin(), r.realization_means.end());
    r.dispersion = *hi - *lo;
    r.pass = r.dispersion <= threshold;
    return r;
}

// Smallest xi > 0 in the span with sup_t |p(t+xi) - p(t)| < epsilon over a
// probe grid, refined by golden-section around coarse minima. Deterministic
// kinds only.
inline std::optional<double> translation_number_search(const ParamProcess& p, double epsilon,
                                                       double search_span, double probe_horizon = 60.0,
                                                       double grid = 0.05) {
    if (p.stochastic())
        throw std::invalid_argument("translation number search requires a deterministic process");
    if (epsilon <= 0 || search_span <= 0) throw std::invalid_argument("bad search parameters");
    if (p.kind() == ParamKind::constant) return grid;

    auto defect = [&](double xi) {
        double worst = 0.0;
        for (double t = 0.0; t <= probe_horizon; t += grid)
            worst = std::max(worst, std::fabs(p.eval(t + xi) - p.eval(t)));
        return worst;
    };

    // A coarse local minimum can sit grid*slope above the true dip, so the
    // refinement filter has to allow for that offset.
    const double refine_below = epsilon + grid * p.slope_bound() + 1e-12;

    double prev = defect(grid);
    for (double xi = 2 * grid; xi <= search_span; xi += grid) {
        double cur = defect(xi);
        double next = defect(xi + grid);
        if (cur <= prev && cur <= next && cur <= refine_below) {
            // Golden-section refinement of the bracketed local minimum.
            double a = xi - grid, b = xi + grid;
            const double inv_phi = 0.6180339887498949;
            double x1 = b - inv_phi * (b - a);
            double x2 = a + inv_phi * (b - a);
            double f1 = defect(x1), f2 = defect(x2);
            for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
                if (f1 < f2) {
                    b = x2; x2 = x1; f2 = f1;
                    x1 = b - inv_phi * (b - a);
                    f1 = defect(x1);
                } else {
                    a = x1; x1 = x2; f1 = f2;
                    x2 = a + inv_phi * (b - a);
                    f2 = defect(x2);
                }
            }
            double best = 0.5 * (a + b);
            if (defect(best) < epsilon) return best;
        }
        prev = cur;
    }
    return std::nullopt;
}

// The full parameter realization: pull rate alpha (per node), recovery rate
// beta (per node), push matrix gamma (per arc), and the graph they live on.
struct ParamBundle {
    const TemporalGraph* graph = nullptr;
    ParamProcess alpha = ParamProcess::constant(0.0);
    ParamProcess beta = ParamProcess::constant(0.0);
    ParamProcess gamma = ParamProcess::constant(0.0);

    int n() const { return graph ? graph->n() : 0; }

    double alpha_at(double t, int v) const { return alpha.eval(t, static_cast<std::uint64_t>(v)); }
    double beta_at(double t, int v) const { return beta.eval(t, static_cast<std::uint64_t>(v)); }
    double gamma_at(double t, int v, int u) const {
        return gamma.shape() == ParamShape::per_arc
                   ? gamma.eval(t, ParamProcess::arc_code(v, u))
                   : gamma.eval(t, 0);
    }

    ParamBundle reseeded_params(std::uint64_t realization) const {
        ParamBundle b = *this;
        b.alpha = alpha.reseeded(realization);
        b.beta = beta.reseeded(realization);
        b.gamma = gamma.reseeded(realization);
        return b;
    }

    nlohmann::json descriptor() const {
        return {{"alpha", alpha.to_json()}, {"beta", beta.to_json()}, {"gamma", gamma.to_json()}};
    }
};

}  // namespace cyberdyn

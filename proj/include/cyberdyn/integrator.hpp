#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyberdyn/model.hpp"

namespace cyberdyn {

enum class StepMethod { euler, rk4 };

inline const char* to_string(StepMethod m) { return m == StepMethod::euler ? "euler" : "rk4"; }

struct TrajectoryMeta {
    std::string model;
    std::string preset;
    double dt = 0.05;
    std::uint64_t init_seed = 0;
    StepMethod method = StepMethod::euler;
    double clamp_fraction = 0.0;  // clamped component-steps / (n * steps)
};

// Time grid, per-node states (full matrix or a probe subset), and the mean
// compromise series.
class Trajectory {
public:
    std::vector<double> times;
    std::vector<double> mean_series;
    TrajectoryMeta meta;

    int n() const { return n_; }
    bool has_full_states() const { return full_; }
    const std::vector<int>& probe_nodes() const { return probes_; }

    std::span<const double> state_row(std::size_t step) const {
        std::size_t w = width();
        return {data_.data() + step * w, w};
    }

    double value(std::size_t step, int node) const {
        if (full_) return data_[step * width() + static_cast<std::size_t>(node)];
        for (std::size_t k = 0; k < probes_.size(); ++k)
            if (probes_[k] == node) return data_[step * width() + k];
        throw std::out_of_range("node is not tracked by this trajectory");
    }

    std::size_t steps() const { return times.size(); }

    static Trajectory with_storage(int n, bool full, std::vector<int> probes) {
        Trajectory t;
        t.n_ = n;
        t.full_ = full;
        t.probes_ = std::move(probes);
        return t;
    }

    void push(double t, std::span<const double> state) {
        times.push_back(t);
        double sum = 0.0;
        for (double v : state) sum += v;
        mean_series.push_back(n_ > 0 ? sum / n_ : 0.0);
        if (full_) {
            data_.insert(data_.end(), state.begin(), state.end());
        } else {
            for (int p : probes_) data_.push_back(state[static_cast<std::size_t>(p)]);
        }
    }

private:
    int n_ = 0;
    bool full_ = true;
    std::vector<int> probes_;
    std::vector<double> data_;

    std::size_t width() const { return full_ ? static_cast<std::size_t>(n_) : probes_.size(); }
};

struct IntegrateOptions {
    double dt = 0.05;
    StepMethod method = StepMethod::euler;
    // Full per-node storage is forced on/off when set; by default it is on for
    // n <= 2000 and falls back to a seeded probe subset above that.
    int store_full = -1;  // -1 auto, 0 off, 1 on
    int probe_count = 128;
    std::uint64_t probe_seed = 0x50B0ULL;
    std::string preset;
    std::uint64_t init_seed = 0;
};

// Exactly floor(fraction*n) nodes start compromised, chosen by seeded shuffle.
inline std::vector<double> random_initial(int n, double fraction, std::uint64_t seed) {
    if (fraction < 0 || fraction > 1) throw std::invalid_argument("fraction must lie in [0,1]");
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    auto flags = indicator_sample(n, fraction, seed);
    for (int v = 0; v < n; ++v)
        if (flags[static_cast<std::size_t>(v)]) x[static_cast<std::size_t>(v)] = 1.0;
    return x;
}

// Explicit stepping with the parameters and arcs frozen at the left endpoint
// of each step; the state is clamped to [0,1] after every step.
inline Trajectory integrate(const DynamicsModel& model, const ParamBundle& bundle,
                            std::span<const double> i0, double t_end,
                            IntegrateOptions opt = {}) {
    const int n = bundle.n();
    if (n == 0) throw std::invalid_argument("integrate on an empty graph");
    if (opt.dt <= 0) throw std::invalid_argument("dt must be positive");
    if (t_end < opt.dt) throw std::invalid_argument("t_end must be at least dt");
    if (static_cast<int>(i0.size()) != n) throw std::invalid_argument("initial state dimension mismatch");
    for (double v : i0)
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("initial state outside [0,1]");

    bool full = opt.store_full == 1 || (opt.store_full == -1 && n <= 2000);
    std::vector<int> probes;
    if (!full) {
        auto perm = seeded_permutation(n, opt.probe_seed);
        int count = std::min(opt.probe_count, n);
        probes.assign(perm.begin(), perm.begin() + count);
        std::sort(probes.begin(), probes.end());
    }
    Trajectory traj = Trajectory::with_storage(n, full, std::move(probes));
    traj.meta.model = model.name();
    traj.meta.preset = opt.preset;
    traj.meta.dt = opt.dt;
    traj.meta.method = opt.method;
    traj.meta.init_seed = opt.init_seed;

    std::vector<double> x(i0.begin(), i0.end());
    std::vector<double> k1(static_cast<std::size_t>(n)), k2(static_cast<std::size_t>(n)),
        k3(static_cast<std::size_t>(n)), k4(static_cast<std::size_t>(n)),
        tmp(static_cast<std::size_t>(n));
    Workspace ws;

    auto steps = static_cast<std::size_t>(std::llround(t_end / opt.dt));
    traj.push(0.0, x);
    long clamped = 0;

    for (std::size_t k = 0; k < steps; ++k) {
        double t = static_cast<double>(k) * opt.dt;
        if (opt.method == StepMethod::euler) {
            drift(model, bundle, t, x, k1, ws);
            for (int v = 0; v < n; ++v)
                x[static_cast<std::size_t>(v)] += opt.dt * k1[static_cast<std::size_t>(v)];
        } else {
            drift(model, bundle, t, x, k1, ws);
            for (int v = 0; v < n; ++v)
                tmp[static_cast<std::size_t>(v)] =
                    x[static_cast<std::size_t>(v)] + 0.5 * opt.dt * k1[static_cast<std::size_t>(v)];
            drift(model, bundle, t, tmp, k2, ws);
            for (int v = 0; v < n; ++v)
                tmp[static_cast<std::size_t>(v)] =
                    x[static_cast<std::size_t>(v)] + 0.5 * opt.dt * k2[static_cast<std::size_t>(v)];
            drift(model, bundle, t, tmp, k3, ws);
            for (int v = 0; v < n; ++v)
                tmp[static_cast<std::size_t>(v)] =
                    x[static_cast<std::size_t>(v)] + opt.dt * k3[static_cast<std::size_t>(v)];
            drift(model, bundle, t, tmp, k4, ws);
            for (int v = 0; v < n; ++v)
                x[static_cast<std::size_t>(v)] +=
                    opt.dt / 6.0 *
                    (k1[static_cast<std::size_t>(v)] + 2 * k2[static_cast<std::size_t>(v)] +
                     2 * k3[static_cast<std::size_t>(v)] + k4[static_cast<std::size_t>(v)]);
        }
        for (int v = 0; v < n; ++v) {
            double& xv = x[static_cast<std::size_t>(v)];
            if (!std::isfinite(xv))
                throw std::runtime_error("non-finite state at step " + std::to_string(k + 1) +
                                         " (t=" + std::to_string(t + opt.dt) + ")");
            if (xv < 0.0) {
                if (xv < -1e-15) ++clamped;
                xv = 0.0;
            } else if (xv > 1.0) {
                if (xv > 1.0 + 1e-15) ++clamped;
                xv = 1.0;
            }
        }
        traj.push(static_cast<double>(k + 1) * opt.dt, x);
    }
    traj.meta.clamp_fraction =
        static_cast<double>(clamped) / (static_cast<double>(n) * static_cast<double>(steps));
    return traj;
}

// Per-grid-point sup distance over the tracked nodes.
inline std::vector<double> trajectory_distance(const Trajectory& a, const Trajectory& b) {
    if (a.times.size() != b.times.size()) throw std::invalid_argument("trajectory grid mismatch");
    for (std::size_t k = 0; k < a.times.size(); ++k)
        if (a.times[k] != b.times[k]) throw std::invalid_argument("trajectory grid mismatch");
    if (a.has_full_states() != b.has_full_states() ||
        (!a.has_full_states() && a.probe_nodes() != b.probe_nodes()))
        throw std::invalid_argument("trajectories track different node sets");

    std::vector<double> d(a.times.size(), 0.0);
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        auto ra = a.state_row(k);
        auto rb = b.state_row(k);
        double worst = 0.0;
        for (std::size_t j = 0; j < ra.size(); ++j)
            worst = std::max(worst, std::fabs(ra[j] - rb[j]));
        d[k] = worst;
    }
    return d;
}

// Header "t,mean_i[,i_0..i_{n-1}]", one row per grid point, 9 significant digits.
inline void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                                 bool include_states = false) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trajectory csv: " + path);
    out << "t,mean_i";
    if (include_states) {
        if (traj.has_full_states()) {
            for (int v = 0; v < traj.n(); ++v) out << ",i_" << v;
        } else {
            for (int v : traj.probe_nodes()) out << ",i_" << v;
        }
    }
    out << '\n';
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        out << buf;
    };
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        put(traj.times[k]);
        out << ',';
        put(traj.mean_series[k]);
        if (include_states) {
            for (double v : traj.state_row(k)) {
                out << ',';
                put(v);
            }
        }
        out << '\n';
    }
}

}  // namespace cyberdyn

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cyberdyn/integrator.hpp"
#include "cyberdyn/linalg.hpp"
#include "cyberdyn/model.hpp"

namespace cyberdyn {

// Time-varying linear system dz/dt = C(t) z given as a matvec.
struct LinearSystem {
    int n = 0;
    std::function<void(double, std::span<const double>, std::span<double>)> apply;

    static LinearSystem from_matrix_fn(int n, std::function<SparseMatrix(double)> matrix_fn) {
        auto cache = std::make_shared<std::pair<double, SparseMatrix>>(-1.0, SparseMatrix{});
        auto fn = std::move(matrix_fn);
        return LinearSystem{
            n, [cache, fn](double t, std::span<const double> x, std::span<double> out) {
                if (cache->first != t || cache->second.n == 0) {
                    cache->second = fn(t);
                    cache->first = t;
                }
                cache->second.apply(x, out);
            }};
    }

    static LinearSystem from_dense(DenseMatrix m) {
        auto held = std::make_shared<DenseMatrix>(std::move(m));
        return LinearSystem{held->n, [held](double, std::span<const double> x, std::span<double> out) {
                                held->apply(x, out);
                            }};
    }
};

// Linear variational system at the origin. The bundle must outlive the result.
inline LinearSystem zero_state_linearization(const DynamicsModel& model, const ParamBundle& bundle) {
    const ParamBundle* b = &bundle;
    DynamicsModel m = model;
    return LinearSystem::from_matrix_fn(bundle.n(),
                                        [m, b](double t) { return jacobian_at_zero(m, *b, t); });
}

namespace detail {

// One explicit step of dz/dt = C(t) z with C frozen at the left endpoint.
inline void linear_step(const LinearSystem& sys, double t, double dt, StepMethod method,
                        std::vector<double>& z, std::vector<double>& k1, std::vector<double>& k2,
                        std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& tmp) {
    const std::size_t n = z.size();
    if (method == StepMethod::euler) {
        sys.apply(t, z, k1);
        for (std::size_t i = 0; i < n; ++i) z[i] += dt * k1[i];
        return;
    }
    sys.apply(t, z, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * dt * k1[i];
    sys.apply(t, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * dt * k2[i];
    sys.apply(t, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + dt * k3[i];
    sys.apply(t, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) z[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

}  // namespace detail

struct SpectralEstimate {
    double mu = 0.0;
    double horizon = 0.0;
    std::vector<std::pair<double, double>> renorm_log;  // (t, log-norm increment)
    bool converged = false;

    nlohmann::json to_json() const {
        return {{"mu", mu}, {"horizon", horizon}, {"converged", converged}};
    }
};

inline void write_renorm_csv(const SpectralEstimate& est, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write renorm csv: " + path);
    out << "t,log_increment\n";
    char buf[32];
    for (const auto& [t, inc] : est.renorm_log) {
        std::snprintf(buf, sizeof(buf), "%.9g", t);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.9g", inc);
        out << buf << '\n';
    }
}

// Top Lyapunov exponent by power propagation of a nonnegative start vector
// with periodic renormalization; mu = (sum of log-norm increments) / T.
inline SpectralEstimate mle(const LinearSystem& sys, double T, double renorm_every = 1.0,
                            double dt = 0.05, StepMethod method = StepMethod::rk4,
                            std::span<const double> start = {}) {
    if (sys.n <= 0) throw std::invalid_argument("linear system must have positive dimension");
    if (renorm_every <= 0 || dt <= 0) throw std::invalid_argument("bad mle step parameters");
    if (T < 10 * renorm_every)
        throw std::invalid_argument("horizon must cover at least ten renormalization intervals");

    const std::size_t n = static_cast<std::size_t>(sys.n);
    std::vector<double> z(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if (!start.empty()) {
        if (start.size() != n) throw std::invalid_argument("start vector dimension mismatch");
        z.assign(start.begin(), start.end());
        double nz = norm2(z);
        if (nz == 0) throw std::invalid_argument("start vector must be nonzero");
        scale_in_place(z, 1.0 / nz);
    }

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    SpectralEstimate est;
    est.horizon = T;

    auto steps = static_cast<std::size_t>(std::llround(T / dt));
    auto renorm_stride = static_cast<std::size_t>(std::llround(renorm_every / dt));
    if (renorm_stride == 0) renorm_stride = 1;
    double total = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        double t = static_cast<double>(k) * dt;
        detail::linear_step(sys, t, dt, method, z, k1, k2, k3, k4, tmp);
        bool renorm = ((k + 1) % renorm_stride == 0) || (k + 1 == steps);
        if (renorm) {
            double nz = norm2(z);
            if (!(nz > 0.0) || !std::isfinite(nz))
                throw std::runtime_error("non-finite propagation in mle at t=" +
                                         std::to_string(t + dt));
            double inc = std::log(nz);
            est.renorm_log.emplace_back(static_cast<double>(k + 1) * dt, inc);
            total += inc;
            scale_in_place(z, 1.0 / nz);
        }
    }
    est.mu = total / T;

    // Tail diagnostic: slope over the last quartile vs the global average.
    double t_cut = 0.75 * T;
    double tail_sum = 0.0;
    double tail_start = T;
    for (const auto& [t, inc] : est.renorm_log) {
        if (t > t_cut) {
            tail_sum += inc;
            tail_start = std::min(tail_start, t);
        }
    }
    double tail_span = T - t_cut;
    if (tail_span > 0) {
        double tail_slope = tail_sum / tail_span;
        est.converged = std::fabs(tail_slope - est.mu) <= 0.1 * std::fabs(est.mu) + 1e-4;
    }
    return est;
}

// Discrete-time exponent: mu_d = lim (1/K) log ||C(K-1) ... C(1) C(0)||,
// estimated with per-step renormalization.
inline double mle_discrete(const std::function<const DenseMatrix&(int)>& matrices, int K) {
    if (K < 100) throw std::invalid_argument("need at least 100 steps");
    const DenseMatrix& first = matrices(0);
    const std::size_t n = static_cast<std::size_t>(first.n);
    std::vector<double> z(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> out(n);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        matrices(k).apply(z, out);
        double nz = norm2(out);
        if (!(nz > 0.0) || !std::isfinite(nz))
            throw std::runtime_error("non-finite propagation in mle_discrete at step " +
                                     std::to_string(k));
        total += std::log(nz);
        for (std::size_t i = 0; i < n; ++i) z[i] = out[i] / nz;
    }
    return total / static_cast<double>(K);
}

// Dense fundamental matrix U(t, s): the identity propagated column by column.
inline DenseMatrix fundamental_matrix(const LinearSystem& sys, double t, double s,
                                      double dt = 0.05, StepMethod method = StepMethod::rk4) {
    if (sys.n > 256) throw std::invalid_argument("fundamental matrix capped at n <= 256");
    if (t < s) throw std::invalid_argument("need t >= s");
    const int n = sys.n;
    DenseMatrix u = DenseMatrix::identity(n);
    if (t == s) return u;

    std::vector<std::vector<double>> cols(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int c = 0; c < n; ++c) cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)] = 1.0;
    std::vector<double> k1(static_cast<std::size_t>(n)), k2(k1), k3(k1), k4(k1), tmp(k1);

    auto steps = static_cast<std::size_t>(std::llround((t - s) / dt));
    if (steps == 0) steps = 1;
    for (std::size_t k = 0; k < steps; ++k) {
        double tk = s + static_cast<double>(k) * dt;
        for (int c = 0; c < n; ++c)
            detail::linear_step(sys, tk, dt, method, cols[static_cast<std::size_t>(c)], k1, k2, k3,
                                k4, tmp);
    }
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) u.at(r, c) = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
    return u;
}

struct ThresholdReport {
    SpectralEstimate estimate;
    std::string regime;   // "below zero" | "near zero" | "above zero"
    bool alpha_warning = false;
    double near_band = 0.01;

    nlohmann::json to_json() const {
        nlohmann::json j = estimate.to_json();
        j["regime"] = regime;
        j["alpha_warning"] = alpha_warning;
        return j;
    }
};

// Classifies the exponent of the zero-state linearization. The regime label
// speaks to the origin's stability, so a nonzero mean pull rate raises a flag.
inline ThresholdReport threshold_report(const DynamicsModel& model, const ParamBundle& bundle,
                                        double T, double renorm_every = 1.0, double dt = 0.05,
                                        double near_band = 0.01) {
    LinearSystem sys = zero_state_linearization(model, bundle);
    ThresholdReport rep;
    rep.near_band = near_band;
    rep.estimate = mle(sys, T, renorm_every, dt);
    if (rep.estimate.mu < -near_band) rep.regime = "below zero";
    else if (rep.estimate.mu > near_band) rep.regime = "above zero";
    else rep.regime = "near zero";

    const int n = bundle.n();
    double coarse = std::max(dt, T / 256.0);
    for (int v = 0; v < n; ++v) {
        if (mean_value(bundle.alpha, static_cast<std::uint64_t>(v), 0.0, T, coarse) > 1e-9) {
            rep.alpha_warning = true;
            break;
        }
    }
    return rep;
}

}  // namespace cyberdyn

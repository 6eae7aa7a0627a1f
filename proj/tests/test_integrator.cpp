#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cyberdyn/integrator.hpp"
#include "cyberdyn/presets.hpp"

using namespace cyberdyn;
using Catch::Approx;

namespace {

ParamBundle constant_bundle(const TemporalGraph& g, double alpha, double beta, double gamma) {
    ParamBundle b;
    b.graph = &g;
    b.alpha = ParamProcess::constant(alpha);
    b.beta = ParamProcess::constant(beta);
    b.gamma = ParamProcess::constant(gamma);
    return b;
}

}  // namespace

TEST_CASE("integration basics") {
    SECTION("zero state with no pull attacks stays zero") {
        TemporalGraph g(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
        auto b = constant_bundle(g, 0.0, 0.4, 0.3);
        std::vector<double> zero(4, 0.0);
        auto traj = integrate(DynamicsModel::sum(), b, zero, 10.0);
        for (double m : traj.mean_series) CHECK(m == 0.0);
    }

    SECTION("isolated node relaxes to the closed-form equilibrium") {
        TemporalGraph g(1, {});
        auto b = constant_bundle(g, 0.2, 0.5, 0.0);
        std::vector<double> zero{0.0};
        auto traj = integrate(DynamicsModel::sum(), b, zero, 20.0);
        // exact solution exp(-(a+b)t)(i0 - a/(a+b)) + a/(a+b)
        double expect = 0.2 / 0.7;
        CHECK(traj.mean_series.back() == Approx(expect).margin(1e-3));
        std::size_t mid = traj.times.size() / 4;
        double t = traj.times[mid];
        double exact = std::exp(-0.7 * t) * (0.0 - expect) + expect;
        CHECK(traj.mean_series[mid] == Approx(exact).margin(1e-3));
    }

    SECTION("states and mean stay inside [0,1]") {
        TemporalGraph g = er_directed(30, 0.3, 3);
        auto b = constant_bundle(g, 0.4, 0.1, 0.9);
        auto i0 = random_initial(30, 0.5, 4);
        auto traj = integrate(DynamicsModel::sum(), b, i0, 20.0);
        for (std::size_t k = 0; k < traj.steps(); ++k) {
            CHECK(traj.mean_series[k] >= 0.0);
            CHECK(traj.mean_series[k] <= 1.0);
            for (double v : traj.state_row(k)) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }

    SECTION("argument validation") {
        TemporalGraph g(2, {{0, 1}});
        auto b = constant_bundle(g, 0.1, 0.2, 0.3);
        std::vector<double> x{0.5, 0.5};
        IntegrateOptions bad;
        bad.dt = 0.0;
        CHECK_THROWS(integrate(DynamicsModel::sum(), b, x, 1.0, bad));
        std::vector<double> outside{1.5, 0.0};
        CHECK_THROWS(integrate(DynamicsModel::sum(), b, outside, 1.0));
        std::vector<double> wrong{0.5};
        CHECK_THROWS(integrate(DynamicsModel::sum(), b, wrong, 1.0));
    }

    SECTION("a model hook returning non-finite values is reported with the step") {
        TemporalGraph g(2, {{0, 1}});
        auto b = constant_bundle(g, 0.1, 0.2, 0.3);
        CustomG nan_g;
        nan_g.name = "nan";
        nan_g.value = [](std::span<const double>, double, const NeighborView&) {
            return std::numeric_limits<double>::quiet_NaN();
        };
        nan_g.allow_fd = true;
        std::vector<double> x{0.5, 0.5};
        CHECK_THROWS_WITH(integrate(DynamicsModel::custom(nan_g), b, x, 1.0),
                          Catch::Matchers::ContainsSubstring("step"));
    }
}

TEST_CASE("random initial states") {
    CHECK(random_initial(10, 0.0, 1) == std::vector<double>(10, 0.0));
    CHECK(random_initial(10, 1.0, 1) == std::vector<double>(10, 1.0));
    auto x = random_initial(8846, 0.5, 123);
    long ones = 0;
    for (double v : x) ones += v == 1.0 ? 1 : 0;
    CHECK(ones == 4423);
    // deterministic in the seed
    CHECK(random_initial(100, 0.25, 9) == random_initial(100, 0.25, 9));
    CHECK(random_initial(100, 0.25, 9) != random_initial(100, 0.25, 10));
}

TEST_CASE("trajectory distance") {
    TemporalGraph g = er_directed(20, 0.2, 6);
    auto b = constant_bundle(g, 0.1, 0.4, 0.2);
    auto i0 = random_initial(20, 0.5, 1);
    auto a = integrate(DynamicsModel::sum(), b, i0, 5.0);
    auto c = integrate(DynamicsModel::sum(), b, i0, 5.0);

    SECTION("identical runs are at distance zero") {
        for (double d : trajectory_distance(a, c)) CHECK(d == 0.0);
    }

    SECTION("grid mismatch throws") {
        auto shorter = integrate(DynamicsModel::sum(), b, i0, 4.0);
        CHECK_THROWS(trajectory_distance(a, shorter));
    }
}

TEST_CASE("probe storage above the full-state cap") {
    TemporalGraph g = er_directed(2500, 0.002, 12);
    auto b = constant_bundle(g, 0.1, 0.5, 0.2);
    auto i0 = random_initial(2500, 0.5, 3);
    auto traj = integrate(DynamicsModel::sum(), b, i0, 1.0);
    CHECK_FALSE(traj.has_full_states());
    CHECK(traj.probe_nodes().size() == 128);
    auto traj2 = integrate(DynamicsModel::sum(), b, random_initial(2500, 0.25, 5), 1.0);
    CHECK(traj.probe_nodes() == traj2.probe_nodes());
    CHECK_NOTHROW(trajectory_distance(traj, traj2));
}

TEST_CASE("subcritical runs from different initial sets meet quickly") {
    TemporalGraph g = er_directed(200, 0.1, 7, Perturbation{10.0, 0.02, 7});
    auto b = preset_bundle("p1", g, 42, desk_gamma_scale(g));
    IntegrateOptions io;
    io.store_full = 1;
    auto a = integrate(DynamicsModel::sum(), b, random_initial(200, 0.25, 3), 50.0, io);
    auto c = integrate(DynamicsModel::sum(), b, random_initial(200, 0.75, 4), 50.0, io);
    auto d = trajectory_distance(a, c);
    CHECK(d.back() < 1e-3);
    CHECK(d.front() == 1.0);  // the initial sets genuinely differ
}

TEST_CASE("numerical quality on the two-tone presets") {
    TemporalGraph g = er_directed(120, 0.1, 77, Perturbation{10.0, 0.02, 5});
    double scale = desk_gamma_scale(g);

    SECTION("euler and rk4 stay close in the mean series") {
        auto b = preset_bundle("p2", g, 9, scale);
        auto i0 = random_initial(g.n(), 0.5, 2);
        IntegrateOptions eo, ro;
        ro.method = StepMethod::rk4;
        auto te = integrate(DynamicsModel::sum(), b, i0, 50.0, eo);
        auto tr = integrate(DynamicsModel::sum(), b, i0, 50.0, ro);
        double worst = 0.0;
        for (std::size_t k = 0; k < te.steps(); ++k)
            worst = std::max(worst, std::fabs(te.mean_series[k] - tr.mean_series[k]));
        CHECK(worst < 5e-3);
    }

    SECTION("clamping is a safety net, not the dynamics") {
        auto b = preset_bundle("p2", g, 9, scale);
        auto i0 = random_initial(g.n(), 0.5, 2);
        auto traj = integrate(DynamicsModel::sum(), b, i0, 30.0);
        CHECK(traj.meta.clamp_fraction < 1e-3);
    }

    SECTION("halving the step barely moves the endpoint") {
        auto b = preset_bundle("p3", g, 9, scale);
        auto i0 = random_initial(g.n(), 0.5, 2);
        IntegrateOptions coarse, fine;
        fine.dt = 0.025;
        auto tc = integrate(DynamicsModel::sum(), b, i0, 50.0, coarse);
        auto tf = integrate(DynamicsModel::sum(), b, i0, 50.0, fine);
        CHECK(std::fabs(tc.mean_series.back() - tf.mean_series.back()) < 1e-3);
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cyberdyn/model.hpp"
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

// Central-difference Jacobian of the drift; the independent check for the
// analytic rows.
DenseMatrix fd_jacobian(const DynamicsModel& m, const ParamBundle& b, double t,
                        std::vector<double> state) {
    const int n = b.n();
    DenseMatrix jac(n);
    const double h = 1e-6;
    for (int u = 0; u < n; ++u) {
        double saved = state[u];
        state[u] = saved + h;
        auto up = drift(m, b, t, state);
        state[u] = saved - h;
        auto dn = drift(m, b, t, state);
        state[u] = saved;
        for (int v = 0; v < n; ++v) jac.at(v, u) = (up[v] - dn[v]) / (2 * h);
    }
    return jac;
}

}  // namespace

TEST_CASE("attack functions") {
    std::vector<double> state{0.0, 0.5, 0.25};
    std::vector<int> ids{1, 2};
    std::vector<double> gammas{0.2, 0.4};
    NeighborView nb{{ids.data(), ids.size()}, {gammas.data(), gammas.size()}};

    SECTION("product form") {
        std::vector<double> zero{0.0, 0.0, 0.0};
        NeighborView none{{}, {}};
        CHECK(g_prod(zero, 0.0, none) == 0.0);

        std::vector<double> sure{0.0, 1.0};
        std::vector<int> one{1};
        std::vector<double> g1{1.0};
        CHECK(g_prod(sure, 0.0, NeighborView{{one.data(), 1}, {g1.data(), 1}}) == Approx(1.0));

        // 1 - 0.9 * (1-0.1)(1-0.1) = 0.271
        CHECK(g_prod(state, 0.1, nb) == Approx(0.271));
    }

    SECTION("additive form") {
        CHECK(g_sum(state, 0.1, NeighborView{{ids.data(), 1}, {gammas.data(), 1}}) == Approx(0.2));
        CHECK(g_sum(state, 0.17, NeighborView{{}, {}}) == Approx(0.17));

        std::vector<double> ones(11, 1.0);
        std::vector<int> many;
        std::vector<double> g_many(10, 0.5);
        for (int k = 1; k <= 10; ++k) many.push_back(k);
        double v = g_sum(ones, 0.1, NeighborView{{many.data(), many.size()}, {g_many.data(), g_many.size()}});
        CHECK(v == Approx(5.1));  // exceeds 1 by design; the drift absorbs it
    }

    SECTION("g at the origin equals alpha exactly") {
        std::vector<double> zero{0.0, 0.0, 0.0};
        for (double alpha : {0.0, 0.1, 0.3, 0.77}) {
            CHECK(g_prod(zero, alpha, nb) == alpha);
            CHECK(g_sum(zero, alpha, nb) == alpha);
        }
    }
}

TEST_CASE("drift") {
    SECTION("origin is an equilibrium without pull-based attacks") {
        TemporalGraph g(3, {{0, 1}, {1, 2}, {2, 0}});
        auto b = constant_bundle(g, 0.0, 0.4, 0.3);
        std::vector<double> zero(3, 0.0);
        for (double d : drift(DynamicsModel::sum(), b, 0.0, zero)) CHECK(d == 0.0);
        for (double d : drift(DynamicsModel::prod(), b, 0.0, zero)) CHECK(d == 0.0);
    }

    SECTION("upper face pushes inward") {
        TemporalGraph g(2, {{0, 1}, {1, 0}});
        auto b = constant_bundle(g, 0.3, 0.5, 0.8);
        std::vector<double> ones(2, 1.0);
        for (double d : drift(DynamicsModel::prod(), b, 0.0, ones)) CHECK(d <= 0.0);
    }

    SECTION("isolated node scalar arithmetic") {
        TemporalGraph g(1, {});
        auto b = constant_bundle(g, 0.2, 0.5, 0.0);
        std::vector<double> x{0.4};
        auto d = drift(DynamicsModel::sum(), b, 0.0, x);
        CHECK(d[0] == Approx(-0.08));
    }

    SECTION("empty graph is rejected") {
        TemporalGraph g(0, {});
        ParamBundle b = constant_bundle(g, 0.1, 0.1, 0.1);
        std::vector<double> empty;
        CHECK_THROWS(drift(DynamicsModel::sum(), b, 0.0, empty));
    }
}

TEST_CASE("jacobians") {
    SECTION("two mutual arcs at the origin") {
        TemporalGraph g(2, {{0, 1}, {1, 0}});
        auto b = constant_bundle(g, 0.0, 0.2, 0.3);
        auto jac = jacobian_at_zero(DynamicsModel::sum(), b, 0.0);
        CHECK(jac.entry(0, 0) == Approx(-0.2));
        CHECK(jac.entry(1, 1) == Approx(-0.2));
        CHECK(jac.entry(0, 1) == Approx(0.3));
        CHECK(jac.entry(1, 0) == Approx(0.3));
    }

    SECTION("empty graph linearization is the negative recovery diagonal") {
        TemporalGraph g(3, {});
        auto b = constant_bundle(g, 0.1, 0.4, 0.0);
        auto jac = jacobian_at_zero(DynamicsModel::prod(), b, 0.0);
        for (int v = 0; v < 3; ++v) {
            CHECK(jac.entry(v, v) == Approx(-0.5));
            for (int u = 0; u < 3; ++u)
                if (u != v) CHECK(jac.entry(v, u) == 0.0);
        }
    }

    SECTION("analytic rows match central differences at random states") {
        TemporalGraph g = er_directed(12, 0.25, 5);
        auto b = constant_bundle(g, 0.15, 0.35, 0.4);
        Rng rng(42);
        for (const auto& model :
             {DynamicsModel::prod(), DynamicsModel::sum(), DynamicsModel::from_string("custom:squared_mean")}) {
            for (int rep = 0; rep < 10; ++rep) {
                std::vector<double> state(12);
                for (auto& x : state) x = 0.05 + 0.9 * rng.uniform();
                auto analytic = jacobian(model, b, 0.0, state).to_dense();
                auto fd = fd_jacobian(model, b, 0.0, state);
                for (int v = 0; v < 12; ++v)
                    for (int u = 0; u < 12; ++u)
                        CHECK(analytic.at(v, u) == Approx(fd.at(v, u)).margin(1e-6));
            }
        }
    }

    SECTION("both built-in families linearize identically at the origin when alpha is zero") {
        TemporalGraph g = er_directed(20, 0.15, 8);
        auto b = constant_bundle(g, 0.0, 0.3, 0.25);
        auto js = jacobian_at_zero(DynamicsModel::sum(), b, 0.0).to_dense();
        auto jp = jacobian_at_zero(DynamicsModel::prod(), b, 0.0).to_dense();
        for (int v = 0; v < 20; ++v)
            for (int u = 0; u < 20; ++u) CHECK(js.at(v, u) == Approx(jp.at(v, u)).margin(1e-12));
    }

    SECTION("custom recovery with own-state dependence") {
        TemporalGraph g(2, {{0, 1}, {1, 0}});
        auto b = constant_bundle(g, 0.1, 0.4, 0.3);
        DynamicsModel model = DynamicsModel::sum();
        model.h_family = HFamily::custom;
        model.h_custom.name = "state_boosted";
        // recovery improves as the node's own compromise grows
        model.h_custom.value = [](std::span<const double> state, double beta, int v) {
            return beta * (0.5 + 0.5 * state[static_cast<std::size_t>(v)]);
        };
        std::vector<double> x{0.3, 0.6};
        auto analytic = jacobian(model, b, 0.0, x).to_dense();
        auto fd = fd_jacobian(model, b, 0.0, x);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(analytic.at(r, c) == Approx(fd.at(r, c)).margin(1e-6));
    }

    SECTION("custom family without partials or the fallback throws") {
        TemporalGraph g(2, {{0, 1}});
        auto b = constant_bundle(g, 0.0, 0.3, 0.25);
        CustomG bare;
        bare.name = "bare";
        bare.value = [](std::span<const double> state, double alpha, const NeighborView& nb) {
            return g_sum(state, alpha, nb);
        };
        bare.allow_fd = false;
        auto model = DynamicsModel::custom(bare);
        std::vector<double> x{0.2, 0.4};
        CHECK_THROWS(jacobian(model, b, 0.0, x));
        bare.allow_fd = true;
        auto ok = DynamicsModel::custom(bare);
        CHECK(jacobian(ok, b, 0.0, x).entry(1, 0) == Approx(0.25 * 0.6).margin(1e-5));
    }
}

TEST_CASE("property validators") {
    TemporalGraph g = er_directed(16, 0.2, 21);

    SECTION("additive family passes everything") {
        auto b = preset_bundle("p2", g, 5);
        auto rep = validate_properties(DynamicsModel::sum(), b, 300, 7);
        CHECK(rep.all_pass());
    }

    SECTION("product family passes everything") {
        auto b = preset_bundle("p1", g, 5);
        auto rep = validate_properties(DynamicsModel::prod(), b, 300, 7);
        CHECK(rep.all_pass());
    }

    SECTION("squared-mean attack fails subhomogeneity with a witness") {
        auto b = preset_bundle("p9", g, 5);
        auto rep = validate_properties(DynamicsModel::from_string("custom:squared_mean"), b, 300, 7);
        CHECK_FALSE(rep.all_pass());
        const PropertyCheck* sub = rep.find("subhomogeneity");
        REQUIRE(sub != nullptr);
        CHECK_FALSE(sub->pass);
        CHECK_FALSE(sub->witness.empty());
        // everything else about that g is fine
        CHECK(rep.find("cooperativity")->pass);
        CHECK(rep.find("g_at_zero_equals_alpha")->pass);
    }

    SECTION("hand-checked squared-mean counterexample") {
        // one active neighbor, eta = 0.5: g(eta i) = eta^2 q < eta q = eta g(i)
        std::vector<double> state{0.0, 0.8};
        std::vector<double> half{0.0, 0.4};
        std::vector<int> ids{1};
        std::vector<double> gammas{0.7};
        NeighborView nb{{ids.data(), 1}, {gammas.data(), 1}};
        auto& reg = DynamicsModel::registry().at("squared_mean");
        double g1 = reg.value(state, 0.0, nb);
        double gh = reg.value(half, 0.0, nb);
        CHECK(gh < 0.5 * g1);
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cyberdyn/param_process.hpp"
#include "cyberdyn/presets.hpp"

using namespace cyberdyn;
using Catch::Approx;

TEST_CASE("process evaluation") {
    SECTION("two-tone recovery rate starts at its offset") {
        auto beta = ParamProcess::sinusoidal(0.5, {{0.1, 1.0, 0.0}, {0.1, kSqrt2, 0.0}});
        CHECK(beta.eval(0.0) == Approx(0.5));
        CHECK(beta.eval(1.0) == Approx(0.1 * std::sin(1.0) + 0.1 * std::sin(kSqrt2) + 0.5));
    }

    SECTION("constant is constant") {
        auto c = ParamProcess::constant(0.3);
        CHECK(c.eval(0.0) == 0.3);
        CHECK(c.eval(77.7) == 0.3);
    }

    SECTION("piecewise draws are constant within a unit interval") {
        auto p = ParamProcess::piecewise_uniform(0.4, 0.7, 123, ParamShape::per_node);
        CHECK(p.eval(2.3, 5) == p.eval(2.9, 5));
        CHECK(p.eval(2.3, 5) != p.eval(3.1, 5));
        CHECK(p.eval(2.3, 5) != p.eval(2.3, 6));
        CHECK(p.eval(2.3, 5) >= 0.4);
        CHECK(p.eval(2.3, 5) <= 0.7);
    }

    SECTION("index out of range on indicator processes") {
        auto a = ParamProcess::with_indicator(ParamProcess::constant(0.2), 4, 0.5, 9);
        CHECK_THROWS_AS(a.eval(0.0, 4), std::out_of_range);
    }

    SECTION("reproducibility over many probe times") {
        auto p = ParamProcess::piecewise_uniform(0.1, 0.9, 555, ParamShape::per_node);
        auto q = ParamProcess::piecewise_uniform(0.1, 0.9, 555, ParamShape::per_node);
        bool identical = true;
        for (int k = 0; k < 10000; ++k) {
            double t = 0.01 * k;
            identical = identical && p.eval(t, k % 7) == q.eval(t, k % 7);
        }
        CHECK(identical);
    }

    SECTION("scaling multiplies values and support") {
        auto g = ParamProcess::sinusoidal(0.1, {{0.05, kPi / 5.0, 0.0}}).scaled(0.5);
        CHECK(g.eval(0.0) == Approx(0.05));
        CHECK(g.support_lo() == Approx(0.025));
        CHECK(g.support_hi() == Approx(0.075));
    }

    SECTION("probability clamp caps a formula that dips negative") {
        // offset 0.1 with amplitude 0.2 would reach -0.1 unclamped
        auto a = ParamProcess::sinusoidal(0.1, {{0.1, 3.0, 0.0}, {0.1, kSqrt3, 0.0}});
        CHECK(a.support_lo() == 0.0);
        double lowest = 1.0;
        for (double t = 0.0; t < 50.0; t += 0.05) lowest = std::min(lowest, a.eval(t));
        CHECK(lowest == 0.0);
        auto raw = a.with_clamp(-1.0, 1.0);
        CHECK(raw.support_lo() == Approx(-0.1));
        double raw_lowest = 1.0;
        for (double t = 0.0; t < 50.0; t += 0.05) raw_lowest = std::min(raw_lowest, raw.eval(t));
        CHECK(raw_lowest < 0.0);
    }
}

TEST_CASE("mean value") {
    SECTION("sinusoid averages to its offset") {
        auto p = ParamProcess::sinusoidal(0.5, {{0.1, 1.0, 0.0}});
        CHECK(mean_value(p, 0, 0.0, 1000.0) == Approx(0.5).margin(1e-3));
    }

    SECTION("piecewise uniform approaches the law's expectation") {
        auto p = ParamProcess::piecewise_uniform(0.4, 0.7, 2024, ParamShape::per_node);
        CHECK(mean_value(p, 0, 0.0, 10000.0, 0.5) == Approx(0.55).margin(0.01));
    }

    SECTION("constant is exact for any horizon") {
        auto p = ParamProcess::constant(0.37);
        CHECK(mean_value(p, 0, 0.0, 1.0) == 0.37);
        CHECK(mean_value(p, 0, 3.0, 17.0) == 0.37);
    }

    SECTION("report carries the start-point spread") {
        auto p = ParamProcess::sinusoidal(0.5, {{0.1, 1.0, 0.0}});
        auto rep = mean_value_report(p, 0, 500.0, 4);
        CHECK(rep.estimate == Approx(0.5).margin(1e-3));
        CHECK(rep.spread < 2e-3);
    }

    SECTION("mean over disjoint long windows is consistent for ergodic kinds") {
        auto p = ParamProcess::piecewise_uniform(0.1, 0.3, 77, ParamShape::per_node);
        double m1 = mean_value(p, 0, 0.0, 4000.0, 0.5);
        double m2 = mean_value(p, 0, 4000.0, 4000.0, 0.5);
        CHECK(std::fabs(m1 - m2) < 0.02);
    }

    SECTION("rejects nonpositive horizons") {
        CHECK_THROWS(mean_value(ParamProcess::constant(0.1), 0, 0.0, -1.0));
    }
}

TEST_CASE("ergodicity diagnostic") {
    SECTION("deterministic sinusoid passes") {
        auto p = ParamProcess::sinusoidal(0.4, {{0.1, 1.0, 0.0}});
        auto rep = ergodicity_diagnostic(p, 0, 300.0, {}, 4);
        CHECK(rep.pass);
        CHECK(rep.dispersion < 1e-12);
    }

    SECTION("realization-level mixture fails with means near the branch expectations") {
        auto p = ParamProcess::mixture_uniform({{0.1, 0.2}, {0.1, 1.0}}, 31, ParamShape::per_node);
        auto rep = ergodicity_diagnostic(p, 0, 2000.0, {}, 12, 0.02, 0.5);
        CHECK_FALSE(rep.pass);
        bool saw_low = false, saw_high = false;
        for (double m : rep.realization_means) {
            if (std::fabs(m - 0.15) < 0.02) saw_low = true;
            if (std::fabs(m - 0.55) < 0.03) saw_high = true;
        }
        CHECK(saw_low);
        CHECK(saw_high);
    }

    SECTION("iid piecewise uniform passes") {
        auto p = ParamProcess::piecewise_uniform(0.1, 0.3, 99, ParamShape::per_node);
        auto rep = ergodicity_diagnostic(p, 0, 3000.0, {}, 6, 0.02, 0.5);
        CHECK(rep.pass);
    }

    SECTION("stochastic kinds demand two realizations") {
        auto p = ParamProcess::piecewise_uniform(0.1, 0.3, 99, ParamShape::per_node);
        CHECK_THROWS(ergodicity_diagnostic(p, 0, 10.0, {}, 1));
    }
}

TEST_CASE("translation numbers") {
    SECTION("pure sinusoid recovers its period") {
        auto p = ParamProcess::sinusoidal(0.5, {{0.1, 1.0, 0.0}});
        auto xi = translation_number_search(p, 1e-6, 10.0);
        REQUIRE(xi.has_value());
        CHECK(*xi == Approx(2 * kPi).margin(1e-4));
    }

    SECTION("incommensurate tones admit a translation number but no period") {
        auto p = ParamProcess::sinusoidal(0.3, {{0.2, kPi, 0.0}, {0.1, 2 * kSqrt2 * kPi, 0.0}});
        auto xi = translation_number_search(p, 0.01, 400.0);
        REQUIRE(xi.has_value());
        double defect = 0.0;
        for (double t = 0.0; t < 60.0; t += 0.05)
            defect = std::max(defect, std::fabs(p.eval(t + *xi) - p.eval(t)));
        CHECK(defect < 0.01);
        CHECK(defect > 1e-9);  // close but never exact
    }

    SECTION("constant processes return the grid step") {
        auto xi = translation_number_search(ParamProcess::constant(0.4), 1e-6, 5.0);
        REQUIRE(xi.has_value());
        CHECK(*xi == Approx(0.05));
    }

    SECTION("stochastic kinds are rejected") {
        auto p = ParamProcess::piecewise_uniform(0.1, 0.3, 7, ParamShape::per_node);
        CHECK_THROWS(translation_number_search(p, 0.01, 10.0));
    }
}

TEST_CASE("preset parameter bounds") {
    TemporalGraph g = er_directed(40, 0.1, 3);
    for (const auto& spec : preset_table()) {
        ParamBundle b = preset_bundle(spec, g, 17);
        for (int k = 0; k < 200; ++k) {
            double t = 0.5 * k;
            int v = k % g.n();
            double av = b.alpha_at(t, v);
            double bv = b.beta_at(t, v);
            CHECK(av >= b.alpha.support_lo(v) - 1e-12);
            CHECK(av <= b.alpha.support_hi(v) + 1e-12);
            CHECK(bv >= b.beta.support_lo(v) - 1e-12);
            CHECK(bv <= b.beta.support_hi(v) + 1e-12);
            CHECK(av >= 0.0);
            CHECK(bv <= 1.0);
        }
    }
    // the touchstone: p1 recovery stays inside [0.3, 0.7]
    ParamBundle p1 = preset_bundle("p1", g, 17);
    CHECK(p1.beta.support_lo(0) == Approx(0.3));
    CHECK(p1.beta.support_hi(0) == Approx(0.7));
}

TEST_CASE("json descriptors") {
    SECTION("round trip of the documented forms") {
        auto sin_doc = nlohmann::json::parse(
            R"({"kind":"sinusoidal_sum","offset":0.5,"terms":[[0.1,1.0,0.0],[0.1,1.4142135,0.0]]})");
        auto p = ParamProcess::from_json(sin_doc);
        CHECK(p.eval(0.0) == Approx(0.5));
        CHECK(ParamProcess::from_json(p.to_json()).eval(3.3) == Approx(p.eval(3.3)));

        auto pw_doc = nlohmann::json::parse(
            R"({"kind":"piecewise_iid_uniform","lo":0.4,"hi":0.7,"seed":12,"shape":"per_node"})");
        auto q = ParamProcess::from_json(pw_doc);
        CHECK(ParamProcess::from_json(q.to_json()).eval(4.2, 3) == q.eval(4.2, 3));
    }

    SECTION("indicator wrapper survives the round trip") {
        auto a = ParamProcess::with_indicator(ParamProcess::constant(0.2), 10, 0.5, 77);
        auto b = ParamProcess::from_json(a.to_json());
        for (int v = 0; v < 10; ++v) CHECK(a.eval(1.0, v) == b.eval(1.0, v));
    }

    SECTION("unknown kinds are rejected") {
        CHECK_THROWS(ParamProcess::from_json(nlohmann::json::parse(R"({"kind":"nope"})")));
    }
}

TEST_CASE("mixture branch is a realization-level choice") {
    auto p = ParamProcess::mixture_uniform({{0.1, 0.2}, {0.1, 1.0}}, 5, ParamShape::per_node);
    std::size_t branch = p.mixture_branch();
    // same branch governs every node and every interval of this realization
    auto q = ParamProcess::mixture_uniform({{0.1, 0.2}, {0.1, 1.0}}, 5, ParamShape::per_node);
    CHECK(q.mixture_branch() == branch);
    bool reseed_changes = false;
    for (std::uint64_t r = 0; r < 8 && !reseed_changes; ++r)
        reseed_changes = p.reseeded(r).mixture_branch() != branch;
    CHECK(reseed_changes);
}

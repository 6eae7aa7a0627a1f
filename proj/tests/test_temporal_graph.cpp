#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <vector>

#include "cyberdyn/mean_structure.hpp"
#include "cyberdyn/presets.hpp"
#include "cyberdyn/scc.hpp"
#include "cyberdyn/temporal_graph.hpp"

using namespace cyberdyn;
using Catch::Approx;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/cyberdyn_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

// Brute-force pairwise reachability; the independent oracle for SCC grouping.
std::vector<std::vector<bool>> reachability(const std::vector<Arc>& arcs, int n) {
    std::vector<std::vector<int>> adj(n);
    for (const Arc& a : arcs) adj[a.from].push_back(a.to);
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int s = 0; s < n; ++s) {
        std::vector<int> stack{s};
        reach[s][s] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v]) {
                if (!reach[s][w]) {
                    reach[s][w] = true;
                    stack.push_back(w);
                }
            }
        }
    }
    return reach;
}

}  // namespace

TEST_CASE("edge list loading") {
    SECTION("small file with comments") {
        auto path = write_temp("small.txt", "# header\n0\t1\n1 0\n1\t2\n");
        auto loaded = load_edge_list(path);
        CHECK(loaded.report.node_count == 3);
        CHECK(loaded.report.arc_count == 3);
        CHECK(loaded.graph.base_arcs() == std::vector<Arc>{{0, 1}, {1, 0}, {1, 2}});
    }

    SECTION("empty file yields an empty graph that downstream operations reject") {
        auto path = write_temp("empty.txt", "");
        auto loaded = load_edge_list(path);
        CHECK(loaded.report.node_count == 0);
        CHECK(loaded.report.arc_count == 0);
        CHECK_THROWS(scc_decompose(loaded.graph.base_arcs(), loaded.graph.n()));
    }

    SECTION("ids are remapped dense") {
        auto path = write_temp("sparse_ids.txt", "10 20\n20 30\n30 10\n");
        auto loaded = load_edge_list(path);
        CHECK(loaded.report.node_count == 3);
        for (const Arc& a : loaded.graph.base_arcs()) {
            CHECK(a.from >= 0);
            CHECK(a.from < 3);
        }
    }

    SECTION("malformed line reports its number") {
        auto path = write_temp("bad.txt", "0 1\nnot numbers\n");
        CHECK_THROWS_WITH(load_edge_list(path), Catch::Matchers::ContainsSubstring("line 2"));
    }

    SECTION("self loops dropped with a count, duplicates deduplicated") {
        auto path = write_temp("loops.txt", "0 0\n0 1\n0 1\n1 2\n");
        auto loaded = load_edge_list(path);
        CHECK(loaded.report.self_loops_dropped == 1);
        CHECK(loaded.report.duplicates_dropped == 1);
        CHECK(loaded.report.arc_count == 2);
    }
}

TEST_CASE("arc epochs") {
    SECTION("static graph returns base arcs at any time") {
        TemporalGraph g(3, {{0, 1}, {1, 2}});
        CHECK(arcs_at(g, 0.0) == g.base_arcs());
        CHECK(arcs_at(g, 123.0) == g.base_arcs());
    }

    SECTION("perturbation swaps ceil(fraction*E) arcs per epoch, keeping |E| constant") {
        TemporalGraph g = er_directed(80, 0.08, 42, Perturbation{10.0, 0.02, 7});
        const auto& base = g.arcs_at(5.0);
        const auto& epoch1 = g.arcs_at(15.0);
        CHECK(base == g.base_arcs());
        CHECK(epoch1.size() == base.size());
        std::size_t m = static_cast<std::size_t>(std::ceil(0.02 * double(base.size())));
        CHECK(symmetric_difference_size(base, epoch1) == 2 * m);
    }

    SECTION("same seed gives bit-identical epochs across instances") {
        TemporalGraph a = er_directed(60, 0.1, 11, Perturbation{10.0, 0.02, 99});
        TemporalGraph b = er_directed(60, 0.1, 11, Perturbation{10.0, 0.02, 99});
        for (double t : {0.0, 15.0, 25.0, 95.0}) CHECK(a.arc_hash_at(t) == b.arc_hash_at(t));
        TemporalGraph c = er_directed(60, 0.1, 11, Perturbation{10.0, 0.02, 100});
        CHECK(a.arc_hash_at(15.0) != c.arc_hash_at(15.0));
    }

    SECTION("union and intersection over epochs") {
        TemporalGraph g = TemporalGraph::with_epochs(
            3, {{0.0, {{0, 1}, {1, 2}}}, {10.0, {{0, 1}, {2, 0}}}});
        auto uni = g.arcs_union(20.0);
        auto inter = g.arcs_intersection(20.0);
        CHECK(uni == std::vector<Arc>{{0, 1}, {1, 2}, {2, 0}});
        CHECK(inter == std::vector<Arc>{{0, 1}});
    }
}

TEST_CASE("scc decomposition") {
    SECTION("two components in upstream-first order") {
        std::vector<Arc> arcs{{0, 1}, {1, 0}, {1, 2}};
        auto scc = scc_decompose(arcs, 3);
        REQUIRE(scc.size() == 2);
        CHECK(scc.components[0] == std::vector<int>{0, 1});
        CHECK(scc.components[1] == std::vector<int>{2});
        REQUIRE(scc.upstream_sets[1].size() == 1);
        CHECK(scc.upstream_sets[1][0] == 0);
        CHECK(scc.upstream_sets[0].empty());
    }

    SECTION("three-cycle is one component") {
        auto scc = scc_decompose(std::vector<Arc>{{0, 1}, {1, 2}, {2, 0}}, 3);
        CHECK(scc.size() == 1);
        CHECK(scc.components[0] == std::vector<int>{0, 1, 2});
    }

    SECTION("isolated nodes are singleton components") {
        auto scc = scc_decompose(std::vector<Arc>{}, 4);
        CHECK(scc.size() == 4);
    }

    SECTION("agrees with the reachability oracle on random graphs") {
        for (std::uint64_t seed = 1; seed <= 16; ++seed) {
            int n = 3 + static_cast<int>((seed * 11) % 48);
            double density = 0.02 + 0.2 * ((seed * 7) % 5) / 4.0;
            TemporalGraph g = er_directed(n, density, seed);
            auto scc = scc_decompose(g.base_arcs(), n);
            auto reach = reachability(g.base_arcs(), n);
            bool all_ok = true;
            for (int u = 0; u < n && all_ok; ++u) {
                for (int v = 0; v < n && all_ok; ++v) {
                    bool same = scc.component_of[u] == scc.component_of[v];
                    bool mutual = reach[u][v] && reach[v][u];
                    all_ok = same == mutual;
                }
            }
            INFO("seed " << seed << " n " << n);
            CHECK(all_ok);
        }
        // the larger one once
        int n = 200;
        TemporalGraph g = er_directed(n, 0.1, 7);
        auto scc = scc_decompose(g.base_arcs(), n);
        auto reach = reachability(g.base_arcs(), n);
        bool all_ok = true;
        for (int u = 0; u < n && all_ok; ++u)
            for (int v = 0; v < n && all_ok; ++v)
                all_ok = (scc.component_of[u] == scc.component_of[v]) == (reach[u][v] && reach[v][u]);
        CHECK(all_ok);
    }

    SECTION("condensation arcs point from earlier to later positions") {
        for (std::uint64_t seed : {5u, 6u, 7u}) {
            TemporalGraph g = er_directed(40, 0.04, seed);
            auto scc = scc_decompose(g.base_arcs(), 40);
            for (auto& [j, k] : scc.condensation_arcs) CHECK(j < k);
        }
    }
}

TEST_CASE("mean attack structure") {
    SECTION("constant rate on a static graph") {
        TemporalGraph g(3, {{0, 1}, {1, 2}});
        auto m = mean_structure(g, ParamProcess::constant(0.3), 10.0);
        CHECK(m.weight(0, 1) == Approx(0.3));
        CHECK(m.weight(1, 2) == Approx(0.3));
        CHECK(m.weight(2, 0) == 0.0);
    }

    SECTION("sinusoid averages to its offset over whole periods") {
        TemporalGraph g(2, {{0, 1}});
        auto gamma = ParamProcess::sinusoidal(0.1, {{0.05, kPi / 5.0, 0.0}});
        auto m = mean_structure(g, gamma, 100.0);
        CHECK(m.weight(0, 1) == Approx(0.1).margin(1e-3));
    }

    SECTION("arc present half the horizon carries half its rate") {
        TemporalGraph g = TemporalGraph::with_epochs(2, {{0.0, {{0, 1}}}, {50.0, {}}});
        auto m = mean_structure(g, ParamProcess::constant(0.2), 100.0);
        CHECK(m.weight(0, 1) == Approx(0.1).margin(1e-9));
    }

    SECTION("rejects a nonpositive horizon") {
        TemporalGraph g(2, {{0, 1}});
        CHECK_THROWS(mean_structure(g, ParamProcess::constant(0.2), 0.0));
    }

    SECTION("strong connectivity of the weighted support") {
        TemporalGraph cyc(3, {{0, 1}, {1, 2}, {2, 0}});
        CHECK(mean_structure(cyc, ParamProcess::constant(0.5), 5.0).strongly_connected());
        TemporalGraph chain(3, {{0, 1}, {1, 2}});
        CHECK_FALSE(mean_structure(chain, ParamProcess::constant(0.5), 5.0).strongly_connected());
    }
}

#include <doctest.h>

#include <algorithm>
#include <set>

#include "satguide/cdcl.hpp"
#include "satguide/generators.hpp"

using namespace satguide;

TEST_CASE("critical-density clause counts") {
    CHECK(sat3_num_clauses(200) == 853);
    CHECK(sat3_num_clauses(300) == 1278);
    CHECK(sat3_num_clauses(350) == 1491);
    CHECK(sat3_num_clauses(400) == 1704);
    CHECK(sat3_num_clauses(50) > 0);
}

TEST_CASE("3SAT structure") {
    CnfFormula f = gen_3sat(50, 9);
    CHECK(f.num_vars() == 50);
    CHECK(f.num_clauses() == sat3_num_clauses(50));
    for (const auto& c : f.clauses()) {
        REQUIRE(c.size() == 3);
        std::set<int> vars;
        for (Lit l : c) vars.insert(var_of(l));
        CHECK(vars.size() == 3); // three distinct variables
    }
    CHECK(gen_3sat(50, 9) == f);      // deterministic
    CHECK(gen_3sat(50, 10) != f);
}

TEST_CASE("3COL structure and known colorings") {
    CnfFormula f = gen_3col(300, 1);
    CHECK(f.num_vars() == 900);

    // triangle is 3-colorable
    CnfFormula tri = encode_3col(4, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(satisfiable_brute_force(tri));
    // K4 is not
    CnfFormula k4 =
        encode_3col(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(!satisfiable_brute_force(k4));

    // clause census: n at-least-one, 3n at-most-one, 3|E| conflicts
    std::size_t edges = 6;
    CHECK(k4.num_clauses() == 4 + 3 * 4 + (int)(3 * edges));
}

TEST_CASE("er graph is deterministic with sane density") {
    auto e1 = gen_er_graph(40, 5);
    auto e2 = gen_er_graph(40, 5);
    CHECK(e1 == e2);
    for (auto [u, v] : e1) {
        CHECK(u < v);
        CHECK(v < 40);
    }
}

TEST_CASE("instance filenames") {
    GenSpec spec{Family::Random3Sat, 50, 7};
    CHECK(instance_filename(spec) == "random3sat_n50_seed7.cnf");
    GenSpec col{Family::ThreeCol, 30, 2};
    CHECK(instance_filename(col) == "threecol_n30_seed2.cnf");
}

TEST_CASE("solver-based backbone equals brute force") {
    SolverConfig cfg;
    CompleteSolver solve = [&](const CnfFormula& f) {
        return solve_cdcl_baseline(f, cfg);
    };
    int checked = 0;
    for (uint64_t seed = 0; checked < 25; ++seed) {
        CnfFormula f = gen_3sat(15, 10000 + seed);
        if (!satisfiable_brute_force(f)) continue;
        ++checked;
        auto a = backbone(f, solve);
        auto b = backbone_brute_force(f);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("backbone rejects unsatisfiable input") {
    SolverConfig cfg;
    CompleteSolver solve = [&](const CnfFormula& f) {
        return solve_cdcl_baseline(f, cfg);
    };
    CnfFormula f(1, {{1}, {-1}});
    CHECK_THROWS_AS(backbone(f, solve), std::invalid_argument);
}

TEST_CASE("forced chain backbone") {
    SolverConfig cfg;
    CompleteSolver solve = [&](const CnfFormula& f) {
        return solve_cdcl_baseline(f, cfg);
    };
    CnfFormula f(3, {{1}, {-1, 2}, {-2, 3}});
    auto bb = backbone(f, solve);
    std::sort(bb.begin(), bb.end());
    CHECK(bb == std::vector<Lit>{1, 2, 3});
}

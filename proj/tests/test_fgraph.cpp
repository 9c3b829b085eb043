#include <doctest.h>

#include "satguide/fgraph.hpp"

using namespace satguide;

TEST_CASE("small graph layout") {
    // (x1 v ~x2) & (x2 v x3)
    CnfFormula f(3, {{1, -2}, {2, 3}});
    FormulaGraph g = build_graph(f);

    CHECK(g.num_vars == 3);
    CHECK(g.num_clauses == 2);
    CHECK(g.num_vertices() == 8);
    CHECK(FormulaGraph::pos_lit_vertex(1) == 0);
    CHECK(FormulaGraph::neg_lit_vertex(1) == 1);
    CHECK(FormulaGraph::pos_lit_vertex(2) == 2);
    CHECK(FormulaGraph::opposite(2) == 3);
    CHECK(g.clause_vertex(0) == 6);

    // clause 0 touches +x1 (vertex 0) and -x2 (vertex 3)
    CHECK(g.clause_offsets[0] == 0);
    CHECK(g.clause_offsets[1] == 2);
    CHECK(g.clause_offsets[2] == 4);
    std::vector<int> c0(g.clause_lits.begin(), g.clause_lits.begin() + 2);
    CHECK(c0 == std::vector<int>{0, 3});
    std::vector<int> c1(g.clause_lits.begin() + 2, g.clause_lits.begin() + 4);
    CHECK(c1 == std::vector<int>{2, 4});

    // literal -> clause lists mirror the clause lists
    auto lit_list = [&](int lv) {
        return std::vector<int>(g.lit_clauses.begin() + g.lit_offsets[lv],
                                g.lit_clauses.begin() + g.lit_offsets[lv + 1]);
    };
    CHECK(lit_list(0) == std::vector<int>{6});
    CHECK(lit_list(1) == std::vector<int>{});
    CHECK(lit_list(2) == std::vector<int>{7});
    CHECK(lit_list(3) == std::vector<int>{6});
    CHECK(lit_list(4) == std::vector<int>{7});
    CHECK(lit_list(5) == std::vector<int>{});
}

TEST_CASE("degrees include the pairing edge") {
    CnfFormula f(2, {{1, -2}});
    FormulaGraph g = build_graph(f);
    CHECK(g.degree[0] == 2); // one clause + pairing
    CHECK(g.degree[1] == 1); // pairing only
    CHECK(g.degree[2] == 1);
    CHECK(g.degree[3] == 2);
    CHECK(g.degree[4] == 2); // the clause has two literals
}

TEST_CASE("csr consistency on a bigger formula") {
    CnfFormula f(5, {{1, 2, 3}, {-1, -4, 5}, {2, -3, 4}, {-2, -5, 1}});
    FormulaGraph g = build_graph(f);
    // every clause-literal edge appears exactly once in each direction
    int edges_from_clauses = (int)g.clause_lits.size();
    int edges_from_lits = (int)g.lit_clauses.size();
    CHECK(edges_from_clauses == edges_from_lits);
    for (int j = 0; j < g.num_clauses; ++j) {
        for (int e = g.clause_offsets[j]; e < g.clause_offsets[j + 1]; ++e) {
            int lv = g.clause_lits[e];
            bool found = false;
            for (int k = g.lit_offsets[lv]; k < g.lit_offsets[lv + 1]; ++k) {
                if (g.lit_clauses[k] == g.clause_vertex(j)) found = true;
            }
            CHECK(found);
        }
    }
}

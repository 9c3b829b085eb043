#pragma once

#include <vector>

#include "satguide/cnf.hpp"

namespace satguide {

// Literal-clause graph of a formula. Vertices are the 2n literals followed
// by the m clauses; literal x_v maps to index 2(v-1), its negation to
// 2(v-1)+1, clause j to 2n+j. Clause edges are stored CSR-style in both
// directions; the (x, -x) pairing edges are kept separately because the
// network consumes the opposite-literal embedding directly.
struct FormulaGraph {
    int num_vars = 0;
    int num_clauses = 0;

    // clause -> literal vertices
    std::vector<int> clause_offsets; // size m+1
    std::vector<int> clause_lits;    // literal vertex indices
    // literal -> clause vertices
    std::vector<int> lit_offsets;    // size 2n+1
    std::vector<int> lit_clauses;    // clause vertex indices (2n-based)

    // degree per vertex; literal degrees include the pairing edge
    std::vector<int> degree;         // size 2n+m

    int num_vertices() const { return 2 * num_vars + num_clauses; }
    static int pos_lit_vertex(int var) { return 2 * (var - 1); }
    static int neg_lit_vertex(int var) { return 2 * (var - 1) + 1; }
    static int opposite(int lit_vertex) { return lit_vertex ^ 1; }
    int clause_vertex(int clause_idx) const {
        return 2 * num_vars + clause_idx;
    }
};

FormulaGraph build_graph(const CnfFormula& f);

} // namespace satguide

#include "satguide/fgraph.hpp"

namespace satguide {

FormulaGraph build_graph(const CnfFormula& f) {
    FormulaGraph g;
    g.num_vars = f.num_vars();
    g.num_clauses = f.num_clauses();
    int nl = 2 * g.num_vars;

    g.clause_offsets.assign(g.num_clauses + 1, 0);
    std::vector<int> lit_deg(nl, 0);
    for (int j = 0; j < g.num_clauses; ++j) {
        const auto& c = f.clause(j);
        g.clause_offsets[j + 1] = g.clause_offsets[j] + (int)c.size();
        for (Lit l : c) {
            int lv = l > 0 ? FormulaGraph::pos_lit_vertex(l)
                           : FormulaGraph::neg_lit_vertex(-l);
            ++lit_deg[lv];
        }
    }
    g.clause_lits.reserve(g.clause_offsets.back());
    for (int j = 0; j < g.num_clauses; ++j) {
        for (Lit l : f.clause(j)) {
            g.clause_lits.push_back(l > 0 ? FormulaGraph::pos_lit_vertex(l)
                                          : FormulaGraph::neg_lit_vertex(-l));
        }
    }

    g.lit_offsets.assign(nl + 1, 0);
    for (int lv = 0; lv < nl; ++lv) {
        g.lit_offsets[lv + 1] = g.lit_offsets[lv] + lit_deg[lv];
    }
    g.lit_clauses.assign(g.lit_offsets.back(), 0);
    std::vector<int> fill(nl, 0);
    for (int j = 0; j < g.num_clauses; ++j) {
        for (int k = g.clause_offsets[j]; k < g.clause_offsets[j + 1]; ++k) {
            int lv = g.clause_lits[k];
            g.lit_clauses[g.lit_offsets[lv] + fill[lv]++] = g.clause_vertex(j);
        }
    }

    g.degree.assign(g.num_vertices(), 0);
    for (int lv = 0; lv < nl; ++lv) g.degree[lv] = lit_deg[lv] + 1; // + pairing
    for (int j = 0; j < g.num_clauses; ++j) {
        g.degree[g.clause_vertex(j)] =
            g.clause_offsets[j + 1] - g.clause_offsets[j];
    }
    return g;
}

} // namespace satguide

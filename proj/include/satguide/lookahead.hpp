#pragma once

#include <vector>

#include "satguide/cnf.hpp"
#include "satguide/solver_types.hpp"

namespace satguide {

struct LookaheadConfig {
    double preselect_fraction = 0.1; // in (0,1]; at least one candidate kept
    bool skip_preselect = false;     // bypass pre-selection (all candidates)

    void validate() const;
};

// DPLL with unit propagation, pure-literal elimination, failed-literal
// detection and look-ahead branching. Weights scale both the pre-selection
// scores and the final look-ahead scores; polarities pick the first branch.
class LookaheadSolver {
public:
    LookaheadSolver(const CnfFormula& f, const Parameterization& params,
                    const SolverConfig& cfg, const LookaheadConfig& lcfg);

    SolveReport solve();

    const std::vector<Lit>& decision_sequence() const { return decision_seq_; }

private:
    int n_;
    SolverConfig cfg_;
    LookaheadConfig lcfg_;
    std::vector<double> weight_;
    std::vector<uint8_t> polarity_;

    std::vector<std::vector<int>> clauses_;   // internal literals
    std::vector<std::vector<int>> occ_;       // literal -> clause indices
    std::vector<int8_t> assign_;              // -1 unassigned, 0/1
    std::vector<int> num_true_;               // per clause
    std::vector<int> num_false_;              // per clause
    std::vector<int> trail_;                  // assigned literals, for undo

    std::vector<Lit> decision_seq_;
    int64_t decisions_ = 0;
    int64_t conflicts_ = 0;
    int64_t propagations_ = 0;
    bool budget_hit_ = false;

    static int neg(int l) { return l ^ 1; }
    static int lvar(int l) { return l >> 1; }
    static Lit to_external(int l) {
        return (l & 1) ? -(lvar(l) + 1) : (lvar(l) + 1);
    }
    bool clause_sat(int ci) const { return num_true_[ci] > 0; }
    int clause_len(int ci) const {
        return (int)clauses_[ci].size() - num_false_[ci];
    }

    // Returns false on conflict. Assignments are pushed onto the trail.
    bool assign_lit(int l);
    bool propagate_units();
    bool eliminate_pure_literals(bool& changed);
    void undo_to(std::size_t mark);

    // Trial-propagates l; reports newly created binary clauses. Returns
    // false if the propagation hits a conflict (failed literal).
    bool probe(int l, int& new_binaries);

    enum class Result { Sat, Unsat, Budget };
    Result search();
};

SolveReport solve_lookahead(const CnfFormula& f, const Parameterization& params,
                            const SolverConfig& cfg,
                            const LookaheadConfig& lcfg);
SolveReport solve_lookahead_baseline(const CnfFormula& f,
                                     const SolverConfig& cfg,
                                     const LookaheadConfig& lcfg);

} // namespace satguide

#pragma once

#include <vector>

#include "satguide/cnf.hpp"
#include "satguide/solver_types.hpp"

namespace satguide {

// CDCL solver with weight-scaled EVSIDS bumping and external polarity
// initialization. Two-watched-literal propagation, first-UIP learning
// (no minimization), Luby restarts, phase saving. Single-threaded; run one
// instance per formula.
class CdclSolver {
public:
    CdclSolver(const CnfFormula& f, const Parameterization& params,
               const SolverConfig& cfg);

    SolveReport solve();

    // Decision literals in order, DIMACS numbering. For replay tests.
    const std::vector<Lit>& decision_sequence() const { return decision_seq_; }
    // Learned clauses in DIMACS numbering, for soundness spot checks.
    std::vector<std::vector<Lit>> learned_clauses() const;

private:
    static constexpr int kNoReason = -1;

    int n_;
    SolverConfig cfg_;
    std::vector<double> weight_;           // per variable
    std::vector<std::vector<int>> clauses_; // internal lits; [0, orig_end_) original
    int orig_end_ = 0;

    std::vector<std::vector<int>> watches_; // per internal literal
    std::vector<int8_t> assign_;            // per var: -1 unassigned, 0/1 value
    std::vector<int8_t> phase_;             // saved phase, seeded from p(x)
    std::vector<int> level_;
    std::vector<int> reason_;               // clause index or kNoReason
    std::vector<int> trail_;                // internal literals
    std::vector<int> trail_lim_;
    std::size_t prop_head_ = 0;

    std::vector<double> activity_;
    std::vector<int> heap_;                // binary max-heap of variables
    std::vector<int> heap_pos_;            // -1 when not in heap
    double var_inc_;

    std::vector<Lit> decision_seq_;
    int64_t decisions_ = 0;
    int64_t conflicts_ = 0;
    int64_t propagations_ = 0;

    // lit helpers on internal encoding: var v -> 2v (pos), 2v+1 (neg)
    static int neg(int l) { return l ^ 1; }
    static int lvar(int l) { return l >> 1; }
    bool lit_true(int l) const {
        return assign_[lvar(l)] == ((l & 1) ? 0 : 1);
    }
    bool lit_false(int l) const {
        return assign_[lvar(l)] == ((l & 1) ? 1 : 0);
    }
    bool unassigned(int v) const { return assign_[v] < 0; }
    static Lit to_external(int l) {
        return (l & 1) ? -(lvar(l) + 1) : (lvar(l) + 1);
    }

    int decision_level() const { return (int)trail_lim_.size(); }
    void enqueue(int l, int reason);
    int propagate(); // returns conflict clause index or -1
    void attach(int ci);
    int analyze(int conflict, std::vector<int>& learned); // returns backtrack level
    void backtrack(int level);
    void bump(int v);
    void rescale();
    bool heap_less(int a, int b) const; // priority order
    void heap_insert(int v);
    int heap_pop();
    void heap_sift_up(int i);
    void heap_sift_down(int i);
    Assignment extract_model() const;
};

SolveReport solve_cdcl(const CnfFormula& f, const Parameterization& params,
                       const SolverConfig& cfg);
SolveReport solve_cdcl_baseline(const CnfFormula& f, const SolverConfig& cfg);

// Luby restart sequence, 1-indexed: 1,1,2,1,1,2,4,...
int64_t luby(int64_t i);

} // namespace satguide

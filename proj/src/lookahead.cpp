#include "satguide/lookahead.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace satguide {

void LookaheadConfig::validate() const {
    if (!(preselect_fraction > 0.0 && preselect_fraction <= 1.0)) {
        throw std::invalid_argument("preselect_fraction must be in (0,1]");
    }
}

LookaheadSolver::LookaheadSolver(const CnfFormula& f,
                                 const Parameterization& params,
                                 const SolverConfig& cfg,
                                 const LookaheadConfig& lcfg)
    : n_(f.num_vars()), cfg_(cfg), lcfg_(lcfg), weight_(params.weights),
      polarity_(params.polarities) {
    cfg_.validate();
    lcfg_.validate();
    params.validate(n_);

    assign_.assign(n_, -1);
    occ_.assign(2 * (std::size_t)n_, {});
    clauses_.reserve(f.num_clauses());
    for (const auto& c : f.clauses()) {
        std::vector<int> internal;
        internal.reserve(c.size());
        for (Lit l : c) {
            int il = l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1;
            occ_[il].push_back((int)clauses_.size());
            internal.push_back(il);
        }
        clauses_.push_back(std::move(internal));
    }
    num_true_.assign(clauses_.size(), 0);
    num_false_.assign(clauses_.size(), 0);
}

bool LookaheadSolver::assign_lit(int l) {
    int v = lvar(l);
    if (assign_[v] >= 0) return assign_[v] == ((l & 1) ? 0 : 1);
    assign_[v] = (l & 1) ? 0 : 1;
    trail_.push_back(l);
    for (int ci : occ_[l]) ++num_true_[ci];
    bool ok = true;
    for (int ci : occ_[neg(l)]) {
        ++num_false_[ci];
        if (num_true_[ci] == 0 && num_false_[ci] == (int)clauses_[ci].size()) {
            ok = false;
        }
    }
    return ok;
}

void LookaheadSolver::undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
        int l = trail_.back();
        trail_.pop_back();
        assign_[lvar(l)] = -1;
        for (int ci : occ_[l]) --num_true_[ci];
        for (int ci : occ_[neg(l)]) --num_false_[ci];
    }
}

bool LookaheadSolver::propagate_units() {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            if (clause_sat((int)ci)) continue;
            int len = clause_len((int)ci);
            if (len == 0) return false;
            if (len != 1) continue;
            for (int l : clauses_[ci]) {
                if (assign_[lvar(l)] < 0) {
                    ++propagations_;
                    if (!assign_lit(l)) return false;
                    changed = true;
                    break;
                }
            }
        }
    }
    return true;
}

bool LookaheadSolver::eliminate_pure_literals(bool& changed) {
    bool local = true;
    while (local) {
        local = false;
        std::vector<int> occ_count(2 * (std::size_t)n_, 0);
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            if (clause_sat((int)ci)) continue;
            for (int l : clauses_[ci]) {
                if (assign_[lvar(l)] < 0) ++occ_count[l];
            }
        }
        for (int v = 0; v < n_; ++v) {
            if (assign_[v] >= 0) continue;
            int pos = 2 * v, negl = 2 * v + 1;
            int l = -1;
            if (occ_count[pos] > 0 && occ_count[negl] == 0) l = pos;
            else if (occ_count[negl] > 0 && occ_count[pos] == 0) l = negl;
            if (l >= 0) {
                ++propagations_;
                assign_lit(l); // satisfies clauses only; cannot conflict
                local = true;
                changed = true;
            }
        }
    }
    return true;
}

bool LookaheadSolver::probe(int l, int& new_binaries) {
    // Caller records the trail mark and undoes; lengths-before are taken
    // from the node state captured by search().
    if (!assign_lit(l)) return false;
    if (!propagate_units()) return false;
    new_binaries = 0;
    return true;
}

LookaheadSolver::Result LookaheadSolver::search() {
    for (;;) {
        if (!propagate_units()) {
            ++conflicts_;
            return Result::Unsat;
        }
        bool changed = false;
        eliminate_pure_literals(changed);
        if (changed && !propagate_units()) {
            ++conflicts_;
            return Result::Unsat;
        }

        bool all_sat = true;
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            if (!clause_sat((int)ci)) {
                all_sat = false;
                break;
            }
        }
        if (all_sat) return Result::Sat;

        // Node snapshot of clause lengths, used both for the pre-selection
        // score and for counting newly created binaries during look-ahead.
        std::vector<int> len_before(clauses_.size());
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            len_before[ci] = clause_sat((int)ci) ? -1 : clause_len((int)ci);
        }

        // Pre-selection: occurrences in short clauses, scaled by w(x).
        std::vector<int> unassigned;
        for (int v = 0; v < n_; ++v) {
            if (assign_[v] < 0) unassigned.push_back(v);
        }
        std::vector<double> pre_score(n_, 0.0);
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            if (len_before[ci] < 0 || len_before[ci] > 3) continue;
            for (int l : clauses_[ci]) {
                int v = lvar(l);
                if (assign_[v] < 0) pre_score[v] += 1.0;
            }
        }
        std::vector<int> candidates = unassigned;
        if (!lcfg_.skip_preselect && lcfg_.preselect_fraction < 1.0) {
            std::size_t keep = (std::size_t)std::ceil(
                lcfg_.preselect_fraction * (double)unassigned.size());
            if (keep < 1) keep = 1;
            std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
                double sa = weight_[a] * pre_score[a];
                double sb = weight_[b] * pre_score[b];
                if (sa != sb) return sa > sb;
                return a < b;
            });
            if (keep < candidates.size()) candidates.resize(keep);
        }

        auto count_new_binaries = [&] {
            int nb = 0;
            for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
                if (len_before[ci] <= 2) continue;
                if (!clause_sat((int)ci) && clause_len((int)ci) == 2) ++nb;
            }
            return nb;
        };

        int best_var = -1;
        double best_score = -1.0;
        bool restart_node = false;
        for (int v : candidates) {
            std::size_t mark = trail_.size();
            int np = 0, nn = 0;
            bool ok_pos = probe(2 * v, np);
            if (ok_pos) np = count_new_binaries();
            undo_to(mark);
            bool ok_neg = probe(2 * v + 1, nn);
            if (ok_neg) nn = count_new_binaries();
            undo_to(mark);

            if (!ok_pos && !ok_neg) {
                ++conflicts_;
                return Result::Unsat;
            }
            if (!ok_pos || !ok_neg) {
                // Failed literal: the surviving polarity is implied.
                int forced = ok_pos ? 2 * v : 2 * v + 1;
                ++propagations_;
                if (!assign_lit(forced) || !propagate_units()) {
                    ++conflicts_;
                    return Result::Unsat;
                }
                restart_node = true;
                break;
            }
            double score =
                weight_[v] * ((double)np * (double)nn * 1024.0 + np + nn);
            if (best_var < 0 || score > best_score ||
                (score == best_score && v < best_var)) {
                best_var = v;
                best_score = score;
            }
        }
        if (restart_node) continue;

        if (cfg_.decision_budget > 0 && decisions_ >= cfg_.decision_budget) {
            budget_hit_ = true;
            return Result::Budget;
        }
        ++decisions_;
        int first = polarity_[best_var] ? 2 * best_var : 2 * best_var + 1;
        decision_seq_.push_back(to_external(first));

        for (int l : {first, neg(first)}) {
            std::size_t mark = trail_.size();
            if (assign_lit(l)) {
                Result r = search();
                if (r != Result::Unsat) return r;
            } else {
                ++conflicts_;
            }
            undo_to(mark);
        }
        return Result::Unsat;
    }
}

SolveReport LookaheadSolver::solve() {
    auto t0 = std::chrono::steady_clock::now();
    Result r = clauses_.empty() ? Result::Sat : search();
    SolveReport rep;
    rep.decisions = decisions_;
    rep.conflicts = conflicts_;
    rep.propagations = propagations_;
    rep.budget_exhausted = budget_hit_;
    if (r == Result::Sat) {
        rep.verdict = SolveVerdict::Sat;
        Assignment a(n_);
        for (int v = 0; v < n_; ++v) {
            bool val = assign_[v] >= 0 ? assign_[v] == 1 : polarity_[v] == 1;
            a.set(v + 1, val);
        }
        rep.model = a;
    } else if (r == Result::Unsat) {
        rep.verdict = SolveVerdict::Unsat;
    }
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

SolveReport solve_lookahead(const CnfFormula& f, const Parameterization& params,
                            const SolverConfig& cfg,
                            const LookaheadConfig& lcfg) {
    LookaheadSolver s(f, params, cfg, lcfg);
    return s.solve();
}

SolveReport solve_lookahead_baseline(const CnfFormula& f,
                                     const SolverConfig& cfg,
                                     const LookaheadConfig& lcfg) {
    return solve_lookahead(f, Parameterization::uniform(f.num_vars()), cfg,
                           lcfg);
}

} // namespace satguide

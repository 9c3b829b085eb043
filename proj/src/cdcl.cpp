#include "satguide/cdcl.hpp"

#include <chrono>

namespace satguide {

int64_t luby(int64_t i) {
    // Find the finite subsequence containing i and the position within it.
    int64_t k = 1;
    while ((((int64_t)1 << k) - 1) < i) ++k;
    while ((((int64_t)1 << k) - 1) != i) {
        i -= ((int64_t)1 << (k - 1)) - 1;
        k = 1;
        while ((((int64_t)1 << k) - 1) < i) ++k;
    }
    return (int64_t)1 << (k - 1);
}

CdclSolver::CdclSolver(const CnfFormula& f, const Parameterization& params,
                       const SolverConfig& cfg)
    : n_(f.num_vars()), cfg_(cfg), weight_(params.weights) {
    cfg_.validate();
    params.validate(n_);

    assign_.assign(n_, -1);
    phase_.assign(n_, 0);
    for (int v = 0; v < n_; ++v) phase_[v] = params.polarities[v];
    level_.assign(n_, 0);
    reason_.assign(n_, kNoReason);
    activity_.assign(n_, 0.0);
    heap_pos_.assign(n_, -1);
    var_inc_ = cfg_.bump_increment;
    watches_.assign(2 * (std::size_t)n_, {});

    clauses_.reserve(f.num_clauses());
    for (const auto& c : f.clauses()) {
        std::vector<int> internal;
        internal.reserve(c.size());
        for (Lit l : c) {
            internal.push_back(l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1);
        }
        clauses_.push_back(std::move(internal));
    }
    orig_end_ = (int)clauses_.size();

    for (int v = 0; v < n_; ++v) heap_insert(v);
}

void CdclSolver::attach(int ci) {
    const auto& c = clauses_[ci];
    watches_[neg(c[0])].push_back(ci);
    watches_[neg(c[1])].push_back(ci);
}

void CdclSolver::enqueue(int l, int reason) {
    int v = lvar(l);
    assign_[v] = (l & 1) ? 0 : 1;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
    if (reason != kNoReason || decision_level() == 0) ++propagations_;
}

int CdclSolver::propagate() {
    while (prop_head_ < trail_.size()) {
        int p = trail_[prop_head_++];
        int false_lit = neg(p);
        auto& ws = watches_[p]; // clauses watching a literal that just became false
        std::size_t i = 0, j = 0;
        int conflict = -1;
        while (i < ws.size()) {
            int ci = ws[i++];
            auto& c = clauses_[ci];
            if (c[0] == false_lit) std::swap(c[0], c[1]);
            if (lit_true(c[0])) {
                ws[j++] = ci;
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.size(); ++k) {
                if (!lit_false(c[k])) {
                    std::swap(c[1], c[k]);
                    watches_[neg(c[1])].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            ws[j++] = ci;
            if (lit_false(c[0])) {
                conflict = ci;
                while (i < ws.size()) ws[j++] = ws[i++];
                break;
            }
            enqueue(c[0], ci);
        }
        ws.resize(j);
        if (conflict >= 0) return conflict;
    }
    return -1;
}

int CdclSolver::analyze(int conflict, std::vector<int>& learned) {
    learned.clear();
    learned.push_back(-1); // slot for the asserting literal
    std::vector<int8_t> seen(n_, 0);
    int counter = 0;
    int p = -1;
    int index = (int)trail_.size() - 1;
    int ci = conflict;
    do {
        const auto& c = clauses_[ci];
        // For reason clauses c[0] is the implied literal; skip it.
        for (std::size_t j = (p < 0) ? 0 : 1; j < c.size(); ++j) {
            int q = c[j];
            int v = lvar(q);
            if (!seen[v] && level_[v] > 0) {
                seen[v] = 1;
                if (level_[v] >= decision_level()) {
                    ++counter;
                } else {
                    learned.push_back(q);
                }
            }
        }
        while (!seen[lvar(trail_[index])]) --index;
        p = neg(trail_[index]); // trail literal is true; learned wants its negation
        ci = reason_[lvar(trail_[index])];
        seen[lvar(trail_[index])] = 0;
        --index;
        --counter;
    } while (counter > 0);
    learned[0] = p;

    int bt_level = 0;
    if (learned.size() > 1) {
        // Move the highest-level non-asserting literal to position 1.
        std::size_t max_i = 1;
        for (std::size_t k = 2; k < learned.size(); ++k) {
            if (level_[lvar(learned[k])] > level_[lvar(learned[max_i])]) max_i = k;
        }
        std::swap(learned[1], learned[max_i]);
        bt_level = level_[lvar(learned[1])];
    }
    return bt_level;
}

void CdclSolver::backtrack(int target) {
    if (decision_level() <= target) return;
    std::size_t bound = trail_lim_[target];
    for (std::size_t k = trail_.size(); k > bound; --k) {
        int l = trail_[k - 1];
        int v = lvar(l);
        phase_[v] = assign_[v];
        assign_[v] = -1;
        reason_[v] = kNoReason;
        if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(bound);
    trail_lim_.resize(target);
    prop_head_ = trail_.size();
}

void CdclSolver::bump(int v) {
    activity_[v] += weight_[v] * var_inc_;
    if (activity_[v] > cfg_.rescale_threshold) rescale();
    if (heap_pos_[v] >= 0) heap_sift_up(heap_pos_[v]);
}

void CdclSolver::rescale() {
    constexpr double kFactor = 1e-100;
    for (double& a : activity_) a *= kFactor;
    var_inc_ *= kFactor;
}

bool CdclSolver::heap_less(int a, int b) const {
    if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
    return a < b;
}

void CdclSolver::heap_insert(int v) {
    heap_pos_[v] = (int)heap_.size();
    heap_.push_back(v);
    heap_sift_up(heap_pos_[v]);
}

int CdclSolver::heap_pop() {
    int top = heap_[0];
    heap_pos_[top] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_pos_[heap_[0]] = 0;
        heap_sift_down(0);
    }
    return top;
}

void CdclSolver::heap_sift_up(int i) {
    int v = heap_[i];
    while (i > 0) {
        int parent = (i - 1) / 2;
        if (!heap_less(v, heap_[parent])) break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = i;
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

void CdclSolver::heap_sift_down(int i) {
    int v = heap_[i];
    int size = (int)heap_.size();
    for (;;) {
        int child = 2 * i + 1;
        if (child >= size) break;
        if (child + 1 < size && heap_less(heap_[child + 1], heap_[child])) ++child;
        if (!heap_less(heap_[child], v)) break;
        heap_[i] = heap_[child];
        heap_pos_[heap_[i]] = i;
        i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

Assignment CdclSolver::extract_model() const {
    Assignment a(n_);
    for (int v = 0; v < n_; ++v) {
        bool val = assign_[v] >= 0 ? assign_[v] == 1 : phase_[v] == 1;
        a.set(v + 1, val);
    }
    return a;
}

SolveReport CdclSolver::solve() {
    auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    auto finish = [&](SolveVerdict verdict) {
        rep.verdict = verdict;
        rep.decisions = decisions_;
        rep.conflicts = conflicts_;
        rep.propagations = propagations_;
        if (verdict == SolveVerdict::Sat) rep.model = extract_model();
        rep.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        return rep;
    };

    if (clauses_.empty()) return finish(SolveVerdict::Sat);

    // Attach clauses; top-level units are enqueued directly.
    for (int ci = 0; ci < orig_end_; ++ci) {
        const auto& c = clauses_[ci];
        if (c.size() == 1) {
            if (lit_false(c[0])) return finish(SolveVerdict::Unsat);
            if (!lit_true(c[0])) enqueue(c[0], ci);
        } else {
            attach(ci);
        }
    }

    int64_t restart_num = 1;
    int64_t conflicts_since_restart = 0;
    std::vector<int> learned;

    for (;;) {
        int conflict = propagate();
        if (conflict >= 0) {
            ++conflicts_;
            if (decision_level() == 0) return finish(SolveVerdict::Unsat);
            int bt = analyze(conflict, learned);
            backtrack(bt);
            for (int l : learned) bump(lvar(l));
            var_inc_ /= cfg_.activity_decay;
            if (learned.size() == 1) {
                enqueue(learned[0], kNoReason);
            } else {
                clauses_.push_back(learned);
                int ci = (int)clauses_.size() - 1;
                attach(ci);
                enqueue(learned[0], ci);
            }
            ++conflicts_since_restart;
            if (conflicts_since_restart >=
                luby(restart_num) * cfg_.restart_interval) {
                ++restart_num;
                conflicts_since_restart = 0;
                backtrack(0);
            }
        } else {
            int next = -1;
            while (!heap_.empty()) {
                int v = heap_pop();
                if (unassigned(v)) {
                    next = v;
                    break;
                }
            }
            if (next < 0) return finish(SolveVerdict::Sat);
            if (cfg_.decision_budget > 0 && decisions_ >= cfg_.decision_budget) {
                rep.budget_exhausted = true;
                return finish(SolveVerdict::Unknown);
            }
            ++decisions_;
            int l = phase_[next] ? 2 * next : 2 * next + 1;
            decision_seq_.push_back(to_external(l));
            trail_lim_.push_back((int)trail_.size());
            enqueue(l, kNoReason);
        }
    }
}

std::vector<std::vector<Lit>> CdclSolver::learned_clauses() const {
    std::vector<std::vector<Lit>> out;
    for (std::size_t ci = orig_end_; ci < clauses_.size(); ++ci) {
        std::vector<Lit> ext;
        ext.reserve(clauses_[ci].size());
        for (int l : clauses_[ci]) ext.push_back(to_external(l));
        out.push_back(std::move(ext));
    }
    return out;
}

SolveReport solve_cdcl(const CnfFormula& f, const Parameterization& params,
                       const SolverConfig& cfg) {
    CdclSolver s(f, params, cfg);
    return s.solve();
}

SolveReport solve_cdcl_baseline(const CnfFormula& f, const SolverConfig& cfg) {
    return solve_cdcl(f, Parameterization::uniform(f.num_vars()), cfg);
}

} // namespace satguide

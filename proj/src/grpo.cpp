#include "satguide/grpo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "satguide/cdcl.hpp"
#include "satguide/pool.hpp"
#include "satguide/rng.hpp"

namespace satguide {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch())
        .count();
}

} // namespace

SolverKind solver_kind_from_name(const std::string& name) {
    if (name == "cdcl") return SolverKind::Cdcl;
    if (name == "lookahead") return SolverKind::Lookahead;
    throw std::invalid_argument("unknown solver: " + name);
}

const char* solver_kind_name(SolverKind kind) {
    return kind == SolverKind::Cdcl ? "cdcl" : "lookahead";
}

SolveReport run_solver(SolverKind kind, const CnfFormula& f,
                       const Parameterization& params, const SolverConfig& cfg,
                       const LookaheadConfig& lcfg) {
    if (kind == SolverKind::Cdcl) return solve_cdcl(f, params, cfg);
    return solve_lookahead(f, params, cfg, lcfg);
}

SolveReport run_solver_baseline(SolverKind kind, const CnfFormula& f,
                                const SolverConfig& cfg,
                                const LookaheadConfig& lcfg) {
    if (kind == SolverKind::Cdcl) return solve_cdcl_baseline(f, cfg);
    return solve_lookahead_baseline(f, cfg, lcfg);
}

void TrainConfig::validate() const {
    if (iterations < 0) throw std::invalid_argument("iterations < 0");
    if (formulas_per_iter < 1) throw std::invalid_argument("formulas_per_iter < 1");
    if (samples_per_formula < 2) {
        throw std::invalid_argument("samples_per_formula must be >= 2");
    }
    if (steps_per_iter < 0) throw std::invalid_argument("steps_per_iter < 0");
    if (batch_size < 1 || batch_size > formulas_per_iter) {
        throw std::invalid_argument("batch_size must be in [1, formulas_per_iter]");
    }
    if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
        throw std::invalid_argument("clip_epsilon must be in (0,1)");
    }
    if (kl_weight < 0.0) throw std::invalid_argument("kl_weight < 0");
    if (kl_direction != "new_old" && kl_direction != "old_new") {
        throw std::invalid_argument("kl_direction must be new_old or old_new");
    }
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate <= 0");
    if (max_grad_norm < 0.0) throw std::invalid_argument("max_grad_norm < 0");
    if (!(sigma_w > 0.0)) throw std::invalid_argument("sigma_w <= 0");
    if (dim < 1 || layers < 1) throw std::invalid_argument("bad net shape");
    solver_kind_from_name(solver);
}

std::vector<double> advantages(const std::vector<double>& rewards) {
    if (rewards.size() < 2) {
        throw std::invalid_argument("advantage group needs at least 2 rewards");
    }
    double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) /
                  (double)rewards.size();
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= (double)rewards.size();
    double sd = std::sqrt(var);
    std::vector<double> a(rewards.size(), 0.0);
    if (sd > 0.0) {
        for (std::size_t i = 0; i < rewards.size(); ++i) {
            a[i] = (rewards[i] - mean) / sd;
        }
    }
    return a;
}

PpoLoss ppo_loss(const std::vector<double>& new_logprobs,
                 const std::vector<double>& old_logprobs,
                 const std::vector<double>& advs, double eps) {
    std::size_t m = new_logprobs.size();
    if (old_logprobs.size() != m || advs.size() != m) {
        throw std::invalid_argument("ppo_loss size mismatch");
    }
    if (m == 0) throw std::invalid_argument("ppo_loss on empty group");
    PpoLoss out;
    out.grad_new_logprobs.assign(m, 0.0);
    int clipped = 0;
    for (std::size_t j = 0; j < m; ++j) {
        double ratio = std::exp(new_logprobs[j] - old_logprobs[j]);
        double a = advs[j];
        double unclipped = ratio * a;
        double clamped = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * a;
        if (unclipped <= clamped) {
            out.objective += unclipped;
            // d(ratio*a)/d new_lp = ratio*a
            out.grad_new_logprobs[j] = unclipped / (double)m;
        } else {
            out.objective += clamped;
            ++clipped;
        }
    }
    out.objective /= (double)m;
    out.clip_fraction = (double)clipped / (double)m;
    return out;
}

Trainer::Trainer(TrainConfig cfg, std::vector<CnfFormula> corpus)
    : cfg_(std::move(cfg)), corpus_(std::move(corpus)) {
    cfg_.validate();
    if (corpus_.empty()) throw std::invalid_argument("empty training corpus");
    kind_ = solver_kind_from_name(cfg_.solver);
    NetConfig nc{cfg_.dim, cfg_.layers};
    state_.params = NetParams::init(nc, cfg_.seed);
    std::size_t pc = NetParams::param_count(nc);
    state_.opt.m.assign(pc, 0.0);
    state_.opt.v.assign(pc, 0.0);
}

IterationMetrics Trainer::run_iteration() {
    int k = state_.iteration + 1;
    int n_formulas = cfg_.formulas_per_iter;
    int m_samples = cfg_.samples_per_formula;
    int workers = cfg_.workers > 0 ? cfg_.workers : default_worker_count();
    SolverConfig scfg;
    scfg.decision_budget = cfg_.decision_budget;
    LookaheadConfig lcfg;

    IterationMetrics metrics;
    metrics.iteration = k;

    double t0 = now_seconds();

    // Draw this iteration's formulas (with replacement) from the corpus.
    Rng sel(Rng::derive(cfg_.seed, (uint64_t)k, 0, 0));
    std::vector<int> picked(n_formulas);
    for (int i = 0; i < n_formulas; ++i) {
        picked[i] = (int)sel.uniform_int(corpus_.size());
    }

    std::vector<FormulaGraph> graphs(n_formulas);
    std::vector<PolicyDist> old_dists(n_formulas);
    parallel_for(n_formulas, workers, [&](std::size_t i) {
        graphs[i] = build_graph(corpus_[picked[i]]);
        NetOutput out = net_forward(state_.params, graphs[i]);
        old_dists[i] = policy_from_net(out, cfg_.sigma_w);
    });

    // Rollouts: sample W_ij from the frozen policy, run the solver.
    std::vector<std::vector<Parameterization>> samples(n_formulas);
    std::vector<std::vector<double>> old_logprobs(n_formulas);
    std::vector<std::vector<double>> costs(n_formulas);
    for (int i = 0; i < n_formulas; ++i) {
        samples[i].resize(m_samples);
        old_logprobs[i].assign(m_samples, 0.0);
        costs[i].assign(m_samples, 0.0);
    }
    parallel_for((std::size_t)n_formulas * m_samples, workers,
                 [&](std::size_t idx) {
        int i = (int)(idx / m_samples);
        int j = (int)(idx % m_samples);
        uint64_t rollout_seed =
            Rng::derive(cfg_.seed, (uint64_t)k, (uint64_t)i + 1,
                        (uint64_t)j + 1);
        samples[i][j] = policy_sample(old_dists[i], rollout_seed);
        old_logprobs[i][j] = policy_log_prob(old_dists[i], samples[i][j]);
        SolveReport rep =
            run_solver(kind_, corpus_[picked[i]], samples[i][j], scfg, lcfg);
        costs[i][j] = rep.budget_exhausted ? (double)scfg.decision_budget
                                           : (double)rep.decisions;
    });

    std::vector<std::vector<double>> advs(n_formulas);
    double cost_sum = 0.0;
    double abs_adv_sum = 0.0;
    for (int i = 0; i < n_formulas; ++i) {
        advs[i] = advantages(costs[i]);
        bool all_exhausted = cfg_.decision_budget > 0;
        for (int j = 0; j < m_samples; ++j) {
            cost_sum += costs[i][j];
            // reward is negative cost; flip the advantage sign
            advs[i][j] = -advs[i][j];
            abs_adv_sum += std::abs(advs[i][j]);
            if (costs[i][j] != (double)cfg_.decision_budget) {
                all_exhausted = false;
            }
        }
        if (all_exhausted) ++metrics.groups_skipped;
    }
    metrics.mean_cost = cost_sum / (double)(n_formulas * m_samples);
    metrics.mean_abs_advantage =
        abs_adv_sum / (double)(n_formulas * m_samples);

    metrics.rollout_seconds = now_seconds() - t0;
    t0 = now_seconds();

    // Optimization: S steps, each a mean over a mini-batch of formulas.
    Rng perm_rng(Rng::derive(cfg_.seed, (uint64_t)k, 0, 1));
    std::vector<int> perm(n_formulas);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n_formulas - 1; i > 0; --i) {
        int j = (int)perm_rng.uniform_int((uint64_t)i + 1);
        std::swap(perm[i], perm[j]);
    }

    OptimizerConfig opt;
    opt.lr = cfg_.learning_rate;
    if (cfg_.warmup_iters > 0 && k < cfg_.warmup_iters) {
        opt.lr *= (double)k / (double)cfg_.warmup_iters;
    }
    opt.plain_sgd = cfg_.plain_sgd;

    std::size_t pc = state_.params.theta.size();
    int batch = cfg_.batch_size;
    double clip_sum = 0.0;
    for (int s = 0; s < cfg_.steps_per_iter; ++s) {
        std::vector<std::vector<double>> batch_grads(batch);
        std::vector<double> batch_kl(batch, 0.0);
        std::vector<double> batch_clip(batch, 0.0);
        parallel_for((std::size_t)batch, workers, [&](std::size_t t) {
            int i = perm[((std::size_t)s * batch + t) % n_formulas];
            const FormulaGraph& g = graphs[i];
            ForwardCache cache;
            NetOutput out = net_forward(state_.params, g, &cache);
            PolicyDist dist = policy_from_net(out, cfg_.sigma_w);

            std::vector<double> new_lp(m_samples);
            for (int j = 0; j < m_samples; ++j) {
                new_lp[j] = policy_log_prob(dist, samples[i][j]);
            }
            PpoLoss pl = ppo_loss(new_lp, old_logprobs[i], advs[i],
                                  cfg_.clip_epsilon);
            batch_clip[t] = pl.clip_fraction;

            int nv = dist.num_vars();
            std::vector<double> dmu(nv, 0.0), drho(nv, 0.0);
            for (int j = 0; j < m_samples; ++j) {
                if (pl.grad_new_logprobs[j] == 0.0) continue;
                PolicyGrad lg = policy_log_prob_grad(dist, samples[i][j]);
                double c = pl.grad_new_logprobs[j];
                for (int v = 0; v < nv; ++v) {
                    dmu[v] += c * lg.dmu[v];
                    drho[v] += c * lg.drho[v];
                }
            }
            double kl;
            PolicyGrad kg;
            if (cfg_.kl_direction == "new_old") {
                kl = policy_kl(dist, old_dists[i]);
                kg = policy_kl_grad(dist, old_dists[i]);
            } else {
                kl = policy_kl(old_dists[i], dist);
                kg = policy_kl_grad_second(old_dists[i], dist);
            }
            batch_kl[t] = kl;
            for (int v = 0; v < nv; ++v) {
                dmu[v] -= cfg_.kl_weight * kg.dmu[v];
                drho[v] -= cfg_.kl_weight * kg.drho[v];
            }

            // Loss to minimize is the negated objective, averaged over the
            // batch; only positive-literal rows of dy are populated.
            double scale = -1.0 / (double)batch;
            std::vector<double> dy(
                (std::size_t)4 * g.num_vars, 0.0);
            for (int v = 0; v < nv; ++v) {
                std::size_t row = (std::size_t)2 *
                                  FormulaGraph::pos_lit_vertex(v + 1);
                dy[row] = scale * dmu[v];
                dy[row + 1] = scale * drho[v];
            }
            batch_grads[t] = net_backward(state_.params, g, cache, dy);
        });
        std::vector<double> grad(pc, 0.0);
        for (int t = 0; t < batch; ++t) {
            for (std::size_t p = 0; p < pc; ++p) grad[p] += batch_grads[t][p];
        }
        double clip_frac = std::accumulate(batch_clip.begin(),
                                           batch_clip.end(), 0.0) /
                           (double)batch;
        clip_sum += clip_frac;
        if (s == 0) metrics.clip_fraction_first = clip_frac;
        double sq = 0.0;
        for (double gv : grad) sq += gv * gv;
        double norm = std::sqrt(sq);
        if (s == cfg_.steps_per_iter - 1) {
            metrics.mean_kl = std::accumulate(batch_kl.begin(),
                                              batch_kl.end(), 0.0) /
                              (double)batch;
            metrics.grad_norm = norm; // pre-clip
        }
        if (cfg_.max_grad_norm > 0.0 && norm > cfg_.max_grad_norm) {
            double shrink = cfg_.max_grad_norm / norm;
            for (double& gv : grad) gv *= shrink;
        }
        optimizer_step(state_.params.theta, grad, state_.opt, opt);
    }
    if (cfg_.steps_per_iter > 0) {
        metrics.clip_fraction = clip_sum / (double)cfg_.steps_per_iter;
    }

    metrics.train_seconds = now_seconds() - t0;
    state_.iteration = k;
    return metrics;
}

double Trainer::validate(const std::vector<CnfFormula>& instances) const {
    std::vector<std::string> names(instances.size());
    SolverConfig scfg;
    scfg.decision_budget = cfg_.decision_budget;
    LookaheadConfig lcfg;
    int workers = cfg_.workers > 0 ? cfg_.workers : default_worker_count();
    EvalSummary s = evaluate_instances(&state_.params, cfg_.sigma_w, kind_,
                                       instances, names, scfg, lcfg, workers);
    return s.mean_decisions;
}

EvalSummary evaluate_instances(const NetParams* params, double sigma,
                               SolverKind kind,
                               const std::vector<CnfFormula>& instances,
                               const std::vector<std::string>& names,
                               const SolverConfig& scfg,
                               const LookaheadConfig& lcfg, int workers) {
    if (names.size() != instances.size()) {
        throw std::invalid_argument("names/instances size mismatch");
    }
    EvalSummary summary;
    summary.rows.resize(instances.size());
    parallel_for(instances.size(), workers, [&](std::size_t i) {
        EvalRow& row = summary.rows[i];
        row.name = names[i];
        SolveReport rep;
        if (params) {
            double t0 = now_seconds();
            NetOutput out = net_forward(*params, build_graph(instances[i]));
            Parameterization w = policy_mode(policy_from_net(out, sigma));
            row.net_seconds = now_seconds() - t0;
            rep = run_solver(kind, instances[i], w, scfg, lcfg);
        } else {
            rep = run_solver_baseline(kind, instances[i], scfg, lcfg);
        }
        row.verdict = rep.verdict;
        row.decisions = rep.decisions;
        row.solver_seconds = rep.elapsed_seconds;
    });
    for (const EvalRow& row : summary.rows) {
        summary.mean_decisions += (double)row.decisions;
        summary.mean_solver_seconds += row.solver_seconds;
        summary.mean_net_seconds += row.net_seconds;
        if (row.verdict == SolveVerdict::Sat) {
            summary.mean_decisions_sat += (double)row.decisions;
            ++summary.count_sat;
        } else if (row.verdict == SolveVerdict::Unsat) {
            summary.mean_decisions_unsat += (double)row.decisions;
            ++summary.count_unsat;
        }
    }
    if (!summary.rows.empty()) {
        double inv = 1.0 / (double)summary.rows.size();
        summary.mean_decisions *= inv;
        summary.mean_solver_seconds *= inv;
        summary.mean_net_seconds *= inv;
    }
    if (summary.count_sat > 0) {
        summary.mean_decisions_sat /= (double)summary.count_sat;
    }
    if (summary.count_unsat > 0) {
        summary.mean_decisions_unsat /= (double)summary.count_unsat;
    }
    return summary;
}

double pearson(const std::vector<std::pair<double, double>>& pairs,
               bool* degenerate) {
    if (degenerate) *degenerate = false;
    if (pairs.size() < 2) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    // a constant series has no defined correlation; detect it exactly
    // before the mean subtraction can leave rounding residue
    auto constant = [&](auto proj) {
        double first = proj(pairs[0]);
        for (const auto& p : pairs) {
            if (proj(p) != first) return false;
        }
        return true;
    };
    if (constant([](const auto& p) { return p.first; }) ||
        constant([](const auto& p) { return p.second; })) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pairs) {
        mx += x;
        my += y;
    }
    mx /= (double)pairs.size();
    my /= (double)pairs.size();
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pairs) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

WeightCorrelation weight_correlation(const NetParams& params_a,
                                     const NetParams& params_b, double sigma,
                                     const std::vector<CnfFormula>& instances,
                                     std::size_t sample_size, uint64_t seed) {
    std::size_t total = 0;
    for (const CnfFormula& f : instances) total += (std::size_t)f.num_vars();
    if (sample_size > total) {
        throw std::invalid_argument("sample_size exceeds available variables");
    }
    std::vector<std::pair<double, double>> all;
    all.reserve(total);
    for (const CnfFormula& f : instances) {
        FormulaGraph g = build_graph(f);
        auto ea = policy_expected_weights(
            policy_from_net(net_forward(params_a, g), sigma));
        auto eb = policy_expected_weights(
            policy_from_net(net_forward(params_b, g), sigma));
        for (int v = 0; v < f.num_vars(); ++v) {
            all.emplace_back(ea[v], eb[v]);
        }
    }
    WeightCorrelation out;
    if (sample_size == 0 || sample_size == total) {
        out.samples = std::move(all);
    } else {
        Rng rng(seed);
        // partial Fisher-Yates: first sample_size slots
        for (std::size_t i = 0; i < sample_size; ++i) {
            std::size_t j = i + (std::size_t)rng.uniform_int(total - i);
            std::swap(all[i], all[j]);
        }
        out.samples.assign(all.begin(), all.begin() + sample_size);
    }
    out.pearson_r = pearson(out.samples, &out.degenerate);
    return out;
}

} // namespace satguide

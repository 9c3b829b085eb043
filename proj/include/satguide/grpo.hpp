#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satguide/cnf.hpp"
#include "satguide/lookahead.hpp"
#include "satguide/net.hpp"
#include "satguide/policy.hpp"
#include "satguide/solver_types.hpp"

namespace satguide {

enum class SolverKind { Cdcl, Lookahead };
SolverKind solver_kind_from_name(const std::string& name);
const char* solver_kind_name(SolverKind kind);

SolveReport run_solver(SolverKind kind, const CnfFormula& f,
                       const Parameterization& params, const SolverConfig& cfg,
                       const LookaheadConfig& lcfg);
SolveReport run_solver_baseline(SolverKind kind, const CnfFormula& f,
                                const SolverConfig& cfg,
                                const LookaheadConfig& lcfg);

struct TrainConfig {
    int iterations = 2000;        // K
    int formulas_per_iter = 100;  // N
    int samples_per_formula = 40; // M
    int steps_per_iter = 50;      // S
    int batch_size = 20;
    double clip_epsilon = 0.2;
    double kl_weight = 0.1;
    std::string kl_direction = "new_old"; // or "old_new"
    double learning_rate = 1e-4;
    int warmup_iters = 5;
    double max_grad_norm = 10.0;  // global-norm clip per step; 0 disables
    double sigma_w = 0.1;
    std::string solver = "cdcl";
    int64_t decision_budget = 0;
    uint64_t seed = 0;
    int dim = 64;
    int layers = 4;
    int val_interval = 10;        // 0 disables periodic validation
    int checkpoint_interval = 25;
    bool plain_sgd = false;
    int workers = 0;              // 0 -> default_worker_count()
    std::string train_dir;        // instance corpus (cmd_train)
    std::string val_dir;
    std::string out_dir;

    void validate() const;
};

// Group-relative advantages: (r - mean) / std with population std.
// A zero-spread group yields all-zero advantages. Throws when size < 2.
std::vector<double> advantages(const std::vector<double>& rewards);

struct PpoLoss {
    double objective = 0.0;             // mean over samples
    std::vector<double> grad_new_logprobs;
    double clip_fraction = 0.0;
};

// Clipped surrogate: mean_j min(r*A, clip(r, 1-eps, 1+eps)*A) with
// r = exp(new - old). Gradient flows only through unclipped samples.
PpoLoss ppo_loss(const std::vector<double>& new_logprobs,
                 const std::vector<double>& old_logprobs,
                 const std::vector<double>& advs, double eps);

struct IterationMetrics {
    int iteration = 0;
    double mean_cost = 0.0;
    double mean_abs_advantage = 0.0;
    double clip_fraction_first = 0.0; // first optimizer step
    double clip_fraction = 0.0;       // mean over steps
    double mean_kl = 0.0;             // final-step KL to the old policy
    double grad_norm = 0.0;           // final-step gradient norm
    int groups_skipped = 0;           // all-budget-exhausted rollout groups
    double rollout_seconds = 0.0;
    double train_seconds = 0.0;
    std::optional<double> val_cost;
};

struct TrainerState {
    NetParams params;
    AdamState opt;
    int iteration = 0; // completed GRPO iterations
};

class Trainer {
public:
    Trainer(TrainConfig cfg, std::vector<CnfFormula> corpus);

    // Runs one GRPO iteration over N formulas drawn from the corpus.
    IterationMetrics run_iteration();

    // Mean decisions over `instances` under mode guidance of current params.
    double validate(const std::vector<CnfFormula>& instances) const;

    TrainerState& state() { return state_; }
    const TrainerState& state() const { return state_; }
    const TrainConfig& config() const { return cfg_; }

    void restore(TrainerState state) { state_ = std::move(state); }

private:
    TrainConfig cfg_;
    std::vector<CnfFormula> corpus_;
    SolverKind kind_;
    TrainerState state_;
};

struct EvalRow {
    std::string name;
    SolveVerdict verdict = SolveVerdict::Unknown;
    int64_t decisions = 0;
    double solver_seconds = 0.0;
    double net_seconds = 0.0;
};

struct EvalSummary {
    std::vector<EvalRow> rows;
    double mean_decisions = 0.0;
    double mean_solver_seconds = 0.0;
    double mean_net_seconds = 0.0;
    // Table-style split by verdict class.
    double mean_decisions_sat = 0.0;
    double mean_decisions_unsat = 0.0;
    int count_sat = 0;
    int count_unsat = 0;
};

// Mode-guided evaluation; params == nullptr runs the unguided baseline.
EvalSummary evaluate_instances(const NetParams* params, double sigma,
                               SolverKind kind,
                               const std::vector<CnfFormula>& instances,
                               const std::vector<std::string>& names,
                               const SolverConfig& scfg,
                               const LookaheadConfig& lcfg, int workers);

struct WeightCorrelation {
    double pearson_r = 0.0;
    bool degenerate = false; // zero variance in either series
    std::vector<std::pair<double, double>> samples; // paired E[w(x)]
};

// Pairs expected weights of two policies over sampled variables from the
// given instances. Throws if sample_size exceeds the available variables.
WeightCorrelation weight_correlation(const NetParams& params_a,
                                     const NetParams& params_b, double sigma,
                                     const std::vector<CnfFormula>& instances,
                                     std::size_t sample_size, uint64_t seed);

double pearson(const std::vector<std::pair<double, double>>& pairs,
               bool* degenerate = nullptr);

} // namespace satguide

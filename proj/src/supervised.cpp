#include "satguide/supervised.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "satguide/fgraph.hpp"
#include "satguide/grpo.hpp"
#include "satguide/policy.hpp"
#include "satguide/pool.hpp"

namespace satguide {

namespace {

double stable_ce(double z, double t) {
    // softplus(z) - t*z
    return std::max(z, 0.0) - t * z + std::log1p(std::exp(-std::abs(z)));
}

} // namespace

void LabeledInstance::validate() const {
    if (labels.size() != (std::size_t)(2 * formula.num_vars())) {
        throw std::invalid_argument("label vector size mismatch");
    }
    for (int v = 1; v <= formula.num_vars(); ++v) {
        if (labels[2 * (v - 1)] && labels[2 * (v - 1) + 1]) {
            throw std::invalid_argument(
                "both polarities of a variable labeled backbone");
        }
    }
}

LabeledInstance label_instance(const CnfFormula& f,
                               const std::vector<Lit>& backbone_lits) {
    LabeledInstance li;
    li.formula = f;
    li.labels.assign((std::size_t)2 * f.num_vars(), 0);
    for (Lit l : backbone_lits) {
        int v = std::abs(l);
        if (v < 1 || v > f.num_vars()) {
            throw std::invalid_argument("backbone literal out of range");
        }
        li.labels[2 * (v - 1) + (l < 0 ? 1 : 0)] = 1;
    }
    li.validate();
    return li;
}

double supervised_loss(const NetParams& params,
                       const std::vector<LabeledInstance>& data) {
    double total = 0.0;
    std::size_t count = 0;
    for (const LabeledInstance& li : data) {
        NetOutput out = net_forward(params, build_graph(li.formula));
        int nl = 2 * li.formula.num_vars();
        for (int lv = 0; lv < nl; ++lv) {
            total += stable_ce(out.y[2 * lv], (double)li.labels[lv]);
        }
        count += nl;
    }
    return count ? total / (double)count : 0.0;
}

SupervisedResult train_supervised(const std::vector<LabeledInstance>& data,
                                  const SupervisedConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("empty supervised dataset");
    for (const LabeledInstance& li : data) li.validate();
    int workers = cfg.workers > 0 ? cfg.workers : default_worker_count();

    SupervisedResult res;
    res.params = NetParams::init(cfg.net, cfg.seed);
    std::size_t pc = res.params.theta.size();
    res.opt.m.assign(pc, 0.0);
    res.opt.v.assign(pc, 0.0);

    std::vector<FormulaGraph> graphs(data.size());
    std::size_t total_lits = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        graphs[i] = build_graph(data[i].formula);
        total_lits += (std::size_t)2 * data[i].formula.num_vars();
    }

    OptimizerConfig opt;
    opt.lr = cfg.learning_rate;
    opt.weight_decay = cfg.weight_decay;
    opt.plain_sgd = cfg.plain_sgd;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<std::vector<double>> inst_grads(data.size());
        std::vector<double> inst_losses(data.size(), 0.0);
        parallel_for(data.size(), workers, [&](std::size_t i) {
            const FormulaGraph& g = graphs[i];
            ForwardCache cache;
            NetOutput out = net_forward(res.params, g, &cache);
            int nl = 2 * data[i].formula.num_vars();
            std::vector<double> dy((std::size_t)2 * nl, 0.0);
            double loss = 0.0;
            for (int lv = 0; lv < nl; ++lv) {
                double z = out.y[2 * lv];
                double t = (double)data[i].labels[lv];
                loss += stable_ce(z, t);
                dy[2 * lv] = (sigmoid(z) - t) / (double)total_lits;
            }
            inst_losses[i] = loss;
            inst_grads[i] = net_backward(res.params, g, cache, dy);
        });
        std::vector<double> grad(pc, 0.0);
        double loss_sum = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            loss_sum += inst_losses[i];
            for (std::size_t p = 0; p < pc; ++p) grad[p] += inst_grads[i][p];
        }
        res.epoch_losses.push_back(loss_sum / (double)total_lits);
        optimizer_step(res.params.theta, grad, res.opt, opt);
    }
    return res;
}

std::vector<double> literal_probs(const NetParams& params,
                                  const CnfFormula& f) {
    NetOutput out = net_forward(params, build_graph(f));
    std::vector<double> probs((std::size_t)2 * f.num_vars());
    for (std::size_t lv = 0; lv < probs.size(); ++lv) {
        probs[lv] = sigmoid(out.y[2 * lv]);
    }
    return probs;
}

Parameterization guide_from_backbone(const std::vector<double>& probs,
                                     double alpha) {
    if (alpha < 0.0 || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be finite and >= 0");
    }
    if (probs.size() % 2 != 0) {
        throw std::invalid_argument("probs must have even size");
    }
    int n = (int)(probs.size() / 2);
    Parameterization p;
    p.weights.resize(n);
    p.polarities.resize(n);
    for (int v = 0; v < n; ++v) {
        double pos = probs[2 * v];
        double neg = probs[2 * v + 1];
        if (pos < 0.0 || pos > 1.0 || neg < 0.0 || neg > 1.0) {
            throw std::invalid_argument("probability out of [0,1]");
        }
        p.weights[v] = 1.0 + alpha * 0.5 * (pos + neg);
        p.polarities[v] = neg > pos ? 0 : 1;
    }
    return p;
}

double tune_alpha(const NetParams& params,
                  const std::vector<CnfFormula>& instances,
                  const std::string& solver, const std::vector<double>& grid,
                  const SolverConfig& scfg, int workers) {
    if (grid.empty()) throw std::invalid_argument("empty alpha grid");
    SolverKind kind = solver_kind_from_name(solver);
    LookaheadConfig lcfg;
    if (workers <= 0) workers = default_worker_count();

    std::vector<std::vector<double>> probs(instances.size());
    parallel_for(instances.size(), workers, [&](std::size_t i) {
        probs[i] = literal_probs(params, instances[i]);
    });

    double best_alpha = grid[0];
    double best_cost = std::numeric_limits<double>::infinity();
    for (double alpha : grid) {
        std::vector<double> costs(instances.size(), 0.0);
        parallel_for(instances.size(), workers, [&](std::size_t i) {
            Parameterization w = guide_from_backbone(probs[i], alpha);
            SolveReport rep = run_solver(kind, instances[i], w, scfg, lcfg);
            costs[i] = rep.budget_exhausted ? (double)scfg.decision_budget
                                            : (double)rep.decisions;
        });
        double mean = 0.0;
        for (double c : costs) mean += c;
        mean /= (double)instances.size();
        if (mean < best_cost) {
            best_cost = mean;
            best_alpha = alpha;
        }
    }
    return best_alpha;
}

void write_label_file(const std::vector<std::string>& paths,
                      const std::vector<std::vector<Lit>>& backbones,
                      const std::string& out_path) {
    if (paths.size() != backbones.size()) {
        throw std::invalid_argument("paths/backbones size mismatch");
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        nlohmann::json j;
        j["instance"] = paths[i];
        j["backbone"] = backbones[i];
        out << j.dump() << "\n";
    }
}

std::vector<LabelFileEntry> read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<LabelFileEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        LabelFileEntry e;
        e.instance = j.at("instance").get<std::string>();
        e.backbone = j.at("backbone").get<std::vector<Lit>>();
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace satguide

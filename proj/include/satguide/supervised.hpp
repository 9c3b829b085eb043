#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satguide/cnf.hpp"
#include "satguide/net.hpp"
#include "satguide/solver_types.hpp"

namespace satguide {

// A satisfiable formula with per-literal backbone membership labels.
// labels has size 2n laid out like the literal vertices of FormulaGraph:
// variable v's positive literal at 2(v-1), its negation at 2(v-1)+1.
struct LabeledInstance {
    CnfFormula formula;
    std::vector<uint8_t> labels;

    void validate() const; // sizes match; x and ~x never both 1
};

LabeledInstance label_instance(const CnfFormula& f,
                               const std::vector<Lit>& backbone_lits);

struct SupervisedConfig {
    NetConfig net;
    int epochs = 100;
    double learning_rate = 1e-3;
    double weight_decay = 0.1;
    bool plain_sgd = false;
    uint64_t seed = 0;
    int workers = 0;
};

struct SupervisedResult {
    NetParams params;
    AdamState opt;
    std::vector<double> epoch_losses; // mean cross-entropy per literal
};

// Full-batch gradient descent on mean per-literal cross-entropy; the
// per-literal logit is column 0 of the decoder output.
SupervisedResult train_supervised(const std::vector<LabeledInstance>& data,
                                  const SupervisedConfig& cfg);

// Mean cross-entropy of the current parameters over the dataset.
double supervised_loss(const NetParams& params,
                       const std::vector<LabeledInstance>& data);

// Predicted backbone probabilities per literal, size 2n.
std::vector<double> literal_probs(const NetParams& params,
                                  const CnfFormula& f);

// w(x) = 1 + alpha * (p(x) + p(~x)) / 2; polarity 0 iff p(~x) > p(x).
Parameterization guide_from_backbone(const std::vector<double>& probs,
                                     double alpha);

// Grid search: returns the grid value minimizing mean decisions of the
// backbone-guided solver over the instances. Ties keep the earlier entry.
double tune_alpha(const NetParams& params,
                  const std::vector<CnfFormula>& instances,
                  const std::string& solver, const std::vector<double>& grid,
                  const SolverConfig& scfg, int workers);

// Label file line format (JSONL): {"instance": path, "backbone": [lits]}.
void write_label_file(const std::vector<std::string>& paths,
                      const std::vector<std::vector<Lit>>& backbones,
                      const std::string& out_path);
struct LabelFileEntry {
    std::string instance;
    std::vector<Lit> backbone;
};
std::vector<LabelFileEntry> read_label_file(const std::string& path);

} // namespace satguide

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satguide/fgraph.hpp"

namespace satguide {

struct NetConfig {
    int dim = 64;    // embedding width d
    int layers = 4;  // message-passing depth L
};

// All MLPs are 2-layer with SiLU-activated hidden width 2d.
// Flat parameter layout (row-major [out x in] weight, then bias):
//   Enc:  1 -> 2d -> d
//   per layer t: U_Cls: 2d -> 2d -> d, then U_Lit: 3d -> 2d -> d
//   Dec:  2d -> 2d -> 2  (final layer zero-initialized)
struct NetParams {
    NetConfig cfg;
    std::vector<double> theta;

    static std::size_t param_count(const NetConfig& cfg);
    // Seeded uniform fan-in init; Dec's final weights and biases are zero
    // so the fresh network emits mu = rho = 0 everywhere.
    static NetParams init(const NetConfig& cfg, uint64_t seed);
};

// Activations cached by forward() for the matching backward().
struct ForwardCache {
    std::vector<std::vector<double>> h;          // (L+1) x (V*d)
    std::vector<std::vector<double>> cls_agg;    // L x (m*d) mean of literal embeds
    std::vector<std::vector<double>> cls_hidden; // L x (m*2d) pre-activations
    std::vector<std::vector<double>> lit_agg;    // L x (2n*d) mean of updated clause embeds
    std::vector<std::vector<double>> lit_hidden; // L x (2n*2d)
    std::vector<double> dec_hidden;              // 2n*2d
    std::vector<double> input;                   // V, log(deg+1)
    std::vector<double> enc_hidden;              // V*2d
    int num_vertices = 0;
};

// Per-literal outputs, row-major [2n x 2]: y(l) = Dec([h(l), h(~l)]).
// The policy reads variable x's (mu, rho) from the positive-literal row;
// the supervised baseline reads per-literal logits from column 0.
struct NetOutput {
    std::vector<double> y;
    int num_vars = 0;

    double mu(int var) const { return y[2 * (2 * (var - 1))]; }
    double rho(int var) const { return y[2 * (2 * (var - 1)) + 1]; }
};

NetOutput net_forward(const NetParams& params, const FormulaGraph& g,
                      ForwardCache* cache = nullptr);

// Exact reverse-mode gradient of <dy, y> w.r.t. theta. dy is row-major
// [2n x 2], matching NetOutput::y.
std::vector<double> net_backward(const NetParams& params, const FormulaGraph& g,
                                 const ForwardCache& cache,
                                 const std::vector<double>& dy);

struct OptimizerConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0; // decoupled
    bool plain_sgd = false;
};

struct AdamState {
    std::vector<double> m, v;
    int64_t step = 0;
};

// Descent step (pass the gradient of a loss to minimize). Throws on a
// non-finite gradient; params are left untouched in that case.
void optimizer_step(std::vector<double>& theta, const std::vector<double>& grad,
                    AdamState& state, const OptimizerConfig& opt);

// Versioned binary checkpoint: (d, L, theta, Adam moments, iteration).
struct Checkpoint {
    NetConfig cfg;
    std::vector<double> theta;
    AdamState opt;
    int64_t iteration = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace satguide

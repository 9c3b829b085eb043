#include "satguide/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "satguide/kernels.hpp"
#include "satguide/rng.hpp"

namespace satguide {

namespace {

using kernels::ops;
using kernels::silu;
using kernels::silu_grad_acc;

std::size_t linear_size(int out, int in) {
    return (std::size_t)out * in + out;
}

// Offsets of the four parameter groups within theta.
struct Layout {
    int d;
    std::size_t enc, dec;
    std::vector<std::size_t> cls, lit; // per layer
    std::size_t total;

    explicit Layout(const NetConfig& cfg) : d(cfg.dim) {
        std::size_t off = 0;
        enc = off;
        off += linear_size(2 * d, 1) + linear_size(d, 2 * d);
        cls.resize(cfg.layers);
        lit.resize(cfg.layers);
        for (int t = 0; t < cfg.layers; ++t) {
            cls[t] = off;
            off += linear_size(2 * d, 2 * d) + linear_size(d, 2 * d);
            lit[t] = off;
            off += linear_size(2 * d, 3 * d) + linear_size(d, 2 * d);
        }
        dec = off;
        off += linear_size(2 * d, 2 * d) + linear_size(2, 2 * d);
        total = off;
    }
};

// 2-layer MLP view over a flat array (params or grads).
template <typename T>
struct Mlp {
    T* w1;
    T* b1;
    T* w2;
    T* b2;
    int in, hidden, out;

    Mlp(T* base, std::size_t off, int in_, int hidden_, int out_)
        : in(in_), hidden(hidden_), out(out_) {
        w1 = base + off;
        b1 = w1 + (std::size_t)hidden * in;
        w2 = b1 + hidden;
        b2 = w2 + (std::size_t)out * hidden;
    }
};

// y += MLP(x); hidden_pre is cached for the backward pass.
void mlp_forward(const Mlp<const double>& m, const double* x, double* y,
                 double* hidden_pre, double* hidden_buf) {
    std::memcpy(hidden_pre, m.b1, sizeof(double) * m.hidden);
    ops().matvec_acc(m.w1, x, hidden_pre, m.hidden, m.in);
    silu(hidden_pre, hidden_buf, m.hidden);
    std::memcpy(y, m.b2, sizeof(double) * m.out);
    ops().matvec_acc(m.w2, hidden_buf, y, m.out, m.hidden);
}

// Accumulates parameter gradients and dx (+=) given dy.
void mlp_backward(const Mlp<const double>& m, const Mlp<double>& g,
                  const double* x, const double* hidden_pre, const double* dy,
                  double* dx, double* hidden_buf, double* dhidden_buf) {
    silu(hidden_pre, hidden_buf, m.hidden);
    ops().ger_acc(g.w2, dy, hidden_buf, m.out, m.hidden);
    for (int i = 0; i < m.out; ++i) g.b2[i] += dy[i];
    std::memset(dhidden_buf, 0, sizeof(double) * m.hidden);
    ops().matvec_t_acc(m.w2, dy, dhidden_buf, m.out, m.hidden);
    // reuse hidden_buf for d(hidden_pre)
    std::memset(hidden_buf, 0, sizeof(double) * m.hidden);
    silu_grad_acc(hidden_pre, dhidden_buf, hidden_buf, m.hidden);
    ops().ger_acc(g.w1, hidden_buf, x, m.hidden, m.in);
    for (int i = 0; i < m.hidden; ++i) g.b1[i] += hidden_buf[i];
    if (dx) ops().matvec_t_acc(m.w1, hidden_buf, dx, m.hidden, m.in);
}

} // namespace

std::size_t NetParams::param_count(const NetConfig& cfg) {
    return Layout(cfg).total;
}

NetParams NetParams::init(const NetConfig& cfg, uint64_t seed) {
    Layout lay(cfg);
    NetParams p;
    p.cfg = cfg;
    p.theta.assign(lay.total, 0.0);
    Rng rng(seed);
    auto fill_linear = [&](std::size_t off, int out, int in, bool zero) {
        double bound = 1.0 / std::sqrt((double)in);
        std::size_t count = linear_size(out, in);
        for (std::size_t i = 0; i < count; ++i) {
            p.theta[off + i] = zero ? 0.0 : (2.0 * rng.uniform() - 1.0) * bound;
        }
    };
    int d = cfg.dim;
    fill_linear(lay.enc, 2 * d, 1, false);
    fill_linear(lay.enc + linear_size(2 * d, 1), d, 2 * d, false);
    for (int t = 0; t < cfg.layers; ++t) {
        fill_linear(lay.cls[t], 2 * d, 2 * d, false);
        fill_linear(lay.cls[t] + linear_size(2 * d, 2 * d), d, 2 * d, false);
        fill_linear(lay.lit[t], 2 * d, 3 * d, false);
        fill_linear(lay.lit[t] + linear_size(2 * d, 3 * d), d, 2 * d, false);
    }
    fill_linear(lay.dec, 2 * d, 2 * d, false);
    fill_linear(lay.dec + linear_size(2 * d, 2 * d), 2, 2 * d, true);
    return p;
}

NetOutput net_forward(const NetParams& params, const FormulaGraph& g,
                      ForwardCache* cache) {
    const NetConfig& cfg = params.cfg;
    Layout lay(cfg);
    if (params.theta.size() != lay.total) {
        throw std::invalid_argument("parameter vector does not match (d, L)");
    }
    const int d = cfg.dim;
    const int L = cfg.layers;
    const int V = g.num_vertices();
    const int nl = 2 * g.num_vars;
    const int m = g.num_clauses;
    if (V == 0) throw std::invalid_argument("empty graph");

    ForwardCache local;
    ForwardCache& cc = cache ? *cache : local;
    cc.num_vertices = V;
    cc.h.assign(L + 1, {});
    cc.cls_agg.assign(L, std::vector<double>((std::size_t)m * d, 0.0));
    cc.cls_hidden.assign(L, std::vector<double>((std::size_t)m * 2 * d));
    cc.lit_agg.assign(L, std::vector<double>((std::size_t)nl * d, 0.0));
    cc.lit_hidden.assign(L, std::vector<double>((std::size_t)nl * 2 * d));

    const double* theta = params.theta.data();
    Mlp<const double> enc(theta, lay.enc, 1, 2 * d, d);
    Mlp<const double> dec(theta, lay.dec, 2 * d, 2 * d, 2);

    std::vector<double> hidden_buf(2 * d);

    // h0(v) = Enc(log(deg(v) + 1))
    cc.input.resize(V);
    cc.enc_hidden.assign((std::size_t)V * 2 * d, 0.0);
    cc.h[0].assign((std::size_t)V * d, 0.0);
    for (int v = 0; v < V; ++v) {
        cc.input[v] = std::log((double)g.degree[v] + 1.0);
        mlp_forward(enc, &cc.input[v], &cc.h[0][(std::size_t)v * d],
                    &cc.enc_hidden[(std::size_t)v * 2 * d], hidden_buf.data());
    }

    std::vector<double> cls_in(2 * d), lit_in(3 * d);
    for (int t = 0; t < L; ++t) {
        Mlp<const double> ucls(theta, lay.cls[t], 2 * d, 2 * d, d);
        Mlp<const double> ulit(theta, lay.lit[t], 3 * d, 2 * d, d);
        const auto& h = cc.h[t];
        auto& hn = cc.h[t + 1];
        hn.assign((std::size_t)V * d, 0.0);

        // Clause phase first; literals then read the updated clauses.
        for (int j = 0; j < m; ++j) {
            double* agg = &cc.cls_agg[t][(std::size_t)j * d];
            int begin = g.clause_offsets[j], end = g.clause_offsets[j + 1];
            for (int k = begin; k < end; ++k) {
                ops().axpy(1.0, &h[(std::size_t)g.clause_lits[k] * d], agg, d);
            }
            double inv = 1.0 / (double)(end - begin);
            for (int i = 0; i < d; ++i) agg[i] *= inv;
            int cv = g.clause_vertex(j);
            std::memcpy(cls_in.data(), &h[(std::size_t)cv * d],
                        sizeof(double) * d);
            std::memcpy(cls_in.data() + d, agg, sizeof(double) * d);
            mlp_forward(ucls, cls_in.data(), &hn[(std::size_t)cv * d],
                        &cc.cls_hidden[t][(std::size_t)j * 2 * d],
                        hidden_buf.data());
        }

        for (int lv = 0; lv < nl; ++lv) {
            double* agg = &cc.lit_agg[t][(std::size_t)lv * d];
            int begin = g.lit_offsets[lv], end = g.lit_offsets[lv + 1];
            for (int k = begin; k < end; ++k) {
                ops().axpy(1.0, &hn[(std::size_t)g.lit_clauses[k] * d], agg, d);
            }
            if (end > begin) {
                double inv = 1.0 / (double)(end - begin);
                for (int i = 0; i < d; ++i) agg[i] *= inv;
            }
            std::memcpy(lit_in.data(), &h[(std::size_t)lv * d],
                        sizeof(double) * d);
            std::memcpy(lit_in.data() + d,
                        &h[(std::size_t)FormulaGraph::opposite(lv) * d],
                        sizeof(double) * d);
            std::memcpy(lit_in.data() + 2 * d, agg, sizeof(double) * d);
            mlp_forward(ulit, lit_in.data(), &hn[(std::size_t)lv * d],
                        &cc.lit_hidden[t][(std::size_t)lv * 2 * d],
                        hidden_buf.data());
        }
    }

    NetOutput out;
    out.num_vars = g.num_vars;
    out.y.assign((std::size_t)nl * 2, 0.0);
    cc.dec_hidden.assign((std::size_t)nl * 2 * d, 0.0);
    std::vector<double> dec_in(2 * d);
    const auto& hL = cc.h[L];
    for (int lv = 0; lv < nl; ++lv) {
        std::memcpy(dec_in.data(), &hL[(std::size_t)lv * d], sizeof(double) * d);
        std::memcpy(dec_in.data() + d,
                    &hL[(std::size_t)FormulaGraph::opposite(lv) * d],
                    sizeof(double) * d);
        mlp_forward(dec, dec_in.data(), &out.y[(std::size_t)lv * 2],
                    &cc.dec_hidden[(std::size_t)lv * 2 * d], hidden_buf.data());
    }
    return out;
}

std::vector<double> net_backward(const NetParams& params, const FormulaGraph& g,
                                 const ForwardCache& cache,
                                 const std::vector<double>& dy) {
    const NetConfig& cfg = params.cfg;
    Layout lay(cfg);
    const int d = cfg.dim;
    const int L = cfg.layers;
    const int V = g.num_vertices();
    const int nl = 2 * g.num_vars;
    const int m = g.num_clauses;
    if (cache.num_vertices != V || (int)cache.h.size() != L + 1) {
        throw std::invalid_argument("stale forward cache");
    }
    if ((int)dy.size() != nl * 2) {
        throw std::invalid_argument("output gradient size mismatch");
    }

    std::vector<double> grad(lay.total, 0.0);
    const double* theta = params.theta.data();
    double* gtheta = grad.data();

    Mlp<const double> enc(theta, lay.enc, 1, 2 * d, d);
    Mlp<const double> dec(theta, lay.dec, 2 * d, 2 * d, 2);
    Mlp<double> genc(gtheta, lay.enc, 1, 2 * d, d);
    Mlp<double> gdec(gtheta, lay.dec, 2 * d, 2 * d, 2);

    std::vector<double> hidden_buf(2 * d), dhidden_buf(2 * d);
    std::vector<double> in_buf(3 * d), din_buf(3 * d);

    // dH accumulates gradient w.r.t. h^L, then walks the layers backwards.
    std::vector<double> dh((std::size_t)V * d, 0.0);
    const auto& hL = cache.h[L];
    for (int lv = 0; lv < nl; ++lv) {
        std::memcpy(in_buf.data(), &hL[(std::size_t)lv * d], sizeof(double) * d);
        std::memcpy(in_buf.data() + d,
                    &hL[(std::size_t)FormulaGraph::opposite(lv) * d],
                    sizeof(double) * d);
        std::memset(din_buf.data(), 0, sizeof(double) * 2 * d);
        mlp_backward(dec, gdec, in_buf.data(),
                     &cache.dec_hidden[(std::size_t)lv * 2 * d],
                     &dy[(std::size_t)lv * 2], din_buf.data(), hidden_buf.data(),
                     dhidden_buf.data());
        ops().axpy(1.0, din_buf.data(), &dh[(std::size_t)lv * d], d);
        ops().axpy(1.0, din_buf.data() + d,
                   &dh[(std::size_t)FormulaGraph::opposite(lv) * d], d);
    }

    std::vector<double> dh_prev((std::size_t)V * d);
    for (int t = L - 1; t >= 0; --t) {
        Mlp<const double> ucls(theta, lay.cls[t], 2 * d, 2 * d, d);
        Mlp<const double> ulit(theta, lay.lit[t], 3 * d, 2 * d, d);
        Mlp<double> gucls(gtheta, lay.cls[t], 2 * d, 2 * d, d);
        Mlp<double> gulit(gtheta, lay.lit[t], 3 * d, 2 * d, d);
        const auto& h = cache.h[t];
        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);

        // Literal phase backward; adds gradient onto the updated clause
        // embeddings (their slots in dh) before the clause phase runs.
        for (int lv = 0; lv < nl; ++lv) {
            const double* dout = &dh[(std::size_t)lv * d];
            std::memcpy(in_buf.data(), &h[(std::size_t)lv * d],
                        sizeof(double) * d);
            std::memcpy(in_buf.data() + d,
                        &h[(std::size_t)FormulaGraph::opposite(lv) * d],
                        sizeof(double) * d);
            std::memcpy(in_buf.data() + 2 * d,
                        &cache.lit_agg[t][(std::size_t)lv * d],
                        sizeof(double) * d);
            std::memset(din_buf.data(), 0, sizeof(double) * 3 * d);
            mlp_backward(ulit, gulit, in_buf.data(),
                         &cache.lit_hidden[t][(std::size_t)lv * 2 * d], dout,
                         din_buf.data(), hidden_buf.data(), dhidden_buf.data());
            ops().axpy(1.0, din_buf.data(), &dh_prev[(std::size_t)lv * d], d);
            ops().axpy(1.0, din_buf.data() + d,
                       &dh_prev[(std::size_t)FormulaGraph::opposite(lv) * d], d);
            int begin = g.lit_offsets[lv], end = g.lit_offsets[lv + 1];
            if (end > begin) {
                double inv = 1.0 / (double)(end - begin);
                for (int k = begin; k < end; ++k) {
                    ops().axpy(inv, din_buf.data() + 2 * d,
                               &dh[(std::size_t)g.lit_clauses[k] * d], d);
                }
            }
        }

        for (int j = 0; j < m; ++j) {
            int cv = g.clause_vertex(j);
            const double* dout = &dh[(std::size_t)cv * d];
            std::memcpy(in_buf.data(), &h[(std::size_t)cv * d],
                        sizeof(double) * d);
            std::memcpy(in_buf.data() + d, &cache.cls_agg[t][(std::size_t)j * d],
                        sizeof(double) * d);
            std::memset(din_buf.data(), 0, sizeof(double) * 2 * d);
            mlp_backward(ucls, gucls, in_buf.data(),
                         &cache.cls_hidden[t][(std::size_t)j * 2 * d], dout,
                         din_buf.data(), hidden_buf.data(), dhidden_buf.data());
            ops().axpy(1.0, din_buf.data(), &dh_prev[(std::size_t)cv * d], d);
            int begin = g.clause_offsets[j], end = g.clause_offsets[j + 1];
            double inv = 1.0 / (double)(end - begin);
            for (int k = begin; k < end; ++k) {
                ops().axpy(inv, din_buf.data() + d,
                           &dh_prev[(std::size_t)g.clause_lits[k] * d], d);
            }
        }
        std::swap(dh, dh_prev);
    }

    for (int v = 0; v < V; ++v) {
        mlp_backward(enc, genc, &cache.input[v],
                     &cache.enc_hidden[(std::size_t)v * 2 * d],
                     &dh[(std::size_t)v * d], nullptr, hidden_buf.data(),
                     dhidden_buf.data());
    }
    return grad;
}

void optimizer_step(std::vector<double>& theta, const std::vector<double>& grad,
                    AdamState& state, const OptimizerConfig& opt) {
    if (grad.size() != theta.size()) {
        throw std::invalid_argument("gradient size mismatch");
    }
    for (double gi : grad) {
        if (!std::isfinite(gi)) {
            throw std::runtime_error("non-finite gradient; step rejected");
        }
    }
    if (opt.plain_sgd) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            theta[i] -= opt.lr * (grad[i] + opt.weight_decay * theta[i]);
        }
        ++state.step;
        return;
    }
    if (state.m.size() != theta.size()) {
        state.m.assign(theta.size(), 0.0);
        state.v.assign(theta.size(), 0.0);
        state.step = 0;
    }
    ++state.step;
    double bc1 = 1.0 - std::pow(opt.beta1, (double)state.step);
    double bc2 = 1.0 - std::pow(opt.beta2, (double)state.step);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = opt.beta1 * state.m[i] + (1.0 - opt.beta1) * grad[i];
        state.v[i] = opt.beta2 * state.v[i] + (1.0 - opt.beta2) * grad[i] * grad[i];
        double mhat = state.m[i] / bc1;
        double vhat = state.v[i] / bc2;
        theta[i] -= opt.lr * (mhat / (std::sqrt(vhat) + opt.eps) +
                              opt.weight_decay * theta[i]);
    }
}

namespace {
constexpr char kMagic[8] = {'S', 'G', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}
void write_vec(std::ostream& out, const std::vector<double>& v) {
    uint64_t n = v.size();
    write_pod(out, n);
    out.write(reinterpret_cast<const char*>(v.data()),
              (std::streamsize)(n * sizeof(double)));
}
std::vector<double> read_vec(std::istream& in) {
    uint64_t n = 0;
    read_pod(in, n);
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()),
            (std::streamsize)(n * sizeof(double)));
    return v;
}
} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, (int32_t)ckpt.cfg.dim);
    write_pod(out, (int32_t)ckpt.cfg.layers);
    write_vec(out, ckpt.theta);
    write_vec(out, ckpt.opt.m);
    write_vec(out, ckpt.opt.v);
    write_pod(out, (int64_t)ckpt.opt.step);
    write_pod(out, (int64_t)ckpt.iteration);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not a checkpoint file: " + path);
    }
    Checkpoint ckpt;
    int32_t d = 0, l = 0;
    read_pod(in, d);
    read_pod(in, l);
    ckpt.cfg.dim = d;
    ckpt.cfg.layers = l;
    ckpt.theta = read_vec(in);
    ckpt.opt.m = read_vec(in);
    ckpt.opt.v = read_vec(in);
    int64_t step = 0;
    read_pod(in, step);
    ckpt.opt.step = step;
    read_pod(in, ckpt.iteration);
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    if (ckpt.theta.size() != NetParams::param_count(ckpt.cfg)) {
        throw std::runtime_error("checkpoint parameter count mismatch");
    }
    return ckpt;
}

} // namespace satguide

#include "satguide/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "satguide/rng.hpp"

namespace satguide {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178; // 0.5 * ln(2*pi)
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

void PolicyDist::validate() const {
    if (mu.size() != rho.size()) {
        throw std::invalid_argument("mu/rho size mismatch");
    }
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    for (double v : mu) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite mu");
    }
    for (double v : rho) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite rho");
    }
}

PolicyDist policy_from_net(const NetOutput& out, double sigma) {
    PolicyDist d;
    d.sigma = sigma;
    d.mu.resize(out.num_vars);
    d.rho.resize(out.num_vars);
    for (int v = 1; v <= out.num_vars; ++v) {
        d.mu[v - 1] = out.mu(v);
        d.rho[v - 1] = out.rho(v);
    }
    return d;
}

Parameterization policy_sample(const PolicyDist& dist, uint64_t seed) {
    dist.validate();
    Rng rng(seed);
    int n = dist.num_vars();
    Parameterization p;
    p.weights.resize(n);
    p.polarities.resize(n);
    for (int i = 0; i < n; ++i) {
        p.weights[i] = std::exp(dist.mu[i] + dist.sigma * rng.normal());
        p.polarities[i] = rng.bernoulli(sigmoid(dist.rho[i])) ? 1 : 0;
    }
    return p;
}

Parameterization policy_mode(const PolicyDist& dist) {
    dist.validate();
    int n = dist.num_vars();
    Parameterization p;
    p.weights.resize(n);
    p.polarities.resize(n);
    for (int i = 0; i < n; ++i) {
        p.weights[i] = std::exp(dist.mu[i] - dist.sigma * dist.sigma);
        p.polarities[i] = dist.rho[i] >= 0.0 ? 1 : 0;
    }
    return p;
}

std::vector<double> policy_expected_weights(const PolicyDist& dist) {
    std::vector<double> e(dist.num_vars());
    for (int i = 0; i < dist.num_vars(); ++i) {
        e[i] = std::exp(dist.mu[i] + 0.5 * dist.sigma * dist.sigma);
    }
    return e;
}

double policy_log_prob(const PolicyDist& dist, const Parameterization& params) {
    dist.validate();
    params.validate(dist.num_vars());
    double total = 0.0;
    double log_sigma = std::log(dist.sigma);
    for (int i = 0; i < dist.num_vars(); ++i) {
        double lw = std::log(params.weights[i]);
        double z = lw - dist.mu[i];
        total += -lw - log_sigma - kLogSqrt2Pi -
                 z * z / (2.0 * dist.sigma * dist.sigma);
        double s = sigmoid(dist.rho[i]);
        total += params.polarities[i] ? std::log(s) : std::log(1.0 - s);
    }
    return total;
}

PolicyGrad policy_log_prob_grad(const PolicyDist& dist,
                                const Parameterization& params) {
    dist.validate();
    params.validate(dist.num_vars());
    PolicyGrad g;
    int n = dist.num_vars();
    g.dmu.resize(n);
    g.drho.resize(n);
    double inv_var = 1.0 / (dist.sigma * dist.sigma);
    for (int i = 0; i < n; ++i) {
        g.dmu[i] = (std::log(params.weights[i]) - dist.mu[i]) * inv_var;
        g.drho[i] = (double)params.polarities[i] - sigmoid(dist.rho[i]);
    }
    return g;
}

double policy_kl(const PolicyDist& dist_new, const PolicyDist& dist_old) {
    dist_new.validate();
    dist_old.validate();
    if (dist_new.num_vars() != dist_old.num_vars() ||
        dist_new.sigma != dist_old.sigma) {
        throw std::invalid_argument("mismatched policy distributions");
    }
    double kl = 0.0;
    double inv_var = 1.0 / (dist_new.sigma * dist_new.sigma);
    for (int i = 0; i < dist_new.num_vars(); ++i) {
        double dm = dist_new.mu[i] - dist_old.mu[i];
        kl += 0.5 * dm * dm * inv_var;
        double pn = sigmoid(dist_new.rho[i]);
        // Bernoulli KL in logit form, stable at saturation:
        // pn*(rho_n - rho_o) - softplus(rho_n) + softplus(rho_o).
        auto softplus = [](double x) {
            return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
        };
        kl += pn * (dist_new.rho[i] - dist_old.rho[i]) -
              softplus(dist_new.rho[i]) + softplus(dist_old.rho[i]);
    }
    return kl;
}

PolicyGrad policy_kl_grad(const PolicyDist& dist_new,
                          const PolicyDist& dist_old) {
    if (dist_new.num_vars() != dist_old.num_vars() ||
        dist_new.sigma != dist_old.sigma) {
        throw std::invalid_argument("mismatched policy distributions");
    }
    PolicyGrad g;
    int n = dist_new.num_vars();
    g.dmu.resize(n);
    g.drho.resize(n);
    double inv_var = 1.0 / (dist_new.sigma * dist_new.sigma);
    for (int i = 0; i < n; ++i) {
        g.dmu[i] = (dist_new.mu[i] - dist_old.mu[i]) * inv_var;
        double pn = sigmoid(dist_new.rho[i]);
        g.drho[i] = pn * (1.0 - pn) * (dist_new.rho[i] - dist_old.rho[i]);
    }
    return g;
}

PolicyGrad policy_kl_grad_second(const PolicyDist& dist_a,
                                 const PolicyDist& dist_b) {
    if (dist_a.num_vars() != dist_b.num_vars() ||
        dist_a.sigma != dist_b.sigma) {
        throw std::invalid_argument("mismatched policy distributions");
    }
    PolicyGrad g;
    int n = dist_a.num_vars();
    g.dmu.resize(n);
    g.drho.resize(n);
    double inv_var = 1.0 / (dist_a.sigma * dist_a.sigma);
    for (int i = 0; i < n; ++i) {
        g.dmu[i] = (dist_b.mu[i] - dist_a.mu[i]) * inv_var;
        g.drho[i] = sigmoid(dist_b.rho[i]) - sigmoid(dist_a.rho[i]);
    }
    return g;
}

} // namespace satguide

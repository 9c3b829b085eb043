#pragma once

#include <cstdint>
#include <vector>

#include "satguide/net.hpp"
#include "satguide/solver_types.hpp"

namespace satguide {

// Factored per-variable guidance policy: weight ~ LogNormal(mu(x), sigma),
// polarity ~ Bernoulli(sigmoid(rho(x))). sigma is a shared hyperparameter.
struct PolicyDist {
    std::vector<double> mu;
    std::vector<double> rho;
    double sigma = 0.1;

    int num_vars() const { return (int)mu.size(); }
    void validate() const;
};

double sigmoid(double x);

// Reads the per-variable head out of the network output.
PolicyDist policy_from_net(const NetOutput& out, double sigma);

Parameterization policy_sample(const PolicyDist& dist, uint64_t seed);

// Most probable parameterization: w(x) = exp(mu - sigma^2); p(x) = 1 iff
// rho >= 0 (tie at exactly 0 resolves to 1).
Parameterization policy_mode(const PolicyDist& dist);

// E[w(x)] = exp(mu + sigma^2 / 2), per variable.
std::vector<double> policy_expected_weights(const PolicyDist& dist);

double policy_log_prob(const PolicyDist& dist, const Parameterization& params);

// Gradient of log_prob w.r.t. (mu, rho), laid out as the per-literal dy of
// net_backward: only positive-literal rows are populated.
struct PolicyGrad {
    std::vector<double> dmu;
    std::vector<double> drho;
};
PolicyGrad policy_log_prob_grad(const PolicyDist& dist,
                                const Parameterization& params);

// KL(dist_new || dist_old); both must share sigma and variable count.
double policy_kl(const PolicyDist& dist_new, const PolicyDist& dist_old);

// d KL(new || old) / d (mu_new, rho_new).
PolicyGrad policy_kl_grad(const PolicyDist& dist_new, const PolicyDist& dist_old);

// d KL(a || b) / d (mu_b, rho_b), for the reverse penalty direction where
// the optimized policy sits in the second slot.
PolicyGrad policy_kl_grad_second(const PolicyDist& dist_a,
                                 const PolicyDist& dist_b);

} // namespace satguide

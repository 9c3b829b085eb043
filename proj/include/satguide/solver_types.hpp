#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satguide/cnf.hpp"

namespace satguide {

// Per-variable weight and polarity, the solver guidance input.
// weights[v-1] and polarities[v-1] belong to variable v.
struct Parameterization {
    std::vector<double> weights;
    std::vector<uint8_t> polarities;

    // The default polarity matches the mode of a zero-logit Bernoulli
    // policy, so unguided runs and zero-init guidance coincide exactly.
    static Parameterization uniform(int num_vars, double w = 1.0,
                                    bool polarity = true) {
        Parameterization p;
        p.weights.assign(num_vars, w);
        p.polarities.assign(num_vars, polarity ? 1 : 0);
        return p;
    }

    // Throws std::invalid_argument on size mismatch or non-positive /
    // non-finite weight.
    void validate(int num_vars) const;
};

enum class SolveVerdict { Sat, Unsat, Unknown };

struct SolveReport {
    SolveVerdict verdict = SolveVerdict::Unknown;
    int64_t decisions = 0;
    int64_t conflicts = 0;
    int64_t propagations = 0;
    bool budget_exhausted = false;
    std::optional<Assignment> model; // present iff verdict == Sat
    double elapsed_seconds = 0.0;
};

struct SolverConfig {
    double activity_decay = 0.95;        // beta in (0,1)
    double bump_increment = 1.0;         // initial Delta
    double rescale_threshold = 1e100;
    int64_t restart_interval = 1024;     // Luby unit, in conflicts
    int64_t decision_budget = 0;         // 0 = unlimited
    uint64_t seed = 0;                   // reserved; no randomized decisions

    void validate() const;
};

std::string verdict_name(SolveVerdict v);

// Plain-text parameterization file: one line per variable
// "<var> <weight> <polarity>".
void write_params_file(const Parameterization& p, const std::string& path);
Parameterization read_params_file(const std::string& path, int num_vars);

// JSON object with verdict, decisions, conflicts, propagations, elapsed.
std::string report_to_json(const SolveReport& r);

} // namespace satguide

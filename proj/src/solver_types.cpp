#include "satguide/solver_types.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace satguide {

void Parameterization::validate(int num_vars) const {
    if ((int)weights.size() != num_vars || (int)polarities.size() != num_vars) {
        throw std::invalid_argument("parameterization sized for " +
                                    std::to_string(weights.size()) +
                                    " variables, formula has " +
                                    std::to_string(num_vars));
    }
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("weights must be finite and positive");
        }
    }
}

void SolverConfig::validate() const {
    if (!(activity_decay > 0.0 && activity_decay < 1.0)) {
        throw std::invalid_argument("activity_decay must be in (0,1)");
    }
    if (!(bump_increment > 0.0)) {
        throw std::invalid_argument("bump_increment must be positive");
    }
    if (!(rescale_threshold > 1.0)) {
        throw std::invalid_argument("rescale_threshold must exceed 1");
    }
}

std::string verdict_name(SolveVerdict v) {
    switch (v) {
        case SolveVerdict::Sat: return "SAT";
        case SolveVerdict::Unsat: return "UNSAT";
        default: return "UNKNOWN";
    }
}

void write_params_file(const Parameterization& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.precision(17);
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        out << (i + 1) << ' ' << p.weights[i] << ' ' << (int)p.polarities[i]
            << '\n';
    }
}

Parameterization read_params_file(const std::string& path, int num_vars) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Parameterization p = Parameterization::uniform(num_vars);
    int var, pol;
    double w;
    while (in >> var >> w >> pol) {
        if (var < 1 || var > num_vars) {
            throw std::runtime_error("params file references variable " +
                                     std::to_string(var));
        }
        if (pol != 0 && pol != 1) {
            throw std::runtime_error("polarity must be 0 or 1");
        }
        p.weights[var - 1] = w;
        p.polarities[var - 1] = (uint8_t)pol;
    }
    if (!in.eof()) throw std::runtime_error("malformed params file " + path);
    p.validate(num_vars);
    return p;
}

std::string report_to_json(const SolveReport& r) {
    nlohmann::json j;
    j["verdict"] = verdict_name(r.verdict);
    j["decisions"] = r.decisions;
    j["conflicts"] = r.conflicts;
    j["propagations"] = r.propagations;
    j["budget_exhausted"] = r.budget_exhausted;
    j["elapsed"] = r.elapsed_seconds;
    return j.dump();
}

} // namespace satguide

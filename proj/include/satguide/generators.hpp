#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "satguide/cnf.hpp"
#include "satguide/solver_types.hpp"

namespace satguide {

enum class Family { Random3Sat, ThreeCol };

struct GenSpec {
    Family family = Family::Random3Sat;
    int size_n = 0;
    uint64_t seed = 0;
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// Number of clauses at the 3SAT phase transition: floor of
// 4.258 n + 58.26 n^(-2/3).
int sat3_num_clauses(int n);

// Random 3SAT at the critical density: each clause picks 3 distinct
// variables uniformly, each negated with probability 1/2. n >= 3.
CnfFormula gen_3sat(int n, uint64_t seed);

// Erdos-Renyi edge list over vertices 0..n-1 with edge probability
// 4.67/(n-1).
std::vector<std::pair<int, int>> gen_er_graph(int n, uint64_t seed);

// 3-colorability encoding over 3n variables x_{v,c} = 3v + c + 1:
// per vertex one at-least-one clause and three at-most-one clauses, per
// edge and color one conflict clause. n >= 4.
CnfFormula encode_3col(int n, const std::vector<std::pair<int, int>>& edges);
CnfFormula gen_3col(int n, uint64_t seed);

CnfFormula generate(const GenSpec& spec);

// Canonical file name "<family>_n<k>_seed<s>.cnf".
std::string instance_filename(const GenSpec& spec);

// Backbone of a satisfiable formula: literals true in every satisfying
// assignment. One solver call per candidate literal of the first model.
// `solve` must be complete. Throws std::invalid_argument if f is UNSAT.
using CompleteSolver = std::function<SolveReport(const CnfFormula&)>;
std::vector<Lit> backbone(const CnfFormula& f, const CompleteSolver& solve);

// Exhaustive reference for small n: enumerates all 2^n assignments.
// Returns empty optional when unsatisfiable.
std::vector<Lit> backbone_brute_force(const CnfFormula& f);
bool satisfiable_brute_force(const CnfFormula& f);

} // namespace satguide

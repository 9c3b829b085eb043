#include "satguide/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "satguide/rng.hpp"

namespace satguide {

const char* family_name(Family f) {
    return f == Family::Random3Sat ? "random3sat" : "threecol";
}

Family family_from_name(const std::string& name) {
    if (name == "random3sat" || name == "3sat") return Family::Random3Sat;
    if (name == "threecol" || name == "3col") return Family::ThreeCol;
    throw std::invalid_argument("unknown family: " + name);
}

int sat3_num_clauses(int n) {
    return (int)std::floor(4.258 * n + 58.26 * std::pow((double)n, -2.0 / 3.0));
}

CnfFormula gen_3sat(int n, uint64_t seed) {
    if (n < 3) throw std::invalid_argument("gen_3sat requires n >= 3");
    Rng rng(seed);
    int m = sat3_num_clauses(n);
    std::vector<std::vector<Lit>> clauses;
    clauses.reserve(m);
    for (int j = 0; j < m; ++j) {
        int v[3];
        v[0] = (int)rng.uniform_int(n);
        do {
            v[1] = (int)rng.uniform_int(n);
        } while (v[1] == v[0]);
        do {
            v[2] = (int)rng.uniform_int(n);
        } while (v[2] == v[0] || v[2] == v[1]);
        std::vector<Lit> clause(3);
        for (int k = 0; k < 3; ++k) {
            clause[k] = rng.bernoulli(0.5) ? -(v[k] + 1) : (v[k] + 1);
        }
        clauses.push_back(std::move(clause));
    }
    return CnfFormula(n, std::move(clauses));
}

std::vector<std::pair<int, int>> gen_er_graph(int n, uint64_t seed) {
    Rng rng(seed);
    double p = 4.67 / (double)(n - 1);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.bernoulli(p)) edges.emplace_back(u, v);
        }
    }
    return edges;
}

CnfFormula encode_3col(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 4) throw std::invalid_argument("encode_3col requires n >= 4");
    auto var = [](int v, int c) { return (Lit)(3 * v + c + 1); };
    std::vector<std::vector<Lit>> clauses;
    for (int v = 0; v < n; ++v) {
        clauses.push_back({var(v, 0), var(v, 1), var(v, 2)});
        for (int c1 = 0; c1 < 3; ++c1) {
            for (int c2 = c1 + 1; c2 < 3; ++c2) {
                clauses.push_back({-var(v, c1), -var(v, c2)});
            }
        }
    }
    for (auto [u, v] : edges) {
        for (int c = 0; c < 3; ++c) {
            clauses.push_back({-var(u, c), -var(v, c)});
        }
    }
    return CnfFormula(3 * n, std::move(clauses));
}

CnfFormula gen_3col(int n, uint64_t seed) {
    if (n < 4) throw std::invalid_argument("gen_3col requires n >= 4");
    return encode_3col(n, gen_er_graph(n, seed));
}

CnfFormula generate(const GenSpec& spec) {
    return spec.family == Family::Random3Sat ? gen_3sat(spec.size_n, spec.seed)
                                             : gen_3col(spec.size_n, spec.seed);
}

std::string instance_filename(const GenSpec& spec) {
    return std::string(family_name(spec.family)) + "_n" +
           std::to_string(spec.size_n) + "_seed" + std::to_string(spec.seed) +
           ".cnf";
}

std::vector<Lit> backbone(const CnfFormula& f, const CompleteSolver& solve) {
    SolveReport base = solve(f);
    if (base.verdict != SolveVerdict::Sat) {
        throw std::invalid_argument("backbone undefined: formula is not SAT");
    }
    // Only literals of the first model can be backbone members.
    std::vector<Lit> result;
    for (int v = 1; v <= f.num_vars(); ++v) {
        Lit l = base.model->value(v) ? v : -v;
        auto clauses = f.clauses();
        clauses.push_back({-l});
        CnfFormula probe(f.num_vars(), std::move(clauses));
        if (solve(probe).verdict == SolveVerdict::Unsat) result.push_back(l);
    }
    return result;
}

namespace {

struct ClauseMasks {
    std::vector<uint64_t> pos, neg;
};

// bit v-1 of an assignment word holds variable v
ClauseMasks clause_masks(const CnfFormula& f) {
    if (f.num_vars() > 30) {
        throw std::invalid_argument("brute force limited to 30 variables");
    }
    ClauseMasks m;
    m.pos.resize(f.num_clauses(), 0);
    m.neg.resize(f.num_clauses(), 0);
    for (int i = 0; i < f.num_clauses(); ++i) {
        for (Lit l : f.clause(i)) {
            uint64_t bit = 1ULL << (var_of(l) - 1);
            (l > 0 ? m.pos[i] : m.neg[i]) |= bit;
        }
    }
    return m;
}

bool satisfies(const ClauseMasks& m, uint64_t bits) {
    for (std::size_t i = 0; i < m.pos.size(); ++i) {
        if ((m.pos[i] & bits) == 0 && (m.neg[i] & ~bits) == 0) return false;
    }
    return true;
}

} // namespace

bool satisfiable_brute_force(const CnfFormula& f) {
    ClauseMasks m = clause_masks(f);
    for (uint64_t bits = 0; bits < (1ULL << f.num_vars()); ++bits) {
        if (satisfies(m, bits)) return true;
    }
    return false;
}

std::vector<Lit> backbone_brute_force(const CnfFormula& f) {
    int n = f.num_vars();
    ClauseMasks m = clause_masks(f);
    // intersect satisfying assignments bitwise
    uint64_t always_pos = (n == 64) ? ~0ULL : ((1ULL << n) - 1);
    uint64_t always_neg = always_pos;
    bool any = false;
    for (uint64_t bits = 0; bits < (1ULL << n); ++bits) {
        if (!satisfies(m, bits)) continue;
        any = true;
        always_pos &= bits;
        always_neg &= ~bits;
        if (always_pos == 0 && always_neg == 0) break;
    }
    if (!any) throw std::invalid_argument("backbone undefined: formula is not SAT");
    std::vector<Lit> result;
    for (int v = 1; v <= n; ++v) {
        if ((always_pos >> (v - 1)) & 1) result.push_back(v);
        else if ((always_neg >> (v - 1)) & 1) result.push_back(-v);
    }
    return result;
}

} // namespace satguide

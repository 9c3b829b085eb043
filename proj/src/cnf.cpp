#include "satguide/cnf.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace satguide {

namespace {

// Drops duplicate literals, preserving first-occurrence order.
void normalize_clause(std::vector<Lit>& clause) {
    std::vector<Lit> seen;
    std::size_t out = 0;
    for (Lit l : clause) {
        if (std::find(seen.begin(), seen.end(), l) == seen.end()) {
            seen.push_back(l);
            clause[out++] = l;
        }
    }
    clause.resize(out);
}

} // namespace

CnfFormula::CnfFormula(int num_vars, std::vector<std::vector<Lit>> clauses)
    : num_vars_(num_vars), clauses_(std::move(clauses)) {
    if (num_vars < 0) throw std::invalid_argument("negative variable count");
    for (auto& c : clauses_) {
        if (c.empty()) throw std::invalid_argument("empty clause");
        for (Lit l : c) {
            if (l == 0 || var_of(l) > num_vars_) {
                throw std::invalid_argument("literal out of range: " +
                                            std::to_string(l));
            }
        }
        normalize_clause(c);
    }
}

Verdict evaluate(const CnfFormula& f, const Assignment& a) {
    if (a.max_var() > f.num_vars()) {
        for (int v = f.num_vars() + 1; v <= a.max_var(); ++v) {
            if (a.assigned(v)) {
                throw std::invalid_argument("assignment references variable " +
                                            std::to_string(v) + " > n");
            }
        }
    }
    bool all_satisfied = true;
    for (const auto& c : f.clauses()) {
        bool clause_true = false;
        bool clause_decided = true;
        for (Lit l : c) {
            int v = var_of(l);
            if (!a.assigned(v)) {
                clause_decided = false;
            } else if (a.value(v) == (l > 0)) {
                clause_true = true;
                break;
            }
        }
        if (clause_true) continue;
        if (clause_decided) return Verdict::Falsified;
        all_satisfied = false;
    }
    return all_satisfied ? Verdict::Satisfied : Verdict::Undetermined;
}

CnfFormula parse_dimacs(std::istream& in) {
    int num_vars = -1;
    int num_clauses = -1;
    std::vector<std::vector<Lit>> clauses;
    std::vector<Lit> current;
    int line_no = 0;
    bool clause_open = false;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == 'c') continue;
        // Legacy random-3SAT footer: a line "%" followed by "0".
        if (line[0] == '%') break;
        if (line[0] == 'p') {
            if (num_vars >= 0) throw ParseError("duplicate header", line_no);
            std::istringstream hs(line);
            std::string p, fmt;
            if (!(hs >> p >> fmt >> num_vars >> num_clauses) || fmt != "cnf" ||
                num_vars < 0 || num_clauses < 0) {
                throw ParseError("malformed header", line_no);
            }
            continue;
        }
        if (num_vars < 0) throw ParseError("literal before header", line_no);
        std::istringstream ls(line);
        long long tok;
        while (ls >> tok) {
            if (tok == 0) {
                if (current.empty()) {
                    // A stray trailing "0" after all m clauses is the other
                    // half of the legacy footer; anything earlier is an
                    // empty clause.
                    if ((int)clauses.size() == num_clauses) continue;
                    throw ParseError("empty clause (zero before any literal)",
                                     line_no);
                }
                clauses.push_back(std::move(current));
                current.clear();
                clause_open = false;
            } else {
                if (tok < -num_vars || tok > num_vars) {
                    throw ParseError("literal out of range: " +
                                     std::to_string(tok), line_no);
                }
                current.push_back((Lit)tok);
                clause_open = true;
            }
        }
        if (!ls.eof()) throw ParseError("unexpected token", line_no);
    }
    if (num_vars < 0) throw ParseError("missing header", line_no);
    if (clause_open) throw ParseError("unterminated clause", line_no);
    if ((int)clauses.size() != num_clauses) {
        throw ParseError("clause count mismatch: header says " +
                         std::to_string(num_clauses) + ", found " +
                         std::to_string(clauses.size()), line_no);
    }
    return CnfFormula(num_vars, std::move(clauses));
}

CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

CnfFormula parse_dimacs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_dimacs(in);
}

void write_dimacs(const CnfFormula& f, std::ostream& out) {
    out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
    for (const auto& c : f.clauses()) {
        for (Lit l : c) out << l << ' ';
        out << "0\n";
    }
}

std::string write_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    write_dimacs(f, out);
    return out.str();
}

void write_dimacs_file(const CnfFormula& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_dimacs(f, out);
}

} // namespace satguide

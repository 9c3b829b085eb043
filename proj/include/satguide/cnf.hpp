#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace satguide {

// Literal encoding follows DIMACS: variable v in 1..n, literal +v / -v.
using Lit = int32_t;

inline int32_t var_of(Lit l) { return l > 0 ? l : -l; }

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg),
          line_number(line) {}
    int line_number;
};

// Immutable after construction; safe to share across threads by reference.
class CnfFormula {
public:
    CnfFormula() = default;
    // Normalizes each clause by dropping duplicate literals. Tautological
    // clauses (x and -x) are kept. Throws std::invalid_argument on an empty
    // clause or an out-of-range literal.
    CnfFormula(int num_vars, std::vector<std::vector<Lit>> clauses);

    int num_vars() const { return num_vars_; }
    int num_clauses() const { return (int)clauses_.size(); }
    const std::vector<std::vector<Lit>>& clauses() const { return clauses_; }
    const std::vector<Lit>& clause(int i) const { return clauses_[i]; }

    bool operator==(const CnfFormula&) const = default;

private:
    int num_vars_ = 0;
    std::vector<std::vector<Lit>> clauses_;
};

// Partial assignment; unassigned variables are absent.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(int num_vars) : values_(num_vars + 1, -1) {}

    void set(int var, bool value) {
        if (var >= (int)values_.size()) values_.resize(var + 1, -1);
        values_[var] = value ? 1 : 0;
    }
    void unset(int var) {
        if (var < (int)values_.size()) values_[var] = -1;
    }
    bool assigned(int var) const {
        return var < (int)values_.size() && values_[var] >= 0;
    }
    bool value(int var) const { return values_[var] == 1; }
    int max_var() const { return (int)values_.size() - 1; }

private:
    std::vector<int8_t> values_; // -1 unassigned, 0 false, 1 true
};

enum class Verdict { Satisfied, Falsified, Undetermined };

// Throws std::invalid_argument if the assignment references a variable > n.
Verdict evaluate(const CnfFormula& f, const Assignment& a);

// DIMACS CNF. Throws ParseError with the offending line number.
CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(const std::string& text);
CnfFormula parse_dimacs_file(const std::string& path);

void write_dimacs(const CnfFormula& f, std::ostream& out);
std::string write_dimacs(const CnfFormula& f);
void write_dimacs_file(const CnfFormula& f, const std::string& path);

} // namespace satguide

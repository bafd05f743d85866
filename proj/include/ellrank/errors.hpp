#pragma once

#include <stdexcept>
#include <string>

namespace ellrank {

// Typed failure modes. Every throw site names the operation and the inputs
// that triggered it; nothing is ever silently defaulted.

// An input is outside the supported envelope (degree caps, work budgets,
// unsupported base fields). The message states the cap and the offending size.
struct capability_error : std::runtime_error {
    explicit capability_error(const std::string& m) : std::runtime_error(m) {}
};

// A certificate-backed predicate could not be decided within its budget.
// Returned instead of guessing; the message lists what was tried.
struct undetermined_error : std::runtime_error {
    explicit undetermined_error(const std::string& m) : std::runtime_error(m) {}
};

// The mathematical hypotheses of the method fail for this input
// (reducible two-torsion cubic, constant surface, zero discriminant).
struct hypothesis_error : std::runtime_error {
    explicit hypothesis_error(const std::string& m) : std::runtime_error(m) {}
};

// A cross-check that must hold on every run failed; indicates a bug, never
// bad user input.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& m) : std::logic_error(m) {}
};

// Local-field computations throw this when the working precision cannot
// resolve a decision; callers re-run with a larger precision.
struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& m) : std::runtime_error(m) {}
};

struct parse_error : std::runtime_error {
    int line, col;
    parse_error(const std::string& m, int line_, int col_)
        : std::runtime_error(m + " (line " + std::to_string(line_) + ", column " + std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

}  // namespace ellrank

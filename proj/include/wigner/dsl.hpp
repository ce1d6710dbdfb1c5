#pragma once

#include <string>

#include "wigner/scenario.hpp"

namespace wigner {

class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                message),
          line(line),
          column(column) {}

    int line;
    int column;
};

// Parses a scenario description. Parsing either succeeds totally or throws
// ParseError with line/column diagnostics; the returned scenario satisfies all
// scenario invariants. `#` starts a comment; Unicode arrow labels are
// canonicalized to their ASCII aliases (u, d, ob, fb).
Scenario parse_scenario(const std::string& source, const std::string& name = "scenario");

// Canonical text form; reparsing yields a structurally equal scenario.
std::string render_scenario(const Scenario& scenario);

// Structural equality up to `tol` on amplitudes; scenario names are ignored.
bool scenario_equal(const Scenario& a, const Scenario& b, double tol = 1e-12);

}  // namespace wigner

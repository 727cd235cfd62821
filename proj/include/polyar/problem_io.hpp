#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "polyar/engine.hpp"
#include "polyar/smt.hpp"

namespace polyar {

struct ParseError : std::runtime_error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int l, int c);
};

using ParsedProblem = std::variant<ProblemF, SmtProblem>;

// Versioned text format; >=, =, and strict senses are rewritten into <= 0
// form with the given epsilon slack at load time.
ParsedProblem parse_problem(const std::string& text, double epsilon = 1e-6);

std::string serialize_problem(const ProblemF& f);
std::string serialize_problem(const SmtProblem& p);

// Result document: status, model, stats, config echo.
std::string verdict_to_json(const Verdict& v, const std::vector<std::string>& var_names,
                            const Config& cfg);

} // namespace polyar

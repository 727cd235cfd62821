#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "polyar/engine.hpp"

namespace polyar {

struct Literal {
    std::size_t var = 0;
    bool negated = false;
};

using Clause = std::vector<Literal>;

// Linear pseudo-Boolean row sum coeff_j * b_j (= | <=) bound.
struct PbRow {
    enum class Rel { Eq, Le };
    std::vector<std::pair<int, std::size_t>> terms;  // (coefficient, variable)
    Rel rel = Rel::Eq;
    int bound = 0;
};

// b_l <-> (poly <= 0). The negated side is the strict complement
// -poly <= -epsilon.
struct Link {
    std::size_t var = 0;
    Polynomial poly;
};

struct SmtProblem {
    std::size_t nbools = 0;
    std::vector<Clause> clauses;
    std::vector<PbRow> pb_rows;
    Box domain;
    std::vector<Polynomial> unconditional;
    std::vector<Link> links;
    std::vector<std::string> var_names;
    std::vector<std::string> bool_names;

    // Optional search hints from the encoder: preferred decision values per
    // Boolean (empty = all true) and warm-start points for the theory probe.
    std::vector<bool> polarity;
    std::vector<std::vector<double>> probe_hints;

    bool pure_real() const { return nbools == 0; }
};

// DPLL with unit propagation, counting propagation on pseudo-Boolean rows,
// and chronological backtracking. Returns a total assignment or nullopt.
std::optional<std::vector<bool>> sat_next(std::size_t nbools, const std::vector<Clause>& clauses,
                                          const std::vector<PbRow>& pb_rows,
                                          const std::vector<Clause>& lemmas);

// Same search with per-variable decision polarity (empty = all true).
std::optional<std::vector<bool>> sat_next(std::size_t nbools, const std::vector<Clause>& clauses,
                                          const std::vector<PbRow>& pb_rows,
                                          const std::vector<Clause>& lemmas,
                                          const std::vector<bool>& polarity);

struct TheoryResult {
    Status status = Status::Unknown;
    std::optional<std::vector<double>> model;
    std::vector<Literal> core;  // UNSAT only
};

struct TheoryCache {
    std::vector<Classification> per_link;  // classification of each link poly over the domain
    bool enabled = true;
};

TheoryCache build_theory_cache(const SmtProblem& problem, const Config& cfg);

// Solves the problem induced by a total Boolean assignment. On UNSAT the core
// defaults to all linking literals of the assignment; with minimize_core it
// is greedily shrunk by re-solving.
TheoryResult theory_check(const std::vector<bool>& assignment, const SmtProblem& problem,
                          const TheoryCache& cache, const Config& cfg,
                          bool minimize_core = false);

struct SmtConfig : Config {
    bool use_cache = true;
    bool minimize_cores = false;
    double theory_timeout_s = 30.0;
};

Verdict solve_smt(const SmtProblem& problem, const SmtConfig& cfg);

// Builds the ProblemF induced by an assignment (public for tests/verifiers).
ProblemF induced_problem(const std::vector<bool>& assignment, const SmtProblem& problem,
                         double epsilon);

} // namespace polyar

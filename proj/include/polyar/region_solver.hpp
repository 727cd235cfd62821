#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyar/engine.hpp"

namespace polyar {

using Deadline = std::chrono::steady_clock::time_point;

struct RegionTask {
    Box box;
    std::vector<Polynomial> constraints;
    double min_width = 1e-9;
    Deadline deadline;
    // deterministic work cap (search-tree nodes); exhausting it reports
    // Timeout independently of wall-clock jitter or thread scheduling
    std::uint64_t node_budget = UINT64_MAX;
};

// Complete-up-to-min_width interval branch-and-prune over one box.
// SAT models are exactly verified; UNSAT holds by interval refutation of
// every leaf. `cancel` (optional) requests cooperative early exit once a
// sibling task has already found a model.
Verdict branch_and_prune(const RegionTask& t, const std::atomic<bool>* cancel = nullptr);

// Alg.-4 dispatcher: one task per ambiguous box on a worker pool. First SAT
// wins and cancels the rest; the status is deterministic in the inputs.
Verdict solve_parallel(const std::vector<Box>& ambig, const std::vector<Polynomial>& constraints,
                       const Config& cfg, Deadline deadline,
                       std::uint64_t node_budget = UINT64_MAX);

// --- SMT-LIB2 bridge -------------------------------------------------------

// QF_NRA script with the box bounds and each p_i <= 0; coefficients are
// emitted as exact binary-rational literals.
std::string export_smtlib(const Box& box, const std::vector<Polynomial>& constraints,
                          const std::vector<std::string>& names = {});

struct SmtLibProblem {
    std::vector<std::string> names;
    Box box;
    std::vector<Polynomial> constraints;
};

// Parses scripts of the shape emitted by export_smtlib (used for round-trip
// checks; not a general SMT-LIB reader).
SmtLibProblem import_smtlib(const std::string& text);

struct ExternalResult {
    Status status = Status::Unknown;
    std::optional<std::vector<double>> model;
    std::string diagnostic;
};

// Parses `sat`/`unsat`/`unknown` plus an optional model from solver output.
ExternalResult parse_solver_output(const std::string& out, const std::vector<std::string>& names);

// Runs an external QF_NRA solver executable on one region task.
ExternalResult run_external_solver(const std::string& exe_path, const Box& box,
                                   const std::vector<Polynomial>& constraints,
                                   double timeout_s);

} // namespace polyar

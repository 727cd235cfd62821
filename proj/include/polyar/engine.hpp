#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyar/geometry.hpp"
#include "polyar/polynomial.hpp"
#include "polyar/refine.hpp"

namespace polyar {

// Conjunction of p_i(x) <= 0 over a box domain.
struct ProblemF {
    Box domain;
    std::vector<Polynomial> constraints;
    std::vector<std::string> var_names;  // optional, for reporting

    // Optional warm-start candidates tried first by the probe; every hint is
    // re-verified exactly, so bad hints only cost an evaluation.
    std::vector<std::vector<double>> probe_hints;

    void validate() const;
};

enum class Status { Sat, Unsat, Unknown, Timeout };

std::string to_string(Status s);

struct Stats {
    std::size_t refine_rounds = 0;
    std::size_t boxes_neg = 0;
    std::size_t boxes_pos = 0;
    std::size_t boxes_ambig = 0;
    double volume_neg = 0.0;
    double volume_pos = 0.0;
    double volume_ambig = 0.0;
    std::size_t convex_calls = 0;
    std::size_t subsolver_calls = 0;
    std::size_t probe_samples = 0;
    std::uint64_t work_units = 0;  // deterministic work charged against the timeout
    bool budget_exhausted = false;
    double wall_ms = 0.0;
    double refine_ms = 0.0;
    double endgame_ms = 0.0;

    void merge(const Stats& o);
};

struct Verdict {
    Status status = Status::Unknown;
    std::optional<std::vector<double>> model;
    std::vector<bool> bool_model;  // SMT mode only
    Stats stats;
};

enum class TemplateKind { Simplex, Axis };

struct Config {
    double vol_threshold_frac = 1e-3;  // fraction of the initial domain volume
    std::optional<double> vol_threshold_abs;
    double epsilon = 1e-6;             // slack for strict/equality rewrites
    double timeout_s = 3600.0;
    std::size_t max_workers = 0;       // 0 = hardware concurrency
    std::size_t refine_budget = 500;
    double min_width_frac = 1e-9;      // branch-and-prune resolution, x initial width
    TemplateKind templates = TemplateKind::Simplex;
    std::string external_solver;       // empty = internal branch-and-prune
    std::uint64_t seed = 0;
    bool probe = true;                 // sampling + local-search SAT probe
    std::size_t probe_samples = 256;

    double vol_threshold_for(const Box& domain) const;
    std::size_t workers() const;
};

// Alg.-2 early exit: per negative region, build over-approximations of the
// still-unprocessed polynomials and solve the convex feasibility problem.
// A returned point is re-verified against `verify_against` exactly.
std::optional<std::vector<double>> conv_solver(const std::vector<Box>& neg,
                                               const std::vector<Polynomial>& pols,
                                               const std::vector<Polynomial>& verify_against,
                                               Stats* stats = nullptr);

// Highest interval Lipschitz bound over b; ties toward the lowest index.
std::size_t select_poly(const std::vector<Polynomial>& pols, const Box& b);

// Pre-computed classification reuse for the SMT layer: constraint index ->
// (classification over the full domain, flipped usage for negated polynomials).
struct CachedClassification {
    const Classification* cls = nullptr;
    bool flipped = false;
};

Verdict solve(const ProblemF& F, const Config& cfg);
Verdict solve(const ProblemF& F, const Config& cfg,
              const std::map<std::size_t, CachedClassification>& cache);

} // namespace polyar

#include "polyar/smt.hpp"

#include <algorithm>
#include <chrono>

namespace polyar {

namespace {

using Clock = std::chrono::steady_clock;

// -1 unassigned, 0 false, 1 true
using PartialAssign = std::vector<signed char>;

enum class PropResult { Ok, Conflict };

bool lit_true(const Literal& l, const PartialAssign& a) {
    return a[l.var] == (l.negated ? 0 : 1);
}
bool lit_false(const Literal& l, const PartialAssign& a) {
    return a[l.var] == (l.negated ? 1 : 0);
}

struct TrailEntry {
    std::size_t var;
    bool decision;
};

struct SatSearch {
    std::size_t n;
    const std::vector<Clause>* clause_sets[2];
    const std::vector<PbRow>* rows;
    PartialAssign assign;
    std::vector<TrailEntry> trail;

    bool set_var(std::size_t v, bool val, bool decision) {
        if (assign[v] != -1) return assign[v] == (val ? 1 : 0);
        assign[v] = val ? 1 : 0;
        trail.push_back({v, decision});
        return true;
    }

    PropResult propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto* cs : clause_sets) {
                for (const auto& cl : *cs) {
                    std::size_t unassigned = 0;
                    const Literal* unit = nullptr;
                    bool satisfied = false;
                    for (const auto& l : cl) {
                        if (lit_true(l, assign)) {
                            satisfied = true;
                            break;
                        }
                        if (assign[l.var] == -1) {
                            ++unassigned;
                            unit = &l;
                        }
                    }
                    if (satisfied) continue;
                    if (unassigned == 0) return PropResult::Conflict;
                    if (unassigned == 1) {
                        set_var(unit->var, !unit->negated, false);
                        changed = true;
                    }
                }
            }
            for (const auto& row : *rows) {
                // counting propagation: achievable range of the row sum
                int min_sum = 0, max_sum = 0;
                for (const auto& [c, v] : row.terms) {
                    if (assign[v] == 1) {
                        min_sum += c;
                        max_sum += c;
                    } else if (assign[v] == -1) {
                        if (c > 0) max_sum += c;
                        else min_sum += c;
                    }
                }
                const bool eq = row.rel == PbRow::Rel::Eq;
                if (min_sum > row.bound) return PropResult::Conflict;
                if (eq && max_sum < row.bound) return PropResult::Conflict;
                for (const auto& [c, v] : row.terms) {
                    if (assign[v] != -1 || c == 0) continue;
                    // forced false: setting true would overshoot
                    const int min_if_true = min_sum + (c > 0 ? c : 0);
                    const int max_if_true = max_sum + (c > 0 ? 0 : c);
                    const int min_if_false = min_sum - (c > 0 ? 0 : c) + (c > 0 ? 0 : 0);
                    const int max_if_false = max_sum - (c > 0 ? c : 0);
                    bool true_bad = min_if_true > row.bound || (eq && max_if_true < row.bound);
                    bool false_bad = min_if_false > row.bound || (eq && max_if_false < row.bound);
                    if (true_bad && false_bad) return PropResult::Conflict;
                    if (true_bad) {
                        set_var(v, false, false);
                        changed = true;
                    } else if (false_bad) {
                        set_var(v, true, false);
                        changed = true;
                    }
                }
            }
        }
        return PropResult::Ok;
    }

    bool backtrack() {
        while (!trail.empty()) {
            TrailEntry e = trail.back();
            trail.pop_back();
            const bool was_true = assign[e.var] == 1;
            assign[e.var] = -1;
            if (e.decision) {
                // flip chronologically; the flipped value is now implied
                set_var(e.var, !was_true, false);
                return true;
            }
        }
        return false;
    }
};

} // namespace

std::optional<std::vector<bool>> sat_next(std::size_t nbools, const std::vector<Clause>& clauses,
                                          const std::vector<PbRow>& pb_rows,
                                          const std::vector<Clause>& lemmas) {
    return sat_next(nbools, clauses, pb_rows, lemmas, {});
}

std::optional<std::vector<bool>> sat_next(std::size_t nbools, const std::vector<Clause>& clauses,
                                          const std::vector<PbRow>& pb_rows,
                                          const std::vector<Clause>& lemmas,
                                          const std::vector<bool>& polarity) {
    for (const auto* cs : {&clauses, &lemmas})
        for (const auto& cl : *cs)
            for (const auto& l : cl)
                if (l.var >= nbools) throw std::invalid_argument("sat_next: literal out of range");
    for (const auto& row : pb_rows)
        for (const auto& [c, v] : row.terms)
            if (v >= nbools) throw std::invalid_argument("sat_next: pb variable out of range");

    SatSearch s;
    s.n = nbools;
    s.clause_sets[0] = &clauses;
    s.clause_sets[1] = &lemmas;
    s.rows = &pb_rows;
    s.assign.assign(nbools, -1);

    for (;;) {
        if (s.propagate() == PropResult::Conflict) {
            if (!s.backtrack()) return std::nullopt;
            continue;
        }
        std::size_t pick = nbools;
        for (std::size_t v = 0; v < nbools; ++v)
            if (s.assign[v] == -1) {
                pick = v;
                break;
            }
        if (pick == nbools) {
            std::vector<bool> out(nbools);
            for (std::size_t v = 0; v < nbools; ++v) out[v] = s.assign[v] == 1;
            return out;
        }
        s.set_var(pick, polarity.empty() ? true : polarity[pick], true);
    }
}

ProblemF induced_problem(const std::vector<bool>& assignment, const SmtProblem& problem,
                         double epsilon) {
    ProblemF F;
    F.domain = problem.domain;
    F.var_names = problem.var_names;
    F.constraints = problem.unconditional;
    F.probe_hints = problem.probe_hints;
    for (const auto& link : problem.links) {
        if (assignment[link.var]) {
            F.constraints.push_back(link.poly);
        } else {
            // strict complement p > 0 as -p <= -epsilon
            Polynomial q = -link.poly;
            q.add_term(Polynomial::Exponents(q.nvars(), 0), epsilon);
            F.constraints.push_back(q);
        }
    }
    return F;
}

TheoryCache build_theory_cache(const SmtProblem& problem, const Config& cfg) {
    TheoryCache cache;
    RefineOptions opt;
    opt.vol_threshold = cfg.vol_threshold_for(problem.domain);
    // the cache is one classification per link over the whole domain; keep the
    // per-link box count small so per-assignment intersections stay cheap
    opt.budget = std::min<std::size_t>(cfg.refine_budget, 96);
    opt.templates = cfg.templates == TemplateKind::Simplex
                        ? default_templates(problem.domain.nvars())
                        : axis_templates(problem.domain.nvars());
    cache.per_link.reserve(problem.links.size());
    for (const auto& link : problem.links)
        cache.per_link.push_back(abst_refin({problem.domain}, link.poly, opt));
    return cache;
}

namespace {

// Intersect the cached candidate covers of the active links (neg+ambig as
// assigned, pos+ambig when flipped). An empty running intersection refutes the
// assignment without touching the engine; returns the prefix of links that
// sufficed. Bails out (nullopt) if the cover fragments past `cap`.
std::optional<bool> cover_intersection_empty(const std::vector<bool>& assignment,
                                             const SmtProblem& problem,
                                             const std::vector<bool>& link_active,
                                             const TheoryCache& cache,
                                             std::vector<std::size_t>* prefix) {
    constexpr std::size_t cap = 4096;
    std::vector<Box> cur = {problem.domain};
    if (prefix) prefix->clear();
    // links that exclude nothing cannot prune and would only fragment the
    // cover; drop them, and take the cheapest (smallest) covers first
    std::vector<std::pair<std::size_t, std::size_t>> order;  // (cover size, link)
    for (std::size_t l = 0; l < problem.links.size(); ++l) {
        if (!link_active[l]) continue;
        const Classification& c = cache.per_link[l];
        const bool flipped = !assignment[problem.links[l].var];
        const auto& excluded = flipped ? c.neg : c.pos;
        if (excluded.empty()) continue;
        const std::size_t cover = (flipped ? c.pos.size() : c.neg.size()) + c.ambig.size();
        order.emplace_back(cover, l);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [cover_size, l] : order) {
        const Classification& c = cache.per_link[l];
        const bool flipped = !assignment[problem.links[l].var];
        const auto& certain = flipped ? c.pos : c.neg;
        std::vector<Box> next;
        for (const auto& a : cur) {
            for (const auto* side : {&certain, &c.ambig})
                for (const auto& b : *side)
                    if (auto isect = intersect(a, b); isect && volume(*isect) > 0.0)
                        next.push_back(std::move(*isect));
            if (next.size() > cap) return std::nullopt;
        }
        if (prefix) prefix->push_back(l);
        if (next.empty()) return true;
        cur = std::move(next);
    }
    return false;
}

TheoryResult theory_check_subset(const std::vector<bool>& assignment, const SmtProblem& problem,
                                 const std::vector<bool>& link_active, const TheoryCache& cache,
                                 const Config& cfg) {
    ProblemF F;
    F.domain = problem.domain;
    F.var_names = problem.var_names;
    F.constraints = problem.unconditional;
    F.probe_hints = problem.probe_hints;
    std::map<std::size_t, CachedClassification> cmap;
    const bool cached = cache.enabled && cache.per_link.size() == problem.links.size();
    for (std::size_t l = 0; l < problem.links.size(); ++l) {
        if (!link_active[l]) continue;
        const auto& link = problem.links[l];
        const std::size_t idx = F.constraints.size();
        if (assignment[link.var]) {
            F.constraints.push_back(link.poly);
            if (cached) cmap[idx] = {&cache.per_link[l], false};
        } else {
            Polynomial q = -link.poly;
            q.add_term(Polynomial::Exponents(q.nvars(), 0), cfg.epsilon);
            F.constraints.push_back(q);
            if (cached) cmap[idx] = {&cache.per_link[l], true};
        }
    }
    Verdict v = solve(F, cfg, cmap);
    TheoryResult r;
    r.status = v.status;
    r.model = v.model;
    return r;
}

} // namespace

TheoryResult theory_check(const std::vector<bool>& assignment, const SmtProblem& problem,
                          const TheoryCache& cache, const Config& cfg, bool minimize_core) {
    // cfg.timeout_s is the budget for this whole call, shared between the main
    // check and any core-minimization re-checks
    const auto t0 = Clock::now();
    auto clipped = [&] {
        Config c = cfg;
        c.timeout_s = std::max(
            0.0, cfg.timeout_s - std::chrono::duration<double>(Clock::now() - t0).count());
        return c;
    };
    std::vector<bool> active(problem.links.size(), true);
    const bool cached = cache.enabled && cache.per_link.size() == problem.links.size();

    std::vector<std::size_t> core_links;
    TheoryResult r;
    std::vector<std::size_t> prefix;
    if (cached && cover_intersection_empty(assignment, problem, active, cache, &prefix) ==
                      std::optional<bool>(true)) {
        r.status = Status::Unsat;
        core_links = prefix;
        // shrink the prefix with the same cheap test
        for (std::size_t i = 0; i < core_links.size();) {
            std::vector<bool> sub(problem.links.size(), false);
            for (std::size_t j = 0; j < core_links.size(); ++j)
                if (j != i) sub[core_links[j]] = true;
            if (cover_intersection_empty(assignment, problem, sub, cache, nullptr) ==
                std::optional<bool>(true))
                core_links.erase(core_links.begin() + static_cast<std::ptrdiff_t>(i));
            else
                ++i;
        }
        std::vector<bool> seen(assignment.size(), false);
        for (std::size_t l : core_links) {
            const std::size_t v = problem.links[l].var;
            if (seen[v]) continue;
            seen[v] = true;
            r.core.push_back({v, !assignment[v]});
        }
        return r;
    }

    r = theory_check_subset(assignment, problem, active, cache, clipped());
    if (r.status != Status::Unsat) return r;

    // default core: every linking literal as assigned
    for (std::size_t l = 0; l < problem.links.size(); ++l) core_links.push_back(l);

    if (minimize_core) {
        for (std::size_t l = 0; l < problem.links.size(); ++l) {
            std::vector<std::size_t> trial;
            for (std::size_t k : core_links)
                if (k != l) trial.push_back(k);
            if (trial.size() == core_links.size()) continue;
            std::vector<bool> sub(problem.links.size(), false);
            for (std::size_t k : trial) sub[k] = true;
            TheoryResult t = theory_check_subset(assignment, problem, sub, cache, clipped());
            if (t.status == Status::Unsat) core_links = std::move(trial);
        }
    }

    std::vector<bool> seen(assignment.size(), false);
    for (std::size_t l : core_links) {
        const std::size_t v = problem.links[l].var;
        if (seen[v]) continue;
        seen[v] = true;
        r.core.push_back({v, !assignment[v]});
    }
    return r;
}

Verdict solve_smt(const SmtProblem& problem, const SmtConfig& cfg) {
    const auto t0 = Clock::now();
    auto elapsed_s = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

    Verdict out;
    auto finish = [&](Status st) -> Verdict& {
        out.status = st;
        out.stats.wall_ms = elapsed_s() * 1000.0;
        return out;
    };

    if (problem.pure_real()) {
        ProblemF F{problem.domain, problem.unconditional, problem.var_names};
        Verdict v = solve(F, cfg);
        v.stats.wall_ms = elapsed_s() * 1000.0;
        return v;
    }

    TheoryCache cache;
    cache.enabled = cfg.use_cache && !problem.links.empty();
    if (cache.enabled) cache = build_theory_cache(problem, cfg);
    cache.enabled = cfg.use_cache;

    std::vector<Clause> lemmas;
    bool saw_unknown = false;

    for (;;) {
        if (elapsed_s() >= cfg.timeout_s) return finish(Status::Timeout);
        auto asg =
            sat_next(problem.nbools, problem.clauses, problem.pb_rows, lemmas, problem.polarity);
        if (!asg) return finish(saw_unknown ? Status::Unknown : Status::Unsat);

        Config tcfg = cfg;
        tcfg.timeout_s = std::max(0.0, std::min(cfg.theory_timeout_s, cfg.timeout_s - elapsed_s()));
        TheoryResult t = theory_check(*asg, problem, cache, tcfg, cfg.minimize_cores);
        ++out.stats.subsolver_calls;

        if (t.status == Status::Sat) {
            out.model = t.model;
            out.bool_model = *asg;
            return finish(Status::Sat);
        }
        if (t.status == Status::Unsat && !t.core.empty()) {
            Clause lemma;
            lemma.reserve(t.core.size());
            for (const auto& l : t.core) lemma.push_back({l.var, !l.negated});
            lemmas.push_back(std::move(lemma));
            continue;
        }
        if (t.status == Status::Unsat) {
            // no linking literals involved: the unconditional part is infeasible
            return finish(Status::Unsat);
        }
        // theory gave up on this assignment: block it verbatim and remember
        // that exhaustion no longer proves UNSAT
        saw_unknown = true;
        Clause lemma;
        lemma.reserve(problem.nbools);
        for (std::size_t v = 0; v < problem.nbools; ++v) lemma.push_back({v, (*asg)[v]});
        lemmas.push_back(std::move(lemma));
    }
}

} // namespace polyar

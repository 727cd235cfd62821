#include "polyar/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "polyar/convex.hpp"
#include "polyar/local_search.hpp"
#include "polyar/region_solver.hpp"

namespace polyar {

namespace {

constexpr double kVerifyTol = 1e-9;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool verified(const std::vector<Polynomial>& cons, const std::vector<double>& x) {
    for (const auto& p : cons)
        if (p.eval(x) > kVerifyTol) return false;
    return true;
}

std::size_t largest_box(const std::vector<Box>& boxes) {
    std::size_t best = 0;
    double bv = -1.0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const double v = volume(boxes[i]);
        if (v > bv) {
            bv = v;
            best = i;
        }
    }
    return best;
}

} // namespace

void ProblemF::validate() const {
    if (domain.nvars() == 0) throw std::invalid_argument("ProblemF: empty domain");
    for (double v : domain.lo)
        if (!std::isfinite(v)) throw std::invalid_argument("ProblemF: non-finite bound");
    for (double v : domain.hi)
        if (!std::isfinite(v)) throw std::invalid_argument("ProblemF: non-finite bound");
    for (const auto& p : constraints)
        if (p.nvars() != domain.nvars())
            throw std::invalid_argument("ProblemF: constraint arity mismatch");
    if (!var_names.empty() && var_names.size() != domain.nvars())
        throw std::invalid_argument("ProblemF: name count mismatch");
}

std::string to_string(Status s) {
    switch (s) {
        case Status::Sat: return "sat";
        case Status::Unsat: return "unsat";
        case Status::Unknown: return "unknown";
        case Status::Timeout: return "timeout";
    }
    return "unknown";
}

void Stats::merge(const Stats& o) {
    refine_rounds += o.refine_rounds;
    boxes_neg += o.boxes_neg;
    boxes_pos += o.boxes_pos;
    boxes_ambig += o.boxes_ambig;
    volume_neg += o.volume_neg;
    volume_pos += o.volume_pos;
    volume_ambig += o.volume_ambig;
    convex_calls += o.convex_calls;
    subsolver_calls += o.subsolver_calls;
    probe_samples += o.probe_samples;
    work_units += o.work_units;
    budget_exhausted = budget_exhausted || o.budget_exhausted;
    refine_ms += o.refine_ms;
    endgame_ms += o.endgame_ms;
}

double Config::vol_threshold_for(const Box& domain) const {
    if (vol_threshold_abs) return *vol_threshold_abs;
    return vol_threshold_frac * volume(domain);
}

std::size_t Config::workers() const {
    if (max_workers > 0) return max_workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::optional<std::vector<double>> conv_solver(const std::vector<Box>& neg,
                                               const std::vector<Polynomial>& pols,
                                               const std::vector<Polynomial>& verify_against,
                                               Stats* stats) {
    for (const auto& region : neg) {
        std::vector<ConvexConstraint> cons;
        cons.reserve(pols.size());
        for (const auto& p : pols) cons.push_back(ConvexConstraint::from_quadratic(over_relax(p, region).over()));
        if (stats) ++stats->convex_calls;
        auto pt = feasible_point(cons, region);
        if (pt && verified(verify_against, *pt)) return pt;
    }
    return std::nullopt;
}

std::size_t select_poly(const std::vector<Polynomial>& pols, const Box& b) {
    if (pols.empty()) throw std::invalid_argument("select_poly: empty list");
    std::size_t best = 0;
    double bl = -1.0;
    for (std::size_t i = 0; i < pols.size(); ++i) {
        const double l = lipschitz_bound(pols[i], b);
        if (l > bl) {
            bl = l;
            best = i;
        }
    }
    return best;
}

Verdict solve(const ProblemF& F, const Config& cfg) {
    return solve(F, cfg, {});
}

Verdict solve(const ProblemF& F, const Config& cfg,
              const std::map<std::size_t, CachedClassification>& cache) {
    F.validate();
    const auto t0 = Clock::now();
    const Deadline deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(cfg.timeout_s));

    Verdict out;
    auto finish = [&](Status st) -> Verdict& {
        out.status = st;
        out.stats.wall_ms = ms_since(t0);
        return out;
    };

    // Deterministic work budget derived from the timeout. Charging refinement
    // boxes and endgame nodes against it makes Timeout placement a function of
    // the inputs alone, independent of wall-clock jitter and the worker count;
    // the wall deadline stays as a hard backstop.
    constexpr double kUnitsPerSecond = 200e3;
    constexpr std::uint64_t kRefineBoxCost = 2000;
    constexpr std::uint64_t kConvexRegionCost = 500;
    const double raw_units = cfg.timeout_s * kUnitsPerSecond;
    std::uint64_t units_left =
        raw_units >= 1e18 ? UINT64_MAX : static_cast<std::uint64_t>(raw_units);
    auto charge = [&](std::uint64_t u) {
        out.stats.work_units += u;
        units_left -= std::min(units_left, u);
    };

    if (F.constraints.empty()) {
        out.model = F.domain.center();
        return finish(Status::Sat);
    }

    // cheap SAT probe: sampling plus local search, all candidates verified exactly
    if (cfg.probe) {
        for (const auto& hint : F.probe_hints) {
            if (hint.size() != F.domain.nvars() || !F.domain.contains(hint)) continue;
            ++out.stats.probe_samples;
            if (verified(F.constraints, hint)) {
                out.model = hint;
                return finish(Status::Sat);
            }
        }
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const std::size_t n = F.domain.nvars();
        std::vector<double> x(n);
        for (std::size_t s = 0; s < cfg.probe_samples; ++s) {
            for (std::size_t k = 0; k < n; ++k)
                x[k] = F.domain.lo[k] + unit(rng) * (F.domain.hi[k] - F.domain.lo[k]);
            ++out.stats.probe_samples;
            if (verified(F.constraints, x)) {
                out.model = x;
                return finish(Status::Sat);
            }
        }
        auto found = local_feasibility_search(F.constraints, F.domain, cfg.seed);
        if (found && verified(F.constraints, *found)) {
            out.model = *found;
            return finish(Status::Sat);
        }
    }

    // Exploit the convex subset of the constraints (affine or PSD quadratic):
    // refuting the subset over the domain refutes the conjunction, and when
    // the subset is everything, a feasible interior point settles SAT (after
    // exact re-verification).
    {
        bool all_convex = true;
        std::vector<ConvexConstraint> ccs;
        ccs.reserve(F.constraints.size());
        for (const auto& p : F.constraints) {
            if (p.degree() > 2) {
                all_convex = false;
                continue;
            }
            auto cc = ConvexConstraint::from_quadratic(p);
            if (cc.kind == ConvexConstraint::Kind::Quadratic && !is_psd(cc.Q)) {
                all_convex = false;
                continue;
            }
            ccs.push_back(std::move(cc));
        }
        if (!ccs.empty()) {
            ++out.stats.convex_calls;
            if (all_convex) {
                if (auto pt = feasible_point(ccs, F.domain); pt && verified(F.constraints, *pt)) {
                    out.model = *pt;
                    return finish(Status::Sat);
                }
            }
            if (refute_convex(ccs, F.domain)) return finish(Status::Unsat);
        }
    }

    const double thresh = cfg.vol_threshold_for(F.domain);
    const TemplateSet templates = cfg.templates == TemplateKind::Simplex
                                      ? default_templates(F.domain.nvars())
                                      : axis_templates(F.domain.nvars());

    std::vector<Box> Neg = {F.domain};
    std::vector<Box> ambig_acc;
    std::vector<std::size_t> remaining(F.constraints.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

    const auto refine_t0 = Clock::now();
    while (!remaining.empty() && !Neg.empty()) {
        if (Clock::now() >= deadline || units_left == 0) {
            out.stats.refine_ms = ms_since(refine_t0);
            return finish(Status::Timeout);
        }

        std::vector<Polynomial> pols;
        pols.reserve(remaining.size());
        for (std::size_t i : remaining) pols.push_back(F.constraints[i]);

        charge(kConvexRegionCost * static_cast<std::uint64_t>(Neg.size()));
        auto pt = conv_solver(Neg, pols, F.constraints, &out.stats);
        if (pt) {
            out.model = *pt;
            out.stats.refine_ms = ms_since(refine_t0);
            return finish(Status::Sat);
        }

        const Box& rep = Neg[largest_box(Neg)];
        const std::size_t pick = select_poly(pols, rep);
        const std::size_t orig = remaining[pick];
        const Polynomial& p = F.constraints[orig];

        std::vector<Box> new_neg;
        std::vector<Box> new_ambig;
        auto cached_it = cache.find(orig);
        if (cached_it != cache.end() && cached_it->second.cls) {
            // reuse the full-domain classification: intersect with the current
            // candidate set; for a negated polynomial the neg/pos roles swap
            const Classification& c = *cached_it->second.cls;
            const bool flip = cached_it->second.flipped;
            const std::vector<Box>& neg_src = flip ? c.pos : c.neg;
            charge(static_cast<std::uint64_t>(Neg.size()) * (neg_src.size() + c.ambig.size()));
            for (const Box& cur : Neg) {
                for (const Box& nb : neg_src)
                    if (auto isec = intersect(cur, nb); isec && volume(*isec) > 0.0)
                        new_neg.push_back(*isec);
                for (const Box& ab : c.ambig)
                    if (auto isec = intersect(cur, ab); isec && volume(*isec) > 0.0)
                        new_ambig.push_back(*isec);
            }
            out.stats.budget_exhausted |= c.budget_exhausted;
        } else {
            RefineOptions opt;
            opt.vol_threshold = thresh;
            opt.budget = cfg.refine_budget;
            opt.templates = templates;
            Classification c = abst_refin(Neg, p, opt);
            charge(static_cast<std::uint64_t>(c.boxes_processed) * kRefineBoxCost);
            out.stats.budget_exhausted |= c.budget_exhausted;
            out.stats.boxes_pos += c.pos.size();
            out.stats.volume_pos += c.pos_volume();
            new_neg = std::move(c.neg);
            new_ambig = std::move(c.ambig);
        }
        ++out.stats.refine_rounds;
        out.stats.boxes_neg += new_neg.size();
        out.stats.boxes_ambig += new_ambig.size();
        for (const auto& b : new_neg) out.stats.volume_neg += volume(b);
        for (const auto& b : new_ambig) out.stats.volume_ambig += volume(b);

        ambig_acc.insert(ambig_acc.end(), new_ambig.begin(), new_ambig.end());
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        Neg = std::move(new_neg);
    }
    out.stats.refine_ms = ms_since(refine_t0);

    if (remaining.empty() && !Neg.empty()) {
        std::vector<double> x = Neg[largest_box(Neg)].center();
        if (verified(F.constraints, x)) {
            out.model = std::move(x);
            return finish(Status::Sat);
        }
        // certified boxes disagreed with exact evaluation (degenerate widths,
        // accumulated rounding): fall back to the complete endgame instead of
        // returning an unverified model
        ambig_acc.insert(ambig_acc.end(), Neg.begin(), Neg.end());
    }

    if (ambig_acc.empty()) return finish(Status::Unsat);
    if (Clock::now() >= deadline || units_left == 0) return finish(Status::Timeout);

    const auto endgame_t0 = Clock::now();
    Verdict end = solve_parallel(ambig_acc, F.constraints, cfg, deadline, units_left);
    out.stats.merge(end.stats);
    out.stats.endgame_ms = ms_since(endgame_t0);
    out.model = end.model;
    return finish(end.status);
}

} // namespace polyar

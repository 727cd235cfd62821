#include "polyar/region_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "polyar/local_search.hpp"

namespace polyar {

namespace {

bool point_sat(const std::vector<Polynomial>& cons, const std::vector<double>& x) {
    for (const auto& p : cons)
        if (p.eval(x) > 0.0) return false;
    return true;
}

Status bp_rec(const Box& box, const RegionTask& t, const std::atomic<bool>* cancel,
              std::uint64_t& nodes_left, std::optional<std::vector<double>>& model) {
    if (cancel && cancel->load(std::memory_order_relaxed)) return Status::Unknown;
    if (nodes_left == 0) return Status::Timeout;
    --nodes_left;
    if (std::chrono::steady_clock::now() >= t.deadline) return Status::Timeout;

    for (const auto& p : t.constraints)
        if (interval_eval(p, box).lo > 0.0) return Status::Unsat;

    std::vector<double> mid = box.center();
    if (point_sat(t.constraints, mid)) {
        model = std::move(mid);
        return Status::Sat;
    }

    if (box.max_width() < t.min_width) return Status::Unknown;

    auto [a, b] = half_div(box);
    Status sa = bp_rec(a, t, cancel, nodes_left, model);
    if (sa == Status::Sat) return Status::Sat;
    Status sb = bp_rec(b, t, cancel, nodes_left, model);
    if (sb == Status::Sat) return Status::Sat;
    if (sa == Status::Timeout || sb == Status::Timeout) return Status::Timeout;
    if (sa == Status::Unsat && sb == Status::Unsat) return Status::Unsat;
    return Status::Unknown;
}

} // namespace

Verdict branch_and_prune(const RegionTask& t, const std::atomic<bool>* cancel) {
    Verdict v;
    ++v.stats.subsolver_calls;
    if (cancel && cancel->load(std::memory_order_relaxed)) {
        v.status = Status::Unknown;
        return v;
    }

    // cheap SAT attempt before the exhaustive walk; candidates checked exactly
    auto guess = local_feasibility_search(t.constraints, t.box, /*seed=*/1, 4, 60, 0.0);
    if (guess && point_sat(t.constraints, *guess)) {
        v.status = Status::Sat;
        v.model = *guess;
        return v;
    }

    std::optional<std::vector<double>> model;
    std::uint64_t nodes_left = t.node_budget;
    v.status = bp_rec(t.box, t, cancel, nodes_left, model);
    v.stats.work_units += t.node_budget - nodes_left;
    v.model = std::move(model);
    return v;
}

Verdict solve_parallel(const std::vector<Box>& ambig, const std::vector<Polynomial>& constraints,
                       const Config& cfg, Deadline deadline, std::uint64_t node_budget) {
    Verdict out;
    if (ambig.empty()) {
        out.status = Status::Unsat;  // nothing left to check
        return out;
    }

    std::vector<RegionTask> tasks;
    tasks.reserve(ambig.size());
    // an even, task-local split keeps the outcome independent of how the
    // worker pool interleaves the tasks
    const std::uint64_t per_task =
        std::max<std::uint64_t>(1, node_budget / static_cast<std::uint64_t>(ambig.size()));
    for (const auto& b : ambig) {
        RegionTask t;
        t.box = b;
        t.constraints = constraints;
        t.min_width = std::max(cfg.min_width_frac * b.max_width(), 1e-300);
        t.deadline = deadline;
        t.node_budget = per_task;
        tasks.push_back(std::move(t));
    }

    std::vector<Verdict> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> cancel{false};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= tasks.size()) return;
            if (cancel.load(std::memory_order_relaxed)) {
                results[i].status = Status::Unknown;
                continue;
            }
            results[i] = branch_and_prune(tasks[i], &cancel);
            if (results[i].status == Status::Sat) cancel.store(true, std::memory_order_relaxed);
        }
    };

    const std::size_t nthreads = std::min<std::size_t>(cfg.workers(), tasks.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    bool any_timeout = false, any_unknown = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        out.stats.merge(results[i].stats);
        switch (results[i].status) {
            case Status::Sat:
                out.status = Status::Sat;
                out.model = results[i].model;
                return out;
            case Status::Timeout: any_timeout = true; break;
            case Status::Unknown: any_unknown = true; break;
            case Status::Unsat: break;
        }
    }
    out.status = any_timeout ? Status::Timeout : (any_unknown ? Status::Unknown : Status::Unsat);
    return out;
}

} // namespace polyar

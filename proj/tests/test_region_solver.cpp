#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polyar/region_solver.hpp"

using namespace polyar;

namespace {

Deadline in_seconds(double s) {
    return std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
               std::chrono::duration<double>(s));
}

Polynomial poly1(std::initializer_list<std::pair<int, double>> terms) {
    Polynomial p(1);
    for (auto [e, c] : terms) p.add_term({static_cast<std::uint32_t>(e)}, c);
    return p;
}

} // namespace

TEST_CASE("branch_and_prune refutes x^2 <= 0.25 on [0.6, 0.7]") {
    RegionTask t;
    t.box = Box({0.6}, {0.7});
    t.constraints = {poly1({{2, 1.0}, {0, -0.25}})};
    t.min_width = 1e-9;
    t.deadline = in_seconds(30.0);
    auto v = branch_and_prune(t);
    CHECK(v.status == Status::Unsat);
}

TEST_CASE("branch_and_prune finds a model on [0, 0.4]") {
    RegionTask t;
    t.box = Box({0.0}, {0.4});
    t.constraints = {poly1({{2, 1.0}, {0, -0.25}})};
    t.min_width = 1e-9;
    t.deadline = in_seconds(30.0);
    auto v = branch_and_prune(t);
    CHECK(v.status == Status::Sat);
    REQUIRE(v.model);
    CHECK((*v.model)[0] * (*v.model)[0] <= 0.25 + 1e-12);
}

TEST_CASE("epsilon band pins down sqrt(2)") {
    const double eps = 1e-8;
    RegionTask t;
    t.box = Box({0.0}, {2.0});
    t.constraints = {poly1({{2, 1.0}, {0, -2.0 - eps}}),    // x^2 <= 2 + eps
                     poly1({{2, -1.0}, {0, 2.0 - eps}})};   // x^2 >= 2 - eps
    t.min_width = 1e-12;
    t.deadline = in_seconds(60.0);
    auto v = branch_and_prune(t);
    CHECK(v.status == Status::Sat);
    REQUIRE(v.model);
    CHECK(std::abs((*v.model)[0] - 1.41421356) <= 1e-6);
}

TEST_CASE("cancellation yields Unknown") {
    RegionTask t;
    t.box = Box({0.0}, {0.4});
    t.constraints = {poly1({{2, 1.0}, {0, -0.25}})};
    t.min_width = 1e-9;
    t.deadline = in_seconds(30.0);
    std::atomic<bool> cancel{true};
    auto v = branch_and_prune(t, &cancel);
    CHECK(v.status == Status::Unknown);
}

TEST_CASE("solve_parallel: no ambiguous boxes means UNSAT") {
    Config cfg;
    auto v = solve_parallel({}, {poly1({{1, 1.0}})}, cfg, in_seconds(10.0));
    CHECK(v.status == Status::Unsat);
}

TEST_CASE("solve_parallel: SAT in any box dominates") {
    Config cfg;
    cfg.max_workers = 4;
    std::vector<Box> ambig = {Box({0.6}, {0.7}), Box({0.9}, {1.0}), Box({0.0}, {0.4})};
    std::vector<Polynomial> cons = {poly1({{2, 1.0}, {0, -0.25}})};
    auto v = solve_parallel(ambig, cons, cfg, in_seconds(30.0));
    CHECK(v.status == Status::Sat);
    REQUIRE(v.model);
    CHECK(cons[0].eval(*v.model) <= 1e-12);
}

TEST_CASE("solve_parallel: all boxes refuted means UNSAT") {
    Config cfg;
    cfg.max_workers = 4;
    std::vector<Box> ambig = {Box({0.6}, {0.7}), Box({0.9}, {1.0})};
    auto v = solve_parallel(ambig, {poly1({{2, 1.0}, {0, -0.25}})}, cfg, in_seconds(30.0));
    CHECK(v.status == Status::Unsat);
}

TEST_CASE("solve_parallel status is deterministic across worker counts") {
    // 64 boxes tiling [0, 6.4]; only the first quarter admits solutions
    std::vector<Box> ambig;
    for (int i = 0; i < 64; ++i) ambig.push_back(Box({i * 0.1}, {(i + 1) * 0.1}));
    std::vector<Polynomial> cons = {poly1({{2, 1.0}, {0, -2.56}})};  // |x| <= 1.6
    Config one, eight;
    one.max_workers = 1;
    eight.max_workers = 8;
    auto v1 = solve_parallel(ambig, cons, one, in_seconds(60.0));
    auto v8 = solve_parallel(ambig, cons, eight, in_seconds(60.0));
    CHECK(v1.status == Status::Sat);
    CHECK(v1.status == v8.status);
    // the UNSAT side too
    std::vector<Polynomial> never = {poly1({{2, 1.0}, {0, 0.5}})};
    auto u1 = solve_parallel(ambig, never, one, in_seconds(60.0));
    auto u8 = solve_parallel(ambig, never, eight, in_seconds(60.0));
    CHECK(u1.status == Status::Unsat);
    CHECK(u1.status == u8.status);
}

TEST_CASE("export_smtlib emits a QF_NRA script with bounds and constraints") {
    Box b({-1.0}, {2.0});
    auto text = export_smtlib(b, {poly1({{2, 1.0}, {0, -0.5}})}, {"x"});
    CHECK(text.find("(set-logic QF_NRA)") != std::string::npos);
    CHECK(text.find("(declare-const x Real)") != std::string::npos);
    CHECK(text.find("(check-sat)") != std::string::npos);
    CHECK(text.find("(get-model)") != std::string::npos);
    // -1, 2 and the constraint appear as assertions
    CHECK(text.find("(assert") != std::string::npos);
}

TEST_CASE("parse_solver_output understands plain model pairs") {
    auto r = parse_solver_output("sat ((x 0.25))", {"x"});
    CHECK(r.status == Status::Sat);
    REQUIRE(r.model);
    CHECK((*r.model)[0] == doctest::Approx(0.25));

    auto u = parse_solver_output("unsat", {"x"});
    CHECK(u.status == Status::Unsat);
    auto k = parse_solver_output("unknown", {"x"});
    CHECK(k.status == Status::Unknown);
}

TEST_CASE("parse_solver_output understands define-fun models") {
    const char* out = "sat\n(model\n  (define-fun x () Real (/ 1.0 4.0))\n"
                      "  (define-fun y () Real (- 2.0))\n)";
    auto r = parse_solver_output(out, {"x", "y"});
    CHECK(r.status == Status::Sat);
    REQUIRE(r.model);
    CHECK((*r.model)[0] == doctest::Approx(0.25));
    CHECK((*r.model)[1] == doctest::Approx(-2.0));
}

TEST_CASE("export/import round-trip preserves coefficients exactly") {
    Box b({-1.25, 0.5}, {2.0, 3.75});
    Polynomial p(2);
    p.add_term({2, 1}, -0.1);  // not exactly representable in decimal
    p.add_term({0, 3}, 1.0 / 3.0);
    p.add_term({0, 0}, 5e-300);
    Polynomial q(2);
    q.add_term({1, 0}, 7.25);
    auto text = export_smtlib(b, {p, q}, {"a", "b"});
    auto back = import_smtlib(text);
    REQUIRE(back.constraints.size() == 2);
    CHECK(back.names == std::vector<std::string>{"a", "b"});
    for (std::size_t d = 0; d < 2; ++d) {
        CHECK(back.box.lo[d] == b.lo[d]);
        CHECK(back.box.hi[d] == b.hi[d]);
    }
    CHECK(back.constraints[0] == p);
    CHECK(back.constraints[1] == q);
}

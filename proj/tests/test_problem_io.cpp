#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "polyar/problem_io.hpp"

using namespace polyar;

TEST_CASE("parse_problem: minimal real document") {
    const char* doc =
        "polyar 1\n"
        "# a comment line\n"
        "var x 0 2\n"
        "constraint <= 1 x^2 ; -0.5\n";
    auto parsed = parse_problem(doc);
    REQUIRE(std::holds_alternative<ProblemF>(parsed));
    const auto& F = std::get<ProblemF>(parsed);
    CHECK(F.domain.lo[0] == 0.0);
    CHECK(F.domain.hi[0] == 2.0);
    CHECK(F.var_names == std::vector<std::string>{"x"});
    REQUIRE(F.constraints.size() == 1);
    CHECK(F.constraints[0].eval({1.0}) == doctest::Approx(0.5));   // x^2 - 0.5
    CHECK(F.constraints[0].eval({0.5}) == doctest::Approx(-0.25));
}

TEST_CASE("parse_problem: sense rewrites into <= 0 form") {
    const double eps = 1e-3;
    const char* doc =
        "polyar 1\n"
        "var x -1 1\n"
        "constraint >= 1 x\n"    // x >= 0  ->  -x <= 0
        "constraint <  1 x\n"    // x <  0  ->  x + eps <= 0
        "constraint >  1 x\n"    // x >  0  ->  -x + eps <= 0
        "constraint =  1 x\n";   // x = 0   ->  two inequalities with slack
    auto parsed = parse_problem(doc, eps);
    const auto& F = std::get<ProblemF>(parsed);
    REQUIRE(F.constraints.size() == 5);
    CHECK(F.constraints[0].eval({0.25}) == doctest::Approx(-0.25));
    CHECK(F.constraints[1].eval({0.0}) == doctest::Approx(eps));
    CHECK(F.constraints[2].eval({0.0}) == doctest::Approx(eps));
    // equality band: |x| <= eps is feasible
    CHECK(F.constraints[3].eval({eps / 2}) <= 0.0);
    CHECK(F.constraints[4].eval({eps / 2}) <= 0.0);
    CHECK(F.constraints[3].eval({2 * eps}) > 0.0);
}

TEST_CASE("parse_problem: boolean structure yields an SmtProblem") {
    const char* doc =
        "polyar 1\n"
        "var x -2 2\n"
        "bool b1\n"
        "bool b2\n"
        "clause b1 !b2\n"
        "card = 1 : 1 b1 , 1 b2\n"
        "link b1 : 1 x ; 1\n"
        "constraint <= 1 x^2 ; -4\n";
    auto parsed = parse_problem(doc);
    REQUIRE(std::holds_alternative<SmtProblem>(parsed));
    const auto& S = std::get<SmtProblem>(parsed);
    CHECK(S.nbools == 2);
    CHECK(S.bool_names == std::vector<std::string>{"b1", "b2"});
    REQUIRE(S.clauses.size() == 1);
    CHECK(S.clauses[0][0].var == 0);
    CHECK_FALSE(S.clauses[0][0].negated);
    CHECK(S.clauses[0][1].var == 1);
    CHECK(S.clauses[0][1].negated);
    REQUIRE(S.pb_rows.size() == 1);
    CHECK(S.pb_rows[0].rel == PbRow::Rel::Eq);
    CHECK(S.pb_rows[0].bound == 1);
    REQUIRE(S.links.size() == 1);
    CHECK(S.links[0].var == 0);
    CHECK(S.links[0].poly.eval({-1.0}) == doctest::Approx(0.0));
    REQUIRE(S.unconditional.size() == 1);
}

TEST_CASE("parse errors carry line and column and name the offender") {
    const char* bad_exp =
        "polyar 1\n"
        "var x 0 1\n"
        "constraint <= 1 x^a\n";
    try {
        parse_problem(bad_exp);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(e.column > 0);
        CHECK(std::string(e.what()).find("x^a") != std::string::npos);
    }

    const char* unknown =
        "polyar 1\n"
        "var x 0 1\n"
        "constraint <= 1 y\n";
    try {
        parse_problem(unknown);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("'y'") != std::string::npos);
    }

    const char* dup =
        "polyar 1\n"
        "var x 0 1\n"
        "bool x\n";
    CHECK_THROWS_AS(parse_problem(dup), ParseError);

    CHECK_THROWS_AS(parse_problem("nope\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("polyar 1\nvar x 1 0\n"), ParseError);  // inverted bounds
    CHECK_THROWS_AS(parse_problem("polyar 1\nconstraint <= 1\n"), ParseError);  // no vars
    // boolean machinery without declared booleans
    CHECK_THROWS_AS(parse_problem("polyar 1\nvar x 0 1\nclause b\n"), ParseError);
}

TEST_CASE("serialize/parse round-trip is the identity on the serialized form") {
    const char* doc =
        "polyar 1\n"
        "var x -1.25 2\n"
        "var y 0 3.5\n"
        "bool b1\n"
        "bool b2\n"
        "constraint <= 0.1 x^2 y ; -7\n"
        "clause b1 !b2\n"
        "card <= 1 : 1 b1 , 1 b2\n"
        "link b2 : 1 y ; -0.5\n";
    auto first = parse_problem(doc);
    const auto& S = std::get<SmtProblem>(first);
    const std::string text = serialize_problem(S);
    auto second = parse_problem(text);
    const auto& T = std::get<SmtProblem>(second);
    CHECK(serialize_problem(T) == text);
    CHECK(T.domain.lo == S.domain.lo);
    CHECK(T.domain.hi == S.domain.hi);
    REQUIRE(T.unconditional.size() == 1);
    CHECK(T.unconditional[0] == S.unconditional[0]);
    CHECK(T.links[0].poly == S.links[0].poly);

    // pure real problems round-trip too
    ProblemF F;
    F.domain = Box({-0.5}, {0.5});
    Polynomial p(1);
    p.add_term({3}, 1.0 / 3.0);  // awkward decimal
    p.add_term({0}, -0.1);
    F.constraints = {p};
    const std::string ftext = serialize_problem(F);
    auto back = parse_problem(ftext);
    const auto& G = std::get<ProblemF>(back);
    CHECK(G.constraints[0] == p);
    CHECK(serialize_problem(G) == ftext);
}

TEST_CASE("verdict_to_json carries status, model, stats and config echo") {
    Verdict v;
    v.status = Status::Sat;
    v.model = std::vector<double>{0.25, -1.0};
    v.stats.refine_rounds = 3;
    v.stats.subsolver_calls = 2;
    Config cfg;
    cfg.epsilon = 1e-7;
    cfg.max_workers = 4;
    auto j = nlohmann::json::parse(verdict_to_json(v, {"a", "b"}, cfg));
    CHECK(j["status"] == "sat");
    CHECK(j["model"]["a"] == 0.25);
    CHECK(j["model"]["b"] == -1.0);
    CHECK(j["stats"]["refine_rounds"] == 3);
    CHECK(j["stats"]["subsolver_calls"] == 2);
    CHECK(j["config"]["epsilon"] == 1e-7);
    CHECK(j["config"]["workers"] == 4);

    Verdict u;
    u.status = Status::Unsat;
    auto k = nlohmann::json::parse(verdict_to_json(u, {}, cfg));
    CHECK(k["status"] == "unsat");
    CHECK(k["model"].is_null());
}

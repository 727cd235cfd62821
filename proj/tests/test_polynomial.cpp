#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polyar/polynomial.hpp"

using namespace polyar;

namespace {

Polynomial from_terms(std::size_t nvars,
                      std::initializer_list<std::pair<Polynomial::Exponents, double>> ts) {
    Polynomial p(nvars);
    for (const auto& [e, c] : ts) p.add_term(e, c);
    return p;
}

} // namespace

TEST_CASE("construction and arithmetic basics") {
    auto x = Polynomial::variable(2, 0);
    auto y = Polynomial::variable(2, 1);
    auto p = x * x + (-3.0) * y + Polynomial::constant(2, 1.5);
    CHECK(p.nvars() == 2);
    CHECK(p.degree() == 2);
    CHECK(p.eval({2.0, 1.0}) == doctest::Approx(4.0 - 3.0 + 1.5));

    // zero-coefficient terms vanish
    auto q = p - p;
    CHECK(q.is_zero());
    CHECK(q.degree() == 0);

    // cubic point evaluation is exact on representable inputs
    auto cubic = from_terms(1, {{{3}, -0.05}});
    CHECK(cubic.eval({0.4}) == doctest::Approx(-0.0032).epsilon(1e-15));
}

TEST_CASE("product against hand expansion") {
    auto x = Polynomial::variable(2, 0);
    auto y = Polynomial::variable(2, 1);
    auto lhs = (x + y) * (x - y);
    auto rhs = x * x - y * y;
    CHECK(lhs == rhs);
}

TEST_CASE("active_vars reports only used dimensions") {
    auto p = from_terms(4, {{{0, 2, 0, 0}, 1.0}, {{0, 0, 0, 1}, -2.0}});
    CHECK(p.active_vars() == std::vector<std::size_t>{1, 3});
}

TEST_CASE("interval_eval: even-power tightening gives exact zero lower bound") {
    auto p = from_terms(1, {{{2}, 1.0}});
    Box b({-1.0}, {2.0});
    Interval r = interval_eval(p, b);
    CHECK(r.lo == 0.0);
    CHECK(r.hi >= 4.0);
    CHECK(r.hi <= 4.0 + 1e-12);
}

TEST_CASE("interval_eval: bilinear term over the unit square") {
    auto p = from_terms(2, {{{1, 1}, 1.0}});
    Box b({0.0, 0.0}, {1.0, 1.0});
    Interval r = interval_eval(p, b);
    CHECK(r.lo <= 0.0);
    CHECK(r.lo >= -1e-12);
    CHECK(r.hi >= 1.0);
    CHECK(r.hi <= 1.0 + 1e-12);
}

TEST_CASE("interval_eval encloses the true range of x^3 - x") {
    auto p = from_terms(1, {{{3}, 1.0}, {{1}, -1.0}});
    Box b({-1.0}, {1.0});
    Interval r = interval_eval(p, b);
    // true range is +-2/(3*sqrt(3)) ~= 0.3849
    CHECK(r.lo <= -0.3849);
    CHECK(r.hi >= 0.3849);
}

TEST_CASE("interval_eval is a sound enclosure on random polynomials") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t nv = 1 + trial % 3;
        auto p = oracles::random_poly(rng, nv, 5, 6);
        auto b = oracles::random_box(rng, nv);
        Interval r = interval_eval(p, b);
        auto s = oracles::sampled_range(p, b, nv == 1 ? 200 : (nv == 2 ? 40 : 12));
        CHECK(r.lo <= s.lo + 1e-12);
        CHECK(r.hi >= s.hi - 1e-12);
    }
}

TEST_CASE("interval_eval is inclusion-isotonic under box refinement") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        auto p = oracles::random_poly(rng, 2, 4, 5);
        auto b = oracles::random_box(rng, 2);
        auto [l, r] = half_div(b);
        Interval outer = interval_eval(p, b);
        for (const Box& sub : {l, r}) {
            Interval inner = interval_eval(p, sub);
            CHECK(inner.lo >= outer.lo);
            CHECK(inner.hi <= outer.hi);
        }
    }
}

TEST_CASE("derivative and gradient match finite differences") {
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    auto p = x1 * x1 * x2;  // d/dx1 = 2 x1 x2, d/dx2 = x1^2
    auto g = gradient(p);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == 2.0 * (x1 * x2));
    CHECK(g[1] == x1 * x1);

    auto H = hessian(p);
    CHECK(H[0][0] == 2.0 * x2);
    CHECK(H[0][1] == 2.0 * x1);
    CHECK(H[1][0] == 2.0 * x1);
    CHECK(H[1][1].is_zero());

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto q = oracles::random_poly(rng, 3, 4, 6);
        auto gq = gradient(q);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> pt = {u(rng), u(rng), u(rng)};
        for (std::size_t d = 0; d < 3; ++d)
            CHECK(gq[d].eval(pt) ==
                  doctest::Approx(oracles::fd_partial(q, pt, d)).epsilon(1e-4));
    }
}

TEST_CASE("lipschitz_bound examples and soundness") {
    Box b({-1.0, -1.0}, {1.0, 1.0});
    CHECK(lipschitz_bound(Polynomial::constant(2, 5.0), b) == 0.0);
    CHECK(lipschitz_bound(3.0 * Polynomial::variable(2, 0), b) == doctest::Approx(3.0));

    auto p = Polynomial::variable(2, 0) * Polynomial::variable(2, 0);
    CHECK(lipschitz_bound(p, b) >= 2.0);  // sup |2x| on [-1,1]

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto q = oracles::random_poly(rng, 2, 4, 5);
        auto box = oracles::random_box(rng, 2);
        const double L = lipschitz_bound(q, box);
        auto g = gradient(q);
        oracles::for_each_grid_point(box, 9, [&](const std::vector<double>& x) {
            for (const auto& gd : g) CHECK(std::abs(gd.eval(x)) <= L + 1e-9);
        });
    }
}

TEST_CASE("taylor_relax: exactness for degree <= order") {
    auto x = Polynomial::variable(1, 0);
    auto p = 2.0 * (x * x) + (-1.0) * x + Polynomial::constant(1, 0.25);
    Box b({-2.0}, {3.0});
    auto rel = taylor_relax(p, b, 2);
    CHECK(rel.base == p);
    CHECK(rel.lo_off == 0.0);
    CHECK(rel.hi_off == 0.0);
}

TEST_CASE("taylor_relax: x^3 at order 1 on [-1,1]") {
    auto p = Polynomial::monomial(1, {3}, 1.0);
    Box b({-1.0}, {1.0});
    auto rel = taylor_relax(p, b, 1);
    // base is the tangent at 0, remainder range is [-1, 1]
    CHECK(rel.base.eval({0.5}) == doctest::Approx(0.0));
    CHECK(rel.lo_off == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rel.hi_off == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("over/under relax sandwich p on a grid: x^4 - x^2") {
    auto x = Polynomial::variable(1, 0);
    auto p = (x * x) * (x * x) - x * x;
    Box b({-1.5}, {1.5});
    auto ov = over_relax(p, b);
    auto un = under_relax(p, b);
    auto O = ov.over();
    auto U = un.under();
    oracles::for_each_grid_point(b, 301, [&](const std::vector<double>& pt) {
        const double v = p.eval(pt);
        CHECK(U.eval(pt) <= v + 1e-9);
        CHECK(O.eval(pt) >= v - 1e-9);
    });
    // convexity/concavity flags hold when claimed (checked by midpoint test)
    if (ov.convex_over) {
        const double a = -1.2, c = 0.7, m = 0.5 * (a + c);
        CHECK(O.eval({m}) <= 0.5 * (O.eval({a}) + O.eval({c})) + 1e-9);
    }
}

TEST_CASE("relaxation sandwich property on random polynomials") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t nv = 1 + trial % 3;
        auto p = oracles::random_poly(rng, nv, 5, 6);
        auto b = oracles::random_box(rng, nv);
        auto O = over_relax(p, b).over();
        auto U = under_relax(p, b).under();
        std::vector<double> pt(nv);
        for (int s = 0; s < 40; ++s) {
            for (std::size_t d = 0; d < nv; ++d) pt[d] = b.lo[d] + u(rng) * (b.hi[d] - b.lo[d]);
            const double v = p.eval(pt);
            CHECK(U.eval(pt) <= v + 1e-7 * (1.0 + std::abs(v)));
            CHECK(O.eval(pt) >= v - 1e-7 * (1.0 + std::abs(v)));
        }
    }
}

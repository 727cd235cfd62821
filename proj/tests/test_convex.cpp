#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polyar/convex.hpp"

using namespace polyar;

namespace {

// unit disk ||x||^2 - 1 <= 0 in R^2
ConvexConstraint unit_disk() {
    auto x = Polynomial::variable(2, 0);
    auto y = Polynomial::variable(2, 1);
    return ConvexConstraint::from_quadratic(x * x + y * y - Polynomial::constant(2, 1.0));
}

} // namespace

TEST_CASE("from_quadratic splits quadratic, linear, constant parts") {
    auto x = Polynomial::variable(2, 0);
    auto y = Polynomial::variable(2, 1);
    auto p = 2.0 * (x * x) + 3.0 * (x * y) + (-1.0) * y + Polynomial::constant(2, 4.0);
    auto con = ConvexConstraint::from_quadratic(p);
    CHECK(con.kind == ConvexConstraint::Kind::Quadratic);
    // eval must reproduce the polynomial
    for (double a : {-1.0, 0.0, 0.5, 2.0})
        for (double b : {-2.0, 0.0, 1.0})
            CHECK(con.eval({a, b}) == doctest::Approx(p.eval({a, b})));
    // gradient vs polynomial gradient
    auto g = gradient(p);
    for (double a : {-1.0, 0.3})
        for (double b : {0.7, -0.2}) {
            auto cg = con.grad({a, b});
            CHECK(cg[0] == doctest::Approx(g[0].eval({a, b})));
            CHECK(cg[1] == doctest::Approx(g[1].eval({a, b})));
        }

    auto lin = ConvexConstraint::from_quadratic(2.0 * x - y + Polynomial::constant(2, 1.0));
    CHECK(lin.kind == ConvexConstraint::Kind::Affine);
    CHECK(lin.eval({1.0, 1.0}) == doctest::Approx(2.0));
}

TEST_CASE("is_psd / is_nsd") {
    CHECK(is_psd({{1.0, 0.0}, {0.0, 1.0}}));
    CHECK(is_psd({{0.0, 0.0}, {0.0, 0.0}}));
    CHECK_FALSE(is_psd({{1.0, 0.0}, {0.0, -1.0}}));
    CHECK(is_nsd({{-2.0, 0.0}, {0.0, -3.0}}));
    CHECK_FALSE(is_nsd({{1.0, 0.0}, {0.0, 1.0}}));
    // PSD up to tolerance
    CHECK(is_psd({{1.0, 1.0}, {1.0, 1.0}}));
}

TEST_CASE("feasible_point: affine halfplane") {
    auto x = Polynomial::variable(1, 0);
    auto con = ConvexConstraint::from_quadratic(x - Polynomial::constant(1, 0.5));
    Box b({0.0}, {1.0});
    auto pt = feasible_point({con}, b);
    REQUIRE(pt);
    CHECK((*pt)[0] <= 0.5 + 1e-8);
    CHECK((*pt)[0] >= 0.0);
}

TEST_CASE("feasible_point: infeasible x^2 + 1 <= 0 returns nullopt") {
    auto x = Polynomial::variable(1, 0);
    auto con = ConvexConstraint::from_quadratic(x * x + Polynomial::constant(1, 1.0));
    CHECK_FALSE(feasible_point({con}, Box({-2.0}, {2.0})));
}

TEST_CASE("feasible_point: disk intersected with halfplane, against grid oracle") {
    auto x = Polynomial::variable(2, 0);
    auto y = Polynomial::variable(2, 1);
    auto disk = unit_disk();
    Box b({-2.0, -2.0}, {2.0, 2.0});
    for (double shift : {-0.5, 0.0, 0.5, 0.9}) {
        // halfplane shift - x <= 0, i.e. x >= shift: intersects the disk
        auto half =
            ConvexConstraint::from_quadratic(Polynomial::constant(2, shift) - x);
        auto pt = feasible_point({disk, half}, b);
        REQUIRE(pt);
        CHECK(disk.eval(*pt) <= 1e-8);
        CHECK(half.eval(*pt) <= 1e-8);
    }
    // x >= 1.5 misses the unit disk entirely
    auto far = ConvexConstraint::from_quadratic(Polynomial::constant(2, 1.5) - x);
    CHECK_FALSE(feasible_point({disk, far}, b));
}

TEST_CASE("refute_convex: certifies disjoint systems, stays quiet on feasible ones") {
    auto x = Polynomial::variable(2, 0);
    auto y = Polynomial::variable(2, 1);
    auto disk = unit_disk();
    Box b({-3.0, -3.0}, {3.0, 3.0});

    // x >= 1.5 misses the unit disk
    auto far = ConvexConstraint::from_quadratic(Polynomial::constant(2, 1.5) - x);
    CHECK(refute_convex({disk, far}, b));

    // two disjoint halfplanes: x <= -1 and x >= 1
    auto left = ConvexConstraint::from_quadratic(x + Polynomial::constant(2, 1.0));
    auto right = ConvexConstraint::from_quadratic(Polynomial::constant(2, 1.0) - x);
    CHECK(refute_convex({left, right}, b));

    // a single constraint positive everywhere on the box
    auto off = ConvexConstraint::from_quadratic(x * x + y * y + Polynomial::constant(2, 0.5));
    CHECK(refute_convex({off}, b));

    // overlapping pair: never refuted
    auto half = ConvexConstraint::from_quadratic(Polynomial::constant(2, 0.5) - x);
    CHECK_FALSE(refute_convex({disk, half}, b));
    CHECK_FALSE(refute_convex({disk}, b));

    // feasible only at a box corner
    auto corner =
        ConvexConstraint::from_quadratic(Polynomial::constant(2, 6.0) - x - y);
    CHECK_FALSE(refute_convex({corner}, b));
}

TEST_CASE("refute_convex: random separated vs overlapping disk pairs") {
    auto x = Polynomial::variable(2, 0);
    auto y = Polynomial::variable(2, 1);
    Box b({-10.0, -10.0}, {10.0, 10.0});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> c(-4.0, 4.0), r(0.3, 2.0);
    for (int k = 0; k < 30; ++k) {
        const double cx1 = c(rng), cy1 = c(rng), r1 = r(rng);
        const double cx2 = c(rng), cy2 = c(rng), r2 = r(rng);
        auto d1 = ConvexConstraint::from_quadratic(
            (x - Polynomial::constant(2, cx1)) * (x - Polynomial::constant(2, cx1)) +
            (y - Polynomial::constant(2, cy1)) * (y - Polynomial::constant(2, cy1)) -
            Polynomial::constant(2, r1 * r1));
        auto d2 = ConvexConstraint::from_quadratic(
            (x - Polynomial::constant(2, cx2)) * (x - Polynomial::constant(2, cx2)) +
            (y - Polynomial::constant(2, cy2)) * (y - Polynomial::constant(2, cy2)) -
            Polynomial::constant(2, r2 * r2));
        const double gap = std::hypot(cx1 - cx2, cy1 - cy2) - (r1 + r2);
        if (gap > 0.05)
            CHECK(refute_convex({d1, d2}, b));
        else if (gap < -0.05)
            CHECK_FALSE(refute_convex({d1, d2}, b));
    }
}

TEST_CASE("minimize_linear: support points of the unit disk") {
    auto disk = unit_disk();
    Box b({-2.0, -2.0}, {2.0, 2.0});
    auto v1 = minimize_linear({-1.0, 0.0}, disk, b);  // maximize x -> (1, 0)
    REQUIRE(v1);
    CHECK((*v1)[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK((*v1)[1] == doctest::Approx(0.0).epsilon(1e-3));
    auto v2 = minimize_linear({0.0, -1.0}, disk, b);  // maximize y -> (0, 1)
    REQUIRE(v2);
    CHECK((*v2)[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("minimize_linear: affine constraint drives x to the constraint or box edge") {
    auto x = Polynomial::variable(1, 0);
    auto con = ConvexConstraint::from_quadratic(-x);  // x >= 0
    Box b({-3.0}, {5.0});
    auto v = minimize_linear({1.0}, con, b);  // minimize x subject to x >= 0
    REQUIRE(v);
    CHECK((*v)[0] == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("minimize_linear: 50-direction support function of the unit disk") {
    auto disk = unit_disk();
    Box b({-2.0, -2.0}, {2.0, 2.0});
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        double lx = g(rng), ly = g(rng);
        const double nrm = std::hypot(lx, ly);
        if (nrm < 1e-6) continue;
        lx /= nrm;
        ly /= nrm;
        auto v = minimize_linear({lx, ly}, disk, b);
        REQUIRE(v);
        // min over the disk of a unit direction is -1
        CHECK(std::abs(lx * (*v)[0] + ly * (*v)[1] + 1.0) <= 1e-4);
        CHECK(disk.eval(*v) <= 1e-8);
    }
}

TEST_CASE("minimize_linear respects the box when it binds first") {
    auto disk = unit_disk();
    Box b({-0.25, -2.0}, {2.0, 2.0});
    auto v = minimize_linear({1.0, 0.0}, disk, b);
    REQUIRE(v);
    CHECK((*v)[0] == doctest::Approx(-0.25).epsilon(1e-3));
}

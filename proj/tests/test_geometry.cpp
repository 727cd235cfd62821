#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polyar/geometry.hpp"

using namespace polyar;

TEST_CASE("box basics: volume, widths, membership") {
    Box b({0.0, -1.0}, {2.0, 3.0});
    CHECK(volume(b) == doctest::Approx(8.0));
    CHECK(b.max_width() == doctest::Approx(4.0));
    CHECK(longest_dim(b) == 1);
    CHECK(b.contains({1.0, 0.0}));
    CHECK_FALSE(b.contains({3.0, 0.0}));
    CHECK_THROWS_AS(Box({1.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("half_div splits the longest dimension at its midpoint") {
    Box b({0.0, 0.0}, {1.0, 4.0});
    auto [l, r] = half_div(b);
    CHECK(l.hi[1] == doctest::Approx(2.0));
    CHECK(r.lo[1] == doctest::Approx(2.0));
    CHECK(l.lo[0] == 0.0);
    CHECK(l.hi[0] == 1.0);
    CHECK(volume(l) + volume(r) == doctest::Approx(volume(b)));
}

TEST_CASE("half_div ties break toward the lowest dimension") {
    Box cube({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    auto [l, r] = half_div(cube);
    CHECK(l.hi[0] == doctest::Approx(0.0));
    CHECK(r.lo[0] == doctest::Approx(0.0));
    CHECK(l.hi[1] == 1.0);  // other dims untouched
}

TEST_CASE("half_div_along restricts the split to the given dimensions") {
    Box b({0.0, 0.0}, {4.0, 1.0});
    auto [l, r] = half_div_along(b, {1});
    CHECK(l.hi[1] == doctest::Approx(0.5));
    CHECK(l.hi[0] == 4.0);
    // degenerate restricted dims fall back to the global longest
    Box c({0.0, 0.0}, {4.0, 0.0});
    auto [cl, cr] = half_div_along(c, {1});
    CHECK(cl.hi[0] == doctest::Approx(2.0));
}

TEST_CASE("intersect") {
    Box a({0.0, 0.0}, {2.0, 2.0});
    Box b({1.0, 1.0}, {3.0, 3.0});
    auto i = intersect(a, b);
    REQUIRE(i);
    CHECK(i->lo == std::vector<double>{1.0, 1.0});
    CHECK(i->hi == std::vector<double>{2.0, 2.0});
    CHECK_FALSE(intersect(a, Box({5.0, 5.0}, {6.0, 6.0})));
}

TEST_CASE("box_difference in one dimension") {
    Box b({0.0}, {10.0});
    auto rest = box_difference(b, {Box({3.0}, {7.0})});
    REQUIRE(rest.size() == 2);
    double total = 0.0;
    for (const auto& r : rest) total += volume(r);
    CHECK(total == doctest::Approx(6.0));
}

TEST_CASE("box_difference covers exactly the complement (Monte Carlo)") {
    Box b({0.0, 0.0}, {2.0, 2.0});
    Box cut({0.0, 0.0}, {1.0, 1.0});  // removes a quarter
    auto rest = box_difference(b, {cut});
    double total = 0.0;
    for (const auto& r : rest) total += volume(r);
    CHECK(total == doctest::Approx(3.0));

    // pieces are interior-disjoint and avoid the cut
    const double frac = oracles::mc_cover_fraction(rest, b, 20000, 42);
    CHECK(frac == doctest::Approx(0.75).epsilon(0.02));
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 2000; ++s) {
        std::vector<double> x = {0.999 * u(rng), 0.999 * u(rng)};  // inside the cut
        for (const auto& r : rest) {
            bool strict = true;
            for (std::size_t d = 0; d < 2; ++d)
                if (x[d] <= r.lo[d] || x[d] >= r.hi[d]) strict = false;
            CHECK_FALSE(strict);
        }
    }
}

TEST_CASE("box_difference with several cuts") {
    std::mt19937_64 rng(9);
    Box b({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    std::vector<Box> cuts = {Box({0.0, 0.0, 0.0}, {0.5, 0.5, 1.0}),
                             Box({0.25, 0.25, 0.25}, {0.75, 0.75, 0.75})};
    auto rest = box_difference(b, cuts);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 5000; ++s) {
        std::vector<double> x = {u(rng), u(rng), u(rng)};
        bool in_cut = false;
        for (const auto& c : cuts)
            if (oracles::contains_point(c, x)) in_cut = true;
        std::size_t hits = 0;
        for (const auto& r : rest)
            if (oracles::contains_point(r, x)) ++hits;
        if (in_cut)
            CHECK(hits <= 1);  // boundary points may touch one remainder
        else
            CHECK(hits >= 1);
    }
}

TEST_CASE("convex_hull_simplex: unit simplex in the plane") {
    auto P = convex_hull_simplex({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    CHECK(P.rows() == 3);
    CHECK(P.vertices.size() == 3);
    // every vertex satisfies all rows; outward orientation rejects the centroid shift
    for (const auto& v : P.vertices)
        for (std::size_t r = 0; r < P.rows(); ++r) {
            double dot = 0.0;
            for (std::size_t d = 0; d < 2; ++d) dot += P.normals[r][d] * v[d];
            CHECK(dot <= P.offsets[r] + 1e-12);
        }
    // interior point strictly satisfies, exterior point violates some row
    auto violated = [&](const std::vector<double>& x) {
        for (std::size_t r = 0; r < P.rows(); ++r) {
            double dot = 0.0;
            for (std::size_t d = 0; d < 2; ++d) dot += P.normals[r][d] * x[d];
            if (dot > P.offsets[r] + 1e-12) return true;
        }
        return false;
    };
    CHECK_FALSE(violated({0.25, 0.25}));
    CHECK(violated({1.0, 1.0}));
    CHECK(violated({-0.1, 0.5}));
}

TEST_CASE("convex_hull_simplex: one dimension degenerates to an interval") {
    auto P = convex_hull_simplex({{2.0}, {-1.0}});
    CHECK(P.rows() == 2);
    bool has_lo = false, has_hi = false;
    for (std::size_t r = 0; r < 2; ++r) {
        if (P.normals[r][0] < 0.0) {
            has_lo = true;
            CHECK(P.offsets[r] / -P.normals[r][0] == doctest::Approx(1.0));  // -x <= 1
        } else {
            has_hi = true;
            CHECK(P.offsets[r] / P.normals[r][0] == doctest::Approx(2.0));  // x <= 2
        }
    }
    CHECK(has_lo);
    CHECK(has_hi);
}

TEST_CASE("convex_hull_simplex rejects affinely dependent vertices") {
    CHECK_THROWS_AS(convex_hull_simplex({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}),
                    DegenerateSimplex);
}

TEST_CASE("inscribed_box: a box-shaped polytope is recovered exactly") {
    Box b({-1.0, 2.0}, {3.0, 5.0});
    auto P = Polytope::from_box(b);
    auto inner = inscribed_box(P);
    REQUIRE(inner);
    for (std::size_t d = 0; d < 2; ++d) {
        CHECK(inner->lo[d] == doctest::Approx(b.lo[d]).epsilon(1e-9));
        CHECK(inner->hi[d] == doctest::Approx(b.hi[d]).epsilon(1e-9));
    }
}

TEST_CASE("inscribed_box: right triangle admits the quarter square") {
    // x >= 0, y >= 0, x + y <= 1: the optimum is [0, 0.5]^2 with area 0.25
    auto P = convex_hull_simplex({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    auto inner = inscribed_box(P);
    REQUIRE(inner);
    CHECK(volume(*inner) == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(inner->lo[0] == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(inner->hi[0] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(inner->hi[1] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("inscribed_box: empty-interior polytope yields nullopt") {
    Polytope P;
    P.normals = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    P.offsets = {0.0, 0.0, 1.0, 0.0};  // x == 0 slab
    CHECK_FALSE(inscribed_box(P));
}

TEST_CASE("inscribed_box stays inside random simplices") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 2;
        std::vector<std::vector<double>> verts(n + 1, std::vector<double>(n));
        for (auto& v : verts)
            for (auto& c : v) c = u(rng);
        Polytope P;
        try {
            P = convex_hull_simplex(verts);
        } catch (const DegenerateSimplex&) {
            continue;
        }
        auto inner = inscribed_box(P);
        if (!inner) continue;
        // all corners of the inscribed box satisfy every facet
        std::vector<std::size_t> idx(n, 0);
        for (std::size_t corner = 0; corner < (std::size_t(1) << n); ++corner) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d)
                x[d] = (corner >> d) & 1 ? inner->hi[d] : inner->lo[d];
            for (std::size_t r = 0; r < P.rows(); ++r) {
                double dot = 0.0;
                for (std::size_t d = 0; d < n; ++d) dot += P.normals[r][d] * x[d];
                CHECK(dot <= P.offsets[r] + 1e-6);
            }
        }
    }
}

TEST_CASE("default_templates: unit directions with uniform pairwise angles") {
    auto t1 = default_templates(1);
    REQUIRE(t1.directions.size() == 2);
    CHECK(t1.directions[0][0] == doctest::Approx(1.0));
    CHECK(t1.directions[1][0] == doctest::Approx(-1.0));

    auto t3 = default_templates(3);
    REQUIRE(t3.directions.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        double nrm = 0.0;
        for (double c : t3.directions[i]) nrm += c * c;
        CHECK(nrm == doctest::Approx(1.0));
        for (std::size_t j = i + 1; j < 4; ++j) {
            double dot = 0.0;
            for (std::size_t d = 0; d < 3; ++d) dot += t3.directions[i][d] * t3.directions[j][d];
            CHECK(dot == doctest::Approx(-1.0 / 3.0));
        }
    }
}

TEST_CASE("axis_templates") {
    auto t = axis_templates(2);
    REQUIRE(t.directions.size() == 3);
    CHECK(t.directions[0] == std::vector<double>{1.0, 0.0});
    CHECK(t.directions[1] == std::vector<double>{0.0, 1.0});
    CHECK(t.directions[2] == std::vector<double>{-1.0, 0.0});
}

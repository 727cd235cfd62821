#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polyar/interval.hpp"

namespace polyar {

// Axis-aligned hyperrectangle, the universal region representation.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.size() != hi.size()) throw std::invalid_argument("Box: dimension mismatch");
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (!(lo[k] <= hi[k])) throw std::invalid_argument("Box: lo > hi");
    }

    std::size_t nvars() const { return lo.size(); }
    double width(std::size_t k) const { return hi[k] - lo[k]; }
    double max_width() const;
    Interval dim(std::size_t k) const { return Interval(lo[k], hi[k]); }
    std::vector<double> center() const;
    bool contains(const std::vector<double>& x, double tol = 0.0) const;
};

double volume(const Box& b);
std::size_t longest_dim(const Box& b);  // ties broken toward the lowest index

// Split at the midpoint of the longest dimension. Requires volume(b) > 0.
std::pair<Box, Box> half_div(const Box& b);

// Like half_div but splits the longest dimension among `dims` (falls back to
// the global longest when `dims` is empty or degenerate along all of them).
std::pair<Box, Box> half_div_along(const Box& b, const std::vector<std::size_t>& dims);

std::optional<Box> intersect(const Box& a, const Box& b);

// closure(b \ union(cut)) as pairwise interior-disjoint boxes. Cut boxes are
// subtracted sequentially in the given order; zero-width slabs are dropped.
std::vector<Box> box_difference(const Box& b, const std::vector<Box>& cut);

// H-representation rows normal * x <= offset, plus the generating vertices.
struct Polytope {
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
    std::vector<std::vector<double>> vertices;

    std::size_t nvars() const { return normals.empty() ? 0 : normals[0].size(); }
    std::size_t rows() const { return normals.size(); }

    static Polytope from_box(const Box& b);
};

struct DegenerateSimplex : std::runtime_error {
    DegenerateSimplex() : std::runtime_error("convex_hull_simplex: affinely dependent vertices") {}
};

// Hull of n+1 affinely independent points in R^n: exactly n+1 outward-oriented
// facets. The 1-dimensional case degenerates to the interval [min, max].
Polytope convex_hull_simplex(const std::vector<std::vector<double>>& vertices);

// Maximum-volume axis-aligned box inscribed in P, via the concave program
// max sum_k log(u_k - l_k) s.t. sum_k (a+_ik u_k - a-_ik l_k) <= c_i.
// nullopt when no positive-width box fits.
std::optional<Box> inscribed_box(const Polytope& P);

// n+1 unit template directions: outward normals of a regular n-simplex.
struct TemplateSet {
    std::vector<std::vector<double>> directions;
};

TemplateSet default_templates(std::size_t n);
TemplateSet axis_templates(std::size_t n);  // +e_1..+e_n and -e_1

} // namespace polyar

#pragma once

#include <optional>
#include <vector>

#include "polyar/geometry.hpp"
#include "polyar/polynomial.hpp"

namespace polyar {

// 1/2 x^T Q x + g^T x + c <= 0. For kind affine, Q is empty.
struct ConvexConstraint {
    enum class Kind { Affine, Quadratic };
    Kind kind = Kind::Affine;
    std::vector<std::vector<double>> Q;  // symmetric, n x n (quadratic only)
    std::vector<double> g;
    double c = 0.0;

    double eval(const std::vector<double>& x) const;
    std::vector<double> grad(const std::vector<double>& x) const;
    std::size_t nvars() const { return g.size(); }

    // From a polynomial of degree <= 2.
    static ConvexConstraint from_quadratic(const Polynomial& p);
};

bool is_psd(const std::vector<std::vector<double>>& H, double tol = 1e-10);
bool is_nsd(const std::vector<std::vector<double>>& H, double tol = 1e-10);

// Best-effort convex feasibility over a box: a returned point satisfies every
// constraint with value <= tol and lies in b. nullopt means "no point found",
// never a proof of infeasibility.
std::optional<std::vector<double>> feasible_point(const std::vector<ConvexConstraint>& cons,
                                                  const Box& b, double tol = 1e-8);

// Infeasibility certificate for a conjunction of convex constraints over a
// box: searches for weights w >= 0 whose combination sum_i w_i f_i has a
// strictly positive lower bound on b (supporting hyperplane at an approximate
// minimizer, so the bound is valid for the exact minimum). Returns true only
// with such a certificate; false is inconclusive.
bool refute_convex(const std::vector<ConvexConstraint>& cons, const Box& b);

// Best-effort min of l^T v subject to one convex constraint and v in b.
std::optional<std::vector<double>> minimize_linear(const std::vector<double>& l,
                                                   const ConvexConstraint& con,
                                                   const Box& b, double tol = 1e-8);

} // namespace polyar

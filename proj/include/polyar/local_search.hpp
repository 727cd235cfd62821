#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polyar/geometry.hpp"
#include "polyar/polynomial.hpp"

namespace polyar {

// Unverified SAT-candidate search: box-clamped Gauss-Newton on the hinge
// residuals max(p_i(x), 0), multi-started from the box center and seeded
// samples. A returned point satisfies every p_i(x) <= tol by exact evaluation.
std::optional<std::vector<double>> local_feasibility_search(
    const std::vector<Polynomial>& cons, const Box& b, std::uint64_t seed,
    int starts = 12, int iters = 120, double tol = 1e-12);

} // namespace polyar

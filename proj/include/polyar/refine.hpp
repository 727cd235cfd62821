#pragma once

#include <cstddef>
#include <vector>

#include "polyar/geometry.hpp"
#include "polyar/polynomial.hpp"

namespace polyar {

// Disjoint certified-negative / certified-positive / ambiguous boxes for one
// polynomial. Membership in neg and pos is certified by interval evaluation.
struct Classification {
    std::vector<Box> neg;
    std::vector<Box> pos;
    std::vector<Box> ambig;
    std::size_t boxes_processed = 0;
    bool budget_exhausted = false;

    double neg_volume() const;
    double pos_volume() const;
    double ambig_volume() const;
};

struct RefineOptions {
    double vol_threshold;          // absolute volume below which a box rests ambiguous
    std::size_t budget = 500;      // boxes processed per input region
    TemplateSet templates;         // n+1 directions for the vertex programs
};

// Alg.-3 style abstraction refinement of p over a set of regions. Every box
// placed in neg (pos) carries an interval certificate p <= 0 (p >= 0);
// inscribed boxes that fail certification are demoted back to the queue.
Classification abst_refin(const std::vector<Box>& neg_regions, const Polynomial& p,
                          const RefineOptions& opt);

} // namespace polyar

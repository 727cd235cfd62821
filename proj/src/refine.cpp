#include "polyar/refine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "polyar/convex.hpp"

namespace polyar {

namespace {

double total_volume(const std::vector<Box>& boxes) {
    double v = 0.0;
    for (const auto& b : boxes) v += volume(b);
    return v;
}

struct VolumeOrder {
    bool operator()(const Box& a, const Box& b) const { return volume(a) < volume(b); }
};

// One vertex program per template direction; all n+1 must succeed.
std::optional<std::vector<std::vector<double>>> template_vertices(
    const ConvexConstraint& con, const Box& b, const TemplateSet& ts) {
    std::vector<std::vector<double>> verts;
    verts.reserve(ts.directions.size());
    for (const auto& d : ts.directions) {
        auto v = minimize_linear(d, con, b);
        if (!v) return std::nullopt;
        verts.push_back(*v);
    }
    return verts;
}

// Inscribed certified box for one side. sign=+1 certifies p <= 0 inside the
// sublevel set of the over-relaxation; sign=-1 certifies p >= 0 via -under.
std::optional<Box> side_cut(const Polynomial& p, const Box& b, const TemplateSet& ts,
                            int sign) {
    Relaxation rel = sign > 0 ? over_relax(p, b) : under_relax(p, b);
    Polynomial side = sign > 0 ? rel.over() : -rel.under();
    // hopeless side: the relaxed sublevel set has no interior in this box
    if (interval_eval(side, b).lo >= 0.0) return std::nullopt;
    ConvexConstraint con = ConvexConstraint::from_quadratic(side);

    auto verts = template_vertices(con, b, ts);
    if (!verts) return std::nullopt;

    std::optional<Box> inner;
    try {
        Polytope hull = convex_hull_simplex(*verts);
        inner = inscribed_box(hull);
    } catch (const DegenerateSimplex&) {
        return std::nullopt;
    }
    if (!inner) return std::nullopt;

    auto clipped = intersect(*inner, b);
    if (!clipped || !(volume(*clipped) > 0.0)) return std::nullopt;

    // certify-or-demote: the relaxation promised the sign, intervals must agree
    Interval range = interval_eval(p, *clipped);
    if (sign > 0 ? range.hi <= 0.0 : range.lo >= 0.0) return clipped;
    return std::nullopt;
}

} // namespace

double Classification::neg_volume() const { return total_volume(neg); }
double Classification::pos_volume() const { return total_volume(pos); }
double Classification::ambig_volume() const { return total_volume(ambig); }

Classification abst_refin(const std::vector<Box>& neg_regions, const Polynomial& p,
                          const RefineOptions& opt) {
    Classification out;
    const auto active = p.active_vars();

    for (const auto& region : neg_regions) {
        std::priority_queue<Box, std::vector<Box>, VolumeOrder> queue;
        queue.push(region);
        std::size_t processed = 0;

        while (!queue.empty()) {
            if (processed >= opt.budget) {
                out.budget_exhausted = true;
                while (!queue.empty()) {
                    out.ambig.push_back(queue.top());
                    queue.pop();
                }
                break;
            }
            Box b = queue.top();
            queue.pop();
            ++processed;

            Interval range = interval_eval(p, b);
            if (range.hi <= 0.0) {
                out.neg.push_back(b);
                continue;
            }
            if (range.lo >= 0.0) {
                out.pos.push_back(b);
                continue;
            }
            if (volume(b) < opt.vol_threshold) {
                out.ambig.push_back(b);
                continue;
            }

            bool cut = false;
            for (int sign : {+1, -1}) {
                auto piece = side_cut(p, b, opt.templates, sign);
                if (!piece) continue;
                (sign > 0 ? out.neg : out.pos).push_back(*piece);
                for (auto& rest : box_difference(b, {*piece})) queue.push(std::move(rest));
                cut = true;
                break;
            }
            if (cut) continue;

            if (b.max_width() <= 0.0) {
                out.ambig.push_back(b);
                continue;
            }
            auto [left, right] = half_div_along(b, active);
            queue.push(std::move(left));
            queue.push(std::move(right));
        }
        out.boxes_processed += processed;
    }
    return out;
}

} // namespace polyar

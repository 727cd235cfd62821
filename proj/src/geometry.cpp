#include "polyar/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace polyar {

double Box::max_width() const {
    double w = 0.0;
    for (std::size_t k = 0; k < nvars(); ++k) w = std::max(w, width(k));
    return w;
}

std::vector<double> Box::center() const {
    std::vector<double> c(nvars());
    for (std::size_t k = 0; k < nvars(); ++k) c[k] = 0.5 * (lo[k] + hi[k]);
    return c;
}

bool Box::contains(const std::vector<double>& x, double tol) const {
    if (x.size() != nvars()) return false;
    for (std::size_t k = 0; k < nvars(); ++k)
        if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) return false;
    return true;
}

double volume(const Box& b) {
    double v = 1.0;
    for (std::size_t k = 0; k < b.nvars(); ++k) v *= b.width(k);
    return v;
}

std::size_t longest_dim(const Box& b) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < b.nvars(); ++k)
        if (b.width(k) > b.width(best)) best = k;
    return best;
}

std::pair<Box, Box> half_div(const Box& b) {
    if (volume(b) <= 0.0) throw std::invalid_argument("half_div: zero-volume box");
    const std::size_t k = longest_dim(b);
    const double mid = 0.5 * (b.lo[k] + b.hi[k]);
    Box left = b, right = b;
    left.hi[k] = mid;
    right.lo[k] = mid;
    return {left, right};
}

std::pair<Box, Box> half_div_along(const Box& b, const std::vector<std::size_t>& dims) {
    std::size_t k = b.nvars();
    double w = 0.0;
    for (std::size_t d : dims)
        if (b.width(d) > w) { w = b.width(d); k = d; }
    if (k == b.nvars() || w <= 0.0) {
        // fall back to the widest dimension overall; the caller guarantees
        // max_width > 0 even when the box is flat along some axes
        k = longest_dim(b);
        if (b.width(k) <= 0.0) throw std::invalid_argument("half_div_along: degenerate box");
    }
    const double mid = 0.5 * (b.lo[k] + b.hi[k]);
    Box left = b, right = b;
    left.hi[k] = mid;
    right.lo[k] = mid;
    return {left, right};
}

std::optional<Box> intersect(const Box& a, const Box& b) {
    if (a.nvars() != b.nvars()) throw std::invalid_argument("intersect: dimension mismatch");
    Box r;
    r.lo.resize(a.nvars());
    r.hi.resize(a.nvars());
    for (std::size_t k = 0; k < a.nvars(); ++k) {
        r.lo[k] = std::max(a.lo[k], b.lo[k]);
        r.hi[k] = std::min(a.hi[k], b.hi[k]);
        if (r.lo[k] > r.hi[k]) return std::nullopt;
    }
    return r;
}

namespace {

bool positive_volume(const Box& b) {
    for (std::size_t k = 0; k < b.nvars(); ++k)
        if (b.width(k) <= 0.0) return false;
    return true;
}

// b \ c as up to 2n slabs (peeling dimension by dimension).
void subtract_one(const Box& b, const Box& c, std::vector<Box>& out) {
    auto overlap = intersect(b, c);
    if (!overlap || !positive_volume(*overlap)) {
        if (positive_volume(b)) out.push_back(b);
        return;
    }
    Box core = b;
    for (std::size_t k = 0; k < b.nvars(); ++k) {
        if (overlap->lo[k] > core.lo[k]) {
            Box slab = core;
            slab.hi[k] = overlap->lo[k];
            if (positive_volume(slab)) out.push_back(slab);
            core.lo[k] = overlap->lo[k];
        }
        if (overlap->hi[k] < core.hi[k]) {
            Box slab = core;
            slab.lo[k] = overlap->hi[k];
            if (positive_volume(slab)) out.push_back(slab);
            core.hi[k] = overlap->hi[k];
        }
    }
    // `core` is now the overlap itself and is discarded.
}

} // namespace

std::vector<Box> box_difference(const Box& b, const std::vector<Box>& cut) {
    std::vector<Box> current;
    if (positive_volume(b)) current.push_back(b);
    for (const Box& c : cut) {
        std::vector<Box> next;
        for (const Box& piece : current) subtract_one(piece, c, next);
        current = std::move(next);
    }
    return current;
}

Polytope Polytope::from_box(const Box& b) {
    const std::size_t n = b.nvars();
    Polytope P;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> up(n, 0.0), down(n, 0.0);
        up[k] = 1.0;
        down[k] = -1.0;
        P.normals.push_back(up);
        P.offsets.push_back(b.hi[k]);
        P.normals.push_back(down);
        P.offsets.push_back(-b.lo[k]);
    }
    // corner vertices (2^n), only stored for small n
    if (n <= 12) {
        for (std::size_t mask = 0; mask < (1u << n); ++mask) {
            std::vector<double> v(n);
            for (std::size_t k = 0; k < n; ++k) v[k] = (mask >> k) & 1 ? b.hi[k] : b.lo[k];
            P.vertices.push_back(v);
        }
    }
    return P;
}

Polytope convex_hull_simplex(const std::vector<std::vector<double>>& vertices) {
    if (vertices.empty()) throw std::invalid_argument("convex_hull_simplex: no vertices");
    const std::size_t n = vertices[0].size();
    if (vertices.size() != n + 1)
        throw std::invalid_argument("convex_hull_simplex: needs exactly n+1 vertices");

    if (n == 1) {
        const double a = std::min(vertices[0][0], vertices[1][0]);
        const double b = std::max(vertices[0][0], vertices[1][0]);
        if (!(b - a > 1e-10)) throw DegenerateSimplex();
        Polytope P;
        P.normals = {{1.0}, {-1.0}};
        P.offsets = {b, -a};
        P.vertices = {{a}, {b}};
        return P;
    }

    // affine-independence check on normalized edge vectors
    Eigen::MatrixXd E(n, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            E(k, static_cast<Eigen::Index>(i)) = vertices[i + 1][k] - vertices[0][k];
            scale = std::max(scale, std::abs(E(k, static_cast<Eigen::Index>(i))));
        }
    if (scale <= 0.0) throw DegenerateSimplex();
    Eigen::MatrixXd En = E / scale;
    if (std::abs(En.determinant()) < 1e-10) throw DegenerateSimplex();

    Polytope P;
    P.vertices = vertices;
    for (std::size_t omit = 0; omit <= n; ++omit) {
        // hyperplane through all vertices except `omit`
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i <= n; ++i)
            if (i != omit) idx.push_back(i);
        Eigen::MatrixXd F(n - 1, n);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                F(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(k)) =
                    vertices[idx[i]][k] - vertices[idx[0]][k];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeFullV);
        Eigen::VectorXd normal = svd.matrixV().col(static_cast<Eigen::Index>(n - 1));
        normal.normalize();
        double offset = 0.0;
        for (std::size_t k = 0; k < n; ++k) offset += normal(static_cast<Eigen::Index>(k)) * vertices[idx[0]][k];
        double omitted = 0.0;
        for (std::size_t k = 0; k < n; ++k) omitted += normal(static_cast<Eigen::Index>(k)) * vertices[omit][k];
        if (omitted > offset) {
            normal = -normal;
            offset = -offset;
        }
        std::vector<double> row(n);
        for (std::size_t k = 0; k < n; ++k) row[k] = normal(static_cast<Eigen::Index>(k));
        P.normals.push_back(row);
        P.offsets.push_back(offset);
    }
    return P;
}

namespace {

// Interior point of an H-rep polytope: vertex centroid when available,
// otherwise a max-min-slack Newton phase.
std::optional<std::vector<double>> interior_point(const Polytope& P) {
    const std::size_t n = P.nvars();
    if (!P.vertices.empty()) {
        std::vector<double> c(n, 0.0);
        for (const auto& v : P.vertices)
            for (std::size_t k = 0; k < n; ++k) c[k] += v[k];
        for (std::size_t k = 0; k < n; ++k) c[k] /= static_cast<double>(P.vertices.size());
        return c;
    }
    // gradient ascent on min slack (rarely used; polytopes here carry vertices)
    std::vector<double> x(n, 0.0);
    for (int it = 0; it < 2000; ++it) {
        double worst = 1e300;
        std::size_t wi = 0;
        for (std::size_t i = 0; i < P.rows(); ++i) {
            double s = P.offsets[i];
            for (std::size_t k = 0; k < n; ++k) s -= P.normals[i][k] * x[k];
            if (s < worst) { worst = s; wi = i; }
        }
        if (worst > 1e-6) return x;
        for (std::size_t k = 0; k < n; ++k) x[k] -= 1e-2 * P.normals[wi][k];
    }
    return std::nullopt;
}

} // namespace

std::optional<Box> inscribed_box(const Polytope& P) {
    const std::size_t n = P.nvars();
    const std::size_t m = P.rows();
    if (n == 0 || m == 0) return std::nullopt;

    // Axis-aligned rows only: the program separates per dimension and the
    // optimum is the H-rep box itself.
    bool axis_aligned = true;
    for (std::size_t i = 0; i < m && axis_aligned; ++i) {
        std::size_t nonzero = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (P.normals[i][k] != 0.0) ++nonzero;
        if (nonzero != 1) axis_aligned = false;
    }
    if (axis_aligned) {
        std::vector<double> lo(n, -1e300), hi(n, 1e300);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const double a = P.normals[i][k];
                if (a > 0.0) hi[k] = std::min(hi[k], P.offsets[i] / a);
                else if (a < 0.0) lo[k] = std::max(lo[k], P.offsets[i] / a);
            }
        for (std::size_t k = 0; k < n; ++k)
            if (!(hi[k] > lo[k]) || !std::isfinite(lo[k]) || !std::isfinite(hi[k]))
                return std::nullopt;
        return Box(lo, hi);
    }

    auto xin = interior_point(P);
    if (!xin) return std::nullopt;

    // row slacks at the interior point
    std::vector<double> slack(m);
    double min_slack = 1e300;
    std::vector<double> abs_row_sum(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = P.offsets[i];
        for (std::size_t k = 0; k < n; ++k) {
            s -= P.normals[i][k] * (*xin)[k];
            abs_row_sum[i] += std::abs(P.normals[i][k]);
        }
        slack[i] = s;
        min_slack = std::min(min_slack, s);
    }
    if (min_slack <= 1e-12) return std::nullopt;

    // strictly feasible start: tiny cube around the interior point
    double delta = 1e300;
    for (std::size_t i = 0; i < m; ++i)
        if (abs_row_sum[i] > 0.0) delta = std::min(delta, slack[i] / abs_row_sum[i]);
    delta *= 0.5;
    if (!(delta > 0.0) || !std::isfinite(delta)) return std::nullopt;

    // variables z = (l_1..l_n, u_1..u_n); maximize sum log(u-l) with barrier
    // on the rows sum(a+_ik u_k - a-_ik l_k) <= c_i.
    const std::size_t dim = 2 * n;
    Eigen::VectorXd z(dim);
    for (std::size_t k = 0; k < n; ++k) {
        z(static_cast<Eigen::Index>(k)) = (*xin)[k] - delta;
        z(static_cast<Eigen::Index>(n + k)) = (*xin)[k] + delta;
    }

    // affine rows in z-space: row_i . z <= c_i
    Eigen::MatrixXd Arows(m, dim);
    Arows.setZero();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double a = P.normals[i][k];
            Arows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = -std::max(-a, 0.0);
            Arows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n + k)) = std::max(a, 0.0);
        }
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(P.offsets.data(), static_cast<Eigen::Index>(m));

    double t = 1.0;
    const double mu = 10.0;
    const double gap_target = 1e-10;
    for (int outer = 0; outer < 60; ++outer) {
        // Newton on f(z) = -t*sum log(u-l) - sum log(c - A z)
        for (int it = 0; it < 80; ++it) {
            Eigen::VectorXd s = c - Arows * z;
            Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
            Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(dim, dim);
            for (std::size_t k = 0; k < n; ++k) {
                const double w = z(static_cast<Eigen::Index>(n + k)) - z(static_cast<Eigen::Index>(k));
                const double iw = 1.0 / w;
                grad(static_cast<Eigen::Index>(k)) += t * iw;
                grad(static_cast<Eigen::Index>(n + k)) -= t * iw;
                const double iw2 = t * iw * iw;
                Hm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += iw2;
                Hm(static_cast<Eigen::Index>(n + k), static_cast<Eigen::Index>(n + k)) += iw2;
                Hm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n + k)) -= iw2;
                Hm(static_cast<Eigen::Index>(n + k), static_cast<Eigen::Index>(k)) -= iw2;
            }
            for (std::size_t i = 0; i < m; ++i) {
                const double is = 1.0 / s(static_cast<Eigen::Index>(i));
                grad += is * Arows.row(static_cast<Eigen::Index>(i)).transpose();
                Hm += (is * is) * Arows.row(static_cast<Eigen::Index>(i)).transpose() *
                      Arows.row(static_cast<Eigen::Index>(i));
            }
            Eigen::VectorXd step = Hm.ldlt().solve(-grad);
            const double lambda2 = -grad.dot(step);
            if (!(lambda2 > 1e-16) || !step.allFinite()) break;
            // backtracking keeping strict feasibility
            double alpha = 1.0;
            auto ok = [&](const Eigen::VectorXd& zz) {
                for (std::size_t k = 0; k < n; ++k)
                    if (!(zz(static_cast<Eigen::Index>(n + k)) - zz(static_cast<Eigen::Index>(k)) > 0.0))
                        return false;
                Eigen::VectorXd ss = c - Arows * zz;
                return (ss.array() > 0.0).all();
            };
            auto fval = [&](const Eigen::VectorXd& zz) {
                double f = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    f -= t * std::log(zz(static_cast<Eigen::Index>(n + k)) - zz(static_cast<Eigen::Index>(k)));
                Eigen::VectorXd ss = c - Arows * zz;
                for (std::size_t i = 0; i < m; ++i) f -= std::log(ss(static_cast<Eigen::Index>(i)));
                return f;
            };
            const double f0 = fval(z);
            while (alpha > 1e-12) {
                Eigen::VectorXd zt = z + alpha * step;
                if (ok(zt) && fval(zt) <= f0 - 0.25 * alpha * lambda2) { z = zt; break; }
                alpha *= 0.5;
            }
            if (alpha <= 1e-12) break;
            if (lambda2 < 1e-14) break;
        }
        if (static_cast<double>(m) / t < gap_target) break;
        t *= mu;
    }

    std::vector<double> lo(n), hi(n);
    for (std::size_t k = 0; k < n; ++k) {
        lo[k] = z(static_cast<Eigen::Index>(k));
        hi[k] = z(static_cast<Eigen::Index>(n + k));
        if (!(hi[k] > lo[k])) return std::nullopt;
    }
    return Box(lo, hi);
}

TemplateSet default_templates(std::size_t n) {
    if (n == 0) throw std::invalid_argument("default_templates: n must be >= 1");
    TemplateSet T;
    if (n == 1) {
        T.directions = {{1.0}, {-1.0}};
        return T;
    }
    // regular-simplex directions: project e_i - 1/(n+1) from R^{n+1} onto the
    // hyperplane orthogonal to the all-ones vector
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n + 1));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd basis = Q.rightCols(static_cast<Eigen::Index>(n));  // orthonormal basis of ones^perp
    for (std::size_t i = 0; i <= n; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n + 1),
                                                      -1.0 / static_cast<double>(n + 1));
        v(static_cast<Eigen::Index>(i)) += 1.0;
        Eigen::VectorXd d = basis.transpose() * v;
        d.normalize();
        std::vector<double> dir(n);
        for (std::size_t k = 0; k < n; ++k) dir[k] = d(static_cast<Eigen::Index>(k));
        T.directions.push_back(dir);
    }
    return T;
}

TemplateSet axis_templates(std::size_t n) {
    if (n == 0) throw std::invalid_argument("axis_templates: n must be >= 1");
    TemplateSet T;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> d(n, 0.0);
        d[k] = 1.0;
        T.directions.push_back(d);
    }
    std::vector<double> d(n, 0.0);
    d[0] = -1.0;
    T.directions.push_back(d);
    return T;
}

} // namespace polyar

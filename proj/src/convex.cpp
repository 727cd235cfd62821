#include "polyar/convex.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace polyar {

namespace {

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& M) {
    const auto r = static_cast<Eigen::Index>(M.size());
    const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(M[0].size());
    Eigen::MatrixXd E(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) E(i, j) = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return E;
}

} // namespace

double ConvexConstraint::eval(const std::vector<double>& x) const {
    double v = c;
    for (std::size_t k = 0; k < g.size(); ++k) v += g[k] * x[k];
    if (kind == Kind::Quadratic) {
        double q = 0.0;
        for (std::size_t i = 0; i < Q.size(); ++i)
            for (std::size_t j = 0; j < Q.size(); ++j) q += x[i] * Q[i][j] * x[j];
        v += 0.5 * q;
    }
    return v;
}

std::vector<double> ConvexConstraint::grad(const std::vector<double>& x) const {
    std::vector<double> gr = g;
    if (kind == Kind::Quadratic)
        for (std::size_t i = 0; i < Q.size(); ++i)
            for (std::size_t j = 0; j < Q.size(); ++j) gr[i] += Q[i][j] * x[j];
    return gr;
}

ConvexConstraint ConvexConstraint::from_quadratic(const Polynomial& p) {
    if (p.degree() > 2)
        throw std::invalid_argument("ConvexConstraint::from_quadratic: degree > 2");
    const std::size_t n = p.nvars();
    ConvexConstraint con;
    con.g.assign(n, 0.0);
    con.c = 0.0;
    bool quadratic = p.degree() == 2;
    con.kind = quadratic ? Kind::Quadratic : Kind::Affine;
    if (quadratic) con.Q.assign(n, std::vector<double>(n, 0.0));
    for (const auto& [e, coeff] : p.terms()) {
        std::vector<std::size_t> vars;
        for (std::size_t k = 0; k < n; ++k)
            for (std::uint32_t j = 0; j < e[k]; ++j) vars.push_back(k);
        if (vars.empty()) {
            con.c += coeff;
        } else if (vars.size() == 1) {
            con.g[vars[0]] += coeff;
        } else {  // vars.size() == 2
            const std::size_t i = vars[0], j = vars[1];
            if (i == j) {
                con.Q[i][i] += 2.0 * coeff;  // 1/2 x^T Q x convention
            } else {
                con.Q[i][j] += coeff;
                con.Q[j][i] += coeff;
            }
        }
    }
    return con;
}

bool is_psd(const std::vector<std::vector<double>>& H, double tol) {
    const std::size_t n = H.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (H[i].size() != n) throw std::invalid_argument("is_psd: non-square matrix");
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(H[i][j] - H[j][i]) > 1e-9 * (1.0 + std::abs(H[i][j])))
                throw std::invalid_argument("is_psd: non-symmetric matrix");
    }
    if (n == 0) return true;
    Eigen::MatrixXd M = to_eigen(H);
    M.diagonal().array() += tol;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success) return false;
    return (ldlt.vectorD().array() >= 0.0).all();
}

bool is_nsd(const std::vector<std::vector<double>>& H, double tol) {
    std::vector<std::vector<double>> neg(H.size(), std::vector<double>(H.size(), 0.0));
    for (std::size_t i = 0; i < H.size(); ++i)
        for (std::size_t j = 0; j < H.size(); ++j) neg[i][j] = -H[i][j];
    return is_psd(neg, tol);
}

namespace {

constexpr double kMinWidth = 1e-12;

struct BarrierBox {
    std::vector<double> lo, hi;
    explicit BarrierBox(const Box& b) : lo(b.lo), hi(b.hi) {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (hi[k] - lo[k] < kMinWidth) {
                const double m = 0.5 * (lo[k] + hi[k]);
                lo[k] = m - 0.5 * kMinWidth;
                hi[k] = m + 0.5 * kMinWidth;
            }
    }
};

void clamp_to(const Box& b, std::vector<double>& x) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] < b.lo[k]) x[k] = b.lo[k];
        if (x[k] > b.hi[k]) x[k] = b.hi[k];
    }
}

} // namespace

// Phase-I barrier: minimize s subject to f_i(x) <= s over the box. Runs to
// (near) optimality so that returned points are well-centered.
std::optional<std::vector<double>> feasible_point(const std::vector<ConvexConstraint>& cons,
                                                  const Box& b, double tol) {
    const std::size_t n = b.nvars();
    BarrierBox bb(b);
    const std::size_t dim = n + 1;  // (x, s)

    std::vector<double> x0 = b.center();
    double s0 = 0.0;
    for (const auto& con : cons) s0 = std::max(s0, con.eval(x0));
    s0 += std::max(1.0, 0.1 * std::abs(s0));

    Eigen::VectorXd z(dim);
    for (std::size_t k = 0; k < n; ++k) z(static_cast<Eigen::Index>(k)) = x0[k];
    z(static_cast<Eigen::Index>(n)) = s0;

    const std::size_t m = cons.size();
    auto eval_parts = [&](const Eigen::VectorXd& zz, std::vector<double>& fx) {
        std::vector<double> xv(n);
        for (std::size_t k = 0; k < n; ++k) xv[k] = zz(static_cast<Eigen::Index>(k));
        fx.resize(m);
        for (std::size_t i = 0; i < m; ++i) fx[i] = cons[i].eval(xv);
        return xv;
    };
    auto strictly_ok = [&](const Eigen::VectorXd& zz) {
        std::vector<double> fx;
        eval_parts(zz, fx);
        const double s = zz(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < m; ++i)
            if (!(s - fx[i] > 0.0)) return false;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = zz(static_cast<Eigen::Index>(k));
            if (!(v - bb.lo[k] > 0.0) || !(bb.hi[k] - v > 0.0)) return false;
        }
        return true;
    };

    // widen s until strictly feasible (box center is strictly inside by construction)
    for (int tries = 0; tries < 60 && !strictly_ok(z); ++tries)
        z(static_cast<Eigen::Index>(n)) = z(static_cast<Eigen::Index>(n)) * 2.0 + 1.0;
    if (!strictly_ok(z)) return std::nullopt;

    double t = 1.0;
    for (int outer = 0; outer < 40; ++outer) {
        for (int it = 0; it < 60; ++it) {
            std::vector<double> fx;
            std::vector<double> xv = eval_parts(z, fx);
            const double s = z(static_cast<Eigen::Index>(n));

            Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
            Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(dim, dim);
            grad(static_cast<Eigen::Index>(n)) = t;

            for (std::size_t i = 0; i < m; ++i) {
                const double slack = s - fx[i];
                const double is = 1.0 / slack;
                auto gi = cons[i].grad(xv);
                Eigen::VectorXd gz = Eigen::VectorXd::Zero(dim);
                for (std::size_t k = 0; k < n; ++k) gz(static_cast<Eigen::Index>(k)) = gi[k];
                gz(static_cast<Eigen::Index>(n)) = -1.0;
                grad += is * gz;
                Hm += (is * is) * gz * gz.transpose();
                if (cons[i].kind == ConvexConstraint::Kind::Quadratic) {
                    for (std::size_t a = 0; a < n; ++a)
                        for (std::size_t c2 = 0; c2 < n; ++c2)
                            Hm(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c2)) +=
                                is * cons[i].Q[a][c2];
                }
            }
            for (std::size_t k = 0; k < n; ++k) {
                const double v = z(static_cast<Eigen::Index>(k));
                const double il = 1.0 / (v - bb.lo[k]);
                const double ih = 1.0 / (bb.hi[k] - v);
                grad(static_cast<Eigen::Index>(k)) += -il + ih;
                Hm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += il * il + ih * ih;
            }
            Hm.diagonal().array() += 1e-12;

            Eigen::VectorXd step = Hm.ldlt().solve(-grad);
            const double lambda2 = -grad.dot(step);
            if (!step.allFinite() || !(lambda2 > 1e-18)) break;

            auto fval = [&](const Eigen::VectorXd& zz) {
                std::vector<double> ff;
                eval_parts(zz, ff);
                const double ss = zz(static_cast<Eigen::Index>(n));
                double f = t * ss;
                for (std::size_t i = 0; i < m; ++i) f -= std::log(ss - ff[i]);
                for (std::size_t k = 0; k < n; ++k) {
                    const double v = zz(static_cast<Eigen::Index>(k));
                    f -= std::log(v - bb.lo[k]) + std::log(bb.hi[k] - v);
                }
                return f;
            };
            const double f0 = fval(z);
            double alpha = 1.0;
            bool moved = false;
            while (alpha > 1e-14) {
                Eigen::VectorXd zt = z + alpha * step;
                if (strictly_ok(zt) && fval(zt) <= f0 - 0.25 * alpha * lambda2) {
                    z = zt;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            if (lambda2 < 1e-14) break;
        }
        if (static_cast<double>(m + 2 * n) / t < 1e-10) break;
        t *= 10.0;
    }

    std::vector<double> result(n);
    for (std::size_t k = 0; k < n; ++k) result[k] = z(static_cast<Eigen::Index>(k));
    clamp_to(b, result);
    for (const auto& con : cons)
        if (con.eval(result) > tol) return std::nullopt;
    return result;
}

// Multiplicative-weights search for an infeasibility certificate: if some
// nonnegative combination q = sum_i w_i f_i has min over b strictly > 0, no
// point of b satisfies every f_i <= 0. The inner minimization is projected
// gradient; its approximate minimizer x* still yields a valid lower bound via
// the supporting hyperplane q(x) >= q(x*) + grad q(x*)^T (x - x*), minimized
// coordinate-wise over the box.
bool refute_convex(const std::vector<ConvexConstraint>& cons, const Box& b) {
    const std::size_t n = b.nvars();
    const std::size_t m = cons.size();
    if (m == 0 || n == 0) return false;

    std::vector<double> w(m, 1.0 / static_cast<double>(m));
    std::vector<double> x = b.center();

    for (int round = 0; round < 24; ++round) {
        Eigen::MatrixXd Qw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n));
        Eigen::VectorXd gw = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        double cw = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (cons[i].kind == ConvexConstraint::Kind::Quadratic)
                Qw += w[i] * to_eigen(cons[i].Q);
            for (std::size_t k = 0; k < n; ++k)
                gw(static_cast<Eigen::Index>(k)) += w[i] * cons[i].g[k];
            cw += w[i] * cons[i].c;
        }
        const double lip = std::max(1.0, Qw.cwiseAbs().rowwise().sum().maxCoeff());

        Eigen::VectorXd xv(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) xv(static_cast<Eigen::Index>(k)) = x[k];
        for (int it = 0; it < 400; ++it) {
            Eigen::VectorXd gr = Qw * xv + gw;
            Eigen::VectorXd xn = xv - gr / lip;
            for (std::size_t k = 0; k < n; ++k) {
                auto kk = static_cast<Eigen::Index>(k);
                if (xn(kk) < b.lo[k]) xn(kk) = b.lo[k];
                if (xn(kk) > b.hi[k]) xn(kk) = b.hi[k];
            }
            const double move = (xn - xv).lpNorm<Eigen::Infinity>();
            xv = xn;
            if (move < 1e-14 * (1.0 + xv.lpNorm<Eigen::Infinity>())) break;
        }
        for (std::size_t k = 0; k < n; ++k) x[k] = xv(static_cast<Eigen::Index>(k));

        const double qx = 0.5 * xv.dot(Qw * xv) + gw.dot(xv) + cw;
        Eigen::VectorXd gr = Qw * xv + gw;
        double lower = qx;
        for (std::size_t k = 0; k < n; ++k) {
            const double gd = gr(static_cast<Eigen::Index>(k));
            lower += std::min(gd * (b.lo[k] - x[k]), gd * (b.hi[k] - x[k]));
        }
        if (std::isfinite(lower) && lower > 1e-9 * (1.0 + std::abs(qx))) return true;

        std::vector<double> fx(m);
        double scale = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            fx[i] = cons[i].eval(x);
            scale = std::max(scale, std::abs(fx[i]));
        }
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            w[i] *= std::exp(0.8 * fx[i] / (1.0 + scale));
            total += w[i];
        }
        if (!(total > 0.0) || !std::isfinite(total)) return false;
        for (auto& wi : w) wi /= total;
    }
    return false;
}

std::optional<std::vector<double>> minimize_linear(const std::vector<double>& l,
                                                   const ConvexConstraint& con,
                                                   const Box& b, double tol) {
    const std::size_t n = b.nvars();
    if (l.size() != n) throw std::invalid_argument("minimize_linear: dimension mismatch");
    BarrierBox bb(b);

    // well-centered strictly feasible start
    auto start = feasible_point({con}, b, tol);
    if (!start) return std::nullopt;

    Eigen::VectorXd z(n);
    for (std::size_t k = 0; k < n; ++k) z(static_cast<Eigen::Index>(k)) = (*start)[k];

    auto con_val = [&](const Eigen::VectorXd& zz) {
        std::vector<double> xv(n);
        for (std::size_t k = 0; k < n; ++k) xv[k] = zz(static_cast<Eigen::Index>(k));
        return con.eval(xv);
    };
    auto strictly_ok = [&](const Eigen::VectorXd& zz) {
        if (!(con_val(zz) < 0.0)) return false;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = zz(static_cast<Eigen::Index>(k));
            if (!(v - bb.lo[k] > 0.0) || !(bb.hi[k] - v > 0.0)) return false;
        }
        return true;
    };

    if (!strictly_ok(z)) {
        // zero-interior feasible set: the centered phase-I point is the best
        // available candidate
        std::vector<double> res = *start;
        clamp_to(b, res);
        if (con.eval(res) <= tol) return res;
        return std::nullopt;
    }

    Eigen::VectorXd lv(n);
    for (std::size_t k = 0; k < n; ++k) lv(static_cast<Eigen::Index>(k)) = l[k];

    double t = 1.0;
    const std::size_t m_total = 1 + 2 * n;
    double diam = b.max_width();
    if (diam <= 0.0) diam = 1.0;
    for (int outer = 0; outer < 60; ++outer) {
        for (int it = 0; it < 60; ++it) {
            std::vector<double> xv(n);
            for (std::size_t k = 0; k < n; ++k) xv[k] = z(static_cast<Eigen::Index>(k));
            const double fv = con.eval(xv);
            auto gc = con.grad(xv);

            Eigen::VectorXd grad = t * lv;
            Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(n, n);
            const double is = 1.0 / (-fv);
            Eigen::VectorXd gz(n);
            for (std::size_t k = 0; k < n; ++k) gz(static_cast<Eigen::Index>(k)) = gc[k];
            grad += is * gz;
            Hm += (is * is) * gz * gz.transpose();
            if (con.kind == ConvexConstraint::Kind::Quadratic)
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t c2 = 0; c2 < n; ++c2)
                        Hm(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c2)) +=
                            is * con.Q[a][c2];
            for (std::size_t k = 0; k < n; ++k) {
                const double v = z(static_cast<Eigen::Index>(k));
                const double il = 1.0 / (v - bb.lo[k]);
                const double ih = 1.0 / (bb.hi[k] - v);
                grad(static_cast<Eigen::Index>(k)) += -il + ih;
                Hm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += il * il + ih * ih;
            }
            Hm.diagonal().array() += 1e-12;

            Eigen::VectorXd step = Hm.ldlt().solve(-grad);
            const double lambda2 = -grad.dot(step);
            if (!step.allFinite() || !(lambda2 > 1e-18)) break;

            auto fval = [&](const Eigen::VectorXd& zz) {
                double f = t * lv.dot(zz) - std::log(-con_val(zz));
                for (std::size_t k = 0; k < n; ++k) {
                    const double v = zz(static_cast<Eigen::Index>(k));
                    f -= std::log(v - bb.lo[k]) + std::log(bb.hi[k] - v);
                }
                return f;
            };
            const double f0 = fval(z);
            double alpha = 1.0;
            bool moved = false;
            while (alpha > 1e-14) {
                Eigen::VectorXd zt = z + alpha * step;
                if (strictly_ok(zt) && fval(zt) <= f0 - 0.25 * alpha * lambda2) {
                    z = zt;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            if (lambda2 < 1e-16) break;
        }
        if (static_cast<double>(m_total) / t < 1e-7 * diam) break;
        t *= 10.0;
    }

    std::vector<double> result(n);
    for (std::size_t k = 0; k < n; ++k) result[k] = z(static_cast<Eigen::Index>(k));
    clamp_to(b, result);
    if (con.eval(result) > tol) return std::nullopt;
    return result;
}

} // namespace polyar

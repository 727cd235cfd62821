#include "polyar/local_search.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace polyar {

namespace {

void clamp_to(const Box& b, std::vector<double>& x) {
    for (std::size_t k = 0; k < x.size(); ++k)
        x[k] = std::clamp(x[k], b.lo[k], b.hi[k]);
}

double max_violation(const std::vector<Polynomial>& cons, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& p : cons) worst = std::max(worst, p.eval(x));
    return worst;
}

// Merit matching the Gauss-Newton direction: 0.5 sum max(p_i, 0)^2.
double hinge_ssq(const std::vector<Polynomial>& cons, const std::vector<double>& x) {
    double s = 0.0;
    for (const auto& p : cons) {
        const double v = std::max(p.eval(x), 0.0);
        s += v * v;
    }
    return 0.5 * s;
}

} // namespace

std::optional<std::vector<double>> local_feasibility_search(
    const std::vector<Polynomial>& cons, const Box& b, std::uint64_t seed,
    int starts, int iters, double tol) {
    const std::size_t n = b.nvars();
    const std::size_t m = cons.size();
    if (m == 0) return b.center();

    std::vector<std::vector<Polynomial>> grads;
    grads.reserve(m);
    for (const auto& p : cons) grads.push_back(gradient(p));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::optional<std::vector<double>> best;
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x(n);
        if (s == 0) {
            x = b.center();
        } else {
            for (std::size_t k = 0; k < n; ++k)
                x[k] = b.lo[k] + unit(rng) * (b.hi[k] - b.lo[k]);
        }

        double lambda = 1e-4;
        double cur = hinge_ssq(cons, x);
        for (int it = 0; it < iters && max_violation(cons, x) > tol; ++it) {
            // Gauss-Newton on residuals r_i = max(p_i, 0)
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                      static_cast<Eigen::Index>(n));
            Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
            bool any_active = false;
            for (std::size_t i = 0; i < m; ++i) {
                const double v = cons[i].eval(x);
                if (v <= 0.0) continue;
                any_active = true;
                r(static_cast<Eigen::Index>(i)) = v;
                for (std::size_t k = 0; k < n; ++k)
                    J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                        grads[i][k].eval(x);
            }
            if (!any_active) break;

            Eigen::MatrixXd JtJ = J.transpose() * J;
            JtJ.diagonal().array() += lambda;
            Eigen::VectorXd step = JtJ.ldlt().solve(-(J.transpose() * r));
            if (!step.allFinite()) break;

            std::vector<double> xt(n);
            bool improved = false;
            double alpha = 1.0;
            for (int ls = 0; ls < 20; ++ls) {
                for (std::size_t k = 0; k < n; ++k)
                    xt[k] = x[k] + alpha * step(static_cast<Eigen::Index>(k));
                clamp_to(b, xt);
                const double nv = hinge_ssq(cons, xt);
                if (nv < cur) {
                    x = xt;
                    cur = nv;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (improved) {
                lambda = std::max(lambda * 0.5, 1e-10);
            } else {
                lambda *= 10.0;
                if (lambda > 1e8) break;
            }
        }
        if (max_violation(cons, x) <= tol) {
            best = x;
            break;
        }
    }
    return best;
}

} // namespace polyar

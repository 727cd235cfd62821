#include "polyar/bench.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace polyar::bench {

namespace {

std::size_t poly_nvars(const PolyMatrix& M) {
    if (M.empty() || M[0].empty()) throw std::invalid_argument("empty matrix");
    return M[0][0].nvars();
}

PolyMatrix poly_mul(const PolyMatrix& A, const PolyMatrix& B) {
    const std::size_t n = A.size(), m = B[0].size(), k = B.size();
    const std::size_t nv = poly_nvars(A);
    PolyMatrix R(n, std::vector<Polynomial>(m, Polynomial(nv)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < k; ++l) R[i][j] += A[i][l] * B[l][j];
    return R;
}

Polynomial poly_trace(const PolyMatrix& M) {
    Polynomial t(poly_nvars(M));
    for (std::size_t i = 0; i < M.size(); ++i) t += M[i][i];
    return t;
}

Eigen::MatrixXd to_eigen(const Matrix& M) {
    Eigen::MatrixXd E(static_cast<Eigen::Index>(M.size()),
                      static_cast<Eigen::Index>(M.empty() ? 0 : M[0].size()));
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M[i].size(); ++j)
            E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M[i][j];
    return E;
}

Matrix from_eigen(const Eigen::MatrixXd& E) {
    Matrix M(static_cast<std::size_t>(E.rows()),
             std::vector<double>(static_cast<std::size_t>(E.cols())));
    for (Eigen::Index i = 0; i < E.rows(); ++i)
        for (Eigen::Index j = 0; j < E.cols(); ++j)
            M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = E(i, j);
    return M;
}

} // namespace

std::vector<Polynomial> char_poly_symbolic(const PolyMatrix& M) {
    const std::size_t n = M.size();
    for (const auto& row : M)
        if (row.size() != n) throw std::invalid_argument("char_poly_symbolic: non-square");
    const std::size_t nv = poly_nvars(M);

    std::vector<Polynomial> c(n + 1, Polynomial(nv));
    c[n] = Polynomial::constant(nv, 1.0);

    PolyMatrix Mk(n, std::vector<Polynomial>(n, Polynomial(nv)));  // zero
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{n-k+1} I
        Mk = k == 1 ? Mk : poly_mul(M, Mk);
        for (std::size_t i = 0; i < n; ++i) Mk[i][i] += c[n - k + 1];
        Polynomial tr = poly_trace(poly_mul(M, Mk));
        c[n - k] = (-1.0 / static_cast<double>(k)) * tr;
    }
    return c;
}

std::vector<Polynomial> routh_hurwitz(const std::vector<Polynomial>& a) {
    const std::size_t deg = a.size();
    if (deg < 2 || deg > 5) throw std::invalid_argument("routh_hurwitz: degree must be 2..5");
    std::vector<Polynomial> g;
    switch (deg) {
        case 2:
            g = {-a[1], -a[0]};
            break;
        case 3:
            g = {-a[2], -a[0], -(a[2] * a[1] - a[0])};
            break;
        case 4: {
            Polynomial b1 = a[3] * a[2] - a[1];
            g = {-a[3], -a[0], -b1, -(b1 * a[1] - a[3] * a[3] * a[0])};
            break;
        }
        case 5: {
            // polynomialized first-column entries of the Routh array,
            // denominators cleared (sign-preserving given the earlier rows)
            Polynomial b1 = a[4] * a[3] - a[2];
            Polynomial b2 = a[4] * a[1] - a[0];
            Polynomial c1 = b1 * a[2] - a[4] * b2;
            Polynomial d1 = c1 * b2 - b1 * b1 * a[0];
            g = {-a[4], -b1, -c1, -d1, -a[0]};
            break;
        }
    }
    return g;
}

Matrix discrete_lyapunov(const Matrix& A, const Matrix& Q) {
    const Eigen::MatrixXd Ae = to_eigen(A);
    const Eigen::MatrixXd Qe = to_eigen(Q);
    if (Ae.rows() != Ae.cols() || Qe.rows() != Ae.rows() || Qe.cols() != Ae.cols())
        throw std::invalid_argument("discrete_lyapunov: dimension mismatch");

    Eigen::MatrixXd P = Qe;
    Eigen::MatrixXd term = Qe;
    const double q_norm = Qe.lpNorm<Eigen::Infinity>();
    for (int k = 0; k < 200000; ++k) {
        term = Ae.transpose() * term * Ae;
        const double tn = term.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(tn) || tn > 1e12 * (q_norm + 1.0))
            throw std::runtime_error("discrete_lyapunov: series diverges (spectral radius >= 1)");
        P += term;
        if (tn <= 1e-16 * P.lpNorm<Eigen::Infinity>()) break;
    }
    const double residual = (Ae.transpose() * P * Ae - P + Qe).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-10 * (1.0 + P.lpNorm<Eigen::Infinity>())))
        throw std::runtime_error("discrete_lyapunov: residual did not converge");
    return from_eigen(P);
}

// --- Static output feedback ---------------------------------------------------

SofProblem gen_sof(SofInstance inst) {
    if (inst.n_a < 2 || inst.n_a > 5)
        throw std::invalid_argument("gen_sof: n_a must be in 2..5");
    if (inst.k_lo >= inst.k_hi) throw std::invalid_argument("gen_sof: empty K range");
    if (inst.example5_structure && (inst.n_b < 2 || inst.n_c < 3))
        throw std::invalid_argument("gen_sof: structural constraints need n_b >= 2, n_c >= 3");

    std::mt19937_64 rng(inst.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto sample = [&](std::size_t r, std::size_t c) {
        Matrix M(r, std::vector<double>(c));
        for (auto& row : M)
            for (auto& v : row) v = nd(rng);
        return M;
    };
    inst.A = sample(inst.n_a, inst.n_a);
    inst.B = sample(inst.n_a, inst.n_b);
    inst.C = sample(inst.n_c, inst.n_a);

    const std::size_t nv = inst.n_b * inst.n_c;  // K entries, row-major
    auto kvar = [&](std::size_t p, std::size_t q) {
        return Polynomial::variable(nv, p * inst.n_c + q);
    };

    // closed loop A + B K C with symbolic K
    PolyMatrix M(inst.n_a, std::vector<Polynomial>(inst.n_a, Polynomial(nv)));
    for (std::size_t i = 0; i < inst.n_a; ++i)
        for (std::size_t j = 0; j < inst.n_a; ++j) {
            M[i][j] += Polynomial::constant(nv, inst.A[i][j]);
            for (std::size_t p = 0; p < inst.n_b; ++p)
                for (std::size_t q = 0; q < inst.n_c; ++q)
                    M[i][j] += (inst.B[i][p] * inst.C[q][j]) * kvar(p, q);
        }

    std::vector<Polynomial> stability;
    if (inst.n_a == 5) {
        // The cleared Routh polynomials of a quintic reach degree 11 and tens
        // of millions of monomials in 16 gain variables, so we fall back to a
        // strict diagonal-dominance condition per row, smoothing |m| via
        // |m| <= (m^2 + 1)/2. Any satisfying K keeps every Gershgorin disc of
        // A + BKC in the open left half plane, so SAT models still stabilize.
        for (std::size_t i = 0; i < inst.n_a; ++i) {
            Polynomial gi = M[i][i];
            for (std::size_t j = 0; j < inst.n_a; ++j)
                if (j != i) gi += 0.5 * (M[i][j] * M[i][j]);
            gi.add_term(Polynomial::Exponents(nv, 0),
                        0.5 * static_cast<double>(inst.n_a - 1) + inst.epsilon);
            stability.push_back(std::move(gi));
        }
    } else {
        auto coeffs = char_poly_symbolic(M);
        coeffs.pop_back();  // drop the leading 1
        auto g = routh_hurwitz(coeffs);
        stability.reserve(g.size());
        for (auto& gi : g) {
            gi.add_term(Polynomial::Exponents(nv, 0), inst.epsilon);  // g <= -eps
            stability.push_back(std::move(gi));
        }
    }

    std::vector<std::string> names;
    names.reserve(nv);
    for (std::size_t p = 0; p < inst.n_b; ++p)
        for (std::size_t q = 0; q < inst.n_c; ++q)
            names.push_back("k" + std::to_string(p + 1) + std::to_string(q + 1));

    Box domain(std::vector<double>(nv, inst.k_lo), std::vector<double>(nv, inst.k_hi));

    SofProblem out;
    if (!inst.example5_structure) {
        ProblemF F;
        F.domain = std::move(domain);
        F.constraints = std::move(stability);
        F.var_names = std::move(names);
        out.problem = std::move(F);
    } else {
        SmtProblem S;
        S.nbools = 2;
        S.bool_names = {"b1", "b2"};
        S.clauses = {{{0, false}}, {{1, false}}};
        S.domain = std::move(domain);
        S.unconditional = std::move(stability);
        S.var_names = std::move(names);
        // b1 <-> k21*k22*k23 < 0, b2 <-> k21+k22+k23 < -1
        Polynomial q1 = kvar(1, 0) * kvar(1, 1) * kvar(1, 2);
        q1.add_term(Polynomial::Exponents(nv, 0), inst.epsilon);
        Polynomial q2 = kvar(1, 0) + kvar(1, 1) + kvar(1, 2);
        q2.add_term(Polynomial::Exponents(nv, 0), 1.0 + inst.epsilon);
        S.links = {{0, std::move(q1)}, {1, std::move(q2)}};
        out.problem = std::move(S);
    }
    out.instance = std::move(inst);
    return out;
}

Matrix sof_closed_loop(const SofInstance& inst, const std::vector<double>& K_flat) {
    if (K_flat.size() != inst.n_b * inst.n_c)
        throw std::invalid_argument("sof_closed_loop: K size mismatch");
    Eigen::MatrixXd K(static_cast<Eigen::Index>(inst.n_b), static_cast<Eigen::Index>(inst.n_c));
    for (std::size_t p = 0; p < inst.n_b; ++p)
        for (std::size_t q = 0; q < inst.n_c; ++q)
            K(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
                K_flat[p * inst.n_c + q];
    return from_eigen(to_eigen(inst.A) + to_eigen(inst.B) * K * to_eigen(inst.C));
}

// --- Duffing oscillator --------------------------------------------------------

namespace {

Matrix duffing_A(std::size_t n, double zeta, double h) {
    Matrix A(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        A[i][i] = 1.0;
        A[i][i + 1] = h;
    }
    if (n == 2) {
        A[1][0] = -h;
        A[1][1] = 1.0 - 2.0 * zeta * h;
    } else {
        A[n - 1][0] = -h;
        A[n - 1][1] = -2.0 * zeta * h;
        for (std::size_t j = 2; j + 1 < n; ++j) A[n - 1][j] = -h;
        A[n - 1][n - 1] = 1.0 - h;
    }
    return A;
}

Polynomial duffing_smoothness(std::size_t n) {
    const std::size_t nv = n + 1;  // x(k+1) then u
    Polynomial L(nv);
    auto mono = [&](std::size_t var, std::uint32_t deg, double coeff) {
        Polynomial::Exponents e(nv, 0);
        e[var] = deg;
        L.add_term(e, coeff);
    };
    if (n == 2) {
        mono(0, 11, 1.0);
        mono(1, 11, 1.0);
        mono(2, 10, -1.0);
    } else if (n == 3) {
        for (std::size_t i = 0; i < 3; ++i) mono(i, 5, 1.0);
        mono(3, 5, 1.0);
    } else {
        for (std::size_t i = 0; i < n; ++i) mono(i, 4, 1.0);
        mono(n, 4, -1.0);
    }
    return L;
}

} // namespace

double lyapunov_value(const Matrix& P, const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < P.size(); ++j) v += x[i] * P[i][j] * x[j];
    return v;
}

DuffingProblem gen_duffing(const DuffingInstance& inst) {
    const std::size_t n = inst.n;
    if (n < 2 || n > 4) throw std::invalid_argument("gen_duffing: n must be in 2..4");
    if (inst.x_k.size() != n) throw std::invalid_argument("gen_duffing: x_k size mismatch");
    for (double v : inst.x_k)
        if (std::abs(v) > inst.state_bound)
            throw std::invalid_argument("gen_duffing: x_k outside state bound");

    DuffingProblem dp;
    dp.instance = inst;
    dp.A = duffing_A(n, inst.zeta, inst.h);
    Matrix Q(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) Q[i][i] = 1.0;
    dp.P = discrete_lyapunov(dp.A, Q);
    dp.smoothness = duffing_smoothness(n);

    const std::size_t nv = n + 1;
    ProblemF F;
    std::vector<double> lo(nv), hi(nv);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = -inst.state_bound;
        hi[i] = inst.state_bound;
    }
    lo[n] = -inst.u_bound;
    hi[n] = inst.u_bound;
    F.domain = Box(lo, hi);
    for (std::size_t i = 0; i < n; ++i) F.var_names.push_back("x" + std::to_string(i + 1));
    F.var_names.push_back("u");

    // rhs_i = (A x_k + E(x_k))_i + B_i u, with x_k numeric
    std::vector<double> rhs_const(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rhs_const[i] += dp.A[i][j] * inst.x_k[j];
    rhs_const[n - 1] += -inst.h * inst.x_k[0] * inst.x_k[0] * inst.x_k[0];
    std::vector<double> Bvec(n, 0.0);
    Bvec[n - 1] = inst.h;

    for (std::size_t i = 0; i < n; ++i) {
        Polynomial resid = Polynomial::variable(nv, i) -
                           Polynomial::constant(nv, rhs_const[i]) -
                           Bvec[i] * Polynomial::variable(nv, n);
        Polynomial upper = resid - Polynomial::constant(nv, inst.epsilon);
        Polynomial lower = -resid - Polynomial::constant(nv, inst.epsilon);
        F.constraints.push_back(std::move(upper));
        F.constraints.push_back(std::move(lower));
    }

    // V(x+) - V(x_k) <= -lyap_epsilon
    Polynomial decrease(nv);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (dp.P[i][j] == 0.0) continue;
            decrease += dp.P[i][j] * (Polynomial::variable(nv, i) * Polynomial::variable(nv, j));
        }
    decrease.add_term(Polynomial::Exponents(nv, 0),
                      -lyapunov_value(dp.P, inst.x_k) + inst.lyap_epsilon);
    F.constraints.push_back(std::move(decrease));

    F.constraints.push_back(dp.smoothness);
    dp.problem = std::move(F);
    return dp;
}

double duffing_verify(const DuffingProblem& dp, const std::vector<double>& model) {
    const auto& inst = dp.instance;
    const std::size_t n = inst.n;
    if (model.size() != n + 1) throw std::invalid_argument("duffing_verify: model size mismatch");
    const double u = model[n];

    double viol = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) rhs += dp.A[i][j] * inst.x_k[j];
        if (i == n - 1) {
            rhs += inst.h * u;
            rhs += -inst.h * inst.x_k[0] * inst.x_k[0] * inst.x_k[0];
        }
        viol = std::max(viol, std::abs(model[i] - rhs));
    }

    std::vector<double> xplus(model.begin(), model.begin() + static_cast<std::ptrdiff_t>(n));
    viol = std::max(viol, lyapunov_value(dp.P, xplus) - lyapunov_value(dp.P, inst.x_k) +
                              inst.lyap_epsilon);
    viol = std::max(viol, dp.smoothness.eval(model));
    for (std::size_t i = 0; i < n; ++i)
        viol = std::max(viol, std::abs(model[i]) - inst.state_bound);
    viol = std::max(viol, std::abs(u) - inst.u_bound);
    return std::max(viol, 0.0);
}

// --- Switching systems -----------------------------------------------------------

SwitchingInstance SwitchingInstance::example_instance() {
    SwitchingInstance inst;
    inst.modes = {{{-1.0, 2.0}, {-2.0, -2.0}},
                  {{-1.0, 3.0}, {-3.0, -1.0}},
                  {{0.0, 2.0}, {-2.0, 0.0}}};
    inst.horizon = 3;
    inst.x0 = {40.0, 30.0};
    inst.goal = Box({-10.0, -14.0}, {0.0, -6.0});
    inst.obstacles = {Box({15.0, -40.0}, {30.0, -25.0})};
    inst.state_bound = 100.0;
    inst.t_max = 0.5;
    inst.epsilon = 1e-6;
    return inst;
}

std::size_t SwitchingProblem::mode_var(std::size_t step, std::size_t mode) const {
    return (step - 1) * instance.modes.size() + mode;
}

std::size_t SwitchingProblem::x_var(std::size_t step, std::size_t coord) const {
    return (step - 1) * 2 + coord;
}

std::size_t SwitchingProblem::t_var(std::size_t step) const {
    return instance.horizon * 2 + (step - 1);
}

Matrix phi_truncated(const Matrix& A, double t) {
    const auto Ae = to_eigen(A);
    Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(Ae.rows(), Ae.cols());
    Phi += t * Ae;
    Phi += (t * t / 2.0) * (Ae * Ae);
    Phi += (t * t * t / 6.0) * (Ae * Ae * Ae);
    return from_eigen(Phi);
}

namespace {

// symbolic degree-3 truncation of exp(A t) with t = variable tvar
PolyMatrix phi_symbolic(const Matrix& A, std::size_t nv, std::size_t tvar) {
    const std::size_t d = A.size();
    const auto Ae = to_eigen(A);
    const Eigen::MatrixXd A2 = Ae * Ae;
    const Eigen::MatrixXd A3 = A2 * Ae;
    PolyMatrix Phi(d, std::vector<Polynomial>(d, Polynomial(nv)));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Polynomial::Exponents e(nv, 0);
            auto& p = Phi[i][j];
            if (i == j) p.add_term(e, 1.0);
            e[tvar] = 1;
            p.add_term(e, Ae(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            e[tvar] = 2;
            p.add_term(e, A2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / 2.0);
            e[tvar] = 3;
            p.add_term(e, A3(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / 6.0);
        }
    return Phi;
}

} // namespace

SwitchingProblem gen_switching(const SwitchingInstance& inst) {
    const std::size_t L = inst.horizon;
    const std::size_t q = inst.modes.size();
    if (L == 0 || q == 0) throw std::invalid_argument("gen_switching: empty instance");
    if (inst.x0.size() != 2) throw std::invalid_argument("gen_switching: x0 must be 2D");
    for (const auto& m : inst.modes)
        if (m.size() != 2 || m[0].size() != 2)
            throw std::invalid_argument("gen_switching: modes must be 2x2");

    SwitchingProblem sp;
    sp.instance = inst;

    const std::size_t nv = 2 * L + L;  // x(1..L) then t_1..t_L
    SmtProblem S;

    std::vector<double> lo(nv), hi(nv);
    for (std::size_t s = 1; s <= L; ++s)
        for (std::size_t c = 0; c < 2; ++c) {
            const std::size_t v = (s - 1) * 2 + c;
            lo[v] = -inst.state_bound;
            hi[v] = inst.state_bound;
            if (s == L) {
                lo[v] = std::max(lo[v], inst.goal.lo[c]);
                hi[v] = std::min(hi[v], inst.goal.hi[c]);
            }
            S.var_names.push_back("x" + std::to_string(s) + "_" + std::to_string(c + 1));
        }
    for (std::size_t s = 1; s <= L; ++s) {
        const std::size_t v = 2 * L + (s - 1);
        lo[v] = 0.0;
        hi[v] = inst.t_max;
        S.var_names.push_back("t" + std::to_string(s));
    }
    S.domain = Box(lo, hi);

    // mode booleans with exactly-one rows and dynamics links
    for (std::size_t s = 1; s <= L; ++s) {
        PbRow row;
        row.rel = PbRow::Rel::Eq;
        row.bound = 1;
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t b = S.nbools++;
            S.bool_names.push_back("b" + std::to_string(s) + std::to_string(j + 1));
            row.terms.push_back({1, b});

            PolyMatrix Phi = phi_symbolic(inst.modes[j], nv, 2 * L + (s - 1));
            // squared dynamics residual, banded by epsilon
            Polynomial sos(nv);
            for (std::size_t c = 0; c < 2; ++c) {
                Polynomial r = Polynomial::variable(nv, (s - 1) * 2 + c);
                for (std::size_t d = 0; d < 2; ++d) {
                    if (s == 1)
                        r -= inst.x0[d] * Phi[c][d];
                    else
                        r -= Phi[c][d] * Polynomial::variable(nv, (s - 2) * 2 + d);
                }
                sos += r * r;
            }
            sos.add_term(Polynomial::Exponents(nv, 0), -inst.epsilon);
            S.links.push_back({b, std::move(sos)});
        }
        S.pb_rows.push_back(std::move(row));
    }

    // obstacle avoidance for the intermediate states: one boolean per face,
    // at least one face constraint active
    for (std::size_t s = 1; s + 1 <= L && L > 1 && s <= L - 1; ++s) {
        for (const auto& obs : inst.obstacles) {
            Clause any_face;
            for (std::size_t c = 0; c < 2; ++c) {
                for (int side = 0; side < 2; ++side) {
                    const std::size_t b = S.nbools++;
                    S.bool_names.push_back("o" + std::to_string(s) + "_" + std::to_string(c) +
                                           (side == 0 ? "lo" : "hi"));
                    Polynomial face(nv);
                    if (side == 0) {
                        // x_c <= obs.lo_c
                        face += Polynomial::variable(nv, (s - 1) * 2 + c);
                        face.add_term(Polynomial::Exponents(nv, 0), -obs.lo[c]);
                    } else {
                        // x_c >= obs.hi_c
                        face -= Polynomial::variable(nv, (s - 1) * 2 + c);
                        face.add_term(Polynomial::Exponents(nv, 0), obs.hi[c]);
                    }
                    S.links.push_back({b, std::move(face)});
                    any_face.push_back({b, false});
                }
            }
            S.clauses.push_back(std::move(any_face));
        }
    }

    // Deterministic rollout sampling: simulate the truncated dynamics over a
    // time grid for every mode sequence (depth-first, pruned) and keep
    // trajectories that clear the obstacles with margin and end in the goal.
    // Such points satisfy the dynamics bands exactly and seed the theory
    // probe; the first one also fixes the preferred Boolean decision values.
    {
        const double margin = 1e-3;
        const std::size_t tgrid = 26;
        std::size_t expansions = 0;
        std::vector<double> traj;   // flattened x(1..s)
        std::vector<double> times;  // t_1..t_s
        std::vector<std::vector<double>> hints;

        auto clear_of_obstacles = [&](const std::vector<double>& y) {
            for (const auto& obs : inst.obstacles) {
                bool outside = false;
                for (std::size_t c = 0; c < 2; ++c) {
                    // stay away from every face threshold so negated face
                    // literals hold with slack
                    if (std::abs(y[c] - obs.lo[c]) < margin) return false;
                    if (std::abs(y[c] - obs.hi[c]) < margin) return false;
                    if (y[c] < obs.lo[c] - margin || y[c] > obs.hi[c] + margin) outside = true;
                }
                if (!outside) return false;
            }
            return true;
        };

        std::function<void(std::size_t, const std::vector<double>&)> dfs =
            [&](std::size_t s, const std::vector<double>& x) {
                if (hints.size() >= 4 || ++expansions > 200000) return;
                if (s > L) {
                    std::vector<double> h(nv);
                    for (std::size_t k = 0; k < 2 * L; ++k) h[k] = traj[k];
                    for (std::size_t k = 0; k < L; ++k) h[2 * L + k] = times[k];
                    hints.push_back(std::move(h));
                    return;
                }
                for (std::size_t j = 0; j < q; ++j) {
                    for (std::size_t i = 1; i < tgrid; ++i) {
                        if (hints.size() >= 4) return;
                        const double t = inst.t_max * double(i) / double(tgrid - 1);
                        Matrix Phi = phi_truncated(inst.modes[j], t);
                        std::vector<double> y = {Phi[0][0] * x[0] + Phi[0][1] * x[1],
                                                 Phi[1][0] * x[0] + Phi[1][1] * x[1]};
                        bool ok = std::abs(y[0]) <= inst.state_bound - margin &&
                                  std::abs(y[1]) <= inst.state_bound - margin;
                        if (ok && s == L)
                            for (std::size_t c = 0; c < 2; ++c)
                                ok = ok && y[c] >= inst.goal.lo[c] + margin &&
                                     y[c] <= inst.goal.hi[c] - margin;
                        if (ok && s < L) ok = clear_of_obstacles(y);
                        if (ok) {
                            // the rejected modes must miss by a clear margin
                            for (std::size_t k = 0; k < q && ok; ++k) {
                                if (k == j) continue;
                                Matrix Pk = phi_truncated(inst.modes[k], t);
                                const double dx = y[0] - (Pk[0][0] * x[0] + Pk[0][1] * x[1]);
                                const double dy = y[1] - (Pk[1][0] * x[0] + Pk[1][1] * x[1]);
                                ok = dx * dx + dy * dy >= inst.epsilon + margin;
                            }
                        }
                        if (!ok) continue;
                        traj.push_back(y[0]);
                        traj.push_back(y[1]);
                        times.push_back(t);
                        dfs(s + 1, y);
                        traj.pop_back();
                        traj.pop_back();
                        times.pop_back();
                    }
                }
            };
        dfs(1, inst.x0);

        S.probe_hints = hints;
        if (!hints.empty()) {
            S.polarity.assign(S.nbools, true);
            for (const auto& link : S.links)
                S.polarity[link.var] = link.poly.eval(hints.front()) <= 0.0;
        }
    }

    sp.problem = std::move(S);
    return sp;
}

double switching_dynamics_residual(const SwitchingInstance& inst,
                                   const std::vector<std::size_t>& mode_seq,
                                   const std::vector<double>& times,
                                   const std::vector<std::vector<double>>& traj) {
    const std::size_t L = inst.horizon;
    if (mode_seq.size() != L || times.size() != L || traj.size() != L)
        throw std::invalid_argument("switching_dynamics_residual: length mismatch");
    double worst = 0.0;
    std::vector<double> prev = inst.x0;
    for (std::size_t s = 0; s < L; ++s) {
        Matrix Phi = phi_truncated(inst.modes[mode_seq[s]], times[s]);
        for (std::size_t c = 0; c < 2; ++c) {
            double pred = Phi[c][0] * prev[0] + Phi[c][1] * prev[1];
            worst = std::max(worst, std::abs(traj[s][c] - pred));
        }
        prev = traj[s];
    }
    return worst;
}

double switching_verify(const SwitchingProblem& sp, const std::vector<bool>& bool_model,
                        const std::vector<double>& model) {
    const auto& inst = sp.instance;
    const std::size_t L = inst.horizon;
    const std::size_t q = inst.modes.size();
    if (model.size() != 3 * L) throw std::invalid_argument("switching_verify: model size");
    if (bool_model.size() < L * q) throw std::invalid_argument("switching_verify: bool size");

    std::vector<std::size_t> mode_seq(L);
    for (std::size_t s = 1; s <= L; ++s) {
        std::size_t count = 0, pick = 0;
        for (std::size_t j = 0; j < q; ++j)
            if (bool_model[sp.mode_var(s, j)]) {
                ++count;
                pick = j;
            }
        if (count != 1) return std::numeric_limits<double>::infinity();
        mode_seq[s - 1] = pick;
    }

    std::vector<double> times(L);
    std::vector<std::vector<double>> traj(L, std::vector<double>(2));
    for (std::size_t s = 1; s <= L; ++s) {
        times[s - 1] = model[sp.t_var(s)];
        traj[s - 1] = {model[sp.x_var(s, 0)], model[sp.x_var(s, 1)]};
    }

    double viol = switching_dynamics_residual(inst, mode_seq, times, traj);

    for (std::size_t s = 1; s <= L; ++s) {
        viol = std::max(viol, -times[s - 1]);
        viol = std::max(viol, times[s - 1] - inst.t_max);
        for (std::size_t c = 0; c < 2; ++c)
            viol = std::max(viol, std::abs(traj[s - 1][c]) - inst.state_bound);
    }
    for (std::size_t c = 0; c < 2; ++c) {
        viol = std::max(viol, inst.goal.lo[c] - traj[L - 1][c]);
        viol = std::max(viol, traj[L - 1][c] - inst.goal.hi[c]);
    }
    for (std::size_t s = 1; s + 1 <= L; ++s) {
        for (const auto& obs : inst.obstacles) {
            // penetration depth: positive only when strictly inside the box
            double depth = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < 2; ++c) {
                depth = std::min(depth, traj[s - 1][c] - obs.lo[c]);
                depth = std::min(depth, obs.hi[c] - traj[s - 1][c]);
            }
            viol = std::max(viol, depth);
        }
    }
    return std::max(viol, 0.0);
}

} // namespace polyar::bench

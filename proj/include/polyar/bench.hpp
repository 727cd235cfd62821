#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "polyar/engine.hpp"
#include "polyar/smt.hpp"

namespace polyar::bench {

using Matrix = std::vector<std::vector<double>>;
using PolyMatrix = std::vector<std::vector<Polynomial>>;

// Coefficients of det(lambda I - M) by Faddeev-LeVerrier over the polynomial
// ring; result[k] is the coefficient of lambda^k, result[n] = 1.
std::vector<Polynomial> char_poly_symbolic(const PolyMatrix& M);

// Monic coefficients a_0..a_{degree-1} (a_degree = 1 implied). Returns
// `degree` polynomials g_j whose joint negativity g_j < 0 is equivalent to
// Hurwitz stability. Supported degrees: 2..5.
std::vector<Polynomial> routh_hurwitz(const std::vector<Polynomial>& coeffs);

// Solves A^T P A - P + Q = 0 by the convergent series; requires rho(A) < 1.
Matrix discrete_lyapunov(const Matrix& A, const Matrix& Q);

// --- Static output feedback -------------------------------------------------

struct SofInstance {
    std::size_t n_a = 3, n_b = 4, n_c = 4;
    double k_lo = -4.0, k_hi = 7.0;
    std::uint64_t seed = 0;
    bool example5_structure = false;  // section-6.1 Example-5 Boolean constraints
    double epsilon = 1e-6;

    Matrix A, B, C;  // filled by gen_sof
};

struct SofProblem {
    SofInstance instance;
    std::variant<ProblemF, SmtProblem> problem;
};

SofProblem gen_sof(SofInstance inst);

// Closed-loop matrix A + B K C for a concrete K (row-major flat vector).
Matrix sof_closed_loop(const SofInstance& inst, const std::vector<double>& K_flat);

// --- Duffing oscillator ------------------------------------------------------

struct DuffingInstance {
    std::size_t n = 2;
    double zeta = 0.3;
    double h = 0.05;
    std::vector<double> x_k = {0.4, 0.1};
    double state_bound = 0.6;
    double u_bound = 2.0;
    double epsilon = 1e-6;       // dynamics equality slack
    double lyap_epsilon = 1e-6;  // required Lyapunov decrease
};

struct DuffingProblem {
    DuffingInstance instance;
    Matrix A, P;             // discrete dynamics and Lyapunov matrix
    Polynomial smoothness;   // L(x(k+1), u)
    ProblemF problem;        // variables: x(k+1) (n), u (1)
};

DuffingProblem gen_duffing(const DuffingInstance& inst);

// Max violation of the original (pre-epsilon-split) constraints at a model;
// the dynamics equality contributes its absolute residual.
double duffing_verify(const DuffingProblem& dp, const std::vector<double>& model);

double lyapunov_value(const Matrix& P, const std::vector<double>& x);

// --- Switching systems --------------------------------------------------------

struct SwitchingInstance {
    std::vector<Matrix> modes;        // 2x2 each
    std::size_t horizon = 3;
    std::vector<double> x0 = {40.0, 30.0};
    Box goal;                         // subset of the state box
    std::vector<Box> obstacles;
    double state_bound = 100.0;
    double t_max = 0.5;
    double epsilon = 1e-6;            // dynamics band (on the squared residual)

    static SwitchingInstance example_instance();
};

struct SwitchingProblem {
    SwitchingInstance instance;
    SmtProblem problem;
    // Variable layout: x(1)..x(L) (2 each), then t_1..t_L.
    // Boolean layout: b_{ij} (L x modes, row-major), then obstacle-face booleans.
    std::size_t mode_var(std::size_t step, std::size_t mode) const;
    std::size_t x_var(std::size_t step, std::size_t coord) const;  // step in 1..L
    std::size_t t_var(std::size_t step) const;                     // step in 1..L
};

SwitchingProblem gen_switching(const SwitchingInstance& inst);

// Degree-3 truncation of exp(A t).
Matrix phi_truncated(const Matrix& A, double t);

// Max dynamics residual ||x(i) - Phi_{mode(i)}(t_i) x(i-1)||_inf of a mode
// sequence / switching-time / trajectory triple.
double switching_dynamics_residual(const SwitchingInstance& inst,
                                   const std::vector<std::size_t>& mode_seq,
                                   const std::vector<double>& times,
                                   const std::vector<std::vector<double>>& traj);

// Full substitution verifier for a returned (bool, real) model.
double switching_verify(const SwitchingProblem& sp, const std::vector<bool>& bool_model,
                        const std::vector<double>& model);

} // namespace polyar::bench

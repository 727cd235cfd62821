#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polyar/geometry.hpp"
#include "polyar/interval.hpp"

namespace polyar {

// Sparse multivariate real polynomial: exponent vector -> coefficient.
// Zero-coefficient terms are never stored.
class Polynomial {
public:
    using Exponents = std::vector<std::uint32_t>;
    using TermMap = std::map<Exponents, double>;

    Polynomial() = default;
    explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

    static Polynomial constant(std::size_t nvars, double c);
    static Polynomial variable(std::size_t nvars, std::size_t index);
    static Polynomial monomial(std::size_t nvars, const Exponents& e, double c);

    std::size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;  // degree of the zero polynomial is 0

    void add_term(const Exponents& e, double c);

    double eval(const std::vector<double>& x) const;
    Polynomial derivative(std::size_t var) const;

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double c, const Polynomial& p);

    bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

    // Variables with positive degree somewhere in the polynomial.
    std::vector<std::size_t> active_vars() const;

    std::string to_string(const std::vector<std::string>& names = {}) const;

private:
    std::size_t nvars_ = 0;
    TermMap terms_;
};

std::vector<Polynomial> gradient(const Polynomial& p);
std::vector<std::vector<Polynomial>> hessian(const Polynomial& p);

// Sound enclosure of {p(x) : x in b}, per-monomial with even-power tightening.
Interval interval_eval(const Polynomial& p, const Box& b);

// Upper bound on sup_{x in b} ||grad p(x)||_inf.
double lipschitz_bound(const Polynomial& p, const Box& b);

// Taylor polynomial of p (order 1 or 2) around the center of `domain`, plus
// rigorous remainder offsets: base+lo_off <= p <= base+hi_off on the domain.
struct Relaxation {
    std::vector<double> center;
    int order = 1;
    Polynomial base;
    double lo_off = 0.0;
    double hi_off = 0.0;
    Box domain;
    bool convex_over = false;    // base + hi_off is convex
    bool concave_under = false;  // base + lo_off is concave

    Polynomial over() const;   // base + hi_off
    Polynomial under() const;  // base + lo_off
};

Relaxation taylor_relax(const Polynomial& p, const Box& b, int order);

// Alg.-2 style construction: order 2 when the quadratic is convex (resp.
// concave for the under-approximation), otherwise order 1.
Relaxation over_relax(const Polynomial& p, const Box& b);
Relaxation under_relax(const Polynomial& p, const Box& b);

} // namespace polyar

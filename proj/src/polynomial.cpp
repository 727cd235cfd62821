#include "polyar/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "polyar/convex.hpp"

namespace polyar {

Polynomial Polynomial::constant(std::size_t nvars, double c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
    if (index >= nvars) throw std::invalid_argument("Polynomial::variable: index out of range");
    Polynomial p(nvars);
    Exponents e(nvars, 0);
    e[index] = 1;
    p.add_term(e, 1.0);
    return p;
}

Polynomial Polynomial::monomial(std::size_t nvars, const Exponents& e, double c) {
    Polynomial p(nvars);
    p.add_term(e, c);
    return p;
}

void Polynomial::add_term(const Exponents& e, double c) {
    if (e.size() != nvars_) throw std::invalid_argument("Polynomial::add_term: exponent length");
    if (c == 0.0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_)
        d = std::max(d, static_cast<int>(std::accumulate(e.begin(), e.end(), 0u)));
    return d;
}

double Polynomial::eval(const std::vector<double>& x) const {
    if (x.size() != nvars_) throw std::invalid_argument("Polynomial::eval: dimension mismatch");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double term = c;
        for (std::size_t k = 0; k < nvars_; ++k)
            for (std::uint32_t j = 0; j < e[k]; ++j) term *= x[k];
        sum += term;
    }
    return sum;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    if (var >= nvars_) throw std::invalid_argument("Polynomial::derivative: index out of range");
    Polynomial d(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents de = e;
        de[var] -= 1;
        d.add_term(de, c * static_cast<double>(e[var]));
    }
    return d;
}

Polynomial Polynomial::operator-() const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Polynomial: nvars mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Polynomial: nvars mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.nvars_ != b.nvars_) throw std::invalid_argument("Polynomial: nvars mismatch");
    Polynomial r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            Polynomial::Exponents e(a.nvars_);
            for (std::size_t k = 0; k < a.nvars_; ++k) e[k] = ea[k] + eb[k];
            r.add_term(e, ca * cb);
        }
    return r;
}

Polynomial operator*(double c, const Polynomial& p) {
    Polynomial r(p.nvars());
    for (const auto& [e, pc] : p.terms()) r.add_term(e, c * pc);
    return r;
}

std::vector<std::size_t> Polynomial::active_vars() const {
    std::vector<bool> seen(nvars_, false);
    for (const auto& [e, c] : terms_)
        for (std::size_t k = 0; k < nvars_; ++k)
            if (e[k] > 0) seen[k] = true;
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < nvars_; ++k)
        if (seen[k]) out.push_back(k);
    return out;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        os << std::abs(c);
        for (std::size_t k = 0; k < nvars_; ++k) {
            if (e[k] == 0) continue;
            os << "*" << (k < names.size() ? names[k] : "x" + std::to_string(k));
            if (e[k] > 1) os << "^" << e[k];
        }
    }
    return os.str();
}

std::vector<Polynomial> gradient(const Polynomial& p) {
    std::vector<Polynomial> g;
    g.reserve(p.nvars());
    for (std::size_t k = 0; k < p.nvars(); ++k) g.push_back(p.derivative(k));
    return g;
}

std::vector<std::vector<Polynomial>> hessian(const Polynomial& p) {
    const std::size_t n = p.nvars();
    std::vector<std::vector<Polynomial>> H(n);
    auto g = gradient(p);
    for (std::size_t i = 0; i < n; ++i) {
        H[i].reserve(n);
        for (std::size_t j = 0; j < n; ++j) H[i].push_back(g[i].derivative(j));
    }
    return H;
}

Interval interval_eval(const Polynomial& p, const Box& b) {
    if (b.nvars() != p.nvars()) throw std::invalid_argument("interval_eval: dimension mismatch");
    Interval sum(0.0, 0.0);
    for (const auto& [e, c] : p.terms()) {
        Interval term(c, c);
        for (std::size_t k = 0; k < p.nvars(); ++k)
            if (e[k] > 0) term = term * pow_int(b.dim(k), static_cast<int>(e[k]));
        sum = sum + term;
    }
    return sum;
}

double lipschitz_bound(const Polynomial& p, const Box& b) {
    double bound = 0.0;
    for (std::size_t k = 0; k < p.nvars(); ++k) {
        Interval g = interval_eval(p.derivative(k), b);
        bound = std::max(bound, std::max(std::abs(g.lo), std::abs(g.hi)));
    }
    return bound;
}

Polynomial Relaxation::over() const {
    Polynomial r = base;
    r.add_term(Polynomial::Exponents(base.nvars(), 0), hi_off);
    return r;
}

Polynomial Relaxation::under() const {
    Polynomial r = base;
    r.add_term(Polynomial::Exponents(base.nvars(), 0), lo_off);
    return r;
}

namespace {

std::vector<std::vector<double>> constant_hessian(const Polynomial& quadratic) {
    const std::size_t n = quadratic.nvars();
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    // entries of the hessian of a degree-<=2 polynomial are constants
    auto Hp = hessian(quadratic);
    std::vector<double> origin(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) H[i][j] = Hp[i][j].eval(origin);
    return H;
}

} // namespace

Relaxation taylor_relax(const Polynomial& p, const Box& b, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("taylor_relax: order must be 1 or 2");
    if (b.nvars() != p.nvars()) throw std::invalid_argument("taylor_relax: dimension mismatch");

    Relaxation r;
    r.center = b.center();
    r.order = order;
    r.domain = b;

    const std::size_t n = p.nvars();

    if (p.degree() <= order) {
        // Taylor expansion of a degree-<=order polynomial is the polynomial itself.
        r.base = p;
        r.lo_off = r.hi_off = 0.0;
    } else {
        const auto& a = r.center;
        Polynomial base = Polynomial::constant(n, p.eval(a));
        std::vector<Polynomial> shifted;  // (x_k - a_k)
        shifted.reserve(n);
        for (std::size_t k = 0; k < n; ++k)
            shifted.push_back(Polynomial::variable(n, k) - Polynomial::constant(n, a[k]));

        auto g = gradient(p);
        for (std::size_t k = 0; k < n; ++k) base += g[k].eval(a) * shifted[k];
        if (order == 2) {
            auto H = hessian(p);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double hij = H[i][j].eval(a);
                    if (hij != 0.0) base += (0.5 * hij) * (shifted[i] * shifted[j]);
                }
        }
        r.base = base;
        Interval rem = interval_eval(p - base, b);
        r.lo_off = rem.lo;
        r.hi_off = rem.hi;
    }

    if (r.base.degree() <= 1) {
        r.convex_over = true;
        r.concave_under = true;
    } else {
        auto H = constant_hessian(r.base);
        r.convex_over = is_psd(H);
        r.concave_under = is_nsd(H);
    }
    return r;
}

Relaxation over_relax(const Polynomial& p, const Box& b) {
    Relaxation r2 = taylor_relax(p, b, 2);
    if (r2.convex_over) return r2;
    return taylor_relax(p, b, 1);
}

Relaxation under_relax(const Polynomial& p, const Box& b) {
    Relaxation r2 = taylor_relax(p, b, 2);
    if (r2.concave_under) return r2;
    return taylor_relax(p, b, 1);
}

} // namespace polyar

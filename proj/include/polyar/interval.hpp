#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polyar {

// Closed finite interval [lo, hi] with outward-rounded arithmetic.
// Every operation widens its result by a few ulps so that the exact
// real-valued result is always enclosed despite floating-point rounding.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double point) : lo(point), hi(point) {}
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("Interval: requires finite lo <= hi");
    }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

namespace detail {

inline double step_down(double x) {
    return std::nextafter(std::nextafter(x, -std::numeric_limits<double>::infinity()),
                          -std::numeric_limits<double>::infinity());
}
inline double step_up(double x) {
    return std::nextafter(std::nextafter(x, std::numeric_limits<double>::infinity()),
                          std::numeric_limits<double>::infinity());
}

} // namespace detail

namespace detail {

// TwoSum residual: a + b == s + err exactly (round-to-nearest).
inline double sum_err(double a, double b, double s) {
    const double bv = s - a;
    return (a - (s - bv)) + (b - bv);
}

inline double add_down(double a, double b) {
    const double s = a + b;
    return sum_err(a, b, s) < 0.0 ? std::nextafter(s, -std::numeric_limits<double>::infinity())
                                  : s;
}
inline double add_up(double a, double b) {
    const double s = a + b;
    return sum_err(a, b, s) > 0.0 ? std::nextafter(s, std::numeric_limits<double>::infinity())
                                  : s;
}

inline double mul_down(double a, double b) {
    const double p = a * b;
    return std::fma(a, b, -p) < 0.0
               ? std::nextafter(p, -std::numeric_limits<double>::infinity())
               : p;
}
inline double mul_up(double a, double b) {
    const double p = a * b;
    return std::fma(a, b, -p) > 0.0 ? std::nextafter(p, std::numeric_limits<double>::infinity())
                                    : p;
}

} // namespace detail

inline Interval outward(double lo, double hi) {
    return Interval(detail::step_down(lo), detail::step_up(hi));
}

inline Interval operator+(const Interval& a, const Interval& b) {
    return Interval(detail::add_down(a.lo, b.lo), detail::add_up(a.hi, b.hi));
}

inline Interval operator-(const Interval& a, const Interval& b) {
    return Interval(detail::add_down(a.lo, -b.hi), detail::add_up(a.hi, -b.lo));
}

inline Interval operator*(const Interval& a, const Interval& b) {
    const double d1 = detail::mul_down(a.lo, b.lo), d2 = detail::mul_down(a.lo, b.hi);
    const double d3 = detail::mul_down(a.hi, b.lo), d4 = detail::mul_down(a.hi, b.hi);
    const double u1 = detail::mul_up(a.lo, b.lo), u2 = detail::mul_up(a.lo, b.hi);
    const double u3 = detail::mul_up(a.hi, b.lo), u4 = detail::mul_up(a.hi, b.hi);
    return Interval(std::min(std::min(d1, d2), std::min(d3, d4)),
                    std::max(std::max(u1, u2), std::max(u3, u4)));
}

inline Interval operator*(double c, const Interval& a) { return Interval(c) * a; }

// x^e for a non-negative integer exponent, with even-power tightening:
// x^{2k} over an interval straddling zero has lower bound 0.
inline Interval pow_int(const Interval& x, int e) {
    if (e < 0) throw std::invalid_argument("pow_int: negative exponent");
    if (e == 0) return Interval(1.0, 1.0);
    if (e == 1) return x;
    const double pl = std::pow(x.lo, e), ph = std::pow(x.hi, e);
    if (e % 2 == 1) return outward(pl, ph);
    // even power
    if (x.lo >= 0.0) return outward(pl, ph);
    if (x.hi <= 0.0) return outward(ph, pl);
    return Interval(0.0, detail::step_up(std::max(pl, ph)));
}

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

} // namespace polyar

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>
#include <unistd.h>

#include "polyar/region_solver.hpp"

namespace polyar {

namespace {

// decimal string of m * 2^k for non-negative integers m, k
std::string decimal_shift(std::uint64_t m, int k) {
    std::vector<std::uint32_t> limbs;  // base 1e9, little-endian
    while (m > 0) {
        limbs.push_back(static_cast<std::uint32_t>(m % 1000000000ull));
        m /= 1000000000ull;
    }
    if (limbs.empty()) limbs.push_back(0);
    for (int i = 0; i < k; ++i) {
        std::uint64_t carry = 0;
        for (auto& d : limbs) {
            const std::uint64_t v = 2ull * d + carry;
            d = static_cast<std::uint32_t>(v % 1000000000ull);
            carry = v / 1000000000ull;
        }
        if (carry) limbs.push_back(static_cast<std::uint32_t>(carry));
    }
    std::ostringstream os;
    os << limbs.back();
    for (auto it = limbs.rbegin() + 1; it != limbs.rend(); ++it) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%09u", *it);
        os << buf;
    }
    return os.str();
}

// exact SMT-LIB Real literal for a finite double
std::string real_literal(double c) {
    if (c == 0.0) return "0.0";
    const bool negative = std::signbit(c);
    double a = std::abs(c);
    int e = 0;
    const double mant = std::frexp(a, &e);  // a = mant * 2^e, mant in [0.5, 1)
    const auto m = static_cast<std::uint64_t>(std::ldexp(mant, 53));
    e -= 53;
    std::string body;
    if (e >= 0) {
        body = decimal_shift(m, e) + ".0";
    } else {
        body = "(/ " + decimal_shift(m, 0) + ".0 " + decimal_shift(1, -e) + ".0)";
    }
    return negative ? "(- " + body + ")" : body;
}

std::string term_expr(const Polynomial::Exponents& e, double c,
                      const std::vector<std::string>& names) {
    std::ostringstream os;
    bool has_vars = false;
    for (auto d : e)
        if (d > 0) has_vars = true;
    if (!has_vars) return real_literal(c);
    os << "(* " << real_literal(c);
    for (std::size_t k = 0; k < e.size(); ++k)
        for (std::uint32_t j = 0; j < e[k]; ++j) os << " " << names[k];
    os << ")";
    return os.str();
}

std::string poly_expr(const Polynomial& p, const std::vector<std::string>& names) {
    if (p.terms().empty()) return "0.0";
    if (p.terms().size() == 1) {
        const auto& [e, c] = *p.terms().begin();
        return term_expr(e, c, names);
    }
    std::ostringstream os;
    os << "(+";
    for (const auto& [e, c] : p.terms()) os << " " << term_expr(e, c, names);
    os << ")";
    return os.str();
}

std::vector<std::string> resolve_names(std::size_t n, const std::vector<std::string>& names) {
    if (names.size() == n) return names;
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back("x" + std::to_string(k));
    return out;
}

} // namespace

std::string export_smtlib(const Box& box, const std::vector<Polynomial>& constraints,
                          const std::vector<std::string>& names) {
    const std::size_t n = box.nvars();
    const auto vn = resolve_names(n, names);
    std::ostringstream os;
    os << "(set-logic QF_NRA)\n";
    for (const auto& name : vn) os << "(declare-const " << name << " Real)\n";
    for (std::size_t k = 0; k < n; ++k) {
        os << "(assert (<= " << real_literal(box.lo[k]) << " " << vn[k] << "))\n";
        os << "(assert (<= " << vn[k] << " " << real_literal(box.hi[k]) << "))\n";
    }
    for (const auto& p : constraints)
        os << "(assert (<= " << poly_expr(p, vn) << " 0.0))\n";
    os << "(check-sat)\n(get-model)\n";
    return os.str();
}

namespace {

struct Sexp {
    std::string atom;            // non-empty for atoms
    std::vector<Sexp> children;  // for lists
    bool is_atom() const { return !atom.empty(); }
};

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : text) {
        if (ch == '(' || ch == ')') {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
            toks.push_back(std::string(1, ch));
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) toks.push_back(cur);
    return toks;
}

Sexp parse_sexp(const std::vector<std::string>& toks, std::size_t& i) {
    if (i >= toks.size()) throw std::runtime_error("smtlib: unexpected end of input");
    if (toks[i] == "(") {
        Sexp s;
        ++i;
        while (i < toks.size() && toks[i] != ")") s.children.push_back(parse_sexp(toks, i));
        if (i >= toks.size()) throw std::runtime_error("smtlib: unbalanced parentheses");
        ++i;
        return s;
    }
    Sexp s;
    s.atom = toks[i++];
    return s;
}

// Extended precision so rationals like m / 2^k stay exact even when the
// denominator overflows double range.
bool parse_number_ld(const Sexp& s, long double& out) {
    if (s.is_atom()) {
        errno = 0;
        char* end = nullptr;
        out = std::strtold(s.atom.c_str(), &end);
        return end == s.atom.c_str() + s.atom.size() && errno != ERANGE;
    }
    if (s.children.size() == 2 && s.children[0].is_atom() && s.children[0].atom == "-") {
        long double v;
        if (!parse_number_ld(s.children[1], v)) return false;
        out = -v;
        return true;
    }
    if (s.children.size() == 3 && s.children[0].is_atom() && s.children[0].atom == "/") {
        long double a, b;
        if (!parse_number_ld(s.children[1], a) || !parse_number_ld(s.children[2], b) || b == 0.0L)
            return false;
        out = a / b;
        return true;
    }
    return false;
}

bool parse_number(const Sexp& s, double& out) {
    long double v;
    if (!parse_number_ld(s, v)) return false;
    out = static_cast<double>(v);
    return true;
}

Polynomial expr_to_poly(const Sexp& s, const std::vector<std::string>& names) {
    const std::size_t n = names.size();
    double num;
    if (parse_number(s, num)) return Polynomial::constant(n, num);
    if (s.is_atom()) {
        for (std::size_t k = 0; k < n; ++k)
            if (names[k] == s.atom) return Polynomial::variable(n, k);
        throw std::runtime_error("smtlib: unknown symbol " + s.atom);
    }
    if (s.children.empty() || !s.children[0].is_atom())
        throw std::runtime_error("smtlib: malformed expression");
    const std::string& op = s.children[0].atom;
    if (op == "+") {
        Polynomial acc(n);
        for (std::size_t i = 1; i < s.children.size(); ++i)
            acc += expr_to_poly(s.children[i], names);
        return acc;
    }
    if (op == "-") {
        if (s.children.size() == 2) return -expr_to_poly(s.children[1], names);
        Polynomial acc = expr_to_poly(s.children[1], names);
        for (std::size_t i = 2; i < s.children.size(); ++i)
            acc -= expr_to_poly(s.children[i], names);
        return acc;
    }
    if (op == "*") {
        Polynomial acc = Polynomial::constant(n, 1.0);
        for (std::size_t i = 1; i < s.children.size(); ++i)
            acc = acc * expr_to_poly(s.children[i], names);
        return acc;
    }
    throw std::runtime_error("smtlib: unsupported operator " + op);
}

} // namespace

SmtLibProblem import_smtlib(const std::string& text) {
    auto toks = tokenize(text);
    std::vector<Sexp> forms;
    std::size_t i = 0;
    while (i < toks.size()) forms.push_back(parse_sexp(toks, i));

    SmtLibProblem out;
    std::vector<double> lo, hi;
    std::vector<Sexp> pending_asserts;

    for (const auto& f : forms) {
        if (f.is_atom() || f.children.empty() || !f.children[0].is_atom()) continue;
        const std::string& head = f.children[0].atom;
        if (head == "declare-const" && f.children.size() >= 2) {
            out.names.push_back(f.children[1].atom);
            lo.push_back(-std::numeric_limits<double>::infinity());
            hi.push_back(std::numeric_limits<double>::infinity());
        } else if (head == "assert" && f.children.size() == 2) {
            pending_asserts.push_back(f.children[1]);
        }
    }

    auto var_index = [&](const Sexp& s) -> std::ptrdiff_t {
        if (!s.is_atom()) return -1;
        for (std::size_t k = 0; k < out.names.size(); ++k)
            if (out.names[k] == s.atom) return static_cast<std::ptrdiff_t>(k);
        return -1;
    };

    for (const auto& a : pending_asserts) {
        if (a.children.size() != 3 || !a.children[0].is_atom() || a.children[0].atom != "<=")
            throw std::runtime_error("smtlib: unsupported assertion shape");
        const Sexp& l = a.children[1];
        const Sexp& r = a.children[2];
        double num;
        std::ptrdiff_t vi;
        if (parse_number(l, num) && (vi = var_index(r)) >= 0) {
            lo[static_cast<std::size_t>(vi)] = std::max(lo[static_cast<std::size_t>(vi)], num);
        } else if ((vi = var_index(l)) >= 0 && parse_number(r, num)) {
            hi[static_cast<std::size_t>(vi)] = std::min(hi[static_cast<std::size_t>(vi)], num);
        } else {
            Polynomial lhs = expr_to_poly(l, out.names);
            Polynomial rhs = expr_to_poly(r, out.names);
            out.constraints.push_back(lhs - rhs);
        }
    }

    for (std::size_t k = 0; k < lo.size(); ++k)
        if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]))
            throw std::runtime_error("smtlib: missing bound for " + out.names[k]);
    out.box = Box(lo, hi);
    return out;
}

ExternalResult parse_solver_output(const std::string& text, const std::vector<std::string>& names) {
    ExternalResult res;
    std::istringstream is(text);
    std::string first;
    is >> first;
    if (first == "sat") {
        res.status = Status::Sat;
    } else if (first == "unsat") {
        res.status = Status::Unsat;
        return res;
    } else {
        res.status = Status::Unknown;
        res.diagnostic = text;
        return res;
    }

    std::string rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    auto toks = tokenize(rest);
    std::vector<Sexp> forms;
    try {
        std::size_t i = 0;
        while (i < toks.size()) forms.push_back(parse_sexp(toks, i));
    } catch (const std::exception& e) {
        res.diagnostic = e.what();
        return res;
    }

    std::map<std::string, double> vals;
    std::function<void(const Sexp&)> scan = [&](const Sexp& s) {
        if (s.is_atom()) return;
        // (define-fun x () Real v) or plain (x v)
        if (s.children.size() == 5 && s.children[0].is_atom() &&
            s.children[0].atom == "define-fun" && s.children[1].is_atom()) {
            double v;
            if (parse_number(s.children[4], v)) vals[s.children[1].atom] = v;
            return;
        }
        if (s.children.size() == 2 && s.children[0].is_atom()) {
            double v;
            if (parse_number(s.children[1], v)) {
                vals[s.children[0].atom] = v;
                return;
            }
        }
        for (const auto& c : s.children) scan(c);
    };
    for (const auto& f : forms) scan(f);

    std::vector<double> model;
    model.reserve(names.size());
    for (const auto& nm : names) {
        auto it = vals.find(nm);
        if (it == vals.end()) {
            res.diagnostic = "model value missing for " + nm;
            return res;
        }
        model.push_back(it->second);
    }
    res.model = std::move(model);
    return res;
}

ExternalResult run_external_solver(const std::string& exe_path, const Box& box,
                                   const std::vector<Polynomial>& constraints,
                                   double timeout_s) {
    const auto names = resolve_names(box.nvars(), {});
    const std::string script = export_smtlib(box, constraints, names);

    char tmpl[] = "/tmp/polyar_XXXXXX.smt2";
    int fd = mkstemps(tmpl, 5);
    if (fd < 0) {
        ExternalResult r;
        r.diagnostic = "cannot create temp file";
        return r;
    }
    {
        std::ofstream f(tmpl);
        f << script;
    }
    close(fd);

    std::ostringstream cmd;
    cmd << "timeout " << std::max(1, static_cast<int>(timeout_s)) << "s "
        << exe_path << " " << tmpl << " 2>&1";
    FILE* pipe = popen(cmd.str().c_str(), "r");
    if (!pipe) {
        std::remove(tmpl);
        ExternalResult r;
        r.diagnostic = "cannot launch solver";
        return r;
    }
    std::string output;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, got);
    const int rc = pclose(pipe);
    std::remove(tmpl);

    if (WIFEXITED(rc) && WEXITSTATUS(rc) == 124) {
        ExternalResult r;
        r.status = Status::Timeout;
        r.diagnostic = "external solver timed out";
        return r;
    }
    ExternalResult r = parse_solver_output(output, names);
    if (r.status == Status::Sat && r.model) {
        // never trust an external model unchecked
        bool ok = box.contains(*r.model, 1e-9);
        for (const auto& p : constraints)
            if (ok && p.eval(*r.model) > 1e-9) ok = false;
        if (!ok) {
            r.status = Status::Unknown;
            r.diagnostic = "external model failed verification";
            r.model.reset();
        }
    }
    return r;
}

} // namespace polyar

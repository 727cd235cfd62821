#include "polyar/problem_io.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace polyar {

ParseError::ParseError(const std::string& msg, int l, int c)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg),
      line(l),
      column(c) {}

namespace {

struct Tok {
    std::string text;
    int col = 0;  // 1-based
};

std::vector<Tok> split_line(const std::string& line) {
    std::vector<Tok> toks;
    std::string cur;
    int start = 0;
    for (int i = 0; i <= static_cast<int>(line.size()); ++i) {
        const char ch = i < static_cast<int>(line.size()) ? line[static_cast<std::size_t>(i)] : ' ';
        const bool punct = ch == ';' || ch == ',' || ch == ':';
        if (std::isspace(static_cast<unsigned char>(ch)) || punct) {
            if (!cur.empty()) {
                toks.push_back({cur, start + 1});
                cur.clear();
            }
            if (punct) toks.push_back({std::string(1, ch), i + 1});
        } else {
            if (cur.empty()) start = i;
            cur += ch;
        }
    }
    return toks;
}

bool to_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

struct Parser {
    std::vector<std::string> lines;
    std::vector<std::string> var_names;
    std::vector<double> lo, hi;
    std::vector<std::string> bool_names;

    std::ptrdiff_t var_index(const std::string& name) const {
        for (std::size_t k = 0; k < var_names.size(); ++k)
            if (var_names[k] == name) return static_cast<std::ptrdiff_t>(k);
        return -1;
    }
    std::ptrdiff_t bool_index(const std::string& name) const {
        for (std::size_t k = 0; k < bool_names.size(); ++k)
            if (bool_names[k] == name) return static_cast<std::ptrdiff_t>(k);
        return -1;
    }

    // coeff [name[^exp]]... terminated by ';' or end
    Polynomial parse_terms(const std::vector<Tok>& toks, std::size_t& i, int lineno) {
        const std::size_t n = var_names.size();
        Polynomial p(n);
        for (;;) {
            if (i >= toks.size())
                throw ParseError("expected a coefficient", lineno,
                                 toks.empty() ? 1 : toks.back().col);
            double coeff;
            if (!to_double(toks[i].text, coeff))
                throw ParseError("expected a coefficient, got '" + toks[i].text + "'", lineno,
                                 toks[i].col);
            ++i;
            Polynomial::Exponents e(n, 0);
            while (i < toks.size() && toks[i].text != ";") {
                const Tok& t = toks[i];
                std::string name = t.text;
                std::uint32_t exp = 1;
                if (auto caret = name.find('^'); caret != std::string::npos) {
                    const std::string es = name.substr(caret + 1);
                    name = name.substr(0, caret);
                    bool ok = !es.empty();
                    for (char ch : es)
                        if (!std::isdigit(static_cast<unsigned char>(ch))) ok = false;
                    if (!ok)
                        throw ParseError("malformed exponent in '" + t.text + "'", lineno, t.col);
                    exp = static_cast<std::uint32_t>(std::stoul(es));
                }
                const std::ptrdiff_t vi = var_index(name);
                if (vi < 0) throw ParseError("unknown variable '" + name + "'", lineno, t.col);
                e[static_cast<std::size_t>(vi)] += exp;
                ++i;
            }
            p.add_term(e, coeff);
            if (i >= toks.size()) break;
            ++i;  // skip ';'
        }
        return p;
    }
};

void append_with_sense(std::vector<Polynomial>& out, Polynomial p, const std::string& sense,
                       double epsilon, int lineno, int col) {
    const std::size_t n = p.nvars();
    auto shifted = [&](const Polynomial& q, double delta) {
        Polynomial r = q;
        r.add_term(Polynomial::Exponents(n, 0), delta);
        return r;
    };
    if (sense == "<=") {
        out.push_back(std::move(p));
    } else if (sense == ">=") {
        out.push_back(-p);
    } else if (sense == "<") {
        out.push_back(shifted(p, epsilon));
    } else if (sense == ">") {
        out.push_back(shifted(-p, epsilon));
    } else if (sense == "=") {
        out.push_back(shifted(p, -epsilon));
        out.push_back(shifted(-p, -epsilon));
    } else {
        throw ParseError("unknown sense '" + sense + "'", lineno, col);
    }
}

} // namespace

ParsedProblem parse_problem(const std::string& text, double epsilon) {
    Parser ps;
    {
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) ps.lines.push_back(line);
    }
    if (ps.lines.empty()) throw ParseError("empty document", 1, 1);

    auto is_skippable = [](const std::vector<Tok>& toks) {
        return toks.empty() || toks[0].text[0] == '#';
    };

    // header
    {
        auto toks = split_line(ps.lines[0]);
        if (toks.size() < 2 || toks[0].text != "polyar" || toks[1].text != "1")
            throw ParseError("expected header 'polyar 1'", 1, 1);
    }

    // declarations first so constraint arity is known
    for (std::size_t ln = 1; ln < ps.lines.size(); ++ln) {
        auto toks = split_line(ps.lines[ln]);
        if (is_skippable(toks)) continue;
        const int lineno = static_cast<int>(ln) + 1;
        if (toks[0].text == "var") {
            if (toks.size() != 4) throw ParseError("expected: var <name> <lo> <hi>", lineno, toks[0].col);
            double l, h;
            if (!to_double(toks[2].text, l) || !to_double(toks[3].text, h))
                throw ParseError("malformed bound", lineno, toks[2].col);
            if (l > h) throw ParseError("inverted bounds for '" + toks[1].text + "'", lineno, toks[2].col);
            if (ps.var_index(toks[1].text) >= 0 || ps.bool_index(toks[1].text) >= 0)
                throw ParseError("duplicate name '" + toks[1].text + "'", lineno, toks[1].col);
            ps.var_names.push_back(toks[1].text);
            ps.lo.push_back(l);
            ps.hi.push_back(h);
        } else if (toks[0].text == "bool") {
            if (toks.size() != 2) throw ParseError("expected: bool <name>", lineno, toks[0].col);
            if (ps.var_index(toks[1].text) >= 0 || ps.bool_index(toks[1].text) >= 0)
                throw ParseError("duplicate name '" + toks[1].text + "'", lineno, toks[1].col);
            ps.bool_names.push_back(toks[1].text);
        }
    }
    if (ps.var_names.empty()) throw ParseError("no variables declared", 1, 1);

    std::vector<Polynomial> constraints;
    std::vector<Clause> clauses;
    std::vector<PbRow> rows;
    std::vector<Link> links;

    for (std::size_t ln = 1; ln < ps.lines.size(); ++ln) {
        auto toks = split_line(ps.lines[ln]);
        if (is_skippable(toks)) continue;
        const int lineno = static_cast<int>(ln) + 1;
        const std::string& head = toks[0].text;
        if (head == "var" || head == "bool") continue;

        if (head == "constraint") {
            if (toks.size() < 3) throw ParseError("expected: constraint <sense> <terms>", lineno, toks[0].col);
            std::size_t i = 2;
            Polynomial p = ps.parse_terms(toks, i, lineno);
            append_with_sense(constraints, std::move(p), toks[1].text, epsilon, lineno, toks[1].col);
        } else if (head == "clause") {
            Clause cl;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                std::string name = toks[i].text;
                bool neg = false;
                if (!name.empty() && name[0] == '!') {
                    neg = true;
                    name = name.substr(1);
                }
                const std::ptrdiff_t bi = ps.bool_index(name);
                if (bi < 0)
                    throw ParseError("unknown boolean '" + name + "'", lineno, toks[i].col);
                cl.push_back({static_cast<std::size_t>(bi), neg});
            }
            if (cl.empty()) throw ParseError("empty clause", lineno, toks[0].col);
            clauses.push_back(std::move(cl));
        } else if (head == "card") {
            // card <=|= <bound> : <coeff> <bool> [, ...]
            if (toks.size() < 6 || toks[3].text != ":")
                throw ParseError("expected: card <rel> <bound> : <coeff> <name>, ...", lineno, toks[0].col);
            PbRow row;
            if (toks[1].text == "=") row.rel = PbRow::Rel::Eq;
            else if (toks[1].text == "<=") row.rel = PbRow::Rel::Le;
            else throw ParseError("unknown relation '" + toks[1].text + "'", lineno, toks[1].col);
            double bound;
            if (!to_double(toks[2].text, bound) || bound != static_cast<int>(bound))
                throw ParseError("malformed bound", lineno, toks[2].col);
            row.bound = static_cast<int>(bound);
            std::size_t i = 4;
            for (;;) {
                if (i + 1 >= toks.size())
                    throw ParseError("expected <coeff> <name>", lineno, toks.back().col);
                double coeff;
                if (!to_double(toks[i].text, coeff) || coeff != static_cast<int>(coeff))
                    throw ParseError("malformed coefficient", lineno, toks[i].col);
                const std::ptrdiff_t bi = ps.bool_index(toks[i + 1].text);
                if (bi < 0)
                    throw ParseError("unknown boolean '" + toks[i + 1].text + "'", lineno, toks[i + 1].col);
                row.terms.push_back({static_cast<int>(coeff), static_cast<std::size_t>(bi)});
                i += 2;
                if (i >= toks.size()) break;
                if (toks[i].text != ",")
                    throw ParseError("expected ','", lineno, toks[i].col);
                ++i;
            }
            rows.push_back(std::move(row));
        } else if (head == "link") {
            // link <bool> : <terms>   meaning bool <-> poly <= 0
            if (toks.size() < 4 || toks[2].text != ":")
                throw ParseError("expected: link <name> : <terms>", lineno, toks[0].col);
            const std::ptrdiff_t bi = ps.bool_index(toks[1].text);
            if (bi < 0)
                throw ParseError("unknown boolean '" + toks[1].text + "'", lineno, toks[1].col);
            std::size_t i = 3;
            Polynomial p = ps.parse_terms(toks, i, lineno);
            links.push_back({static_cast<std::size_t>(bi), std::move(p)});
        } else {
            throw ParseError("unknown directive '" + head + "'", lineno, toks[0].col);
        }
    }

    Box domain(ps.lo, ps.hi);
    if (ps.bool_names.empty()) {
        if (!clauses.empty() || !rows.empty() || !links.empty())
            throw ParseError("boolean structure without boolean variables", 1, 1);
        ProblemF F;
        F.domain = std::move(domain);
        F.constraints = std::move(constraints);
        F.var_names = std::move(ps.var_names);
        return F;
    }
    SmtProblem S;
    S.nbools = ps.bool_names.size();
    S.bool_names = std::move(ps.bool_names);
    S.domain = std::move(domain);
    S.unconditional = std::move(constraints);
    S.clauses = std::move(clauses);
    S.pb_rows = std::move(rows);
    S.links = std::move(links);
    S.var_names = std::move(ps.var_names);
    return S;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_poly(std::ostream& os, const Polynomial& p, const std::vector<std::string>& names) {
    if (p.terms().empty()) {
        os << "0";
        return;
    }
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        if (!first) os << " ; ";
        first = false;
        os << fmt_double(c);
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) continue;
            os << " " << names[k];
            if (e[k] > 1) os << "^" << e[k];
        }
    }
}

void emit_common(std::ostream& os, const Box& domain, const std::vector<std::string>& names) {
    os << "polyar 1\n";
    for (std::size_t k = 0; k < domain.nvars(); ++k)
        os << "var " << names[k] << " " << fmt_double(domain.lo[k]) << " "
           << fmt_double(domain.hi[k]) << "\n";
}

std::vector<std::string> default_names(std::size_t n, const std::vector<std::string>& given,
                                       const char* prefix) {
    if (given.size() == n) return given;
    std::vector<std::string> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back(prefix + std::to_string(k));
    return out;
}

} // namespace

std::string serialize_problem(const ProblemF& f) {
    std::ostringstream os;
    const auto names = default_names(f.domain.nvars(), f.var_names, "x");
    emit_common(os, f.domain, names);
    for (const auto& p : f.constraints) {
        os << "constraint <= ";
        emit_poly(os, p, names);
        os << "\n";
    }
    return os.str();
}

std::string serialize_problem(const SmtProblem& p) {
    std::ostringstream os;
    const auto names = default_names(p.domain.nvars(), p.var_names, "x");
    const auto bnames = default_names(p.nbools, p.bool_names, "b");
    emit_common(os, p.domain, names);
    for (const auto& b : bnames) os << "bool " << b << "\n";
    for (const auto& q : p.unconditional) {
        os << "constraint <= ";
        emit_poly(os, q, names);
        os << "\n";
    }
    for (const auto& cl : p.clauses) {
        os << "clause";
        for (const auto& l : cl) os << " " << (l.negated ? "!" : "") << bnames[l.var];
        os << "\n";
    }
    for (const auto& row : p.pb_rows) {
        os << "card " << (row.rel == PbRow::Rel::Eq ? "=" : "<=") << " " << row.bound << " : ";
        bool first = true;
        for (const auto& [c, v] : row.terms) {
            if (!first) os << " , ";
            first = false;
            os << c << " " << bnames[v];
        }
        os << "\n";
    }
    for (const auto& link : p.links) {
        os << "link " << bnames[link.var] << " : ";
        emit_poly(os, link.poly, names);
        os << "\n";
    }
    return os.str();
}

std::string verdict_to_json(const Verdict& v, const std::vector<std::string>& var_names,
                            const Config& cfg) {
    nlohmann::json j;
    j["status"] = to_string(v.status);
    if (v.model) {
        nlohmann::json m = nlohmann::json::object();
        const auto names = default_names(v.model->size(), var_names, "x");
        for (std::size_t k = 0; k < v.model->size(); ++k) m[names[k]] = (*v.model)[k];
        j["model"] = m;
    } else {
        j["model"] = nullptr;
    }
    if (!v.bool_model.empty()) {
        j["bool_model"] = v.bool_model;
    }
    j["stats"] = {
        {"refine_rounds", v.stats.refine_rounds},
        {"boxes_neg", v.stats.boxes_neg},
        {"boxes_pos", v.stats.boxes_pos},
        {"boxes_ambig", v.stats.boxes_ambig},
        {"volume_neg", v.stats.volume_neg},
        {"volume_pos", v.stats.volume_pos},
        {"volume_ambig", v.stats.volume_ambig},
        {"convex_calls", v.stats.convex_calls},
        {"subsolver_calls", v.stats.subsolver_calls},
        {"probe_samples", v.stats.probe_samples},
        {"budget_exhausted", v.stats.budget_exhausted},
        {"wall_ms", v.stats.wall_ms},
        {"refine_ms", v.stats.refine_ms},
        {"endgame_ms", v.stats.endgame_ms},
    };
    j["config"] = {
        {"vol_threshold_frac", cfg.vol_threshold_frac},
        {"epsilon", cfg.epsilon},
        {"timeout_s", cfg.timeout_s},
        {"workers", cfg.workers()},
        {"refine_budget", cfg.refine_budget},
        {"min_width_frac", cfg.min_width_frac},
        {"templates", cfg.templates == TemplateKind::Simplex ? "simplex" : "axis"},
        {"external_solver", cfg.external_solver},
        {"seed", cfg.seed},
        {"probe", cfg.probe},
    };
    return j.dump(2);
}

} // namespace polyar

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyar/bench.hpp"
#include "polyar/problem_io.hpp"
#include "polyar/region_solver.hpp"
#include "polyar/smt.hpp"

namespace {

using namespace polyar;

int status_exit_code(Status s) {
    switch (s) {
        case Status::Sat: return 0;
        case Status::Unsat: return 1;
        case Status::Unknown: return 2;
        case Status::Timeout: return 3;
    }
    return 2;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct SolveFlags {
    double threshold = 1e-3;
    double epsilon = 1e-6;
    double timeout = 3600.0;
    std::size_t workers = 0;
    std::string subsolver = "internal";
    std::string templ = "simplex";
    std::string json_out;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--threshold", threshold, "volume threshold as a fraction of the domain");
        cmd->add_option("--epsilon", epsilon, "slack for strict/equality rewrites");
        cmd->add_option("--timeout", timeout, "wall-clock budget in seconds");
        cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
        cmd->add_option("--subsolver", subsolver, "internal | external:<path>");
        cmd->add_option("--template", templ, "simplex | axis")
            ->check(CLI::IsMember({"simplex", "axis"}));
        cmd->add_option("--json-out", json_out, "write the result document to this path");
    }

    SmtConfig config() const {
        SmtConfig cfg;
        cfg.vol_threshold_frac = threshold;
        cfg.epsilon = epsilon;
        cfg.timeout_s = timeout;
        cfg.max_workers = workers;
        cfg.templates = templ == "axis" ? TemplateKind::Axis : TemplateKind::Simplex;
        cfg.seed = seed;
        if (subsolver.rfind("external:", 0) == 0) cfg.external_solver = subsolver.substr(9);
        else if (subsolver != "internal")
            throw CLI::ValidationError("--subsolver", "expected internal or external:<path>");
        return cfg;
    }
};

void print_verdict(const Verdict& v, const std::vector<std::string>& var_names,
                   const std::vector<std::string>& bool_names) {
    std::cout << to_string(v.status) << "\n";
    if (v.model) {
        for (std::size_t k = 0; k < v.model->size(); ++k) {
            const std::string name = k < var_names.size() ? var_names[k] : "x" + std::to_string(k);
            std::cout << "  " << name << " = " << (*v.model)[k] << "\n";
        }
    }
    for (std::size_t k = 0; k < v.bool_model.size(); ++k) {
        const std::string name = k < bool_names.size() ? bool_names[k] : "b" + std::to_string(k);
        std::cout << "  " << name << " = " << (v.bool_model[k] ? "true" : "false") << "\n";
    }
    std::cerr << "rounds=" << v.stats.refine_rounds << " boxes(neg/pos/ambig)=" << v.stats.boxes_neg
              << "/" << v.stats.boxes_pos << "/" << v.stats.boxes_ambig
              << " subsolver_calls=" << v.stats.subsolver_calls << " wall_ms=" << v.stats.wall_ms
              << "\n";
}

void maybe_write_json(const SolveFlags& fl, const Verdict& v,
                      const std::vector<std::string>& names) {
    if (fl.json_out.empty()) return;
    std::ofstream f(fl.json_out);
    f << verdict_to_json(v, names, fl.config()) << "\n";
}

Verdict solve_with_external(const ProblemF& F, const SmtConfig& cfg) {
    auto res = run_external_solver(cfg.external_solver, F.domain, F.constraints, cfg.timeout_s);
    Verdict v;
    v.status = res.status;
    v.model = res.model;
    if (!res.diagnostic.empty()) std::cerr << res.diagnostic << "\n";
    return v;
}

int cmd_solve(const std::string& file, const SolveFlags& fl) {
    const SmtConfig cfg = fl.config();
    ParsedProblem parsed = parse_problem(read_file(file), cfg.epsilon);
    Verdict v;
    std::vector<std::string> names, bnames;
    if (std::holds_alternative<ProblemF>(parsed)) {
        const auto& F = std::get<ProblemF>(parsed);
        names = F.var_names;
        v = cfg.external_solver.empty() ? solve(F, cfg) : solve_with_external(F, cfg);
    } else {
        const auto& S = std::get<SmtProblem>(parsed);
        names = S.var_names;
        bnames = S.bool_names;
        v = solve_smt(S, cfg);
    }
    print_verdict(v, names, bnames);
    maybe_write_json(fl, v, names);
    return status_exit_code(v.status);
}

int cmd_bench_sof(std::size_t na, std::size_t nb, std::size_t nc, double klo, double khi,
                  std::uint64_t seed, bool example5, const std::string& emit,
                  const SolveFlags& fl) {
    bench::SofInstance inst;
    inst.n_a = na;
    inst.n_b = nb;
    inst.n_c = nc;
    inst.k_lo = klo;
    inst.k_hi = khi;
    inst.seed = seed;
    inst.example5_structure = example5;
    auto sp = bench::gen_sof(inst);

    if (!emit.empty()) {
        std::ofstream f(emit);
        if (std::holds_alternative<ProblemF>(sp.problem))
            f << serialize_problem(std::get<ProblemF>(sp.problem));
        else
            f << serialize_problem(std::get<SmtProblem>(sp.problem));
        return 0;
    }

    SmtConfig cfg = fl.config();
    Verdict v;
    std::vector<std::string> names, bnames;
    if (std::holds_alternative<ProblemF>(sp.problem)) {
        const auto& F = std::get<ProblemF>(sp.problem);
        names = F.var_names;
        v = solve(F, cfg);
    } else {
        const auto& S = std::get<SmtProblem>(sp.problem);
        names = S.var_names;
        bnames = S.bool_names;
        v = solve_smt(S, cfg);
    }
    print_verdict(v, names, bnames);
    maybe_write_json(fl, v, names);
    return status_exit_code(v.status);
}

int cmd_bench_duffing(std::size_t n, double zeta, int steps, std::uint64_t seed,
                      const SolveFlags& fl) {
    (void)seed;
    std::vector<double> x;
    if (n == 2) x = {0.4, 0.1};
    else if (n == 3) x = {0.1, 0.1, 0.1};
    else x = {0.1, 0.1, 0.01, 0.1};

    const double delta = 0.015;  // forced fraction of V to shed per step
    for (int k = 0; k < steps; ++k) {
        bench::DuffingInstance inst;
        inst.n = n;
        inst.zeta = zeta;
        inst.x_k = x;
        auto dp = bench::gen_duffing(inst);
        const double vcur = bench::lyapunov_value(dp.P, x);
        inst.lyap_epsilon = std::max(1e-6, delta * vcur);
        dp = bench::gen_duffing(inst);

        SmtConfig cfg = fl.config();
        cfg.seed = static_cast<std::uint64_t>(k) + 1;
        Verdict v = solve(dp.problem, cfg);
        if (v.status != Status::Sat || !v.model) {
            std::cerr << "step " << k << ": " << to_string(v.status) << "\n";
            return status_exit_code(v.status);
        }
        const double viol = bench::duffing_verify(dp, *v.model);
        if (viol > inst.epsilon + 1e-9) {
            std::cerr << "step " << k << ": model violates constraints by " << viol << "\n";
            return 2;
        }
        std::cout << k << " u=" << (*v.model)[n];
        std::cout << " x=";
        for (std::size_t i = 0; i < n; ++i) std::cout << (i ? "," : "") << (*v.model)[i];
        std::cout << " V=" << vcur << "\n";
        x.assign(v.model->begin(), v.model->begin() + static_cast<std::ptrdiff_t>(n));
    }
    return 0;
}

int cmd_bench_switching(const std::string& emit, const SolveFlags& fl) {
    auto sp = bench::gen_switching(bench::SwitchingInstance::example_instance());
    if (!emit.empty()) {
        std::ofstream f(emit);
        f << serialize_problem(sp.problem);
        return 0;
    }
    SmtConfig cfg = fl.config();
    Verdict v = solve_smt(sp.problem, cfg);
    print_verdict(v, sp.problem.var_names, sp.problem.bool_names);
    if (v.status == Status::Sat && v.model) {
        const double viol = bench::switching_verify(sp, v.bool_model, *v.model);
        std::cout << "verifier max violation: " << viol << "\n";
    }
    maybe_write_json(fl, v, sp.problem.var_names);
    return status_exit_code(v.status);
}

int cmd_verify(const std::string& file, const std::string& model_path, double tol) {
    ParsedProblem parsed = parse_problem(read_file(file));
    const std::string text = read_file(model_path);

    std::vector<double> model;
    std::vector<bool> bool_model;
    try {
        auto j = nlohmann::json::parse(text);
        if (j.contains("model") && j["model"].is_object()) {
            const auto& names = std::holds_alternative<ProblemF>(parsed)
                                    ? std::get<ProblemF>(parsed).var_names
                                    : std::get<SmtProblem>(parsed).var_names;
            for (const auto& nm : names) model.push_back(j["model"].at(nm).get<double>());
        }
        if (j.contains("bool_model"))
            for (bool b : j["bool_model"]) bool_model.push_back(b);
    } catch (const nlohmann::json::exception&) {
        std::istringstream is(text);
        double v;
        while (is >> v) model.push_back(v);
    }

    double viol = 0.0;
    if (std::holds_alternative<ProblemF>(parsed)) {
        const auto& F = std::get<ProblemF>(parsed);
        if (model.size() != F.domain.nvars()) {
            std::cerr << "model size mismatch\n";
            return 64;
        }
        for (const auto& p : F.constraints) viol = std::max(viol, p.eval(model));
        for (std::size_t k = 0; k < model.size(); ++k) {
            viol = std::max(viol, F.domain.lo[k] - model[k]);
            viol = std::max(viol, model[k] - F.domain.hi[k]);
        }
    } else {
        const auto& S = std::get<SmtProblem>(parsed);
        if (model.size() != S.domain.nvars() || bool_model.size() != S.nbools) {
            std::cerr << "model size mismatch (need real and boolean values)\n";
            return 64;
        }
        ProblemF F = induced_problem(bool_model, S, 1e-6);
        for (const auto& p : F.constraints) viol = std::max(viol, p.eval(model));
        for (std::size_t k = 0; k < model.size(); ++k) {
            viol = std::max(viol, S.domain.lo[k] - model[k]);
            viol = std::max(viol, model[k] - S.domain.hi[k]);
        }
    }
    std::cout << "max violation: " << viol << "\n";
    return viol <= tol ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polynomial inequality feasibility solver"};
    app.require_subcommand(1);

    SolveFlags fl;
    if (const char* env = std::getenv("POLYAR_WORKERS")) {
        char* end = nullptr;
        const unsigned long w = std::strtoul(env, &end, 10);
        if (end && *end == '\0') fl.workers = static_cast<std::size_t>(w);
    }

    std::string solve_file;
    auto* solve_cmd = app.add_subcommand("solve", "solve a problem file");
    solve_cmd->add_option("file", solve_file, "problem file")->required();
    solve_cmd->add_option("--seed", fl.seed, "probe RNG seed");
    fl.attach(solve_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark family");
    bench_cmd->require_subcommand(1);

    std::size_t na = 3, nb = 4, nc = 4;
    double klo = -4.0, khi = 7.0;
    std::uint64_t seed = 0;
    bool example5 = false;
    std::string emit;
    auto* sof_cmd = bench_cmd->add_subcommand("sof", "static output feedback synthesis");
    sof_cmd->add_option("--na", na, "state dimension (2..5)");
    sof_cmd->add_option("--nb", nb, "input dimension");
    sof_cmd->add_option("--nc", nc, "output dimension");
    sof_cmd->add_option("--klo", klo, "gain lower bound");
    sof_cmd->add_option("--khi", khi, "gain upper bound");
    sof_cmd->add_option("--seed", seed, "generator seed");
    sof_cmd->add_flag("--example5", example5, "attach the structural Boolean constraints");
    sof_cmd->add_option("--emit", emit, "write the problem file instead of solving");
    fl.attach(sof_cmd);

    std::size_t dn = 2;
    double zeta = 0.3;
    int steps = 1;
    auto* duff_cmd = bench_cmd->add_subcommand("duffing", "oscillator controller rollout");
    duff_cmd->add_option("--n", dn, "state dimension (2..4)");
    duff_cmd->add_option("--zeta", zeta, "damping coefficient");
    duff_cmd->add_option("--steps", steps, "rollout length");
    duff_cmd->add_option("--seed", seed, "probe seed base");
    fl.attach(duff_cmd);

    auto* switch_cmd = bench_cmd->add_subcommand("switching", "switching signal design");
    switch_cmd->add_option("--seed", seed, "probe seed");
    switch_cmd->add_option("--emit", emit, "write the problem file instead of solving");
    fl.attach(switch_cmd);

    std::string verify_file, verify_model;
    double verify_tol = 1e-9;
    auto* verify_cmd = app.add_subcommand("verify", "check a model against a problem file");
    verify_cmd->add_option("file", verify_file, "problem file")->required();
    verify_cmd->add_option("model", verify_model, "model file (JSON result or plain numbers)")
        ->required();
    verify_cmd->add_option("--tol", verify_tol, "acceptance tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(solve_file, fl);
        if (bench_cmd->parsed()) fl.seed = seed;
        if (sof_cmd->parsed()) return cmd_bench_sof(na, nb, nc, klo, khi, seed, example5, emit, fl);
        if (duff_cmd->parsed()) return cmd_bench_duffing(dn, zeta, steps, seed, fl);
        if (switch_cmd->parsed()) return cmd_bench_switching(emit, fl);
        if (verify_cmd->parsed()) return cmd_verify(verify_file, verify_model, verify_tol);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    }
    return 64;
}

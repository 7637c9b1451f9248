#include "ltvprop/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ltvprop/oracle.hpp"
#include "ltvprop/problem.hpp"
#include "ltvprop/solution_io.hpp"
#include "ltvprop/verify.hpp"

namespace ltvprop::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string file;
    std::string out;
    int grid_n = 0;       // 0 = keep the file's value
    int max_terms = 0;    // 0 = keep
    double term_tol = 0;  // 0 = keep
    bool oracle = false;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

Problem load_with_overrides(const Options& opt) {
    Problem p = load_problem(opt.file);
    if (opt.grid_n != 0) {
        if (opt.grid_n <= 0 || opt.grid_n % 2 != 0)
            throw InvalidArgumentError("--grid must be a positive even integer");
        p.n_intervals = opt.grid_n;
    }
    if (opt.max_terms != 0) {
        if (opt.max_terms < 1) throw InvalidArgumentError("--max-terms must be >= 1");
        p.series.max_terms = opt.max_terms;
    }
    if (opt.term_tol != 0) {
        if (!(opt.term_tol > 0)) throw InvalidArgumentError("--tol must be positive");
        p.series.term_tol = opt.term_tol;
    }
    if (opt.oracle) p.oracle = true;
    return p;
}

fs::path default_out(const std::string& file, const char* extension) {
    fs::path p(file);
    p.replace_extension(extension);
    return p;
}

Solution solve_dispatch(const Problem& p) {
    switch (p.kind) {
        case ProblemKind::Linear:
        case ProblemKind::NthOrder:
            return solve_linear_ivp(p.linear_ivp(), p.series);
        case ProblemKind::Sylvester:
            return solve_sylvester(p.sylvester_ivp(), p.series);
        case ProblemKind::Riccati:
        case ProblemKind::ScalarRiccati:
            return solve_riccati_block_E(p.riccati(), p.series).solution;
        case ProblemKind::RiccatiParticular:
            return riccati_from_particular(p.riccati(), p.series);
        case ProblemKind::Propagator:
            break;
    }
    throw InvalidArgumentError("kind 'propagator' has no solution table; use the "
                               "propagator subcommand");
}

Solution oracle_dispatch(const Problem& p) {
    switch (p.kind) {
        case ProblemKind::Linear:
        case ProblemKind::NthOrder:
            return rk4_linear(p.linear_ivp(), OracleConfig{});
        case ProblemKind::Riccati:
        case ProblemKind::ScalarRiccati:
        case ProblemKind::RiccatiParticular:
            return rk4_riccati(p.riccati(), OracleConfig{});
        case ProblemKind::Sylvester: {
            const SylvesterIvp ivp = p.sylvester_ivp();
            const RiccatiProblem embedded{ivp.A,
                                          ivp.B.negated(),
                                          CoeffMatrix::zero(ivp.B.rows(), ivp.A.rows(),
                                                            ivp.A.domain()),
                                          ivp.P,
                                          ivp.U0,
                                          ivp.grid};
            return rk4_riccati(embedded, OracleConfig{});
        }
        case ProblemKind::Propagator:
            break;
    }
    throw InvalidArgumentError("no oracle for kind 'propagator' through solve");
}

int cmd_solve(const Options& opt, std::ostream& out, std::ostream& err) {
    Problem p;
    try {
        p = load_with_overrides(opt);
        if (p.kind == ProblemKind::Propagator)
            throw InvalidArgumentError("kind 'propagator' has no solution table; use the "
                                       "propagator subcommand");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        const Solution s = solve_dispatch(p);
        const fs::path path = opt.out.empty() ? default_out(opt.file, ".csv") : fs::path(opt.out);
        write_solution_csv(s, path);
        err << "wrote " << path.string() << "\n";
        for (const PropagatorStats& st : s.meta.propagators) {
            out << st.label << " terms_used=" << st.terms_used
                << " last_term_norm=" << fmt(st.last_term_norm)
                << " tail_bound=" << fmt(st.tail_bound) << "\n";
        }
        if (s.meta.blow_up_x)
            out << "blow_up_x " << fmt(*s.meta.blow_up_x) << " node "
                << *s.meta.blow_up_node << "\n";
        if (p.oracle) {
            const Solution ref = oracle_dispatch(p);
            out << "oracle-disagreement " << fmt(compare(s, ref)) << "\n";
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_propagator(const Options& opt, std::ostream& out, std::ostream& err) {
    Problem p;
    try {
        p = load_with_overrides(opt);
        if (p.kind != ProblemKind::Propagator)
            throw InvalidArgumentError("the propagator subcommand needs kind 'propagator', got '" +
                                       kind_name(p.kind) + "'");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        const Grid grid = p.grid();
        const PropagatorTable E = compute_E(*p.X, grid, p.series);
        const PropagatorTable F = compute_F(*p.X, grid, p.series);

        fs::path base = opt.out.empty() ? fs::path(opt.file) : fs::path(opt.out);
        if (base.extension() == ".csv" || base.extension() == ".json") base.replace_extension();
        const fs::path e_path = base.string() + ".E.csv";
        const fs::path f_path = base.string() + ".F.csv";
        write_table_csv(E, grid, e_path);
        write_table_csv(F, grid, f_path);
        err << "wrote " << e_path.string() << " and " << f_path.string() << "\n";

        out << "E terms_used=" << E.terms_used << " last_term_norm=" << fmt(E.last_term_norm)
            << " tail_bound=" << fmt(E.tail_bound)
            << " residual=" << fmt(propagator_residual(E, *p.X, grid)) << "\n";
        out << "F terms_used=" << F.terms_used << " last_term_norm=" << fmt(F.last_term_norm)
            << " tail_bound=" << fmt(F.tail_bound)
            << " residual=" << fmt(propagator_residual(F, *p.X, grid)) << "\n";
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
    Problem p;
    try {
        p = load_with_overrides(opt);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        const Report report = verify_problem(p);
        write_report(report, out);
        if (!opt.out.empty()) {
            std::ostringstream text;
            write_report(report, text);
            const fs::path path(opt.out);
            std::ofstream file(path, std::ios::binary | std::ios::trunc);
            if (!file) throw IoError("cannot write to " + path.string());
            file << text.str();
        }
        err << "elapsed " << fmt(report.elapsed_seconds) << " s\n";
        return report.all_pass() ? 0 : 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

struct SelftestCase {
    std::string name;
    bool pass = false;
    std::string detail;
};

// The worked examples the repo validates itself with: a nilpotent
// propagator, the harmonic oscillator, the 1/(1+x) scalar Riccati decay and
// the 1/(1-x) finite-escape family.
std::vector<SelftestCase> run_selftest(const fs::path& outdir) {
    std::vector<SelftestCase> cases;
    const SeriesConfig cfg;

    {
        SelftestCase c;
        c.name = "nilpotent-propagator";
        const Grid grid(0.0, 1.0, 50);
        const CoeffMatrix X = CoeffMatrix::from_strings({{"0", "1"}, {"0", "0"}}, {0.0, 1.0});
        const PropagatorTable E = compute_E(X, grid, cfg);
        double res = 0.0;
        for (int i = 0; i < grid.n_nodes(); ++i) {
            const Matrix closed{{1.0, grid.node(i)}, {0.0, 1.0}};
            res = std::max(res, norm_max(E.values[i] - closed));
        }
        c.pass = res <= 1e-12 && E.terms_used == 2;
        c.detail = "max deviation from [[1,x],[0,1]] = " + fmt(res) +
                   ", terms_used=" + std::to_string(E.terms_used);
        write_table_csv(E, grid, outdir / "nilpotent_E.csv");
        cases.push_back(std::move(c));
    }
    {
        SelftestCase c;
        c.name = "harmonic-oscillator";
        const Grid grid(0.0, 1.0, 200);
        const LinearIvp ivp = companion_from_scalar(
            {parse_expr("0"), parse_expr("1")}, Expr{}, {0.0, 1.0}, grid);
        const Solution s = solve_linear_ivp(ivp, cfg);
        const double u1 = s.values.back()(1, 0);
        const double diff = std::fabs(u1 - std::cos(1.0));
        c.pass = diff <= 1e-8;
        c.detail = "|u(1) - cos 1| = " + fmt(diff);
        write_solution_csv(s, outdir / "harmonic_oscillator.csv");
        cases.push_back(std::move(c));
    }
    {
        SelftestCase c;
        c.name = "scalar-riccati-decay";
        const Grid grid(0.0, 1.0, 200);
        const Solution s = scalar_riccati(parse_expr("1"), parse_expr("0"), parse_expr("0"),
                                          1.0, grid, cfg);
        const double diff = std::fabs(s.values.back()(0, 0) - 0.5);
        c.pass = diff <= 1e-9;
        c.detail = "|W(1) - 1/2| = " + fmt(diff);
        write_solution_csv(s, outdir / "riccati_decay.csv");
        cases.push_back(std::move(c));
    }
    {
        SelftestCase c;
        c.name = "riccati-blow-up";
        const Grid grid(0.0, 2.0, 200);
        const Solution s = scalar_riccati(parse_expr("-1"), parse_expr("0"), parse_expr("0"),
                                          1.0, grid, cfg);
        if (!s.meta.blow_up_x) {
            c.detail = "no blow-up reported";
        } else {
            const double diff = std::fabs(*s.meta.blow_up_x - 1.0);
            c.pass = diff <= 1.5 * grid.spacing();
            c.detail = "|blow_up_x - 1| = " + fmt(diff);
        }
        write_solution_csv(s, outdir / "riccati_blow_up.csv");
        cases.push_back(std::move(c));
    }
    return cases;
}

int cmd_selftest(const std::string& out_arg, std::ostream& out, std::ostream& err) {
    const fs::path outdir = out_arg.empty() ? fs::path("selftest_out") : fs::path(out_arg);
    try {
        std::error_code ec;
        fs::create_directories(outdir, ec);
        if (ec) throw IoError("cannot create " + outdir.string() + ": " + ec.message());
        const auto cases = run_selftest(outdir);
        bool all = true;
        for (const SelftestCase& c : cases) {
            out << "SELFTEST " << c.name << " " << (c.pass ? "PASS" : "FAIL") << " (" << c.detail
                << ")\n";
            all = all && c.pass;
        }
        return all ? 0 : 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"iterated-integral propagators for linear time-varying and Riccati systems"};
    app.require_subcommand(1);

    Options opt;
    std::string selftest_out;

    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("file", opt.file, "problem file (JSON)")->required();
        sub->add_option("--out", opt.out, "output path");
        sub->add_option("--grid", opt.grid_n, "override n_intervals (positive even)");
        sub->add_option("--max-terms", opt.max_terms, "override series max_terms");
        sub->add_option("--tol", opt.term_tol, "override series term tolerance");
        sub->add_flag("--oracle", opt.oracle, "enable the RK4 oracle comparison");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve the problem and write the solution table");
    add_common(solve);
    CLI::App* propagator =
        app.add_subcommand("propagator", "write the E and F tables of a propagator problem");
    add_common(propagator);
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite and write a report");
    add_common(verify);
    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in example corpus");
    selftest->add_option("--out", selftest_out, "directory for the example outputs");

    // CLI11 consumes argv-style arrays; rebuild one from the string args.
    std::vector<const char*> argv;
    argv.push_back("ltvprop");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    if (solve->parsed()) return cmd_solve(opt, out, err);
    if (propagator->parsed()) return cmd_propagator(opt, out, err);
    if (verify->parsed()) return cmd_verify(opt, out, err);
    return cmd_selftest(selftest_out, out, err);
}

}  // namespace ltvprop::cli

// Command-line front end.  Every number printed comes straight from a library
// call (the CLI adds no arithmetic of its own); exit codes are part of the
// contract: 0 ok, 1 verification failures, 2 usage/domain/parse, 3
// non-convergence, 4 unsupported regime, 5 I/O.

#include "CLI11.hpp"

#include <nucalc/errors.hpp>
#include <nucalc/expr.hpp>
#include <nucalc/harness.hpp>
#include <nucalc/mittag_leffler.hpp>
#include <nucalc/nu_calculus.hpp>
#include <nucalc/special_functions.hpp>
#include <nucalc/version.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace nucalc;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// configuration file: plain `key=value` lines, '#' comments.  Flags override
// config values, config overrides built-ins.

struct Settings {
    MLParams params;
    SeriesControl series;
    QuadratureControl quad;
    EpsilonSchedule eps;
};

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ValidationError("not a number: '" + item + "'");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size()) throw ValidationError("not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("empty number list");
    return out;
}

void apply_config_line(Settings& s, const std::string& key, const std::string& value) {
    auto as_double = [&] { return parse_double_list(value).at(0); };
    auto as_int = [&] {
        const double v = as_double();
        return static_cast<int>(v);
    };
    if (key == "params.alpha") s.params.alpha = as_double();
    else if (key == "params.beta") s.params.beta = as_double();
    else if (key == "params.gamma") s.params.gamma = as_double();
    else if (key == "params.c") s.params.c = as_double();
    else if (key == "params.p") s.params.p = as_double();
    else if (key == "series.rel_tol") s.series.rel_tol = as_double();
    else if (key == "series.max_terms") s.series.max_terms = as_int();
    else if (key == "series.tail_streak") s.series.tail_streak = as_int();
    else if (key == "quad.rel_tol") s.quad.rel_tol = as_double();
    else if (key == "quad.max_levels") s.quad.max_levels = as_int();
    else if (key == "eps.list") s.eps.eps = parse_double_list(value);
    else if (key == "eps.extrapolate") s.eps.extrapolate = as_int() != 0;
    else throw ValidationError("unknown config key '" + key + "'");
}

void load_config_file(Settings& s, const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = v.find_last_not_of(" \t\r");
            return v.substr(b, e - b + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected key=value";
            throw ValidationError(os.str());
        }
        try {
            apply_config_line(s, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
        } catch (const ValidationError& e) {
            std::ostringstream os;
            os << path << ":" << lineno << ": " << e.what();
            throw ValidationError(os.str());
        }
    }
}

Settings effective_settings(const std::string& config_flag) {
    Settings s;  // built-in defaults
    std::string path = config_flag;
    if (path.empty()) {
        if (const char* env = std::getenv("NUCALC_CONFIG")) path = env;
    }
    if (!path.empty()) load_config_file(s, path);
    return s;
}

MLParams params_from_flag(const Settings& s, const std::string& flag) {
    if (flag.empty()) return s.params;
    const std::vector<double> v = parse_double_list(flag);
    if (v.size() != 5) {
        throw ValidationError("--params expects 5 comma-separated values alpha,beta,gamma,c,p");
    }
    return MLParams{v[0], v[1], v[2], v[3], v[4]};
}

// ---------------------------------------------------------------------------
// subcommand state

struct EvalArgs {
    std::string fn;
    std::optional<double> x, z, y, p, alpha, rho, lambda, delta, theta, vartheta, nu, c, q, mu;
    int i = 1;
    std::string params_flag;
};

struct DerivArgs {
    std::string expr;
    double t = 0.0, mu = 0.0;
    std::string method = "chain";
    int i = 1;
    std::string params_flag;
};

struct IntegArgs {
    std::string expr;
    double a = 0.0, t = 0.0, mu = 0.0;
    std::string params_flag;
};

struct VerifyArgs {
    std::uint64_t seed = 42;
    int cases = 25;
    std::string out = "nucalc_report.json";
};

struct TableArgs {
    std::string expr;
    std::string op;
    double t_min = 0.0, t_max = 0.0;
    int steps = 0;
    std::string format = "csv";
    double mu = 0.5;
    double a = 0.0;
    double rho = 1.0, lambda = 1.0, delta = 1.0;
    std::string params_flag;
};

double need(const std::optional<double>& v, const char* flag, const std::string& fn) {
    if (!v) {
        throw ValidationError(std::string(flag) + " is required for --fn " + fn);
    }
    return *v;
}

void print_series_record(const SeriesResult& r) {
    std::cout << "value=" << fmt(r.value) << " terms_used=" << r.terms_used
              << " tail_estimate=" << fmt(r.tail_estimate) << "\n";
}

int cmd_eval(const EvalArgs& a, const Settings& s) {
    const MLParams params = params_from_flag(s, a.params_flag);
    if (a.fn == "gamma") {
        std::cout << "value=" << fmt(gamma_fn(need(a.x, "--x", a.fn))) << "\n";
    } else if (a.fn == "beta") {
        std::cout << "value=" << fmt(beta_fn(need(a.z, "--z", a.fn), need(a.y, "--y", a.fn)))
                  << "\n";
    } else if (a.fn == "extbeta") {
        const QuadResult r = extended_beta_full(need(a.z, "--z", a.fn), need(a.y, "--y", a.fn),
                                                need(a.p, "--p", a.fn), s.quad);
        std::cout << "value=" << fmt(r.value) << " error_estimate=" << fmt(r.error_estimate)
                  << "\n";
    } else if (a.fn == "ml1") {
        print_series_record(ml1(need(a.alpha, "--alpha", a.fn), need(a.z, "--z", a.fn), s.series));
    } else if (a.fn == "ml3") {
        print_series_record(ml3(need(a.rho, "--rho", a.fn), need(a.lambda, "--lambda", a.fn),
                                need(a.delta, "--delta", a.fn), need(a.z, "--z", a.fn), s.series));
    } else if (a.fn == "mlext") {
        print_series_record(ml_extended(need(a.theta, "--theta", a.fn),
                                        need(a.vartheta, "--vartheta", a.fn),
                                        need(a.nu, "--nu", a.fn), need(a.c, "--c", a.fn),
                                        need(a.p, "--p", a.fn), need(a.z, "--z", a.fn), s.series,
                                        s.quad));
    } else if (a.fn == "mlextgen") {
        print_series_record(ml_extended_gen(
            need(a.mu, "--mu", a.fn), need(a.delta, "--delta", a.fn),
            need(a.vartheta, "--vartheta", a.fn), need(a.q, "--q", a.fn), need(a.c, "--c", a.fn),
            need(a.p, "--p", a.fn), need(a.z, "--z", a.fn), s.series, s.quad));
    } else if (a.fn == "mltrunc") {
        std::cout << "value=" << fmt(ml_truncated(a.i, params, need(a.z, "--z", a.fn), s.quad))
                  << "\n";
    } else {
        throw ValidationError("unknown --fn '" + a.fn + "'");
    }
    return 0;
}

int cmd_deriv(const DerivArgs& a, const Settings& s) {
    const MLParams params = params_from_flag(s, a.params_flag);
    const FnHandle f = parse(a.expr);
    if (a.method == "chain") {
        std::cout << "value=" << fmt(deriv_chain(f, a.t, a.mu, params, s.quad)) << "\n";
        return 0;
    }
    const DerivResult r = deriv_limit(f, a.t, a.mu, a.i, params, s.eps, s.quad);
    for (const auto& [eps, quot] : r.per_eps) {
        std::cout << "eps=" << fmt(eps) << " quotient=" << fmt(quot) << "\n";
    }
    std::cout << "value=" << fmt(r.value) << " observed_order=" << fmt(r.observed_order) << "\n";
    return 0;
}

int cmd_integ(const IntegArgs& a, const Settings& s) {
    const MLParams params = params_from_flag(s, a.params_flag);
    const QuadResult r = integral_full(parse(a.expr), a.a, a.t, a.mu, params, s.quad);
    std::cout << "value=" << fmt(r.value) << " error_estimate=" << fmt(r.error_estimate) << "\n";
    return 0;
}

int cmd_verify(const VerifyArgs& a) {
    const CheckReport rep = run_suite(a.seed, a.cases, a.out);
    std::cout << "cases=" << rep.cases.size() << " passed=" << rep.n_passed
              << " failed=" << rep.n_failed << " report=" << a.out << "\n";
    return rep.all_passed() ? 0 : 1;
}

int cmd_table(const TableArgs& a, const Settings& s) {
    if (!(a.t_min < a.t_max)) {
        throw ValidationError("--t-min must be below --t-max");
    }
    if (a.steps < 2) {
        throw ValidationError("--steps must be at least 2");
    }
    const MLParams params = params_from_flag(s, a.params_flag);
    FnHandle f;
    if (a.op != "ml3") f = parse(a.expr);

    struct Row {
        double t;
        double value;
        double diag;
    };
    const char* diag_name = nullptr;
    std::vector<Row> rows;
    rows.reserve(a.steps);
    for (int j = 0; j < a.steps; ++j) {
        const double t =
            a.t_min + (a.t_max - a.t_min) * static_cast<double>(j) / (a.steps - 1);
        Row row{t, 0.0, 0.0};
        if (a.op == "deriv") {
            row.value = deriv_chain(f, t, a.mu, params, s.quad);
        } else if (a.op == "integ") {
            const QuadResult r = integral_full(f, a.a, t, a.mu, params, s.quad);
            row.value = r.value;
            row.diag = r.error_estimate;
            diag_name = "error_estimate";
        } else {  // ml3: the grid variable is the series argument
            const SeriesResult r = ml3(a.rho, a.lambda, a.delta, t, s.series);
            row.value = r.value;
            row.diag = static_cast<double>(r.terms_used);
            diag_name = "terms_used";
        }
        rows.push_back(row);
    }

    if (a.format == "csv") {
        std::cout << "t,value";
        if (diag_name) std::cout << "," << diag_name;
        std::cout << "\n";
        for (const Row& r : rows) {
            std::cout << fmt(r.t) << "," << fmt(r.value);
            if (diag_name) {
                if (a.op == "ml3") std::cout << "," << static_cast<int>(r.diag);
                else std::cout << "," << fmt(r.diag);
            }
            std::cout << "\n";
        }
    } else {  // json
        std::cout << "[\n";
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const Row& r = rows[j];
            std::cout << "  {\"t\": " << fmt(r.t) << ", \"value\": " << fmt(r.value);
            if (diag_name) {
                std::cout << ", \"" << diag_name << "\": ";
                if (a.op == "ml3") std::cout << static_cast<int>(r.diag);
                else std::cout << fmt(r.diag);
            }
            std::cout << "}" << (j + 1 < rows.size() ? "," : "") << "\n";
        }
        std::cout << "]\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated fractional calculus toolkit"};
    app.require_subcommand(1);
    std::string config_flag;
    app.add_option("--config", config_flag,
                   "key=value settings file (also honored via NUCALC_CONFIG)");

    EvalArgs ea;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a special function");
    eval_cmd->add_option("--fn", ea.fn, "one of gamma|beta|extbeta|ml1|ml3|mlext|mlextgen|mltrunc")
        ->required();
    eval_cmd->add_option("--x", ea.x, "argument (gamma)");
    eval_cmd->add_option("--z", ea.z, "first argument / series argument");
    eval_cmd->add_option("--y", ea.y, "second beta argument");
    eval_cmd->add_option("--p", ea.p, "regularization strength");
    eval_cmd->add_option("--alpha", ea.alpha, "order (ml1)");
    eval_cmd->add_option("--rho", ea.rho, "numerator parameter (ml3)");
    eval_cmd->add_option("--lambda", ea.lambda, "gamma-argument slope (ml3, mlextgen)");
    eval_cmd->add_option("--delta", ea.delta, "gamma-argument offset (ml3, mlextgen)");
    eval_cmd->add_option("--theta", ea.theta, "gamma-argument slope (mlext)");
    eval_cmd->add_option("--vartheta", ea.vartheta, "gamma-argument offset (mlext, mlextgen)");
    eval_cmd->add_option("--nu", ea.nu, "beta-integral parameter (mlext)");
    eval_cmd->add_option("--c", ea.c, "rising-factorial base (mlext, mlextgen)");
    eval_cmd->add_option("--q", ea.q, "step of the rising factorial (mlextgen)");
    eval_cmd->add_option("--mu", ea.mu, "gamma-argument slope (mlextgen)");
    eval_cmd->add_option("--i", ea.i, "truncation index (mltrunc)");
    eval_cmd->add_option("--params", ea.params_flag, "alpha,beta,gamma,c,p (mltrunc)");

    DerivArgs da;
    CLI::App* deriv_cmd = app.add_subcommand("deriv", "apply the fractional derivative");
    deriv_cmd->add_option("--expr", da.expr, "expression in t")->required();
    deriv_cmd->add_option("--t", da.t, "evaluation point")->required();
    deriv_cmd->add_option("--mu", da.mu, "order in (0, 1]")->required();
    deriv_cmd->add_option("--method", da.method, "chain (default) or limit")
        ->check(CLI::IsMember({"chain", "limit"}));
    deriv_cmd->add_option("--i", da.i, "series truncation index for the limit method");
    deriv_cmd->add_option("--params", da.params_flag, "alpha,beta,gamma,c,p");

    IntegArgs ia;
    CLI::App* integ_cmd = app.add_subcommand("integ", "apply the fractional integral");
    integ_cmd->add_option("--expr", ia.expr, "expression in t")->required();
    integ_cmd->add_option("--a", ia.a, "lower limit (>= 0)")->required();
    integ_cmd->add_option("--t", ia.t, "upper limit")->required();
    integ_cmd->add_option("--mu", ia.mu, "order (> 0)")->required();
    integ_cmd->add_option("--params", ia.params_flag, "alpha,beta,gamma,c,p");

    VerifyArgs va;
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the identity verification suite");
    verify_cmd->add_option("--seed", va.seed, "suite seed (default 42)");
    verify_cmd->add_option("--cases", va.cases, "cases per identity (default 25)");
    verify_cmd->add_option("--out", va.out, "report path (default nucalc_report.json)");

    TableArgs ta;
    CLI::App* table_cmd = app.add_subcommand("table", "tabulate an operator over a grid");
    table_cmd->add_option("--expr", ta.expr, "expression in t (deriv/integ)");
    table_cmd->add_option("--op", ta.op, "deriv, integ, or ml3")
        ->required()
        ->check(CLI::IsMember({"deriv", "integ", "ml3"}));
    table_cmd->add_option("--t-min", ta.t_min, "grid start")->required();
    table_cmd->add_option("--t-max", ta.t_max, "grid end")->required();
    table_cmd->add_option("--steps", ta.steps, "number of grid points (>= 2)")->required();
    table_cmd->add_option("--format", ta.format, "csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
    table_cmd->add_option("--mu", ta.mu, "operator order (default 0.5)");
    table_cmd->add_option("--a", ta.a, "integral lower limit (default 0)");
    table_cmd->add_option("--rho", ta.rho, "series parameter for --op ml3");
    table_cmd->add_option("--lambda", ta.lambda, "series parameter for --op ml3");
    table_cmd->add_option("--delta", ta.delta, "series parameter for --op ml3");
    table_cmd->add_option("--params", ta.params_flag, "alpha,beta,gamma,c,p");

    // let --config (a parent option) appear after the subcommand name too
    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help exits clean, any flag error is usage
    }

    try {
        const Settings settings = effective_settings(config_flag);
        if (eval_cmd->parsed()) return cmd_eval(ea, settings);
        if (deriv_cmd->parsed()) return cmd_deriv(da, settings);
        if (integ_cmd->parsed()) return cmd_integ(ia, settings);
        if (verify_cmd->parsed()) return cmd_verify(va);
        if (table_cmd->parsed()) return cmd_table(ta, settings);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const nucalc::UnsupportedRegime& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const nucalc::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const nucalc::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const nucalc::Error& e) {
        // parse, domain, validation: all usage-class failures
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

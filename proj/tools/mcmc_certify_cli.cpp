// mcmc-certify: command-line front end.
//
// Exit codes: 0 success, 1 failed check, 2 validation, 3 resource cap, 4 IO.

#include "mcmc_certify/mcmc_certify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace mc = mcmc_certify;
using nlohmann::json;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;
constexpr int kExitIo = 4;

int exit_code(mc::ErrorKind kind) {
    switch (kind) {
        case mc::ErrorKind::budget_overflow:
        case mc::ErrorKind::too_large: return kExitResource;
        case mc::ErrorKind::io: return kExitIo;
        default: return kExitValidation;
    }
}

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

json to_json(const mc::Vector &v) { return json(std::vector<double>(v.begin(), v.end())); }

const char *norm_name(mc::Norm p) {
    switch (p) {
        case mc::Norm::l1: return "l1";
        case mc::Norm::l2: return "l2";
        case mc::Norm::l4: return "l4";
        case mc::Norm::linf: return "linf";
    }
    return "?";
}

void print_json(const json &doc) { std::cout << doc.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string file;
    bool as_json = false;
};

int cmd_analyze(const AnalyzeArgs &args) {
    const auto input = mc::load_chain_file(args.file);
    const auto &chain = input.chain;
    const auto s = mc::spectral_decompose(chain);
    const auto &pi = chain.stationary();

    json doc{{"states", chain.size()},
             {"beta1", s.beta1()},
             {"beta", s.beta()},
             {"spectral_gap", s.spectral_gap()},
             {"eigenvalues", to_json(s.eigenvalues())},
             {"stationary", to_json(pi.weights())},
             {"eigen_residual", s.max_residual()},
             {"orthonormality_error", s.max_orthonormality_error()},
             {"reversibility_residual", chain.reversibility_residual()},
             {"stationarity_residual", chain.stationarity_residual()},
             {"inverse_pi_sup", mc::inverse_pi_sup(pi)},
             {"density_deviation_sup", nullptr},
             {"chi2", nullptr}};
    if (input.nu) {
        doc["density_deviation_sup"] = mc::density_deviation_sup(*input.nu, pi);
        doc["chi2"] = mc::chi2_contrast(*input.nu, pi);
    }
    if (args.as_json) {
        print_json(doc);
        return 0;
    }
    std::cout << "states                 " << chain.size() << '\n'
              << "beta1                  " << g6(s.beta1()) << '\n'
              << "beta                   " << g6(s.beta()) << '\n'
              << "spectral gap           " << g6(s.spectral_gap()) << '\n'
              << "eigen residual         " << g6(s.max_residual()) << '\n'
              << "orthonormality error   " << g6(s.max_orthonormality_error()) << '\n'
              << "reversibility residual " << g6(chain.reversibility_residual()) << '\n'
              << "stationarity residual  " << g6(chain.stationarity_residual()) << '\n'
              << "||1/pi||_inf           " << g6(mc::inverse_pi_sup(pi)) << '\n';
    if (input.nu) {
        std::cout << "||nu/pi - 1||_inf      " << g6(doc["density_deviation_sup"].get<double>()) << '\n'
                  << "chi2(nu, pi)           " << g6(doc["chi2"].get<double>()) << '\n';
    } else {
        std::cout << "nu                     (not given)\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ErrorArgs {
    std::string file;
    std::size_t n = 1;
    std::size_t n0 = 0;
    std::string norm = "all";
    bool exact = false;
    std::vector<std::uint64_t> simulate;
    unsigned threads = 0;
    int indicator = -1;
    bool as_json = false;
};

int cmd_error(const ErrorArgs &args) {
    const auto input = mc::load_chain_file(args.file);
    const auto &chain = input.chain;
    const auto s = mc::spectral_decompose(chain);
    const mc::Distribution nu = input.nu ? *input.nu : chain.stationary();

    std::optional<mc::StateFunction> f = input.f;
    if (args.indicator >= 0) {
        mc::detail::require(static_cast<std::size_t>(args.indicator) < chain.size(), mc::ErrorKind::invalid_argument,
                            "--indicator is out of range");
        mc::Vector v = mc::Vector::Zero(static_cast<Eigen::Index>(chain.size()));
        v(args.indicator) = 1.0;
        f = mc::StateFunction(v);
    }
    mc::detail::require(f.has_value(), mc::ErrorKind::invalid_argument, "no function f: add \"f\" to the file or pass --indicator");
    const mc::EstimatorSpec spec(args.n, args.n0);

    std::vector<mc::Norm> norms;
    if (args.norm == "all") {
        norms = {mc::Norm::l2, mc::Norm::l4, mc::Norm::linf};
    } else {
        norms = {args.norm == "l2" ? mc::Norm::l2 : args.norm == "l4" ? mc::Norm::l4 : mc::Norm::linf};
    }

    json doc{{"n", spec.n}, {"n0", spec.n0}, {"nu_given", input.nu.has_value()}};
    doc["stationary_mse"] = mc::stationary_error(s, *f, spec.n);
    const auto asym = mc::asymptotic_constant(s, f->values());
    doc["asymptotic_constant"] = asym.infinite ? json(nullptr) : json(asym.value);
    doc["exact"] = nullptr;
    if (args.exact) {
        const auto r = mc::exact_error(chain, s, nu, *f, spec, mc::work_cap_from_env());
        doc["exact"] = {{"mse", r.mse},
                        {"stationary_mse", r.stationary_mse},
                        {"diagonal_term", r.diagonal_term},
                        {"cross_term", r.cross_term},
                        {"correction", r.correction}};
    }
    doc["bounds"] = json::array();
    for (mc::Norm p : norms) {
        const auto t = mc::bound_theorem(chain, s, nu, *f, spec, p);
        const auto g = mc::bound_general_start(chain, s, nu, *f, spec, p);
        doc["bounds"].push_back({{"norm", norm_name(p)},
                                 {"leading_term", t.leading_term},
                                 {"correction_term", t.correction_term},
                                 {"total", t.total},
                                 {"general_start_total", g.total}});
    }
    doc["simulation"] = nullptr;
    if (!args.simulate.empty()) {
        mc::detail::require(args.simulate.size() == 2, mc::ErrorKind::invalid_argument, "--simulate takes R SEED");
        const auto r = mc::estimate_error(chain, nu, *f,
                                          mc::SimulationConfig(args.simulate[0], args.simulate[1], spec, args.threads));
        doc["simulation"] = {{"mse_hat", r.mse_hat},
                             {"std_error", r.std_error},
                             {"replications", r.replications},
                             {"seed", r.seed}};
    }

    if (args.as_json) {
        print_json(doc);
        return 0;
    }
    std::cout << "n = " << spec.n << ", n0 = " << spec.n0 << (input.nu ? "" : "  (nu = pi)") << '\n';
    std::cout << "stationary mse         " << g6(doc["stationary_mse"].get<double>()) << '\n';
    std::cout << "asymptotic constant    " << (asym.infinite ? "inf" : g6(asym.value)) << '\n';
    if (args.exact) {
        std::cout << "exact mse              " << g6(doc["exact"]["mse"].get<double>()) << '\n'
                  << "  burn-in correction   " << g6(doc["exact"]["correction"].get<double>()) << '\n';
    }
    for (const auto &b : doc["bounds"]) {
        std::cout << "bound " << b["norm"].get<std::string>() << std::string(17 - b["norm"].get<std::string>().size(), ' ')
                  << g6(b["total"].get<double>()) << "  (leading " << g6(b["leading_term"].get<double>())
                  << ", correction " << g6(b["correction_term"].get<double>()) << ")\n";
    }
    if (!args.simulate.empty()) {
        std::cout << "simulated mse          " << g6(doc["simulation"]["mse_hat"].get<double>()) << " +- "
                  << g6(doc["simulation"]["std_error"].get<double>()) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct BurninArgs {
    double beta = 0.0;
    double constant = 0.0;
    std::size_t budget = 0;
    std::string kind = "b4";
    std::string strategy = "suggested";
    std::string scaling = "theorem";
    bool as_json = false;
};

int cmd_burnin(const BurninArgs &args) {
    mc::detail::require(args.beta > 0.0 && args.beta < 1.0, mc::ErrorKind::invalid_argument, "--beta must lie in (0, 1)");
    mc::detail::require(args.constant > 0.0, mc::ErrorKind::invalid_argument, "--C must be positive");
    const mc::BudgetQuery query(args.budget, args.beta, args.constant);
    const auto kind = args.kind == "b4" ? mc::BoundKind::b4 : mc::BoundKind::binf;
    const auto scaling = args.scaling == "printed" ? mc::CorrectionScaling::printed : mc::CorrectionScaling::theorem;

    mc::BurninPlan plan;
    if (args.strategy == "optimize") {
        plan = mc::optimize_burnin(query, kind, scaling);
    } else if (args.strategy == "half") {
        plan = mc::half_budget_plan(query, kind, scaling);
    } else {
        plan = mc::suggested_plan(query, kind, scaling);
    }
    const auto suggested = mc::suggested_burnin(query);

    if (args.as_json) {
        print_json({{"N", query.budget()},
                    {"beta", query.beta()},
                    {"C", args.constant},
                    {"kind", mc::to_string(kind)},
                    {"strategy", mc::to_string(plan.strategy)},
                    {"scaling", args.scaling},
                    {"n0", plan.n0},
                    {"n", plan.n},
                    {"bound", plan.bound_value},
                    {"clamped", plan.clamped},
                    {"suggested_ratio", static_cast<double>(suggested.ratio)},
                    {"borderline", suggested.borderline}});
        return 0;
    }
    std::cout << "N          beta       C          kind  strategy     n0         n          bound\n";
    char line[200];
    std::snprintf(line, sizeof line, "%-10zu %-10s %-10s %-5s %-12s %-10zu %-10zu %s%s\n", query.budget(),
                  g6(query.beta()).c_str(), g6(args.constant).c_str(), std::string(mc::to_string(kind)).c_str(),
                  std::string(mc::to_string(plan.strategy)).c_str(), plan.n0, plan.n, g6(plan.bound_value).c_str(),
                  plan.clamped ? "  (clamped to N-1)" : "");
    std::cout << line;
    if (suggested.borderline) {
        std::cout << "note: log C / log(1/beta) is within 1e-9 of an integer\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ReproduceArgs {
    std::string target = "table1";
    std::string out = ".";
};

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream out(path);
    mc::detail::require(static_cast<bool>(out), mc::ErrorKind::io, "cannot write " + path.string());
    return out;
}

void write_table1(const std::filesystem::path &dir) {
    auto out = open_output(dir / "table1.csv");
    out << "N,beta,n_opt_b4,n_opt_binf,n0_suggested\n";
    for (double beta : {0.9, 0.99, 0.999}) {
        for (std::size_t budget : {10000UL, 100000UL}) {
            const mc::BudgetQuery q(budget, beta, 1e30);
            out << budget << ',' << mc::format_g17(beta) << ',' << mc::optimize_burnin(q, mc::BoundKind::b4).n0 << ','
                << mc::optimize_burnin(q, mc::BoundKind::binf).n0 << ',' << mc::suggested_burnin(q).n0 << '\n';
        }
    }
    mc::detail::require(static_cast<bool>(out), mc::ErrorKind::io, "write failed for table1.csv");
}

std::vector<mc::FigureRow> figure_rows(const std::string &target) {
    const mc::BudgetQuery q(2, 0.99, 1e30);
    const auto budgets = mc::log_spaced_budgets(1000, 100000000, 10);
    std::vector<mc::BurninRule> rules;
    if (target == "figure1") {
        rules = {mc::BurninRule::fixed(6000), mc::BurninRule::fixed(6500),  mc::BurninRule::suggested(),
                 mc::BurninRule::fixed(8000), mc::BurninRule::fixed(10000), mc::BurninRule::optimized()};
    } else {
        rules = {mc::BurninRule::half_budget(), mc::BurninRule::suggested()};
    }
    return mc::figure_series(q, rules, mc::BoundKind::b4, budgets);
}

void write_figure(const std::filesystem::path &dir, const std::string &target) {
    auto out = open_output(dir / (target + ".csv"));
    mc::write_figure_csv(out, figure_rows(target));
    mc::detail::require(static_cast<bool>(out), mc::ErrorKind::io, "write failed for " + target + ".csv");
}

int cmd_reproduce(const ReproduceArgs &args) {
    const std::filesystem::path dir(args.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    mc::detail::require(!ec && std::filesystem::is_directory(dir), mc::ErrorKind::io, "cannot create " + args.out);
    const std::vector<std::string> targets =
        args.target == "all" ? std::vector<std::string>{"table1", "figure1", "figure2"} : std::vector{args.target};
    for (const auto &t : targets) {
        if (t == "table1") {
            write_table1(dir);
        } else {
            write_figure(dir, t);
        }
        std::cout << (dir / (t + ".csv")).string() << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
    std::size_t replications = 100000;
    std::uint64_t seed = 20240601;
    unsigned threads = 0;
    bool as_json = false;
};

int cmd_simulate_check(const CheckArgs &args) {
    const auto cases = mc::run_statistical_suite(args.replications, args.seed, args.threads);
    bool ok = true;
    json rows = json::array();
    for (const auto &c : cases) {
        ok = ok && c.within && c.below_bounds;
        rows.push_back({{"chain", c.chain},
                        {"n", c.spec.n},
                        {"n0", c.spec.n0},
                        {"exact", c.exact},
                        {"mse_hat", c.empirical.mse_hat},
                        {"std_error", c.empirical.std_error},
                        {"z", c.z},
                        {"within_4se", c.within},
                        {"below_bounds", c.below_bounds}});
    }
    if (args.as_json) {
        print_json({{"replications", args.replications}, {"seed", args.seed}, {"pass", ok}, {"cases", rows}});
    } else {
        std::cout << "chain            n     n0    exact        simulated    std err      z       ok\n";
        for (const auto &c : cases) {
            char line[200];
            std::snprintf(line, sizeof line, "%-16s %-5zu %-5zu %-12s %-12s %-12s %-7.3f %s\n", c.chain.c_str(), c.spec.n,
                          c.spec.n0, g6(c.exact).c_str(), g6(c.empirical.mse_hat).c_str(),
                          g6(c.empirical.std_error).c_str(), c.z, c.within && c.below_bounds ? "yes" : "NO");
            std::cout << line;
        }
        std::cout << (ok ? "all cases within 4 standard errors and below the bounds\n" : "CHECK FAILED\n");
    }
    return ok ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Error bounds and burn-in planning for reversible Markov chain averages"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto *a = app.add_subcommand("analyze", "spectral summary of a chain file");
    a->add_option("file", analyze.file, "chain JSON")->required();
    a->add_flag("--json", analyze.as_json);

    ErrorArgs error;
    auto *e = app.add_subcommand("error", "exact error, bounds and simulation for S_{n,n0}(f)");
    e->add_option("file", error.file, "chain JSON")->required();
    e->add_option("-n,--n", error.n, "averaged steps")->required()->check(CLI::PositiveNumber);
    e->add_option("--n0", error.n0, "burn-in steps");
    e->add_option("--norm", error.norm)->check(CLI::IsMember({"l2", "l4", "linf", "all"}));
    e->add_flag("--exact", error.exact, "evaluate the exact mse");
    e->add_option("--simulate", error.simulate, "R SEED")->expected(2);
    e->add_option("--threads", error.threads, "simulation threads, 0 = all cores");
    e->add_option("--indicator", error.indicator, "use f = 1{x = k} instead of the file's f");
    e->add_flag("--json", error.as_json);

    BurninArgs burnin;
    auto *b = app.add_subcommand("burnin", "choose a burn-in for a total budget N");
    b->add_option("--beta", burnin.beta)->required();
    b->add_option("--C", burnin.constant)->required();
    b->add_option("--N", burnin.budget)->required();
    b->add_option("--kind", burnin.kind)->check(CLI::IsMember({"b4", "binf"}));
    b->add_option("--strategy", burnin.strategy)->check(CLI::IsMember({"suggested", "optimize", "half"}));
    b->add_option("--scaling", burnin.scaling)->check(CLI::IsMember({"theorem", "printed"}));
    b->add_flag("--json", burnin.as_json);

    ReproduceArgs reproduce;
    auto *r = app.add_subcommand("reproduce", "write the burn-in table and figure curves as CSV");
    r->add_option("--target", reproduce.target)->check(CLI::IsMember({"table1", "figure1", "figure2", "all"}));
    r->add_option("--out", reproduce.out, "output directory");

    CheckArgs check;
    auto *c = app.add_subcommand("simulate-check", "simulated against exact error on the built-in test chains");
    c->add_option("--replications", check.replications)->check(CLI::Range(2UL, 100000000UL));
    c->add_option("--seed", check.seed);
    c->add_option("--threads", check.threads);
    c->add_flag("--json", check.as_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*a) return cmd_analyze(analyze);
        if (*e) return cmd_error(error);
        if (*b) return cmd_burnin(burnin);
        if (*r) return cmd_reproduce(reproduce);
        return cmd_simulate_check(check);
    } catch (const mc::CertifyError &err) {
        std::cerr << "error: " << err.what() << '\n';
        return exit_code(err.kind());
    } catch (const std::exception &err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitValidation;
    }
}

#include "mcmc_certify/mcmc_certify.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace mcmc_certify;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string &args, const std::string &env = "") {
    const std::string command = env + " " + MCMC_CERTIFY_CLI + " " + args + " 2>&1";
    Run r;
    FILE *pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.out.append(buf, got);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string &name) { return std::string(MCMC_CERTIFY_DATA) + "/" + name; }

std::vector<std::string> keys(const json &doc) {
    std::vector<std::string> out;
    for (const auto &item : doc.items()) {
        out.push_back(item.key());
    }
    return out;
}

}  // namespace

TEST(Cli, AnalyzeTwoState) {
    const auto r = run("analyze " + data("two_state.json"));
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("beta                   0.1\n"), std::string::npos) << r.out;

    const auto j = run("analyze --json " + data("two_state.json"));
    ASSERT_EQ(j.code, 0) << j.out;
    const auto doc = json::parse(j.out);
    const std::vector<std::string> expected{"beta",          "beta1",
                                            "chi2",          "density_deviation_sup",
                                            "eigen_residual", "eigenvalues",
                                            "inverse_pi_sup", "orthonormality_error",
                                            "reversibility_residual", "spectral_gap",
                                            "states",        "stationarity_residual",
                                            "stationary"};
    EXPECT_EQ(keys(doc), expected);
    const auto s = spectral_decompose(load_chain_file(data("two_state.json")).chain);
    EXPECT_EQ(doc["beta"].get<double>(), s.beta());
    EXPECT_EQ(doc["chi2"].get<double>(), 0.5);
}

TEST(Cli, ValidationFailuresExitTwo) {
    const auto cycle = run("analyze " + data("three_cycle.json"));
    EXPECT_EQ(cycle.code, 2);
    EXPECT_NE(cycle.out.find("NotReversible"), std::string::npos) << cycle.out;
    const auto pi = run("analyze " + data("wrong_pi.json"));
    EXPECT_EQ(pi.code, 2);
    EXPECT_NE(pi.out.find("NotStationary"), std::string::npos) << pi.out;
    const auto rows = run("analyze " + data("not_stochastic.json"));
    EXPECT_EQ(rows.code, 2);
    EXPECT_NE(rows.out.find("NotStochastic"), std::string::npos) << rows.out;
    EXPECT_EQ(run("analyze").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, MissingFileExitsFour) {
    const auto r = run("analyze " + data("no_such_file.json"));
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.out.find("IOError"), std::string::npos);
}

TEST(Cli, ErrorJsonMatchesLibrary) {
    const auto r = run("error " + data("metropolis5.json") + " -n 40 --n0 5 --exact --norm all --json");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto doc = json::parse(r.out);
    const std::vector<std::string> expected{"asymptotic_constant", "bounds",   "exact", "n", "n0",
                                            "nu_given",            "simulation", "stationary_mse"};
    EXPECT_EQ(keys(doc), expected);
    EXPECT_TRUE(doc["simulation"].is_null());
    ASSERT_EQ(doc["bounds"].size(), 3U);
    EXPECT_EQ(doc["bounds"][0]["norm"], "l2");
    EXPECT_EQ(doc["bounds"][1]["norm"], "l4");
    EXPECT_EQ(doc["bounds"][2]["norm"], "linf");
    const std::vector<std::string> bound_keys{"correction_term", "general_start_total", "leading_term", "norm", "total"};
    EXPECT_EQ(keys(doc["bounds"][0]), bound_keys);
    const std::vector<std::string> exact_keys{"correction", "cross_term", "diagonal_term", "mse", "stationary_mse"};
    EXPECT_EQ(keys(doc["exact"]), exact_keys);

    const auto file = load_chain_file(data("metropolis5.json"));
    const auto s = spectral_decompose(file.chain);
    const auto exact = exact_error(file.chain, s, *file.nu, *file.f, EstimatorSpec(40, 5));
    EXPECT_EQ(doc["exact"]["mse"].get<double>(), exact.mse);
    for (const auto &b : doc["bounds"]) {
        EXPECT_GE(b["total"].get<double>(), b["general_start_total"].get<double>());
        EXPECT_GE(b["general_start_total"].get<double>(), exact.mse);
    }
}

TEST(Cli, StationaryStartWhenFileHasNoNu) {
    const auto r = run("error " + data("wrong_pi.json") + " -n 3 --indicator 0 --json");
    EXPECT_EQ(r.code, 2);  // the file's pi is rejected before anything else
    const auto s = run("error " + data("metropolis3.json") + " -n 3 --n0 2 --exact --json");
    ASSERT_EQ(s.code, 0) << s.out;
    const auto doc = json::parse(s.out);
    EXPECT_FALSE(doc["nu_given"].get<bool>());
    EXPECT_NEAR(doc["exact"]["correction"].get<double>(), 0.0, 1e-15);
    EXPECT_NEAR(doc["exact"]["mse"].get<double>(), doc["stationary_mse"].get<double>(), 1e-15);
}

TEST(Cli, WorkCapExitsThree) {
    const auto r = run("error " + data("two_state.json") + " -n 1000 --exact", "MCMC_CERTIFY_WORK_CAP=100");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("BudgetOverflow"), std::string::npos);
}

TEST(Cli, SimulateOption) {
    const auto r = run("error " + data("two_state.json") + " -n 4 --n0 2 --exact --simulate 20000 3 --threads 3 --json");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto doc = json::parse(r.out);
    const std::vector<std::string> sim_keys{"mse_hat", "replications", "seed", "std_error"};
    EXPECT_EQ(keys(doc["simulation"]), sim_keys);
    const double exact = doc["exact"]["mse"].get<double>();
    EXPECT_LE(std::abs(doc["simulation"]["mse_hat"].get<double>() - exact),
              4.0 * doc["simulation"]["std_error"].get<double>());
    const auto again = run("error " + data("two_state.json") + " -n 4 --n0 2 --exact --simulate 20000 3 --threads 1 --json");
    EXPECT_EQ(json::parse(again.out)["simulation"], doc["simulation"]);
}

TEST(Cli, Burnin) {
    auto plan = [](const std::string &args) {
        const auto r = run("burnin " + args + " --json");
        EXPECT_EQ(r.code, 0) << r.out;
        return json::parse(r.out);
    };
    EXPECT_EQ(plan("--beta 0.9 --C 1e30 --N 10000 --kind binf --strategy optimize")["n0"], 656);
    EXPECT_EQ(plan("--beta 0.999 --C 1e30 --N 100000 --kind b4 --strategy optimize")["n0"], 68977);
    EXPECT_EQ(plan("--beta 0.9 --C 1e30 --N 10000 --strategy half")["n0"], 5000);
    EXPECT_EQ(plan("--beta 0.9 --C 0.5 --N 10000 --strategy suggested")["n0"], 0);
    const auto doc = plan("--beta 0.99 --C 1e30 --N 10000");
    const std::vector<std::string> expected{"C",  "N", "beta",    "borderline", "bound", "clamped", "kind",
                                            "n", "n0", "scaling", "strategy",   "suggested_ratio"};
    EXPECT_EQ(keys(doc), expected);
    EXPECT_EQ(run("burnin --beta 1.2 --C 10 --N 100").code, 2);
    EXPECT_EQ(run("burnin --beta 0.5 --C -1 --N 100").code, 2);
    EXPECT_EQ(run("burnin --beta 0.5 --C 10 --N 1").code, 2);
    EXPECT_EQ(run("burnin --beta 0.5 --C 10 --N 100 --strategy bogus").code, 2);
    const auto text = run("burnin --beta 0.9 --C 1e30 --N 10000 --kind binf --strategy optimize");
    EXPECT_NE(text.out.find(" 656 "), std::string::npos) << text.out;
}

TEST(Cli, ReproduceTable) {
    const auto dir = std::filesystem::temp_directory_path() / ("mcmc_certify_cli_" + std::to_string(::getpid()));
    const auto r = run("reproduce --target table1 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    std::ifstream in(dir / "table1.csv");
    std::stringstream content;
    content << in.rdbuf();
    EXPECT_EQ(content.str(),
              "N,beta,n_opt_b4,n_opt_binf,n0_suggested\n"
              "10000,0.90000000000000002,656,656,656\n"
              "100000,0.90000000000000002,656,656,656\n"
              "10000,0.98999999999999999,6867,6867,6874\n"
              "100000,0.98999999999999999,6873,6873,6874\n"
              "10000,0.999,8001,8001,69044\n"
              "100000,0.999,68977,68977,69044\n");
    std::filesystem::remove_all(dir);
    EXPECT_EQ(run("reproduce --target table1 --out /proc/not_writable").code, 4);
}

TEST(Cli, SimulateCheck) {
    const auto r = run("simulate-check --replications 20000 --seed 5 --json");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto doc = json::parse(r.out);
    EXPECT_TRUE(doc["pass"].get<bool>());
    EXPECT_EQ(doc["cases"].size(), 18U);
}

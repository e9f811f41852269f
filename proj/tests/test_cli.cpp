#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const char* kDuo = R"(
[meta]
name = duo
timestep_hours = 1
horizon = 2

[nodes]
a 1.1e5 1e6 30000
b 6e4 1e6 45000

[technologies]
coal 0 0 3.3 40 0.33 0.33 8.4 no
wind 1035600 1.22 1.35 30 1.0 0 0 yes

[generators]
coal_a a coal 100 100 -
coal_b b coal 100 100 -
wind_a a wind 0 500 series:wind_a
wind_b b wind 0 500 series:wind_b

[lines]
ab a b 30 30 0

[series]
a = 50 60
b = 40 45
wind_a = 0.7 0.3
wind_b = 0.5 0.6
)";

const char* kFossilOnly = R"(
[meta]
name = fossil
timestep_hours = 1
horizon = 1

[nodes]
a 1e5 1e6 30000

[technologies]
coal 0 0 3.3 40 0.33 0.33 8.4 no

[generators]
coal_a a coal 100 100 -

[series]
a = 50
)";

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    fs::path tmp = fs::temp_directory_path() / "co2flex_cli_out.txt";
    std::string cmd = std::string(CO2FLEX_CLI) + " " + args + " > " + tmp.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::string out((std::istreambuf_iterator<char>(in)), {});
    return {WEXITSTATUS(rc), out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

struct TempTree {
    fs::path root;
    TempTree() : root(fs::temp_directory_path() / "co2flex_cli_test") {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~TempTree() { fs::remove_all(root); }
    fs::path write(const char* name, const std::string& content) {
        fs::path p = root / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }
};

}  // namespace

TEST_CASE("solve reports an optimal efficiency summary on testsys5") {
    TempTree tree;
    auto out_dir = tree.root / "solve_out";
    auto r = run_cli("solve --network " + (fs::path(CO2FLEX_DATA_DIR) / "testsys5.sys").string() +
                     " --policy efficiency --reduction 0.55 --out " + out_dir.string());
    INFO(r.out);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("total_cost") != std::string::npos);
    CHECK(r.out.find("joint_reduction 0.55") != std::string::npos);
    CHECK(fs::exists(out_dir / "solution.csv"));
    CHECK(fs::exists(out_dir / "problem.lp"));
    CHECK(fs::exists(out_dir / "manifest.json"));
}

TEST_CASE("missing network file exits with the config code") {
    auto r = run_cli("solve --network /nonexistent.sys --policy none");
    CHECK(r.exit_code == 2);
}

TEST_CASE("zero cap on a fossil-only system exits infeasible") {
    TempTree tree;
    auto net = tree.write("fossil.sys", kFossilOnly);
    auto r = run_cli("solve --network " + net.string() + " --policy efficiency --budget 0");
    INFO(r.out);
    CHECK(r.exit_code == 3);
}

TEST_CASE("scenario runs a scheme with explicit budget") {
    TempTree tree;
    auto net = tree.write("duo.sys", kDuo);
    auto r = run_cli("scenario --network " + net.string() +
                     " --scheme sovereignty --budget 100000");
    INFO(r.out);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("scheme sovereignty") != std::string::npos);
    // demand split ~110:85 of the duo: check target proportionality via emissions keys
    CHECK(r.out.find("emissions a") != std::string::npos);
}

TEST_CASE("sampler runs are reproducible and resumable") {
    TempTree tree;
    auto net = tree.write("duo.sys", kDuo);
    std::string base_flags = "sample --network " + net.string() +
                             " --chains 2 --samples 30 --seed 7 --burn-in 5 --batch-size 10";

    auto d1 = tree.root / "run1";
    auto d2 = tree.root / "run2";
    REQUIRE(run_cli(base_flags + " --out " + d1.string()).exit_code == 0);
    REQUIRE(run_cli(base_flags + " --out " + d2.string()).exit_code == 0);
    for (int c = 0; c < 2; ++c) {
        auto f1 = d1 / ("chain_" + std::to_string(c) + ".jsonl");
        auto f2 = d2 / ("chain_" + std::to_string(c) + ".jsonl");
        REQUIRE(fs::exists(f1));
        CHECK(slurp(f1) == slurp(f2));  // byte-identical stores
    }

    // kill-and-resume: truncate chain 1 mid-line and resume
    auto victim = d2 / "chain_1.jsonl";
    auto full = slurp(victim);
    {
        std::ofstream out(victim, std::ios::binary | std::ios::trunc);
        out << full.substr(0, full.size() * 2 / 3 + 11);
    }
    auto r = run_cli(base_flags + " --resume --out " + d2.string());
    INFO(r.out);
    CHECK(r.exit_code == 0);
    CHECK(slurp(victim) == full);
    CHECK(slurp(d2 / "chain_0.jsonl") == slurp(d1 / "chain_0.jsonl"));

    // resume against a different seed is a config error
    auto r2 = run_cli("sample --network " + net.string() +
                      " --chains 2 --samples 30 --seed 8 --burn-in 5 --batch-size 10" +
                      " --resume --out " + d2.string());
    CHECK(r2.exit_code == 2);

    // invalid sampler config
    auto r3 = run_cli("sample --network " + net.string() + " --samples 0 --out " +
                      (tree.root / "zz").string());
    CHECK(r3.exit_code == 2);
}

TEST_CASE("analyze exports the csv bundle deterministically") {
    TempTree tree;
    auto net = tree.write("duo.sys", kDuo);
    auto store = tree.root / "store";
    REQUIRE(run_cli("sample --network " + net.string() +
                    " --chains 2 --samples 40 --seed 3 --burn-in 10 --batch-size 10 --out " +
                    store.string())
                .exit_code == 0);

    auto out1 = tree.root / "an1";
    auto out2 = tree.root / "an2";
    std::string flags = "analyze --store " + store.string() + " --network " + net.string() +
                        " --no-front --out ";
    auto r = run_cli(flags + out1.string());
    INFO(r.out);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("rel_cost_increase_q50") != std::string::npos);
    const char* files[] = {"pareto_front.csv",    "emission_intensity.csv",
                           "target_utilization.csv", "correlations.csv",
                           "abatement_costs.csv",  "electricity_prices.csv",
                           "reduction_cost_hist2d.csv"};
    for (const char* f : files) CHECK(fs::exists(out1 / f));

    REQUIRE(run_cli(flags + out2.string()).exit_code == 0);
    for (const char* f : files) CHECK(slurp(out1 / f) == slurp(out2 / f));

    // store/network mismatch is a config error
    auto other = tree.write("other.sys", kFossilOnly);
    auto r2 = run_cli("analyze --store " + store.string() + " --network " + other.string() +
                      " --out " + (tree.root / "an3").string());
    CHECK(r2.exit_code == 2);
}

TEST_CASE("pareto emits one point per grid step") {
    TempTree tree;
    auto net = tree.write("duo.sys", kDuo);
    auto out_dir = tree.root / "front";
    auto r = run_cli("pareto --network " + net.string() +
                     " --from 0.30 --to 0.50 --step 0.05 --out " + out_dir.string());
    INFO(r.out);
    CHECK(r.exit_code == 0);
    auto csv = slurp(out_dir / "pareto_front.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 points

    auto single = run_cli("pareto --network " + net.string() +
                          " --from 0.40 --to 0.40 --step 0.05 --out " +
                          (tree.root / "front1").string());
    CHECK(single.exit_code == 0);
    CHECK(std::count_if(single.out.begin(), single.out.end(),
                        [](char c) { return c == '\n'; }) >= 1);
}

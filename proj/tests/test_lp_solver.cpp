#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "co2flex/lp_builder.hpp"
#include "co2flex/lp_solver.hpp"
#include "co2flex/solution_view.hpp"
#include "co2flex/system_io.hpp"

using namespace co2flex;

namespace {

const char* kBrownfieldOne = R"(
[meta]
name = brown
timestep_hours = 1
horizon = 1

[nodes]
a 1000 1e6 30000

[technologies]
gt 0 0 4.5 25 0.41 0.2009 0 no

[generators]
gt_a a gt 100 100 -

[series]
a = 10
)";

const char* kTwoNodeNational = R"(
[meta]
name = duo
timestep_hours = 1
horizon = 2

[nodes]
a 1000 1e6 30000
b 1000 1e6 30000

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

}  // namespace

TEST_CASE("nodal price equals marginal cost on ample brownfield") {
    auto net = load_network_string(kBrownfieldOne);
    auto [lp, rep] = build(net, CO2Policy::none(), 0.07);
    auto sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.primal_of(lp, "g:gt_a:0") == Catch::Approx(10.0));
    // balance rows are in MWh/yr, so the dual is the price in EUR/MWh
    CHECK(sol.dual_of(lp, "balance:a:0") == Catch::Approx(4.5));
    auto out = summarize(net, CO2Policy::none(), lp, sol);
    CHECK(out.node_mean_price[0] == Catch::Approx(4.5));
}

TEST_CASE("testsys5 optimum passes the certificate at 1e-6") {
    auto net = load_network(std::filesystem::path(CO2FLEX_DATA_DIR) / "testsys5.sys");
    double cap = 0.45 * net.total_historical_emissions();
    auto [lp, rep] = build(net, CO2Policy::global(cap), 0.07);
    auto sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    auto cert = verify_certificate(lp, sol, Tolerances{1e-6, 1e-6, 1e-6});
    INFO("gap " << cert.relative_gap << " primal " << cert.max_primal_violation << " dual "
                << cert.max_dual_violation << " cs " << cert.max_cs_violation);
    CHECK(cert.pass());
    CHECK(sol.dual_of(lp, "co2:global") > 0.0);  // the cap binds
}

TEST_CASE("corruption is caught by the certificate") {
    auto net = load_network_string(kTwoNodeNational);
    auto [lp, rep] = build(net, CO2Policy::national({2.0e5, 1.5e5}), 0.07);
    auto sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    REQUIRE(verify_certificate(lp, sol).pass());

    SECTION("primal corruption") {
        auto broken = sol;
        int j = lp.column_index("g:coal_a:0");
        broken.primal[j] += 25.0;
        for (std::size_t i = 0; i < lp.rows.size(); ++i) {
            double act = 0.0;
            for (auto [jj, v] : lp.rows[i].coeffs) act += v * broken.primal[jj];
            broken.row_activity[i] = act;
        }
        auto rep2 = verify_certificate(lp, broken);
        CHECK_FALSE(rep2.primal_feasible);
        CHECK_FALSE(rep2.pass());
    }
    SECTION("dual sign flip") {
        auto broken = sol;
        bool flipped = false;
        for (std::size_t i = 0; i < lp.rows.size(); ++i)
            if (lp.rows[i].sense == RowSense::LessEqual && broken.dual[i] > 1e-3) {
                broken.dual[i] = -broken.dual[i];
                flipped = true;
                break;
            }
        REQUIRE(flipped);
        auto rep2 = verify_certificate(lp, broken);
        CHECK_FALSE(rep2.dual_feasible);
        CHECK_FALSE(rep2.pass());
    }
}

TEST_CASE("national co2 dual measures the cost of tightening") {
    auto net = load_network_string(kTwoNodeNational);
    // tight enough to bind at node a (unconstrained realized is ~8e4)
    const double ra = 3.0e4, rb = 4.0e5;
    auto [lp, rep] = build(net, CO2Policy::national({ra, rb}), 0.07);
    auto sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    double mu = sol.dual_of(lp, "co2:national:a");
    REQUIRE(mu > 1e-6);  // binding

    const double delta = ra * 1e-5;
    auto [lp2, rep2] = build(net, CO2Policy::national({ra + delta, rb}), 0.07);
    auto sol2 = solve(lp2);
    REQUIRE(sol2.status == SolveStatus::Optimal);
    // relaxing by delta lowers cost by mu * delta
    double fd = (sol.objective - sol2.objective) / delta;
    CHECK(fd == Catch::Approx(mu).epsilon(0.01));
}

TEST_CASE("solution dump lists every named entity") {
    auto net = load_network_string(kBrownfieldOne);
    auto [lp, rep] = build(net, CO2Policy::none(), 0.07);
    auto sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    auto csv = dump_solution_csv(lp, sol);
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 1 + lp.columns.size() + lp.rows.size());
    CHECK(csv.find("column,g:gt_a:0,10,") != std::string::npos);
    CHECK(csv.rfind("entity,name,value,dual_or_reduced_cost\n", 0) == 0);
}

TEST_CASE("degeneracy is flagged, not hidden") {
    // two identical plants at one node: the dispatch split is non-unique
    auto net = load_network_string(kBrownfieldOne);
    auto twin = net.generators[0];
    twin.id = "gt_a2";
    net.generators.push_back(twin);
    net.validate();
    auto [lp, rep] = build(net, CO2Policy::none(), 0.07);
    auto sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.stats.alternative_optima);
}

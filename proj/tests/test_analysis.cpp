#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "co2flex/analysis.hpp"
#include "co2flex/system_io.hpp"

using namespace co2flex;

namespace {

SampleRecord rec_with(std::vector<double> emissions, std::vector<double> x, double cost,
                      std::vector<double> generation = {}) {
    SampleRecord r;
    r.chain_id = 0;
    r.iteration = 1;
    r.x = std::move(x);
    r.accepted = true;
    r.solved = true;
    r.total_cost = cost;
    r.realized_emissions = std::move(emissions);
    r.generation = generation.empty()
                       ? std::vector<double>(r.realized_emissions.size(), 1.0)
                       : std::move(generation);
    r.abatement.assign(r.realized_emissions.size(), 0.0);
    r.mean_price.assign(r.realized_emissions.size(), 30.0);
    r.mean_price_weighted.assign(r.realized_emissions.size(), 30.0);
    return r;
}

const char* kFossilDuo = R"(
[meta]
name = duo
timestep_hours = 1
horizon = 2

[nodes]
a 5e5 1e6 30000
b 2e5 1e6 30000

[technologies]
coal 0 0 3.3 40 0.33 0.33 8.4 no
gas  0 0 4.5 25 0.41 0.2009 21 no

[generators]
coal_a a coal 100 100 -
gas_b  b gas   80  80 -

[lines]
ab a b 30 30 0

[series]
a = 50 60
b = 20 25
)";

}  // namespace

TEST_CASE("joint reduction arithmetic") {
    auto r = rec_with({45.0, 0.0}, {0.5, 0.5}, 1.0);
    CHECK(joint_reduction(r, 100.0) == Catch::Approx(0.55));
    auto r2 = rec_with({100.0, 0.0}, {0.5, 0.5}, 1.0);
    CHECK(joint_reduction(r2, 100.0) == Catch::Approx(0.0));
    CHECK_THROWS_AS(joint_reduction(r, 0.0), std::invalid_argument);
}

TEST_CASE("target utilization with undefined targets") {
    auto r = rec_with({50.0, 0.0, 10.0}, {0.5, 0.5, 0.0}, 1.0);
    auto u = target_utilization(r, 200.0);  // targets 100, 100, 0
    REQUIRE(u.size() == 3);
    CHECK(*u[0] == Catch::Approx(0.5));
    CHECK(*u[1] == 0.0);
    CHECK_FALSE(u[2].has_value());  // zero target: excluded
}

TEST_CASE("emission intensity per MWh produced") {
    auto r = rec_with({100.0, 0.0, 5.0}, {1, 1, 1}, 1.0, {100.0, 50.0, 0.0});
    auto e = emission_intensity(r);
    CHECK(*e[0] == Catch::Approx(1.0));  // coal-like
    CHECK(*e[1] == 0.0);                 // all-renewable node
    CHECK_FALSE(e[2].has_value());       // zero production
}

TEST_CASE("pearson correlations with masking") {
    std::vector<SampleRecord> samples;
    for (int k = 0; k < 8; ++k) {
        double v = static_cast<double>(k);
        // c is constant: masked against everything
        samples.push_back(rec_with({v, 10.0 - v, 3.0}, {0.3, 0.3, 0.4}, 1.0));
    }
    auto m = correlation_matrix(samples, {"a", "b", "c"});
    CHECK(m.valid[0][1]);
    CHECK(m.r[0][1] == Catch::Approx(-1.0));
    CHECK(m.r[0][0] == Catch::Approx(1.0));
    CHECK_FALSE(m.valid[0][2]);
    CHECK_FALSE(m.valid[2][2]);
    // symmetry of both value and mask
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            CHECK(m.r[a][b] == m.r[b][a]);
            CHECK(m.valid[a][b] == m.valid[b][a]);
        }
    CHECK_THROWS_AS(correlation_matrix({samples[0]}, {"a", "b", "c"}),
                    std::invalid_argument);
}

TEST_CASE("interpolated quantiles") {
    CHECK(quantile({0.05, 0.15}, 0.5) == Catch::Approx(0.10));
    CHECK(quantile({0.05, 0.15}, 0.25) == Catch::Approx(0.075));
    CHECK(quantile({1, 2, 3, 4}, 0.5) == Catch::Approx(2.5));
    std::vector<SampleRecord> at_opt;
    for (int i = 0; i < 5; ++i) at_opt.push_back(rec_with({1, 1}, {0.5, 0.5}, 500.0));
    auto q = cost_quantiles(at_opt, 500.0);
    CHECK(q.q25 == Catch::Approx(0.0).margin(1e-12));
    CHECK(q.q50 == Catch::Approx(0.0).margin(1e-12));
    CHECK(q.q75 == Catch::Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(cost_quantiles({}, 1.0), std::invalid_argument);
}

TEST_CASE("pareto front is monotone and truncates at infeasibility") {
    auto net = load_network_string(kFossilDuo);
    // minimum feasible emissions ~4.44e5 of a 7e5 baseline: ~36.6% max reduction;
    // unconstrained emissions ~6.79e5, so the 2% point leaves the cap slack
    auto front = pareto_front(net, {0.02, 0.15, 0.25, 0.45}, 0.07);
    REQUIRE(front.size() == 4);
    CHECK(front[0].feasible);
    CHECK(front[1].feasible);
    CHECK(front[2].feasible);
    CHECK_FALSE(front[3].feasible);  // flagged and truncated
    CHECK(front[1].cost >= front[0].cost * (1.0 - 1e-12));
    CHECK(front[2].cost >= front[1].cost * (1.0 - 1e-12));
    CHECK(front[2].co2_dual > 0.0);

    // reduction low enough that the cap is slack: cost equals unconstrained
    auto [lp, rep] = build(net, CO2Policy::none(), 0.07);
    auto unconstrained = solve(lp);
    REQUIRE(unconstrained.status == SolveStatus::Optimal);
    CHECK(front[0].cost == Catch::Approx(unconstrained.objective).epsilon(1e-9));

    CHECK_THROWS_AS(pareto_front(net, {0.3, 0.2}, 0.07), std::invalid_argument);
}

TEST_CASE("supporting lines bound the front from below") {
    auto net = load_network_string(kFossilDuo);
    auto front = pareto_front(net, {0.10, 0.20, 0.30}, 0.07);
    double baseline = net.total_historical_emissions();
    // the bound at grid points equals the front there
    for (const auto& p : front)
        CHECK(pareto_lower_bound(front, baseline, p.reduction) ==
              Catch::Approx(p.cost).epsilon(1e-9));
    // between grid points the bound does not exceed a direct solve
    double mid = 0.25;
    auto [lp, rep] = build(net, CO2Policy::global((1 - mid) * baseline), 0.07);
    auto sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(pareto_lower_bound(front, baseline, mid) <= sol.objective * (1.0 + 1e-9));
}

TEST_CASE("csv bundle exports the seven files deterministically") {
    MergedSamples merged;
    merged.reference.nodes = {"a", "b"};
    merged.reference.baseline.baseline_1990 = 100.0;
    merged.reference.baseline.budget = 45.0;
    merged.reference.baseline.optimal_cost = 1000.0;
    for (int k = 0; k < 12; ++k) {
        auto r = rec_with({1.0 + k, 30.0 - k}, {0.4, 0.7}, 1000.0 + 10.0 * k, {50.0, 60.0});
        r.iteration = k + 1;
        r.abatement = {0.0, 2.0};
        merged.samples.push_back(std::move(r));
    }
    auto bundle = build_bundle(merged);
    CHECK(bundle.samples.size() == 12);
    CHECK(bundle.quantiles.q50 > 0.0);

    std::vector<ParetoPoint> front{{0.5, 900.0, 10.0, true}, {0.6, 1100.0, 20.0, true}};
    auto dir = std::filesystem::temp_directory_path() / "co2flex_test_csv";
    std::filesystem::remove_all(dir);
    auto files = export_csv(bundle, front, dir);
    REQUIRE(files.size() == 7);
    for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);

    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), {});
    };
    std::string first = slurp(dir / "electricity_prices.csv");
    CHECK(first.rfind("chain,iter,node,price,price_demand_weighted\n", 0) == 0);

    // rerun: byte-identical
    auto again = export_csv(bundle, front, dir);
    CHECK(slurp(dir / "electricity_prices.csv") == first);
    CHECK(slurp(dir / "correlations.csv").find("a,b,") != std::string::npos);
    std::filesystem::remove_all(dir);
}

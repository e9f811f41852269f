#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "co2flex/network.hpp"
#include "co2flex/system_io.hpp"

using namespace co2flex;

namespace {

const char* kTinySystem = R"(
[meta]
name = tiny
timestep_hours = 1
horizon = 3

[nodes]
a 1000 5e6 30000
b 2000 2e6 45000

[technologies]
coal 0 0 3.3 40 0.33 0.33  8.4 no
wind 1035600 1.22 1.35 30 1.0 0 0 yes

[generators]
coal_a a coal 100 100 -
wind_b b wind 10 500 series:wind_b

[lines]
ab a b 50 50 0

[series]
a = 90 100 110
b = 40 45 50
wind_b = 0.8 0.1 0.5
)";

}  // namespace

TEST_CASE("bundled testsys5 loads and validates") {
    auto net = load_network(std::filesystem::path(CO2FLEX_DATA_DIR) / "testsys5.sys");
    CHECK(net.n_nodes() == 5);
    CHECK(net.horizon == 168);
    CHECK(net.timestep_hours == 3.0);
    CHECK(net.generators.size() == 21);
    CHECK(net.lines.size() == 6);
    CHECK(net.storages.size() == 1);
    CHECK_NOTHROW(net.validate());
    CHECK(net.annual_scale() == Catch::Approx(8760.0 / (168 * 3)));
}

TEST_CASE("string fixtures load with resolved series") {
    auto net = load_network_string(kTinySystem);
    REQUIRE(net.n_nodes() == 2);
    CHECK(net.nodes[0].demand == std::vector<double>{90, 100, 110});
    REQUIRE(net.generators.size() == 2);
    CHECK(net.generators[0].capacity_factor == std::vector<double>{1, 1, 1});
    CHECK(net.generators[1].capacity_factor == std::vector<double>{0.8, 0.1, 0.5});
    CHECK(net.tech_index("wind") == 1);
    CHECK(net.node_index("b") == 1);
    CHECK(net.node_index("zz") == -1);
}

TEST_CASE("loader reports unknown references with location") {
    std::string bad = kTinySystem;
    bad.replace(bad.find("coal_a a coal"), 13, "coal_a q coal");
    try {
        load_network_string(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("unknown node") != std::string::npos);
        CHECK(std::string(e.what()).find(":") != std::string::npos);
    }
}

TEST_CASE("loader rejects series length mismatch") {
    std::string bad = kTinySystem;
    bad.replace(bad.find("a = 90 100 110"), 14, "a = 90 100    ");
    try {
        load_network_string(bad);
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("series length") != std::string::npos);
    }
}

TEST_CASE("loader rejects negative quantities") {
    std::string bad = kTinySystem;
    bad.replace(bad.find("a = 90 100 110"), 14, "a = 90 -10 110");
    CHECK_THROWS_AS(load_network_string(bad), std::invalid_argument);

    std::string bad2 = kTinySystem;
    bad2.replace(bad2.find("coal_a a coal 100 100"), 21, "coal_a a coal 200 100");
    try {
        load_network_string(bad2);
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("existing exceeds max") != std::string::npos);
    }
}

TEST_CASE("save then load is a fixed point") {
    auto net = load_network_string(kTinySystem);
    std::string first = save_network(net);
    auto net2 = load_network_string(first);
    std::string second = save_network(net2);
    CHECK(first == second);
    CHECK(network_hash(net) == network_hash(net2));

    auto big = load_network(std::filesystem::path(CO2FLEX_DATA_DIR) / "testsys5.sys");
    auto round = load_network_string(save_network(big));
    CHECK(save_network(big) == save_network(round));
}

TEST_CASE("coal super-exporter limit follows the 0.45 x 1.5 rule") {
    auto net = load_network_string(kTinySystem);
    // node a: 300 MWh over 3 h, annualized by 8760/3
    double annual = 300.0 * (8760.0 / 3.0);
    CHECK(net.annual_demand(0) == Catch::Approx(annual));
    CHECK(coal_super_exporter_limit(net, 0) == Catch::Approx(annual * 0.45 * 1.5));

    // linear scaling in demand
    auto scaled = net;
    for (auto& d : scaled.nodes[0].demand) d *= 3.0;
    CHECK(coal_super_exporter_limit(scaled, 0) ==
          Catch::Approx(3.0 * coal_super_exporter_limit(net, 0)));

    // 100 MWh annual demand -> 67.5 t
    CHECK(100.0 * kCoalEquivalentIntensity * kSuperExporterFactor == Catch::Approx(67.5));
    CHECK(1e6 * kCoalEquivalentIntensity * kSuperExporterFactor == Catch::Approx(675000.0));
}

TEST_CASE("co2 policy construction and guards") {
    auto g = CO2Policy::global(100.0);
    CHECK(g.mode() == CO2Policy::Mode::Global);
    CHECK(g.cap() == 100.0);
    CHECK_THROWS_AS(CO2Policy::global(-1.0), std::invalid_argument);
    auto n = CO2Policy::national({1.0, 2.0}, {0.3, 0.7});
    CHECK(n.targets().size() == 2);
    CHECK_THROWS_AS(CO2Policy::national({-0.1}), std::invalid_argument);
}

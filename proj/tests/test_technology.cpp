#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "co2flex/technology.hpp"

using namespace co2flex;

namespace {
// Closed-form annuity evaluated with 50-digit arithmetic, frozen here.
struct AnnuityOracle {
    int n;
    double value;
};
constexpr AnnuityOracle kAnnuity07[] = {
    {10, 7.0235815409326019406},
    {25, 11.653583178253719623},
    {30, 12.409041183505859562},
    {40, 13.331708842638367252},
    {100, 14.269250709007475318},
};
}  // namespace

TEST_CASE("annuity factor matches the high-precision oracle") {
    for (const auto& [n, value] : kAnnuity07)
        CHECK(std::abs(annuity_factor(0.07, n) - value) < 1e-6);
    CHECK(std::abs(annuity_factor(0.07, 25) - 11.6536) < 1e-4);
    CHECK(std::abs(annuity_factor(0.07, 30) - 12.4090) < 1e-4);
}

TEST_CASE("annuity factor limits and errors") {
    CHECK(annuity_factor(0.0, 25) == 25.0);
    CHECK(annuity_factor(0.0, 1) == 1.0);
    CHECK_THROWS_AS(annuity_factor(-0.01, 25), std::domain_error);
    CHECK_THROWS_AS(annuity_factor(0.07, 0), std::domain_error);
}

TEST_CASE("annuity factor is monotone in rate and lifetime") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> rate(0.001, 0.25);
    std::uniform_int_distribution<int> life(1, 80);
    for (int k = 0; k < 200; ++k) {
        double r = rate(gen);
        int n = life(gen);
        CHECK(annuity_factor(r + 0.01, n) < annuity_factor(r, n));
        CHECK(annuity_factor(r, n + 1) > annuity_factor(r, n));
        CHECK(annuity_factor(0.0, n + 1) > annuity_factor(0.0, n));
    }
}

TEST_CASE("annualized capital cost combines recovery and fixed O&M") {
    TechnologySpec ocgt;
    ocgt.name = "ocgt";
    ocgt.capital_cost = 435200.0;
    ocgt.fom_pct = 1.78;
    ocgt.vom = 4.5;
    ocgt.lifetime_years = 25;
    ocgt.efficiency = 0.41;

    // two-term oracle: 435200 / a(0.07,25) + 435200 * 0.0178
    double expected = 435200.0 / 11.653583178253719623 + 435200.0 * 0.0178;
    CHECK(annualized_capital_cost(ocgt, 0.07) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(annualized_capital_cost(ocgt, 0.07) == Catch::Approx(45091.297).margin(0.01));

    TechnologySpec flat = ocgt;
    flat.fom_pct = 0.0;
    CHECK(annualized_capital_cost(flat, 0.0) ==
          Catch::Approx(435200.0 / 25.0).epsilon(1e-12));
    TechnologySpec freebie = ocgt;
    freebie.capital_cost = 0.0;
    CHECK(annualized_capital_cost(freebie, 0.07) == 0.0);
}

TEST_CASE("electric emission intensity reproduces the table values") {
    struct Row {
        const char* name;
        double eta;
        double fuel;
        double electric;
    };
    // fuel-side intensity = electric * eta, stored as the decimal literal
    const Row rows[] = {
        {"ocgt", 0.41, 0.2009, 0.49}, {"ccgt", 0.58, 0.1972, 0.34},
        {"coal", 0.33, 0.33, 1.00},   {"lignite", 0.33, 0.4092, 1.24},
        {"oil", 0.35, 0.2695, 0.77},
    };
    for (const auto& r : rows) {
        TechnologySpec t;
        t.name = r.name;
        t.efficiency = r.eta;
        t.fuel_emission_intensity = r.fuel;
        double got = electric_emission_intensity(t);
        // exact at double precision: within 2 ulp of the table value
        CHECK(std::abs(got - r.electric) <=
              2.0 * std::ldexp(1.0, std::ilogb(r.electric) - 52));
        // round-trip back to the stored fuel-side value, again at ulp precision
        CHECK(std::abs(got * t.efficiency - r.fuel) <=
              2.0 * std::ldexp(1.0, std::ilogb(r.fuel) - 52));
    }
    TechnologySpec clean;
    clean.name = "wind";
    clean.efficiency = 1.0;
    CHECK(electric_emission_intensity(clean) == 0.0);
}

TEST_CASE("electric emission intensity round-trip property") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> eta(0.05, 1.0);
    std::uniform_real_distribution<double> fuel(0.0, 2.0);
    for (int k = 0; k < 500; ++k) {
        TechnologySpec t;
        t.name = "x";
        t.efficiency = eta(gen);
        t.fuel_emission_intensity = fuel(gen);
        double back = electric_emission_intensity(t) * t.efficiency;
        CHECK(back == Catch::Approx(t.fuel_emission_intensity).margin(1e-15).epsilon(1e-15));
    }
    TechnologySpec bad;
    bad.name = "bad";
    bad.efficiency = 0.0;
    CHECK_THROWS_AS(electric_emission_intensity(bad), std::domain_error);
}

TEST_CASE("marginal cost adds fuel burn to VOM") {
    TechnologySpec coal;
    coal.name = "coal";
    coal.vom = 3.3;
    coal.efficiency = 0.33;
    coal.fuel_price = 8.4;
    CHECK(marginal_cost(coal) == Catch::Approx(3.3 + 8.4 / 0.33));
    coal.fuel_price = 0.0;
    CHECK(marginal_cost(coal) == 3.3);
}

TEST_CASE("technology validation rejects bad specs") {
    TechnologySpec t;
    t.name = "t";
    t.efficiency = 0.5;
    t.lifetime_years = 10;
    CHECK_NOTHROW(t.validate());
    t.efficiency = 1.2;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    t.efficiency = 0.5;
    t.lifetime_years = 0;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    t.lifetime_years = 10;
    t.vom = -1.0;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

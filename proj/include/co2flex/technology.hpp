#pragma once

// Technology descriptions and the cost/emission arithmetic derived from them.
// Emission intensity is stored fuel-side (tCO2 per MWh of fuel input); the
// electric-side value is derived as fuel_intensity / efficiency.

#include <cmath>
#include <stdexcept>
#include <string>

namespace co2flex {

struct TechnologySpec {
    std::string name;
    double capital_cost = 0.0;            ///< currency per MW (per MWh for storage energy)
    double fom_pct = 0.0;                 ///< fixed O&M, % of capital per year
    double vom = 0.0;                     ///< currency per MWh dispatched
    int lifetime_years = 1;
    double efficiency = 1.0;              ///< fraction in (0, 1]
    double fuel_emission_intensity = 0.0; ///< tCO2 per MWh of fuel input
    double fuel_price = 0.0;              ///< currency per MWh of fuel input (0 if unknown)
    bool expandable = false;

    void validate() const {
        if (name.empty())
            throw std::invalid_argument("technology: empty name");
        if (!(efficiency > 0.0) || efficiency > 1.0)
            throw std::invalid_argument("technology " + name + ": efficiency must be in (0,1]");
        if (lifetime_years < 1)
            throw std::invalid_argument("technology " + name + ": lifetime_years must be >= 1");
        if (capital_cost < 0.0 || fom_pct < 0.0 || vom < 0.0 || fuel_price < 0.0)
            throw std::invalid_argument("technology " + name + ": costs must be >= 0");
        if (fuel_emission_intensity < 0.0)
            throw std::invalid_argument("technology " + name + ": fuel_emission_intensity must be >= 0");
    }
};

/// Annuity factor a = (1 - (1+r)^-n) / r, with the analytic limit a = n at r = 0.
inline double annuity_factor(double discount_rate, int lifetime_years) {
    if (lifetime_years < 1)
        throw std::domain_error("annuity_factor: lifetime must be >= 1 year");
    if (discount_rate < 0.0)
        throw std::domain_error("annuity_factor: discount rate must be >= 0");
    if (discount_rate == 0.0)
        return static_cast<double>(lifetime_years);
    return (1.0 - std::pow(1.0 + discount_rate, -lifetime_years)) / discount_rate;
}

/// Annual cost of one MW of new capacity: capital recovery plus fixed O&M.
inline double annualized_capital_cost(const TechnologySpec& spec, double discount_rate) {
    double a = annuity_factor(discount_rate, spec.lifetime_years);
    return spec.capital_cost / a + spec.capital_cost * spec.fom_pct / 100.0;
}

/// tCO2 per MWh of electricity produced.
inline double electric_emission_intensity(const TechnologySpec& spec) {
    if (!(spec.efficiency > 0.0))
        throw std::domain_error("electric_emission_intensity: efficiency must be > 0");
    return spec.fuel_emission_intensity / spec.efficiency;
}

/// Marginal cost of dispatch, currency per MWh electric.
inline double marginal_cost(const TechnologySpec& spec) {
    return spec.vom + spec.fuel_price / spec.efficiency;
}

}  // namespace co2flex

#pragma once

// CO2 budget allocation strategies and the equal-realized-emissions rescaling.
//
//   Grandfathering  - proportional to 1990 emissions
//   Sovereignty     - proportional to annual energy demand
//   Efficiency      - one global cap, no national rows
//   Egalitarianism  - proportional to population
//   AbilityToPay    - proportional to 1 / GDP per capita

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2flex/lp_builder.hpp"
#include "co2flex/lp_solver.hpp"
#include "co2flex/network.hpp"
#include "co2flex/solution_view.hpp"

namespace co2flex {

enum class SchemeKind { Grandfathering, Sovereignty, Efficiency, Egalitarianism, AbilityToPay };

inline const char* to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::Grandfathering: return "grandfathering";
        case SchemeKind::Sovereignty: return "sovereignty";
        case SchemeKind::Efficiency: return "efficiency";
        case SchemeKind::Egalitarianism: return "egalitarianism";
        case SchemeKind::AbilityToPay: return "ability_to_pay";
    }
    return "unknown";
}

inline std::optional<SchemeKind> scheme_from_string(const std::string& s) {
    if (s == "grandfathering") return SchemeKind::Grandfathering;
    if (s == "sovereignty") return SchemeKind::Sovereignty;
    if (s == "efficiency") return SchemeKind::Efficiency;
    if (s == "egalitarianism") return SchemeKind::Egalitarianism;
    if (s == "ability_to_pay" || s == "ability-to-pay") return SchemeKind::AbilityToPay;
    return std::nullopt;
}

struct AllocationScheme {
    SchemeKind kind;
    double budget = 0.0;  ///< tCO2 per year

    AllocationScheme(SchemeKind k, double b) : kind(k), budget(b) {
        if (budget < 0.0) throw std::invalid_argument("allocation: budget must be >= 0");
    }
};

namespace detail {
inline std::vector<double> scheme_weights(SchemeKind kind, const NetworkInstance& net) {
    std::vector<double> w(net.n_nodes(), 0.0);
    for (std::size_t n = 0; n < net.n_nodes(); ++n) {
        switch (kind) {
            case SchemeKind::Grandfathering:
                w[n] = net.nodes[n].historical_emissions_1990;
                break;
            case SchemeKind::Sovereignty:
                w[n] = net.annual_demand(static_cast<int>(n));
                break;
            case SchemeKind::Egalitarianism:
                w[n] = net.nodes[n].population;
                break;
            case SchemeKind::AbilityToPay:
                if (net.nodes[n].gdp_per_capita <= 0.0)
                    throw std::invalid_argument("allocation: node " + net.nodes[n].id +
                                                " is missing gdp_per_capita");
                w[n] = 1.0 / net.nodes[n].gdp_per_capita;
                break;
            case SchemeKind::Efficiency:
                break;
        }
        if (w[n] < 0.0)
            throw std::invalid_argument("allocation: negative weight at node " + net.nodes[n].id);
    }
    return w;
}
}  // namespace detail

/// Split a budget proportionally to positive weights; the last element absorbs
/// the floating-point remainder so the sum equals the budget exactly.
inline std::vector<double> proportional_split(const std::vector<double>& weights, double budget) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("allocation: all-zero weight vector");
    std::vector<double> out(weights.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        out[i] = budget * (weights[i] / total);
        acc += out[i];
    }
    out.back() = budget - acc;
    if (out.back() < 0.0) {
        if (out.back() < -1e-9 * std::max(1.0, budget))
            throw std::logic_error("allocation: remainder correction went negative");
        out.back() = 0.0;
    }
    return out;
}

inline CO2Policy allocate(const AllocationScheme& scheme, const NetworkInstance& net) {
    if (scheme.kind == SchemeKind::Efficiency) return CO2Policy::global(scheme.budget);
    auto weights = detail::scheme_weights(scheme.kind, net);
    auto targets = proportional_split(weights, scheme.budget);
    std::vector<double> fractions(targets.size(), 0.0);
    if (scheme.budget > 0.0)
        for (std::size_t i = 0; i < targets.size(); ++i) fractions[i] = targets[i] / scheme.budget;
    return CO2Policy::national(std::move(targets), std::move(fractions));
}

// ---------------------------------------------------------------------------
// Appendix-style rescaling: pick the budget whose *realized* joint emissions
// match a requested reduction.
// ---------------------------------------------------------------------------

struct RescaleTrace {
    struct Point {
        double budget;
        double realized;  ///< NaN when the solve was infeasible
    };
    std::vector<Point> points;
    double final_budget = 0.0;
    double final_realized = 0.0;
};

struct RescaleResult {
    CO2Policy policy;
    RescaleTrace trace;
};

/// realized_fn returns total realized emissions for a policy, or nullopt when
/// the system is infeasible under it.
using RealizedFn = std::function<std::optional<double>(const CO2Policy&)>;

inline RescaleResult rescale_to_realized(SchemeKind kind, const NetworkInstance& net,
                                         double target_reduction, const RealizedFn& realized_fn,
                                         int max_iterations = 30) {
    if (!(target_reduction > 0.0) || !(target_reduction < 1.0))
        throw std::invalid_argument("rescale: target_reduction must be in (0,1)");
    const double baseline = net.total_historical_emissions();
    if (!(baseline > 0.0)) throw std::invalid_argument("rescale: zero 1990 baseline");
    const double want = (1.0 - target_reduction) * baseline;
    const double band = 0.005 * baseline;  // +-0.5 percentage points of reduction

    RescaleTrace trace;
    auto probe = [&](double budget) -> std::optional<double> {
        auto policy = allocate(AllocationScheme(kind, budget), net);
        auto r = realized_fn(policy);
        trace.points.push_back({budget, r ? *r : std::nan("")});
        // Monotonicity of realized emissions in the budget, asserted on the fly.
        for (const auto& a : trace.points)
            for (const auto& b : trace.points)
                if (!std::isnan(a.realized) && !std::isnan(b.realized) &&
                    a.budget < b.budget && a.realized > b.realized + band)
                    throw std::logic_error("rescale: realized emissions not monotone in budget");
        return r;
    };
    auto finish = [&](double budget, double realized) {
        trace.final_budget = budget;
        trace.final_realized = realized;
        return RescaleResult{allocate(AllocationScheme(kind, budget), net), std::move(trace)};
    };

    // Unconstrained emissions bound the reachable range from above.
    auto unconstrained = realized_fn(CO2Policy::none());
    if (!unconstrained)
        throw std::runtime_error("rescale: system infeasible without CO2 constraints");
    if (*unconstrained < want - band)
        throw std::runtime_error(
            "rescale: non-bracketing - unconstrained emissions fall short of the requested "
            "realized level (reduction already exceeded)");

    double lo = want;
    auto r_lo = probe(lo);
    if (r_lo && std::abs(*r_lo - want) <= band) return finish(lo, *r_lo);
    if (r_lo && *r_lo > want + band)
        throw std::runtime_error("rescale: non-bracketing - budget at the target level already "
                                 "over-shoots realized emissions");

    double hi = std::max(baseline, 2.0 * want);
    std::optional<double> r_hi;
    for (int i = 0; i < max_iterations; ++i) {
        r_hi = probe(hi);
        if (r_hi && std::abs(*r_hi - want) <= band) return finish(hi, *r_hi);
        if (r_hi && *r_hi > want) break;
        hi *= 2.0;
        if (hi > 64.0 * baseline)
            throw std::runtime_error("rescale: non-bracketing - no budget reaches the requested "
                                     "realized emissions");
    }

    for (int i = 0; i < max_iterations; ++i) {
        double mid = 0.5 * (lo + hi);
        auto r = probe(mid);
        if (!r) {  // infeasible: need a looser budget
            lo = mid;
            continue;
        }
        if (std::abs(*r - want) <= band) return finish(mid, *r);
        if (*r < want)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("rescale: bisection did not converge within " +
                             std::to_string(max_iterations) + " iterations");
}

/// Convenience overload wiring the LP pipeline as the realized-emissions oracle.
inline RescaleResult rescale_to_realized(SchemeKind kind, const NetworkInstance& net,
                                         double target_reduction, double discount_rate,
                                         const simplex::Options& opt = {}) {
    RealizedFn fn = [&](const CO2Policy& policy) -> std::optional<double> {
        auto [lp, report] = build(net, policy, discount_rate);
        (void)report;
        auto sol = solve(lp, opt);
        if (sol.status != SolveStatus::Optimal) return std::nullopt;
        return summarize(net, policy, lp, sol).total_emissions;
    };
    return rescale_to_realized(kind, net, target_reduction, fn);
}

}  // namespace co2flex

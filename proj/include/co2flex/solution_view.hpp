#pragma once

// Domain-level view of a solved system: per-node realized emissions,
// generation, abatement costs (national CO2 duals) and mean electricity
// prices, pulled out of the LP solution via row/column metadata.

#include <string>
#include <vector>

#include "co2flex/lp_builder.hpp"
#include "co2flex/lp_solver.hpp"
#include "co2flex/network.hpp"

namespace co2flex {

struct SystemOutcome {
    double total_cost = 0.0;              ///< currency/yr, includes sunk fixed O&M
    double total_emissions = 0.0;         ///< tCO2/yr
    std::vector<double> node_emissions;   ///< tCO2/yr
    std::vector<double> node_generation;  ///< MWh/yr produced by generators
    std::vector<double> node_abatement;   ///< currency/t; global dual replicated under Global
    std::vector<double> node_mean_price;  ///< currency/MWh, unweighted time average
    std::vector<double> node_mean_price_weighted;  ///< demand-weighted time average
};

inline SystemOutcome summarize(const NetworkInstance& net, const CO2Policy& policy,
                               const LPProblem& lp, const SolvedSystem& sol) {
    const int T = net.horizon;
    const double wh = net.timestep_hours * net.annual_scale();
    SystemOutcome out;
    out.total_cost = sol.objective;
    out.node_emissions.assign(net.n_nodes(), 0.0);
    out.node_generation.assign(net.n_nodes(), 0.0);
    out.node_abatement.assign(net.n_nodes(), 0.0);
    out.node_mean_price.assign(net.n_nodes(), 0.0);

    for (const auto& g : net.generators) {
        double e = electric_emission_intensity(net.technologies[g.tech]);
        for (int t = 0; t < T; ++t) {
            double mwh = sol.primal_of(lp, detail::tname("g", g.id, t)) * wh;
            out.node_generation[g.node] += mwh;
            out.node_emissions[g.node] += e * mwh;
        }
    }
    for (double e : out.node_emissions) out.total_emissions += e;

    if (policy.mode() == CO2Policy::Mode::Global) {
        double mu = sol.dual_of(lp, "co2:global");
        for (auto& a : out.node_abatement) a = mu;
    } else if (policy.mode() == CO2Policy::Mode::National) {
        for (std::size_t n = 0; n < net.n_nodes(); ++n)
            out.node_abatement[n] =
                sol.dual_of(lp, detail::tname("co2:national", net.nodes[n].id));
    }

    out.node_mean_price_weighted.assign(net.n_nodes(), 0.0);
    for (std::size_t n = 0; n < net.n_nodes(); ++n) {
        double sum = 0.0, wsum = 0.0, wtot = 0.0;
        for (int t = 0; t < T; ++t) {
            double lambda = sol.dual_of(lp, detail::tname("balance", net.nodes[n].id, t));
            double d = net.nodes[n].demand[t];
            sum += lambda;
            wsum += lambda * d;
            wtot += d;
        }
        out.node_mean_price[n] = sum / T;
        out.node_mean_price_weighted[n] = wtot > 0.0 ? wsum / wtot : sum / T;
    }
    return out;
}

}  // namespace co2flex

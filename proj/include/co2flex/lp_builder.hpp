#pragma once

// Translate a NetworkInstance + CO2Policy into a named LP.
//
// Units: dispatch/flow/capacity variables are MW (soc in MWh). Nodal balance
// rows are written in MWh per model year, so their duals are electricity
// prices in currency/MWh. CO2 rows are in tCO2 per year, so their duals are
// abatement costs in currency/t. Operating costs are weighted by
// timestep_hours and scaled from the modeled horizon to a full year.
//
// Brownfield treatment: capacity below `existing` pays fixed O&M but no
// capital; only expansion above `existing` pays annualized capital cost.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "co2flex/lp_problem.hpp"
#include "co2flex/network.hpp"

namespace co2flex {

namespace detail {
inline std::string tname(const std::string& a, const std::string& b) { return a + ":" + b; }
inline std::string tname(const std::string& a, const std::string& b, int t) {
    return a + ":" + b + ":" + std::to_string(t);
}
}  // namespace detail

/// Per-dispatch-variable CO2 coefficients in tCO2 per MW over one timestep
/// (electric intensity x timestep_hours). Zero entries are omitted. The
/// builder scales these by the horizon-to-year factor when installing rows.
inline std::map<std::string, double> emissions_row_coefficients(const NetworkInstance& net) {
    std::map<std::string, double> out;
    for (const auto& g : net.generators) {
        double e = electric_emission_intensity(net.technologies[g.tech]);
        if (e == 0.0) continue;
        for (int t = 0; t < net.horizon; ++t)
            out[detail::tname("g", g.id, t)] = e * net.timestep_hours;
    }
    return out;
}

inline std::pair<LPProblem, BuildReport> build(const NetworkInstance& net,
                                               const CO2Policy& policy,
                                               double discount_rate) {
    net.validate();
    if (policy.mode() == CO2Policy::Mode::National &&
        policy.targets().size() != net.n_nodes())
        throw std::invalid_argument("CO2Policy: " + std::to_string(policy.targets().size()) +
                                    " national targets for " + std::to_string(net.n_nodes()) +
                                    " nodes");

    LPProblem lp;
    lp.name = net.name;
    const int T = net.horizon;
    const double h = net.timestep_hours;
    const double alpha = net.annual_scale();
    const double wh = h * alpha;  // MWh/yr contributed by 1 MW over one step

    BuildReport report;
    report.horizon = T;
    switch (policy.mode()) {
        case CO2Policy::Mode::None: report.policy_mode = "none"; break;
        case CO2Policy::Mode::Global: report.policy_mode = "global"; break;
        case CO2Policy::Mode::National: report.policy_mode = "national"; break;
    }
    auto count_col = [&](const char* k) { ++report.variable_counts[k]; };
    auto count_row = [&](const char* k) { ++report.constraint_counts[k]; };

    // --- balance rows first: one per node and step --------------------------
    std::vector<int> balance_row(net.n_nodes() * T);
    for (std::size_t n = 0; n < net.n_nodes(); ++n)
        for (int t = 0; t < T; ++t) {
            balance_row[n * T + t] =
                lp.add_row(detail::tname("balance", net.nodes[n].id, t), RowSense::Equal,
                           alpha * net.nodes[n].demand[t],
                           RowMeta{RowKind::Balance, net.nodes[n].id, t});
            count_row("balance");
        }

    // --- generators ----------------------------------------------------------
    for (const auto& g : net.generators) {
        const auto& tech = net.technologies[g.tech];
        const double mcost = marginal_cost(tech);
        const bool expand = tech.expandable && g.max_capacity > g.existing_capacity;

        int cap_col = -1;
        if (expand) {
            double c_annual = annualized_capital_cost(tech, discount_rate);
            cap_col = lp.add_column(detail::tname("G", g.id), g.existing_capacity,
                                    g.max_capacity, c_annual,
                                    ColMeta{ColKind::GenCapacity, g.id});
            count_col("gen_capacity");
            // refund capital (not FOM) on the brownfield part
            double a = annuity_factor(discount_rate, tech.lifetime_years);
            lp.objective_constant -= tech.capital_cost / a * g.existing_capacity;
        } else {
            lp.objective_constant +=
                g.existing_capacity * tech.capital_cost * tech.fom_pct / 100.0;
        }

        for (int t = 0; t < T; ++t) {
            double cf = g.capacity_factor[t];
            double ub = expand ? (cf > 0.0 ? kInf : 0.0) : cf * g.existing_capacity;
            int col = lp.add_column(detail::tname("g", g.id, t), 0.0, ub, mcost * wh,
                                    ColMeta{ColKind::Dispatch, g.id, t});
            count_col("dispatch");
            lp.add_coeff(balance_row[static_cast<std::size_t>(g.node) * T + t], col, wh);
            if (expand && cf > 0.0) {
                int row = lp.add_row(detail::tname("cap", g.id, t), RowSense::LessEqual, 0.0,
                                     RowMeta{RowKind::DispatchCap, g.id, t});
                count_row("dispatch_cap");
                lp.add_coeff(row, col, 1.0);
                lp.add_coeff(row, cap_col, -cf);
            }
        }
    }

    // --- transmission ---------------------------------------------------------
    for (const auto& l : net.lines) {
        const bool expand = l.max_capacity > l.existing_capacity;
        int cap_col = -1;
        if (expand) {
            cap_col = lp.add_column(detail::tname("F", l.id), l.existing_capacity,
                                    l.max_capacity, l.capital_cost,
                                    ColMeta{ColKind::LineCapacity, l.id});
            count_col("line_capacity");
            lp.objective_constant -= l.capital_cost * l.existing_capacity;
        }
        for (int t = 0; t < T; ++t) {
            double lo = expand ? -kInf : -l.existing_capacity;
            double up = expand ? kInf : l.existing_capacity;
            int col = lp.add_column(detail::tname("f", l.id, t), lo, up, 0.0,
                                    ColMeta{ColKind::Flow, l.id, t});
            count_col("flow");
            // flow leaves `from`, arrives at `to`
            lp.add_coeff(balance_row[static_cast<std::size_t>(l.from_node) * T + t], col, -wh);
            lp.add_coeff(balance_row[static_cast<std::size_t>(l.to_node) * T + t], col, wh);
            if (expand) {
                int r1 = lp.add_row(detail::tname("flow+", l.id, t), RowSense::LessEqual, 0.0,
                                    RowMeta{RowKind::FlowUpper, l.id, t});
                lp.add_coeff(r1, col, 1.0);
                lp.add_coeff(r1, cap_col, -1.0);
                int r2 = lp.add_row(detail::tname("flow-", l.id, t), RowSense::LessEqual, 0.0,
                                    RowMeta{RowKind::FlowLower, l.id, t});
                lp.add_coeff(r2, col, -1.0);
                lp.add_coeff(r2, cap_col, -1.0);
                count_row("flow_upper");
                count_row("flow_lower");
            }
        }
    }

    // --- storage (cyclic state of charge) -------------------------------------
    if (net.storage_dynamics) {
        for (const auto& st : net.storages) {
            const auto& cht = net.technologies[st.charge_tech];
            const auto& dit = net.technologies[st.discharge_tech];
            const bool expand = st.energy_tech >= 0 && st.max_energy_capacity > st.energy_capacity;

            int ecol = -1;
            if (expand) {
                const auto& et = net.technologies[st.energy_tech];
                ecol = lp.add_column(detail::tname("E", st.id), st.energy_capacity,
                                     st.max_energy_capacity,
                                     annualized_capital_cost(et, discount_rate),
                                     ColMeta{ColKind::StorageEnergyCap, st.id});
                count_col("storage_energy");
                double a = annuity_factor(discount_rate, et.lifetime_years);
                lp.objective_constant -= et.capital_cost / a * st.energy_capacity;
            }
            lp.objective_constant +=
                st.power_capacity * cht.capital_cost * cht.fom_pct / 100.0;

            std::vector<int> ch(T), dis(T), soc(T);
            for (int t = 0; t < T; ++t) {
                ch[t] = lp.add_column(detail::tname("ch", st.id, t), 0.0, st.power_capacity,
                                      0.0, ColMeta{ColKind::StorageCharge, st.id, t});
                dis[t] = lp.add_column(detail::tname("dis", st.id, t), 0.0, st.power_capacity,
                                       marginal_cost(dit) * wh,
                                       ColMeta{ColKind::StorageDischarge, st.id, t});
                soc[t] = lp.add_column(detail::tname("soc", st.id, t), 0.0,
                                       expand ? kInf : st.energy_capacity, 0.0,
                                       ColMeta{ColKind::StorageSoc, st.id, t});
                count_col("storage_charge");
                count_col("storage_discharge");
                count_col("storage_soc");
                std::size_t b = static_cast<std::size_t>(st.node) * T + t;
                lp.add_coeff(balance_row[b], dis[t], wh);
                lp.add_coeff(balance_row[b], ch[t], -wh);
            }
            for (int t = 0; t < T; ++t) {
                int row = lp.add_row(detail::tname("socbal", st.id, t), RowSense::Equal, 0.0,
                                     RowMeta{RowKind::SocRecursion, st.id, t});
                count_row("soc");
                lp.add_coeff(row, soc[(t + 1) % T], 1.0);
                lp.add_coeff(row, soc[t], -1.0);
                lp.add_coeff(row, ch[t], -cht.efficiency * h);
                lp.add_coeff(row, dis[t], h / dit.efficiency);
                if (expand) {
                    int r2 = lp.add_row(detail::tname("soccap", st.id, t), RowSense::LessEqual,
                                        0.0, RowMeta{RowKind::SocCap, st.id, t});
                    count_row("soc_cap");
                    lp.add_coeff(r2, soc[t], 1.0);
                    lp.add_coeff(r2, ecol, -1.0);
                }
            }
        }
    }

    // --- CO2 constraints --------------------------------------------------------
    if (policy.mode() == CO2Policy::Mode::Global) {
        int row = lp.add_row("co2:global", RowSense::LessEqual, policy.cap(),
                             RowMeta{RowKind::Co2Global, ""});
        count_row("co2_global");
        for (const auto& g : net.generators) {
            double e = electric_emission_intensity(net.technologies[g.tech]);
            if (e == 0.0) continue;
            for (int t = 0; t < T; ++t)
                lp.add_coeff(row, lp.column_index(detail::tname("g", g.id, t)), e * wh);
        }
    } else if (policy.mode() == CO2Policy::Mode::National) {
        for (std::size_t n = 0; n < net.n_nodes(); ++n) {
            int row = lp.add_row(detail::tname("co2:national", net.nodes[n].id),
                                 RowSense::LessEqual, policy.target_for(n),
                                 RowMeta{RowKind::Co2National, net.nodes[n].id});
            count_row("co2_national");
            for (const auto& g : net.generators) {
                if (g.node != static_cast<int>(n)) continue;
                double e = electric_emission_intensity(net.technologies[g.tech]);
                if (e == 0.0) continue;
                for (int t = 0; t < T; ++t)
                    lp.add_coeff(row, lp.column_index(detail::tname("g", g.id, t)), e * wh);
            }
        }
    }

    lp.validate();
    report.n_variables = static_cast<int>(lp.columns.size());
    report.n_constraints = static_cast<int>(lp.rows.size());
    return {std::move(lp), std::move(report)};
}

}  // namespace co2flex

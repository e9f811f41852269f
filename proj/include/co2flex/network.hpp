#pragma once

// Domain model of a multi-node power system: nodes with demand series,
// brownfield and expandable generators, storage, transmission lines, and the
// CO2 policy applied to a solve. Instances are immutable after load and safe
// to share across threads.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2flex/technology.hpp"

namespace co2flex {

/// Emission factor of coal-equivalent supply, tCO2 per MWh electric.
inline constexpr double kCoalEquivalentIntensity = 0.45;
/// Super-exporter criterion allows up to 150% of demand served by coal-equivalent.
inline constexpr double kSuperExporterFactor = 1.5;
/// Hours in the model year used for annualization.
inline constexpr double kHoursPerYear = 8760.0;

struct Node {
    std::string id;
    double historical_emissions_1990 = 0.0;  ///< tCO2 per year
    double population = 0.0;
    double gdp_per_capita = 0.0;
    std::vector<double> demand;              ///< MWh per timestep, length = horizon
};

struct GeneratorAsset {
    std::string id;
    int node = -1;   ///< index into NetworkInstance::nodes
    int tech = -1;   ///< index into NetworkInstance::technologies
    double existing_capacity = 0.0;  ///< MW
    double max_capacity = 0.0;       ///< MW, geographic potential
    std::vector<double> capacity_factor;  ///< per-step fraction, length = horizon
};

struct StorageAsset {
    std::string id;
    int node = -1;
    int charge_tech = -1;
    int discharge_tech = -1;
    int energy_tech = -1;            ///< cost basis for expandable energy capacity (-1 if fixed)
    double power_capacity = 0.0;     ///< MW, charge/discharge limit (fixed)
    double energy_capacity = 0.0;    ///< MWh installed
    double max_energy_capacity = 0.0;
};

struct TransmissionLine {
    std::string id;
    int from_node = -1;
    int to_node = -1;
    double existing_capacity = 0.0;  ///< MW
    double max_capacity = 0.0;
    double capital_cost = 0.0;       ///< currency per MW per year (annualized)
};

class NetworkInstance {
public:
    std::string name;
    double timestep_hours = 1.0;
    int horizon = 0;
    bool storage_dynamics = true;

    std::vector<Node> nodes;
    std::vector<TechnologySpec> technologies;
    std::vector<GeneratorAsset> generators;
    std::vector<StorageAsset> storages;
    std::vector<TransmissionLine> lines;

    std::size_t n_nodes() const { return nodes.size(); }

    int node_index(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        return -1;
    }
    int tech_index(const std::string& name) const {
        for (std::size_t i = 0; i < technologies.size(); ++i)
            if (technologies[i].name == name) return static_cast<int>(i);
        return -1;
    }

    /// Factor converting one pass over the modeled horizon to a full year.
    double annual_scale() const {
        return kHoursPerYear / (static_cast<double>(horizon) * timestep_hours);
    }

    /// MWh per year served at the node, extrapolated from the horizon.
    double annual_demand(int node) const {
        double sum = 0.0;
        for (double d : nodes.at(node).demand) sum += d;
        return sum * annual_scale();
    }

    double total_historical_emissions() const {
        double sum = 0.0;
        for (const auto& n : nodes) sum += n.historical_emissions_1990;
        return sum;
    }

    void validate() const;
};

/// Table-1 criterion (d): annual emissions allowed before a node counts as a
/// super exporter of fossil electricity (150% of demand served by coal-equivalent).
inline double coal_super_exporter_limit(const NetworkInstance& net, int node) {
    return net.annual_demand(node) * kCoalEquivalentIntensity * kSuperExporterFactor;
}

// ---------------------------------------------------------------------------
// CO2 policy
// ---------------------------------------------------------------------------

class CO2Policy {
public:
    enum class Mode { None, Global, National };

    static CO2Policy none() { return CO2Policy(Mode::None); }

    static CO2Policy global(double cap) {
        if (cap < 0.0) throw std::invalid_argument("CO2Policy: global cap must be >= 0");
        CO2Policy p(Mode::Global);
        p.cap_ = cap;
        return p;
    }

    /// National targets aligned to network node order. Optionally retains the
    /// fraction vector x the targets were derived from.
    static CO2Policy national(std::vector<double> targets,
                              std::vector<double> fractions = {}) {
        for (double t : targets)
            if (t < 0.0) throw std::invalid_argument("CO2Policy: national targets must be >= 0");
        CO2Policy p(Mode::National);
        p.targets_ = std::move(targets);
        p.fractions_ = std::move(fractions);
        return p;
    }

    Mode mode() const { return mode_; }
    double cap() const { return cap_; }
    const std::vector<double>& targets() const { return targets_; }
    const std::vector<double>& fractions() const { return fractions_; }

    double target_for(std::size_t node) const { return targets_.at(node); }

private:
    explicit CO2Policy(Mode m) : mode_(m) {}
    Mode mode_;
    double cap_ = 0.0;
    std::vector<double> targets_;
    std::vector<double> fractions_;
};

// ---------------------------------------------------------------------------

inline void NetworkInstance::validate() const {
    if (horizon < 1)
        throw std::invalid_argument("network " + name + ": horizon must be >= 1");
    if (!(timestep_hours > 0.0))
        throw std::invalid_argument("network " + name + ": timestep_hours must be > 0");
    if (nodes.empty())
        throw std::invalid_argument("network " + name + ": no nodes declared");

    std::map<std::string, int> seen;
    for (const auto& n : nodes) {
        if (seen.count(n.id))
            throw std::invalid_argument("node " + n.id + ": duplicate id");
        seen[n.id] = 1;
        if (n.demand.size() != static_cast<std::size_t>(horizon))
            throw std::invalid_argument("node " + n.id + ": series length " +
                                        std::to_string(n.demand.size()) + " != horizon " +
                                        std::to_string(horizon));
        for (double d : n.demand)
            if (d < 0.0) throw std::invalid_argument("node " + n.id + ": negative demand");
        if (n.historical_emissions_1990 < 0.0)
            throw std::invalid_argument("node " + n.id + ": negative historical emissions");
    }
    for (const auto& t : technologies) t.validate();
    for (const auto& g : generators) {
        if (g.node < 0 || g.node >= static_cast<int>(nodes.size()))
            throw std::invalid_argument("generator " + g.id + ": unknown node");
        if (g.tech < 0 || g.tech >= static_cast<int>(technologies.size()))
            throw std::invalid_argument("generator " + g.id + ": unknown technology");
        if (g.existing_capacity < 0.0)
            throw std::invalid_argument("generator " + g.id + ": negative capacity");
        if (g.existing_capacity > g.max_capacity)
            throw std::invalid_argument("generator " + g.id + ": existing exceeds max capacity");
        if (g.capacity_factor.size() != static_cast<std::size_t>(horizon))
            throw std::invalid_argument("generator " + g.id + ": series length " +
                                        std::to_string(g.capacity_factor.size()) +
                                        " != horizon " + std::to_string(horizon));
        for (double cf : g.capacity_factor)
            if (cf < 0.0 || cf > 1.0)
                throw std::invalid_argument("generator " + g.id + ": capacity factor outside [0,1]");
    }
    for (const auto& s : storages) {
        if (s.node < 0 || s.node >= static_cast<int>(nodes.size()))
            throw std::invalid_argument("storage " + s.id + ": unknown node");
        if (s.charge_tech < 0 || s.charge_tech >= static_cast<int>(technologies.size()) ||
            s.discharge_tech < 0 || s.discharge_tech >= static_cast<int>(technologies.size()))
            throw std::invalid_argument("storage " + s.id + ": unknown technology");
        if (s.energy_tech >= static_cast<int>(technologies.size()))
            throw std::invalid_argument("storage " + s.id + ": unknown energy technology");
        if (s.power_capacity < 0.0 || s.energy_capacity < 0.0)
            throw std::invalid_argument("storage " + s.id + ": negative capacity");
        if (s.energy_capacity > s.max_energy_capacity)
            throw std::invalid_argument("storage " + s.id + ": energy capacity exceeds max");
    }
    for (const auto& l : lines) {
        if (l.from_node < 0 || l.from_node >= static_cast<int>(nodes.size()) ||
            l.to_node < 0 || l.to_node >= static_cast<int>(nodes.size()))
            throw std::invalid_argument("line " + l.id + ": unknown node");
        if (l.from_node == l.to_node)
            throw std::invalid_argument("line " + l.id + ": from and to node are equal");
        if (l.existing_capacity < 0.0 || l.existing_capacity > l.max_capacity)
            throw std::invalid_argument("line " + l.id + ": capacity bounds violated");
        if (l.capital_cost < 0.0)
            throw std::invalid_argument("line " + l.id + ": negative capital cost");
    }
}

}  // namespace co2flex

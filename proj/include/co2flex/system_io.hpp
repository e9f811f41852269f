#pragma once

// Loading and saving system description files. The format is sectioned text:
// [meta] and [series] hold key = value pairs, the remaining sections hold
// whitespace-separated tables. Series may be inline or reference CSV files
// (header row of asset ids, one column per asset, one row per timestep).
// save_network emits a canonical form with all series inline, so
// load -> save -> load is a fixed point.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "co2flex/network.hpp"
#include "co2flex/util.hpp"

namespace co2flex {

namespace detail {

struct RawSeries {
    std::vector<double> values;
    std::string origin;  // file:line or csv name, for error messages
};

inline void read_series_csv(const std::filesystem::path& path,
                            std::map<std::string, RawSeries>& out) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), "cannot open series file");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string(), "empty series file");
    auto headers = util::split(line, ',');
    if (headers.empty()) throw ParseError(path.string(), "missing header row");
    std::vector<RawSeries*> cols;
    for (const auto& h : headers) {
        if (h.empty()) throw ParseError(path.string(), "empty column id in header");
        if (out.count(h)) throw ParseError(path.string(), "duplicate series id '" + h + "'");
        auto& rs = out[h];
        rs.origin = path.filename().string();
        cols.push_back(&rs);
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        auto cells = util::split(line, ',');
        if (cells.size() != cols.size())
            throw ParseError(path.string() + ":" + std::to_string(lineno),
                             "expected " + std::to_string(cols.size()) + " columns, got " +
                                 std::to_string(cells.size()));
        for (std::size_t i = 0; i < cells.size(); ++i)
            cols[i]->values.push_back(util::parse_double(
                cells[i], path.string() + ":" + std::to_string(lineno)));
    }
}

}  // namespace detail

inline NetworkInstance load_network_stream(std::istream& in, const std::string& display_path,
                                           const std::filesystem::path& dir) {
    NetworkInstance net;
    std::map<std::string, detail::RawSeries> series;
    struct GenRow { GeneratorAsset gen; std::string cf_spec; std::string where; };
    std::vector<GenRow> gen_rows;

    std::string section;
    std::string line;
    int lineno = 0;
    auto where = [&] { return display_path + ":" + std::to_string(lineno); };

    while (std::getline(in, line)) {
        ++lineno;
        auto s = util::trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[' && s.back() == ']') {
            section = std::string(s.substr(1, s.size() - 2));
            continue;
        }
        if (section == "meta" || section == "series") {
            auto eq = s.find('=');
            if (eq == std::string_view::npos)
                throw ParseError(where(), "expected key = value");
            std::string key(util::trim(s.substr(0, eq)));
            std::string val(util::trim(s.substr(eq + 1)));
            if (section == "meta") {
                if (key == "name") net.name = val;
                else if (key == "timestep_hours") net.timestep_hours = util::parse_double(val, where());
                else if (key == "horizon") net.horizon = static_cast<int>(util::parse_long(val, where()));
                else if (key == "storage_dynamics") net.storage_dynamics = (val == "on");
                else throw ParseError(where(), "unknown meta key '" + key + "'");
            } else {
                if (key == "file") {
                    detail::read_series_csv(dir / val, series);
                } else {
                    if (series.count(key))
                        throw ParseError(where(), "duplicate series id '" + key + "'");
                    auto& rs = series[key];
                    rs.origin = where();
                    for (const auto& tok : util::split_ws(val))
                        rs.values.push_back(util::parse_double(tok, where()));
                }
            }
            continue;
        }
        auto tok = util::split_ws(s);
        if (section == "nodes") {
            if (tok.size() != 4) throw ParseError(where(), "nodes row needs 4 fields");
            Node n;
            n.id = tok[0];
            n.historical_emissions_1990 = util::parse_double(tok[1], where());
            n.population = util::parse_double(tok[2], where());
            n.gdp_per_capita = util::parse_double(tok[3], where());
            net.nodes.push_back(std::move(n));
        } else if (section == "technologies") {
            if (tok.size() != 9) throw ParseError(where(), "technologies row needs 9 fields");
            TechnologySpec t;
            t.name = tok[0];
            t.capital_cost = util::parse_double(tok[1], where());
            t.fom_pct = util::parse_double(tok[2], where());
            t.vom = util::parse_double(tok[3], where());
            t.lifetime_years = static_cast<int>(util::parse_long(tok[4], where()));
            t.efficiency = util::parse_double(tok[5], where());
            t.fuel_emission_intensity = util::parse_double(tok[6], where());
            t.fuel_price = util::parse_double(tok[7], where());
            if (tok[8] == "yes") t.expandable = true;
            else if (tok[8] == "no") t.expandable = false;
            else throw ParseError(where(), "expandable must be yes or no");
            net.technologies.push_back(std::move(t));
        } else if (section == "generators") {
            if (tok.size() != 6) throw ParseError(where(), "generators row needs 6 fields");
            GenRow row;
            row.gen.id = tok[0];
            row.gen.node = net.node_index(tok[1]);
            if (row.gen.node < 0) throw ParseError(where(), "unknown node '" + tok[1] + "'");
            row.gen.tech = net.tech_index(tok[2]);
            if (row.gen.tech < 0) throw ParseError(where(), "unknown technology '" + tok[2] + "'");
            row.gen.existing_capacity = util::parse_double(tok[3], where());
            row.gen.max_capacity = util::parse_double(tok[4], where());
            row.cf_spec = tok[5];
            row.where = where();
            gen_rows.push_back(std::move(row));
        } else if (section == "storage") {
            if (tok.size() != 8) throw ParseError(where(), "storage row needs 8 fields");
            StorageAsset st;
            st.id = tok[0];
            st.node = net.node_index(tok[1]);
            if (st.node < 0) throw ParseError(where(), "unknown node '" + tok[1] + "'");
            st.charge_tech = net.tech_index(tok[2]);
            if (st.charge_tech < 0) throw ParseError(where(), "unknown technology '" + tok[2] + "'");
            st.discharge_tech = net.tech_index(tok[3]);
            if (st.discharge_tech < 0) throw ParseError(where(), "unknown technology '" + tok[3] + "'");
            if (tok[4] == "-") {
                st.energy_tech = -1;
            } else {
                st.energy_tech = net.tech_index(tok[4]);
                if (st.energy_tech < 0) throw ParseError(where(), "unknown technology '" + tok[4] + "'");
            }
            st.power_capacity = util::parse_double(tok[5], where());
            st.energy_capacity = util::parse_double(tok[6], where());
            st.max_energy_capacity = util::parse_double(tok[7], where());
            net.storages.push_back(std::move(st));
        } else if (section == "lines") {
            if (tok.size() != 6) throw ParseError(where(), "lines row needs 6 fields");
            TransmissionLine l;
            l.id = tok[0];
            l.from_node = net.node_index(tok[1]);
            if (l.from_node < 0) throw ParseError(where(), "unknown node '" + tok[1] + "'");
            l.to_node = net.node_index(tok[2]);
            if (l.to_node < 0) throw ParseError(where(), "unknown node '" + tok[2] + "'");
            l.existing_capacity = util::parse_double(tok[3], where());
            l.max_capacity = util::parse_double(tok[4], where());
            l.capital_cost = util::parse_double(tok[5], where());
            net.lines.push_back(std::move(l));
        } else {
            throw ParseError(where(), section.empty() ? "content before any section"
                                                      : "unknown section '" + section + "'");
        }
    }

    // Resolve demand series: one per node, keyed by node id.
    for (auto& n : net.nodes) {
        auto it = series.find(n.id);
        if (it == series.end())
            throw ParseError(display_path, "node " + n.id + ": no demand series");
        n.demand = it->second.values;
    }
    // Resolve capacity factors.
    for (auto& row : gen_rows) {
        if (row.cf_spec == "-") {
            row.gen.capacity_factor.assign(net.horizon, 1.0);
        } else if (row.cf_spec.rfind("const:", 0) == 0) {
            double v = util::parse_double(std::string_view(row.cf_spec).substr(6), row.where);
            row.gen.capacity_factor.assign(net.horizon, v);
        } else if (row.cf_spec.rfind("series:", 0) == 0) {
            std::string sid = row.cf_spec.substr(7);
            auto it = series.find(sid);
            if (it == series.end())
                throw ParseError(row.where, "unknown series '" + sid + "'");
            row.gen.capacity_factor = it->second.values;
        } else {
            throw ParseError(row.where, "cf must be '-', 'const:<v>' or 'series:<id>'");
        }
        net.generators.push_back(std::move(row.gen));
    }

    net.validate();
    return net;
}

inline NetworkInstance load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), "cannot open system file");
    return load_network_stream(in, path.string(), path.parent_path());
}

/// Parse a system description held in memory; CSV references resolve against base_dir.
inline NetworkInstance load_network_string(const std::string& text,
                                           const std::filesystem::path& base_dir = ".") {
    std::istringstream in(text);
    return load_network_stream(in, "<string>", base_dir);
}

/// Canonical serialization: sections in fixed order, all series inline,
/// shortest round-trip number formatting.
inline std::string save_network(const NetworkInstance& net) {
    std::ostringstream os;
    auto num = [](double v) { return util::format_double(v); };

    os << "[meta]\n";
    os << "name = " << net.name << "\n";
    os << "timestep_hours = " << num(net.timestep_hours) << "\n";
    os << "horizon = " << net.horizon << "\n";
    os << "storage_dynamics = " << (net.storage_dynamics ? "on" : "off") << "\n";

    os << "\n[nodes]\n";
    for (const auto& n : net.nodes)
        os << n.id << " " << num(n.historical_emissions_1990) << " " << num(n.population)
           << " " << num(n.gdp_per_capita) << "\n";

    os << "\n[technologies]\n";
    for (const auto& t : net.technologies)
        os << t.name << " " << num(t.capital_cost) << " " << num(t.fom_pct) << " "
           << num(t.vom) << " " << t.lifetime_years << " " << num(t.efficiency) << " "
           << num(t.fuel_emission_intensity) << " " << num(t.fuel_price) << " "
           << (t.expandable ? "yes" : "no") << "\n";

    os << "\n[generators]\n";
    std::vector<const GeneratorAsset*> cf_series;
    for (const auto& g : net.generators) {
        bool constant = true;
        for (double v : g.capacity_factor)
            if (v != g.capacity_factor.front()) { constant = false; break; }
        os << g.id << " " << net.nodes[g.node].id << " " << net.technologies[g.tech].name
           << " " << num(g.existing_capacity) << " " << num(g.max_capacity) << " ";
        if (constant) {
            os << "const:" << num(g.capacity_factor.empty() ? 1.0 : g.capacity_factor.front());
        } else {
            os << "series:" << g.id;
            cf_series.push_back(&g);
        }
        os << "\n";
    }

    if (!net.storages.empty()) {
        os << "\n[storage]\n";
        for (const auto& s : net.storages)
            os << s.id << " " << net.nodes[s.node].id << " "
               << net.technologies[s.charge_tech].name << " "
               << net.technologies[s.discharge_tech].name << " "
               << (s.energy_tech < 0 ? std::string("-") : net.technologies[s.energy_tech].name)
               << " " << num(s.power_capacity) << " " << num(s.energy_capacity) << " "
               << num(s.max_energy_capacity) << "\n";
    }

    if (!net.lines.empty()) {
        os << "\n[lines]\n";
        for (const auto& l : net.lines)
            os << l.id << " " << net.nodes[l.from_node].id << " " << net.nodes[l.to_node].id
               << " " << num(l.existing_capacity) << " " << num(l.max_capacity) << " "
               << num(l.capital_cost) << "\n";
    }

    os << "\n[series]\n";
    for (const auto& n : net.nodes) {
        os << n.id << " =";
        for (double v : n.demand) os << " " << num(v);
        os << "\n";
    }
    for (const auto* g : cf_series) {
        os << g->id << " =";
        for (double v : g->capacity_factor) os << " " << num(v);
        os << "\n";
    }
    return os.str();
}

inline void save_network_file(const NetworkInstance& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path.string(), "cannot write system file");
    out << save_network(net);
}

/// Stable identity of a network, used to guard chain merges.
inline std::string network_hash(const NetworkInstance& net) {
    return util::fnv1a_hex(save_network(net));
}

}  // namespace co2flex

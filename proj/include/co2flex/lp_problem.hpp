#pragma once

// A named linear program in the form
//   min  c'x + k   s.t.  rows (= | <=),  l <= x <= u
// Every row and column carries typed metadata mapping it back to the domain
// object it came from, so dual values can be read as prices.

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2flex/util.hpp"

namespace co2flex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { Equal, LessEqual };

enum class ColKind {
    Dispatch,          // g: generator output per step, MW
    GenCapacity,       // G: expandable generator capacity, MW
    Flow,              // f: line flow per step, MW (signed)
    LineCapacity,      // F: expandable line capacity, MW
    StorageCharge,     // MW drawn from the bus
    StorageDischarge,  // MW fed into the bus
    StorageSoc,        // MWh held at end of step
    StorageEnergyCap,  // E: expandable energy capacity, MWh
};

enum class RowKind {
    Balance,       // nodal power balance, MWh/yr units (dual = price in currency/MWh)
    DispatchCap,   // g - cf*G <= 0
    FlowUpper,     // f - F <= 0
    FlowLower,     // -f - F <= 0
    SocRecursion,  // cyclic state of charge
    SocCap,        // soc - E <= 0
    Co2Global,     // annual emissions <= cap (dual = abatement cost, currency/t)
    Co2National,
};

struct ColMeta {
    ColKind kind;
    std::string entity;  ///< generator / line / storage id
    int timestep = -1;
};

struct RowMeta {
    RowKind kind;
    std::string entity;  ///< node / generator / line / storage id
    int timestep = -1;
};

struct LPColumn {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    double objective = 0.0;
    ColMeta meta;
};

struct LPRow {
    std::string name;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> coeffs;  ///< (column index, value)
    RowMeta meta;
};

class LPProblem {
public:
    std::string name;
    std::vector<LPColumn> columns;
    std::vector<LPRow> rows;
    double objective_constant = 0.0;  ///< fixed annual cost outside the variable part

    int add_column(std::string colname, double lower, double upper, double objective,
                   ColMeta meta) {
        LPColumn c;
        c.name = std::move(colname);
        c.lower = lower;
        c.upper = upper;
        c.objective = objective;
        c.meta = std::move(meta);
        columns.push_back(std::move(c));
        return static_cast<int>(columns.size()) - 1;
    }

    int add_row(std::string rowname, RowSense sense, double rhs, RowMeta meta) {
        LPRow r;
        r.name = std::move(rowname);
        r.sense = sense;
        r.rhs = rhs;
        r.meta = std::move(meta);
        rows.push_back(std::move(r));
        return static_cast<int>(rows.size()) - 1;
    }

    void add_coeff(int row, int col, double value) {
        if (value == 0.0) return;
        rows.at(row).coeffs.emplace_back(col, value);
    }

    int column_index(const std::string& colname) const {
        ensure_index();
        auto it = col_index_.find(colname);
        return it == col_index_.end() ? -1 : it->second;
    }
    int row_index(const std::string& rowname) const {
        ensure_index();
        auto it = row_index_.find(rowname);
        return it == row_index_.end() ? -1 : it->second;
    }

    /// Structural invariants: valid references, ordered bounds, unique names.
    void validate() const {
        std::map<std::string, int> names;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const auto& c = columns[j];
            if (c.lower > c.upper)
                throw std::invalid_argument("column " + c.name + ": lower > upper");
            if (!names.emplace(c.name, 1).second)
                throw std::invalid_argument("column " + c.name + ": duplicate name");
        }
        names.clear();
        for (const auto& r : rows) {
            if (!names.emplace(r.name, 1).second)
                throw std::invalid_argument("row " + r.name + ": duplicate name");
            for (auto [j, v] : r.coeffs) {
                if (j < 0 || j >= static_cast<int>(columns.size()))
                    throw std::invalid_argument("row " + r.name + ": bad column index");
                if (!std::isfinite(v))
                    throw std::invalid_argument("row " + r.name + ": non-finite coefficient");
            }
        }
    }

private:
    void ensure_index() const {
        if (col_index_.size() == columns.size() && row_index_.size() == rows.size()) return;
        col_index_.clear();
        row_index_.clear();
        for (std::size_t j = 0; j < columns.size(); ++j)
            col_index_[columns[j].name] = static_cast<int>(j);
        for (std::size_t i = 0; i < rows.size(); ++i)
            row_index_[rows[i].name] = static_cast<int>(i);
    }
    mutable std::map<std::string, int> col_index_;
    mutable std::map<std::string, int> row_index_;
};

/// Summary of an LP build: dimension counts by family plus context.
struct BuildReport {
    int horizon = 0;
    std::string policy_mode;
    std::map<std::string, int> variable_counts;    // by column kind
    std::map<std::string, int> constraint_counts;  // by row kind
    int n_variables = 0;
    int n_constraints = 0;
};

// ---------------------------------------------------------------------------
// LP interchange format writer (CPLEX LP text format)
// ---------------------------------------------------------------------------

namespace detail {
inline std::string lp_safe_name(std::string s) {
    for (char& c : s)
        if (c == ':' || c == ' ') c = '_';
    return s;
}
inline void lp_write_term(std::ostringstream& os, double v, const std::string& nm, bool first) {
    if (v < 0.0)
        os << (first ? "- " : " - ");
    else if (!first)
        os << " + ";
    os << util::format_double(std::abs(v)) << " " << nm;
}
}  // namespace detail

/// Serialize to the standard LP text format for cross-checks with external solvers.
inline std::string write_lp_format(const LPProblem& p) {
    std::ostringstream os;
    os << "\\ " << (p.name.empty() ? "co2flex problem" : p.name) << "\n";
    os << "Minimize\n obj:";
    bool first = true;
    for (const auto& c : p.columns) {
        if (c.objective == 0.0) continue;
        os << (first ? " " : "");
        detail::lp_write_term(os, c.objective, detail::lp_safe_name(c.name), first);
        first = false;
    }
    if (p.objective_constant != 0.0) {
        os << (first ? " " : " + ") << util::format_double(p.objective_constant);
        first = false;
    }
    if (first) os << " 0 " << detail::lp_safe_name(p.columns.empty() ? "x0" : p.columns[0].name);
    os << "\nSubject To\n";
    for (const auto& r : p.rows) {
        os << " " << detail::lp_safe_name(r.name) << ":";
        bool f2 = true;
        for (auto [j, v] : r.coeffs) {
            os << (f2 ? " " : "");
            detail::lp_write_term(os, v, detail::lp_safe_name(p.columns[j].name), f2);
            f2 = false;
        }
        if (f2) os << " 0 " << detail::lp_safe_name(p.columns.empty() ? "x0" : p.columns[0].name);
        os << (r.sense == RowSense::Equal ? " = " : " <= ") << util::format_double(r.rhs) << "\n";
    }
    os << "Bounds\n";
    for (const auto& c : p.columns) {
        const std::string nm = detail::lp_safe_name(c.name);
        if (c.lower == -kInf && c.upper == kInf) {
            os << " " << nm << " free\n";
        } else if (c.lower == -kInf) {
            os << " -inf <= " << nm << " <= " << util::format_double(c.upper) << "\n";
        } else if (c.upper == kInf) {
            if (c.lower != 0.0) os << " " << nm << " >= " << util::format_double(c.lower) << "\n";
        } else {
            os << " " << util::format_double(c.lower) << " <= " << nm << " <= "
               << util::format_double(c.upper) << "\n";
        }
    }
    os << "End\n";
    return os.str();
}

}  // namespace co2flex

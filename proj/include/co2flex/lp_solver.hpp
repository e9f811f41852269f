#pragma once

// Solve an LPProblem to proven optimality and report primal values, objective
// and duals for every named row. Reported dual convention:
//   equality rows:  dual = d(objective)/d(rhs)          (nodal price)
//   <= rows:        dual = cost of tightening the rhs by one unit, >= 0
// verify_certificate re-checks KKT conditions from the problem data alone, so
// it is independent of the solve path.

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "co2flex/lp_problem.hpp"
#include "co2flex/simplex.hpp"
#include "co2flex/util.hpp"

namespace co2flex {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

struct SolveStats {
    long iterations = 0;
    int refactorizations = 0;
    double wall_seconds = 0.0;
    bool dual_degenerate = false;     ///< duals may be one of several optimal choices
    bool alternative_optima = false;  ///< primal argmin may not be unique
};

struct Tolerances {
    double feas = 1e-6;
    double cs = 1e-6;
    double gap = 1e-6;
};

struct SolvedSystem {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::vector<double> primal;        ///< per column
    std::vector<double> reduced_cost;  ///< per column
    std::vector<double> dual;          ///< per row, reported convention
    std::vector<double> row_activity;  ///< per row
    double objective = 0.0;            ///< includes LPProblem::objective_constant
    SolveStats stats;

    double primal_of(const LPProblem& p, const std::string& col) const {
        int j = p.column_index(col);
        if (j < 0) throw std::invalid_argument("no column named " + col);
        return primal.at(j);
    }
    double dual_of(const LPProblem& p, const std::string& row) const {
        int i = p.row_index(row);
        if (i < 0) throw std::invalid_argument("no row named " + row);
        return dual.at(i);
    }
};

inline SolvedSystem solve(const LPProblem& p, const simplex::Options& opt = {}) {
    auto t0 = std::chrono::steady_clock::now();
    simplex::Result r = simplex::solve_lp(p, opt);
    auto t1 = std::chrono::steady_clock::now();

    SolvedSystem s;
    s.stats.iterations = r.iterations;
    s.stats.refactorizations = r.refactorizations;
    s.stats.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    s.stats.dual_degenerate = r.degenerate;
    s.stats.alternative_optima = r.alternative_optima;
    switch (r.status) {
        case simplex::Status::Optimal: s.status = SolveStatus::Optimal; break;
        case simplex::Status::Infeasible: s.status = SolveStatus::Infeasible; break;
        case simplex::Status::Unbounded: s.status = SolveStatus::Unbounded; break;
        default: s.status = SolveStatus::NumericalFailure; break;
    }
    if (s.status != SolveStatus::Optimal) return s;

    s.primal = std::move(r.x);
    s.reduced_cost = std::move(r.reduced_cost);
    s.row_activity = std::move(r.row_activity);
    s.objective = r.objective + p.objective_constant;
    s.dual.resize(p.rows.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        s.dual[i] = p.rows[i].sense == RowSense::Equal ? r.row_dual[i] : -r.row_dual[i];
    return s;
}

// ---------------------------------------------------------------------------
// Optimality certificate
// ---------------------------------------------------------------------------

struct CertificateReport {
    bool primal_feasible = false;
    bool dual_feasible = false;
    bool complementary = false;
    bool strong_duality = false;

    double max_primal_violation = 0.0;  ///< scaled row/bound violation
    double max_dual_violation = 0.0;    ///< scaled sign/stationarity violation
    double max_cs_violation = 0.0;      ///< |slack * dual| relative to objective
    double relative_gap = 0.0;

    std::string worst_primal;
    std::string worst_dual;
    std::string worst_cs;

    bool pass() const {
        return primal_feasible && dual_feasible && complementary && strong_duality;
    }
};

inline CertificateReport verify_certificate(const LPProblem& p, const SolvedSystem& s,
                                            const Tolerances& tol = {}) {
    CertificateReport rep;
    if (s.status != SolveStatus::Optimal) return rep;
    const auto& x = s.primal;

    // Internal signed duals: y such that dual objective terms read b'y.
    std::vector<double> y(p.rows.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        y[i] = p.rows[i].sense == RowSense::Equal ? s.dual[i] : -s.dual[i];

    double var_obj = 0.0;
    for (std::size_t j = 0; j < p.columns.size(); ++j) var_obj += p.columns[j].objective * x[j];
    const double obj_scale = 1.0 + std::abs(var_obj);

    // Primal feasibility, scaled by row content.
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const auto& r = p.rows[i];
        double act = 0.0, mag = 1.0 + std::abs(r.rhs);
        for (auto [j, v] : r.coeffs) {
            act += v * x[j];
            mag += std::abs(v * x[j]);
        }
        double viol = r.sense == RowSense::Equal ? std::abs(act - r.rhs) : act - r.rhs;
        viol /= mag;
        if (viol > rep.max_primal_violation) {
            rep.max_primal_violation = viol;
            rep.worst_primal = r.name;
        }
    }
    for (std::size_t j = 0; j < p.columns.size(); ++j) {
        const auto& c = p.columns[j];
        double mag = 1.0 + std::abs(x[j]);
        double viol = std::max(std::isfinite(c.lower) ? (c.lower - x[j]) / mag : 0.0,
                               std::isfinite(c.upper) ? (x[j] - c.upper) / mag : 0.0);
        if (viol > rep.max_primal_violation) {
            rep.max_primal_violation = viol;
            rep.worst_primal = c.name;
        }
    }
    rep.primal_feasible = rep.max_primal_violation <= tol.feas;

    // Dual feasibility: sign of <= row duals, and reduced-cost stationarity
    // against each variable's position in its bounds.
    std::vector<double> z(p.columns.size());
    std::vector<double> zmag(p.columns.size(), 0.0);
    for (std::size_t j = 0; j < p.columns.size(); ++j) z[j] = p.columns[j].objective;
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        for (auto [j, v] : p.rows[i].coeffs) {
            z[j] -= v * y[i];
            zmag[j] += std::abs(v * y[i]);
        }
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        if (p.rows[i].sense == RowSense::LessEqual && s.dual[i] < 0.0) {
            double viol = -s.dual[i] / (1.0 + std::abs(s.dual[i]));
            if (viol > rep.max_dual_violation) {
                rep.max_dual_violation = viol;
                rep.worst_dual = p.rows[i].name;
            }
        }
    }
    for (std::size_t j = 0; j < p.columns.size(); ++j) {
        const auto& c = p.columns[j];
        double mag = 1.0 + std::abs(c.objective) + zmag[j];
        double span = std::max(1.0, std::abs(x[j]));
        bool at_lower = std::isfinite(c.lower) && x[j] - c.lower <= tol.feas * span;
        bool at_upper = std::isfinite(c.upper) && c.upper - x[j] <= tol.feas * span;
        double viol = 0.0;
        if (at_lower && at_upper) {
            viol = 0.0;  // fixed variable: any reduced cost is dual feasible
        } else if (at_lower) {
            viol = std::max(0.0, -z[j]);
        } else if (at_upper) {
            viol = std::max(0.0, z[j]);
        } else {
            viol = std::abs(z[j]);
        }
        viol /= mag;
        if (viol > rep.max_dual_violation) {
            rep.max_dual_violation = viol;
            rep.worst_dual = c.name;
        }
    }
    rep.dual_feasible = rep.max_dual_violation <= tol.feas;

    // Complementary slackness relative to objective magnitude.
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const auto& r = p.rows[i];
        if (r.sense != RowSense::LessEqual) continue;
        double slack = r.rhs - s.row_activity[i];
        double viol = std::abs(slack * s.dual[i]) / obj_scale;
        if (viol > rep.max_cs_violation) {
            rep.max_cs_violation = viol;
            rep.worst_cs = r.name;
        }
    }
    for (std::size_t j = 0; j < p.columns.size(); ++j) {
        const auto& c = p.columns[j];
        if (c.lower == c.upper) continue;
        double viol = 0.0;
        if (std::isfinite(c.lower) && z[j] > 0.0) viol = (x[j] - c.lower) * z[j];
        if (std::isfinite(c.upper) && z[j] < 0.0) viol = (c.upper - x[j]) * (-z[j]);
        viol = std::abs(viol) / obj_scale;
        if (viol > rep.max_cs_violation) {
            rep.max_cs_violation = viol;
            rep.worst_cs = c.name;
        }
    }
    rep.complementary = rep.max_cs_violation <= tol.cs;

    // Strong duality via the bounded-variable dual objective.
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < p.rows.size(); ++i) dual_obj += y[i] * p.rows[i].rhs;
    for (std::size_t j = 0; j < p.columns.size(); ++j) {
        const auto& c = p.columns[j];
        if (z[j] > 0.0 && std::isfinite(c.lower)) dual_obj += z[j] * c.lower;
        else if (z[j] < 0.0 && std::isfinite(c.upper)) dual_obj += z[j] * c.upper;
    }
    rep.relative_gap = std::abs(var_obj - dual_obj) / std::max(1.0, std::abs(var_obj));
    rep.strong_duality = rep.relative_gap <= tol.gap;
    return rep;
}

/// One row per named entity: columns first, then rows.
inline std::string dump_solution_csv(const LPProblem& p, const SolvedSystem& s) {
    std::ostringstream os;
    os << "entity,name,value,dual_or_reduced_cost\n";
    for (std::size_t j = 0; j < p.columns.size(); ++j)
        os << "column," << p.columns[j].name << "," << util::format_double(s.primal[j]) << ","
           << util::format_double(s.reduced_cost[j]) << "\n";
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        os << "row," << p.rows[i].name << "," << util::format_double(s.row_activity[i]) << ","
           << util::format_double(s.dual[i]) << "\n";
    return os.str();
}

}  // namespace co2flex

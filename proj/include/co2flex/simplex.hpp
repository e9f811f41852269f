#pragma once

// Bounded-variable primal revised simplex.
//
//   min c'x   s.t.  Ax {=,<=} b,   l <= x <= u
//
// Two phases with crash basis (slacks where feasible, artificials elsewhere),
// product-form eta updates between sparse LU refactorizations, Devex pricing
// with a Bland fallback on stalling, and power-of-two equilibration scaling.
// All tie-breaking is by index, so a given instance always takes the same
// pivot path and returns the same basic primal/dual pair.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "co2flex/lp_problem.hpp"

namespace co2flex::simplex {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::IterationLimit: return "iteration_limit";
        case Status::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

struct Options {
    double feas_tol = 1e-9;     ///< bound/row feasibility, scaled units
    double opt_tol = 1e-9;      ///< reduced-cost threshold, scaled units
    double pivot_tol = 1e-9;    ///< smallest acceptable pivot magnitude
    int refactor_interval = 80;
    long max_iterations = 2'000'000;
    int stall_limit = 2000;     ///< degenerate pivots before switching to Bland
    bool paranoid = false;      ///< audit maintained duals/values every iteration
    bool no_scaling = false;    ///< diagnostic: skip equilibration
    bool recompute_duals = false;  ///< diagnostic: refresh duals every iteration
    bool trace = false;         ///< diagnostic: per-iteration pivot log
};

struct Result {
    Status status = Status::NumericalFailure;
    std::vector<double> x;              ///< structural values
    std::vector<double> row_dual;       ///< y = B^-T c_B, original units
    std::vector<double> reduced_cost;   ///< per structural column
    std::vector<double> row_activity;   ///< a_i'x per row
    double objective = 0.0;             ///< c'x, excludes any constant
    long iterations = 0;
    int refactorizations = 0;
    bool degenerate = false;            ///< a basic variable sits on a bound
    bool alternative_optima = false;    ///< a nonbasic column has ~zero reduced cost
};

class BoundedSimplex {
public:
    Result solve(const LPProblem& p, const Options& opt = {}) {
        opt_ = opt;
        build(p);
        scale();
        Result res;
        res.x.assign(n_struct_, 0.0);
        res.row_dual.assign(m_, 0.0);
        res.reduced_cost.assign(n_struct_, 0.0);
        res.row_activity.assign(m_, 0.0);

        Status st = run_phases();
        res.status = st;
        res.iterations = total_iterations_;
        res.refactorizations = refactor_count_;
        if (st != Status::Optimal) return res;

        // Unscale. x = C x', y = R y', d = C^-1 d'.
        for (int j = 0; j < n_struct_; ++j) res.x[j] = xval_[j] * col_scale_[j];
        refresh_duals_and_costs();
        for (int i = 0; i < m_; ++i) res.row_dual[i] = y_[i] * row_scale_[i];
        for (int j = 0; j < n_struct_; ++j) res.reduced_cost[j] = d_[j] / col_scale_[j];

        double obj = 0.0;
        for (int j = 0; j < n_struct_; ++j) obj += p.columns[j].objective * res.x[j];
        res.objective = obj;
        for (std::size_t r = 0; r < p.rows.size(); ++r) {
            double act = 0.0;
            for (auto [j, v] : p.rows[r].coeffs) act += v * res.x[j];
            res.row_activity[r] = act;
        }

        // Degeneracy probe: a basic variable at one of its finite bounds means
        // the dual solution need not be unique.
        for (int i = 0; i < m_; ++i) {
            int j = basis_[i];
            double span = std::max({1.0, std::abs(lo_[j]), std::abs(up_[j])});
            if ((std::isfinite(lo_[j]) && std::abs(xval_[j] - lo_[j]) < 1e-7 * span) ||
                (std::isfinite(up_[j]) && std::abs(xval_[j] - up_[j]) < 1e-7 * span)) {
                res.degenerate = true;
                break;
            }
        }
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == State::Basic || lo_[j] == up_[j] || is_artificial_[j]) continue;
            if (std::abs(d_[j]) <= 1e-7) {
                res.alternative_optima = true;
                break;
            }
        }
        return res;
    }

private:
    enum class State : std::uint8_t { Basic, AtLower, AtUpper, NonbasicFree };

    // --- problem in scaled standard form -----------------------------------
    int m_ = 0, n_struct_ = 0, n_slack_ = 0, n_total_ = 0;
    std::vector<int> col_start_, row_ind_;
    std::vector<double> val_;
    std::vector<double> cost_, lo_, up_, rhs_;
    std::vector<double> row_scale_, col_scale_;
    std::vector<bool> is_artificial_;

    // --- simplex state ------------------------------------------------------
    std::vector<double> xval_, d_, y_, gamma_;
    std::vector<State> state_;
    std::vector<int> basis_, basis_pos_;  // basis_pos_[j] = row or -1
    std::vector<double> phase_cost_;

    struct Eta {
        int row;
        double pivot;
        std::vector<std::pair<int, double>> col;  // off-pivot entries
    };
    std::vector<Eta> etas_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    bool lu_ok_ = false;

    Options opt_;
    long total_iterations_ = 0;
    int refactor_count_ = 0;
    int stall_count_ = 0;
    bool bland_mode_ = false;

    // work buffers
    Eigen::VectorXd wb1_, wb2_;
    std::vector<double> alpha_;
    std::vector<int> alpha_nz_;

    // ------------------------------------------------------------------ build
    void build(const LPProblem& p) {
        p.validate();
        m_ = static_cast<int>(p.rows.size());
        n_struct_ = static_cast<int>(p.columns.size());
        n_slack_ = 0;
        for (const auto& r : p.rows)
            if (r.sense == RowSense::LessEqual) ++n_slack_;

        // Column layout: structural | slacks | artificials (added lazily in crash).
        n_total_ = n_struct_ + n_slack_ + m_;
        col_start_.assign(n_total_ + 1, 0);
        row_ind_.clear();
        val_.clear();
        cost_.assign(n_total_, 0.0);
        lo_.assign(n_total_, 0.0);
        up_.assign(n_total_, 0.0);
        rhs_.assign(m_, 0.0);
        is_artificial_.assign(n_total_, false);

        std::vector<std::vector<std::pair<int, double>>> cols(n_total_);
        for (int j = 0; j < n_struct_; ++j) {
            cost_[j] = p.columns[j].objective;
            lo_[j] = p.columns[j].lower;
            up_[j] = p.columns[j].upper;
        }
        int slack = n_struct_;
        for (int i = 0; i < m_; ++i) {
            const auto& r = p.rows[i];
            rhs_[i] = r.rhs;
            for (auto [j, v] : r.coeffs) cols[j].emplace_back(i, v);
            if (r.sense == RowSense::LessEqual) {
                cols[slack].emplace_back(i, 1.0);
                lo_[slack] = 0.0;
                up_[slack] = kInf;
                ++slack;
            }
        }
        // Coalesce repeated (row, column) entries so column scatters are exact.
        for (auto& col : cols) {
            std::sort(col.begin(), col.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            std::size_t w = 0;
            for (std::size_t r = 0; r < col.size(); ++r) {
                if (w > 0 && col[w - 1].first == col[r].first)
                    col[w - 1].second += col[r].second;
                else
                    col[w++] = col[r];
            }
            col.resize(w);
        }
        // Artificial columns: one per row, coefficient set at crash time.
        for (int i = 0; i < m_; ++i) {
            int j = n_struct_ + n_slack_ + i;
            is_artificial_[j] = true;
            lo_[j] = 0.0;
            up_[j] = kInf;
            cols[j].emplace_back(i, 1.0);  // sign fixed in crash()
        }
        for (int j = 0; j < n_total_; ++j) {
            col_start_[j + 1] = col_start_[j] + static_cast<int>(cols[j].size());
            for (auto [i, v] : cols[j]) {
                row_ind_.push_back(i);
                val_.push_back(v);
            }
        }
    }

    // Power-of-two geometric-mean equilibration; exact in floating point.
    void scale() {
        row_scale_.assign(m_, 1.0);
        col_scale_.assign(n_total_, 1.0);
        if (opt_.no_scaling) return;
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
            for (int j = 0; j < n_struct_; ++j)
                for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
                    double a = std::abs(val_[k]) * row_scale_[row_ind_[k]] * col_scale_[j];
                    if (a == 0.0) continue;
                    rmin[row_ind_[k]] = std::min(rmin[row_ind_[k]], a);
                    rmax[row_ind_[k]] = std::max(rmax[row_ind_[k]], a);
                }
            for (int i = 0; i < m_; ++i) {
                if (rmax[i] == 0.0) continue;
                row_scale_[i] *= pow2_near(1.0 / std::sqrt(rmin[i] * rmax[i]));
            }
            std::vector<double> cmin(n_total_, kInf), cmax(n_total_, 0.0);
            for (int j = 0; j < n_struct_; ++j)
                for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
                    double a = std::abs(val_[k]) * row_scale_[row_ind_[k]] * col_scale_[j];
                    if (a == 0.0) continue;
                    cmin[j] = std::min(cmin[j], a);
                    cmax[j] = std::max(cmax[j], a);
                }
            for (int j = 0; j < n_struct_; ++j) {
                if (cmax[j] == 0.0) continue;
                col_scale_[j] *= pow2_near(1.0 / std::sqrt(cmin[j] * cmax[j]));
            }
        }
        // Slack and artificial scales tie to their row so the coefficient stays 1.
        for (int j = n_struct_; j < n_total_; ++j) {
            int k = col_start_[j];
            if (k < col_start_[j + 1]) col_scale_[j] = 1.0 / row_scale_[row_ind_[k]];
        }
        // Apply.
        for (int j = 0; j < n_total_; ++j) {
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                val_[k] *= row_scale_[row_ind_[k]] * col_scale_[j];
            cost_[j] *= col_scale_[j];
            if (std::isfinite(lo_[j])) lo_[j] /= col_scale_[j];
            if (std::isfinite(up_[j])) up_[j] /= col_scale_[j];
        }
        for (int i = 0; i < m_; ++i) rhs_[i] *= row_scale_[i];
    }

    static double pow2_near(double v) {
        if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
        int e = 0;
        std::frexp(v, &e);
        return std::ldexp(1.0, e - 1 > 60 ? 60 : (e - 1 < -60 ? -60 : e - 1));
    }

    // ------------------------------------------------------------------ crash
    void crash() {
        state_.assign(n_total_, State::AtLower);
        xval_.assign(n_total_, 0.0);
        basis_.assign(m_, -1);
        basis_pos_.assign(n_total_, -1);

        for (int j = 0; j < n_total_; ++j) {
            if (is_artificial_[j]) {
                up_[j] = kInf;  // reopened; pinned again after phase 1
                state_[j] = State::AtLower;
                xval_[j] = 0.0;
            } else if (std::isfinite(lo_[j])) {
                state_[j] = State::AtLower;
                xval_[j] = lo_[j];
            } else if (std::isfinite(up_[j])) {
                state_[j] = State::AtUpper;
                xval_[j] = up_[j];
            } else {
                state_[j] = State::NonbasicFree;
                xval_[j] = 0.0;
            }
        }
        // Residual r = b - A x_N over structural columns at their bounds.
        std::vector<double> resid(rhs_);
        for (int j = 0; j < n_struct_; ++j) {
            if (xval_[j] == 0.0) continue;
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                resid[row_ind_[k]] -= val_[k] * xval_[j];
        }
        // Slack index per row, -1 for equality rows.
        std::vector<int> slack_of(m_, -1);
        {
            int s = n_struct_;
            // slacks were appended in row order for LessEqual rows
            for (int j = n_struct_; j < n_struct_ + n_slack_; ++j)
                slack_of[row_ind_[col_start_[j]]] = j;
            (void)s;
        }
        for (int i = 0; i < m_; ++i) {
            int js = slack_of[i];
            if (js >= 0 && resid[i] >= 0.0) {
                make_basic(js, i, resid[i]);
            } else {
                int ja = n_struct_ + n_slack_ + i;
                // flip the artificial's coefficient to match the residual sign
                int k = col_start_[ja];
                val_[k] = resid[i] < 0.0 ? -1.0 : 1.0;
                make_basic(ja, i, std::abs(resid[i]));
            }
        }
    }

    void make_basic(int j, int row, double value) {
        basis_[row] = j;
        basis_pos_[j] = row;
        state_[j] = State::Basic;
        xval_[j] = value;
    }

    // ---------------------------------------------------------------- phases
    Status run_phases() {
        crash();
        etas_.clear();
        if (!factorize()) return Status::NumericalFailure;

        bool need_phase1 = false;
        for (int i = 0; i < m_; ++i)
            if (is_artificial_[basis_[i]] && xval_[basis_[i]] > opt_.feas_tol) need_phase1 = true;

        phase_cost_.assign(n_total_, 0.0);
        if (need_phase1) {
            for (int j = 0; j < n_total_; ++j)
                if (is_artificial_[j]) phase_cost_[j] = 1.0;
            Status s = iterate(true);
            if (s != Status::Optimal) return s == Status::Unbounded ? Status::NumericalFailure : s;
            double infeas = 0.0;
            for (int j = 0; j < n_total_; ++j)
                if (is_artificial_[j]) infeas += xval_[j];
            if (infeas > 1e-7 * (1.0 + max_rhs())) return Status::Infeasible;
        }
        // Pin artificials for phase 2.
        for (int j = 0; j < n_total_; ++j)
            if (is_artificial_[j]) {
                up_[j] = 0.0;
                if (state_[j] != State::Basic) {
                    state_[j] = State::AtLower;
                    xval_[j] = 0.0;
                }
            }
        phase_cost_ = cost_;
        return iterate(false);
    }

    double max_rhs() const {
        double v = 1.0;
        for (double b : rhs_) v = std::max(v, std::abs(b));
        return v;
    }

    // --------------------------------------------------------------- iterate
    Status iterate(bool phase1) {
        refresh_duals_and_costs();
        gamma_.assign(n_total_, 1.0);
        stall_count_ = 0;
        bland_mode_ = false;
        int since_refactor = 0;

        for (;;) {
            if (total_iterations_++ > opt_.max_iterations) return Status::IterationLimit;
            if (opt_.recompute_duals) refresh_duals_and_costs();

            int q = choose_entering();
            if (q < 0) {
                // Re-check with fresh duals before declaring optimality.
                refresh_duals_and_costs();
                q = choose_entering();
                if (q < 0) return Status::Optimal;
            }
            int dir = entering_direction(q);

            if (!ftran_column(q)) return Status::NumericalFailure;

            int leave_row = -1;
            double step = 0.0;
            bool to_upper_of_leaving = false;
            bool flip = false;
            if (!ratio_test(q, dir, leave_row, step, to_upper_of_leaving, flip)) {
                if (phase1) return Status::NumericalFailure;
                return Status::Unbounded;
            }

            if (step <= opt_.feas_tol) {
                if (++stall_count_ > opt_.stall_limit) bland_mode_ = true;
            } else {
                stall_count_ = 0;
                bland_mode_ = false;
            }

            if (opt_.trace)
                fprintf(stderr, "it %ld ph%d q=%d d_q=%.6g dir=%d step=%.6g %s leave=%d piv=%.6g\n",
                        total_iterations_, phase1 ? 1 : 2, q, d_[q], dir, step,
                        flip ? "FLIP" : "pivot", flip ? -1 : basis_[leave_row],
                        flip ? 0.0 : alpha_[leave_row]);
            if (flip) {
                apply_bound_flip(q, dir, step);
                continue;
            }
            if (!pivot(q, dir, leave_row, step, to_upper_of_leaving, phase1))
                return Status::NumericalFailure;
            if (opt_.paranoid) audit(phase1);

            if (++since_refactor >= opt_.refactor_interval || eta_load_high()) {
                if (!factorize()) return Status::NumericalFailure;
                recompute_basic_values();
                refresh_duals_and_costs();
                gamma_.assign(n_total_, 1.0);
                since_refactor = 0;
            }
        }
    }

    bool eta_load_high() const {
        std::size_t nnz = 0;
        for (const auto& e : etas_) nnz += e.col.size();
        return nnz > static_cast<std::size_t>(4 * m_ + 4096);
    }

    // Entering rules. Devex by default, Bland when stalled.
    int choose_entering() const {
        int best = -1;
        double best_score = 0.0;
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == State::Basic) continue;
            if (lo_[j] == up_[j]) continue;  // fixed (incl. pinned artificials)
            double viol = 0.0;
            if (state_[j] == State::AtLower)
                viol = d_[j] < -opt_.opt_tol ? -d_[j] : 0.0;
            else if (state_[j] == State::AtUpper)
                viol = d_[j] > opt_.opt_tol ? d_[j] : 0.0;
            else  // NonbasicFree
                viol = std::abs(d_[j]) > opt_.opt_tol ? std::abs(d_[j]) : 0.0;
            if (viol == 0.0) continue;
            if (bland_mode_) return j;  // lowest eligible index
            double score = viol * viol / gamma_[j];
            if (best < 0 || score > best_score * (1.0 + 1e-12)) {
                best = j;
                best_score = score;
            }
        }
        return best;
    }

    int entering_direction(int j) const {
        if (state_[j] == State::AtLower) return +1;
        if (state_[j] == State::AtUpper) return -1;
        return d_[j] < 0.0 ? +1 : -1;
    }

    // FTRAN: alpha = B^-1 a_q, dense with nonzero tracking.
    bool ftran_column(int q) {
        if (m_ == 0) {
            alpha_.clear();
            alpha_nz_.clear();
            return true;
        }
        wb1_.setZero(m_);
        for (int k = col_start_[q]; k < col_start_[q + 1]; ++k)
            wb1_[row_ind_[k]] += val_[k];
        if (!lu_ok_) return false;
        wb2_ = lu_.solve(wb1_);
        if (!wb2_.allFinite()) return false;
        for (const auto& e : etas_) apply_eta(wb2_, e);
        alpha_.assign(m_, 0.0);
        alpha_nz_.clear();
        for (int i = 0; i < m_; ++i) {
            double v = wb2_[i];
            if (std::abs(v) > 1e-12) {
                alpha_[i] = v;
                alpha_nz_.push_back(i);
            }
        }
        return true;
    }

    static void apply_eta(Eigen::VectorXd& v, const Eta& e) {
        double t = v[e.row] / e.pivot;
        if (t != 0.0)
            for (auto [i, a] : e.col) v[i] -= t * a;
        v[e.row] = t;
    }

    // BTRAN: y = B^-T w.
    bool btran(Eigen::VectorXd& w) {
        if (m_ == 0) return true;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double acc = w[it->row];
            for (auto [i, a] : it->col) acc -= a * w[i];
            w[it->row] = acc / it->pivot;
        }
        wb2_ = lu_.transpose().solve(w);
        if (!wb2_.allFinite()) return false;
        w = wb2_;
        return true;
    }

    // Bounded-variable ratio test. Returns false on unboundedness.
    bool ratio_test(int q, int dir, int& leave_row, double& step, bool& to_upper,
                    bool& flip) const {
        double best_t = kInf;
        int best_row = -1;
        bool best_to_upper = false;
        double best_piv = 0.0;

        for (int idx : alpha_nz_) {
            int jb = basis_[idx];
            double a = dir * alpha_[idx];  // basic moves by -a * t
            if (std::abs(a) < opt_.pivot_tol) continue;
            double t;
            bool hits_upper;
            if (a > 0.0) {
                if (!std::isfinite(lo_[jb])) continue;
                t = (xval_[jb] - lo_[jb]) / a;
                hits_upper = false;
            } else {
                if (!std::isfinite(up_[jb])) continue;
                t = (up_[jb] - xval_[jb]) / (-a);
                hits_upper = true;
            }
            if (t < 0.0) t = 0.0;
            bool better = false;
            if (t < best_t - 1e-12) {
                better = true;
            } else if (t < best_t + 1e-12 && best_row >= 0) {
                if (bland_mode_) {
                    better = jb < basis_[best_row];  // Bland: lowest index leaves
                } else {
                    // prefer the larger pivot, then the lower column index
                    double cand = std::abs(alpha_[idx]), incumbent = std::abs(best_piv);
                    if (cand > incumbent * (1.0 + 1e-9))
                        better = true;
                    else if (cand > incumbent * (1.0 - 1e-9) && jb < basis_[best_row])
                        better = true;
                }
            }
            if (better) {
                best_t = t;
                best_row = idx;
                best_to_upper = hits_upper;
                best_piv = alpha_[idx];
            }
        }
        double range = up_[q] - lo_[q];
        if (std::isfinite(range) && range < best_t) {
            flip = true;
            step = range;
            leave_row = -1;
            to_upper = false;
            return true;
        }
        if (best_row < 0) return false;  // unbounded
        flip = false;
        step = best_t;
        leave_row = best_row;
        to_upper = best_to_upper;
        return true;
    }

    void apply_bound_flip(int q, int dir, double step) {
        double delta = dir * step;
        for (int idx : alpha_nz_) xval_[basis_[idx]] -= delta * alpha_[idx];
        xval_[q] += delta;
        state_[q] = state_[q] == State::AtLower ? State::AtUpper : State::AtLower;
    }

    bool pivot(int q, int dir, int leave_row, double step, bool to_upper, bool phase1) {
        double piv = alpha_[leave_row];
        if (std::abs(piv) < opt_.pivot_tol) return false;
        int p = basis_[leave_row];

        // Devex row: rho = B^-T e_r, then tableau row over nonbasic columns.
        wb1_.setZero(m_);
        wb1_[leave_row] = 1.0;
        if (!btran(wb1_)) return false;

        double theta_d = d_[q] / piv;
        double gamma_q = std::max(gamma_[q], 1.0);

        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == State::Basic || j == q) continue;
            if (lo_[j] == up_[j] && !(phase1 && is_artificial_[j])) continue;
            double arj = 0.0;
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                arj += val_[k] * wb1_[row_ind_[k]];
            if (arj == 0.0) continue;
            d_[j] -= theta_d * arj;
            double cand = (arj / piv) * (arj / piv) * gamma_q;
            if (cand > gamma_[j]) gamma_[j] = cand;
        }

        // Move values.
        double delta = dir * step;
        for (int idx : alpha_nz_) xval_[basis_[idx]] -= delta * alpha_[idx];
        double enter_val = xval_[q] + delta;

        // Leaving variable to the bound it hit.
        state_[p] = to_upper ? State::AtUpper : State::AtLower;
        xval_[p] = to_upper ? up_[p] : lo_[p];
        basis_pos_[p] = -1;
        d_[p] = -theta_d;
        gamma_[p] = std::max(gamma_q / (piv * piv), 1.0);

        make_basic(q, leave_row, enter_val);
        d_[q] = 0.0;

        // Record eta from the FTRAN'd column.
        Eta e;
        e.row = leave_row;
        e.pivot = piv;
        e.col.reserve(alpha_nz_.size());
        for (int idx : alpha_nz_)
            if (idx != leave_row) e.col.emplace_back(idx, alpha_[idx]);
        etas_.push_back(std::move(e));
        return true;
    }

    // ---------------------------------------------------------- factorization
    bool factorize() {
        etas_.clear();
        ++refactor_count_;
        if (m_ == 0) {
            lu_ok_ = true;
            return true;
        }
        Eigen::SparseMatrix<double> B(m_, m_);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(m_) * 4);
        for (int i = 0; i < m_; ++i) {
            int j = basis_[i];
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                trips.emplace_back(row_ind_[k], i, val_[k]);
        }
        B.setFromTriplets(trips.begin(), trips.end());
        lu_.isSymmetric(false);
        lu_.analyzePattern(B);
        lu_.factorize(B);
        lu_ok_ = (lu_.info() == Eigen::Success);
        return lu_ok_;
    }

    void recompute_basic_values() {
        if (m_ == 0) return;
        wb1_.setZero(m_);
        for (int i = 0; i < m_; ++i) wb1_[i] = rhs_[i];
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == State::Basic || xval_[j] == 0.0) continue;
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                wb1_[row_ind_[k]] -= val_[k] * xval_[j];
        }
        wb2_ = lu_.solve(wb1_);
        for (const auto& e : etas_) apply_eta(wb2_, e);
        for (int i = 0; i < m_; ++i) xval_[basis_[i]] = wb2_[i];
    }

    void audit(bool phase1) {
        std::vector<double> d_saved = d_;
        std::vector<double> x_saved = xval_;
        refresh_duals_and_costs();
        recompute_basic_values();
        double dmax = 0.0, xmax = 0.0;
        int darg = -1, xarg = -1;
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] != State::Basic && std::abs(d_saved[j] - d_[j]) > dmax) {
                dmax = std::abs(d_saved[j] - d_[j]);
                darg = j;
            }
            if (std::abs(x_saved[j] - xval_[j]) > xmax) {
                xmax = std::abs(x_saved[j] - xval_[j]);
                xarg = j;
            }
        }
        if (dmax > 1e-6 || xmax > 1e-6) {
            fprintf(stderr, "audit iter %ld phase%d: d drift %.3e at %d, x drift %.3e at %d\n",
                    total_iterations_, phase1 ? 1 : 2, dmax, darg, xmax, xarg);
        }
    }

    void refresh_duals_and_costs() {
        wb1_.setZero(m_);
        for (int i = 0; i < m_; ++i) wb1_[i] = phase_cost_.empty() ? 0.0 : phase_cost_[basis_[i]];
        btran(wb1_);
        y_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) y_[i] = wb1_[i];
        d_.assign(n_total_, 0.0);
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == State::Basic) { d_[j] = 0.0; continue; }
            double dj = phase_cost_.empty() ? 0.0 : phase_cost_[j];
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                dj -= val_[k] * wb1_[row_ind_[k]];
            d_[j] = dj;
        }
    }
};

inline Result solve_lp(const LPProblem& p, const Options& opt = {}) {
    BoundedSimplex s;
    return s.solve(p, opt);
}

}  // namespace co2flex::simplex

#pragma once

// Post-processing of merged sample sets: joint reductions, per-node emission
// intensities, target utilization, Pearson correlations of national emissions,
// the Pareto front from a Global-policy sweep, cost quantiles, and the CSV
// exports backing each figure-equivalent.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2flex/allocation.hpp"
#include "co2flex/sample_store.hpp"
#include "co2flex/sampler.hpp"

namespace co2flex {

/// 1 - realized / baseline.
inline double joint_reduction(const SampleRecord& rec, double baseline_1990) {
    if (!(baseline_1990 > 0.0)) throw std::invalid_argument("joint_reduction: zero baseline");
    double total = 0.0;
    for (double e : rec.realized_emissions) total += e;
    return 1.0 - total / baseline_1990;
}

/// realized / target per node; nodes with target 0 are Undefined (excluded
/// from boxplots and exports).
inline std::vector<std::optional<double>> target_utilization(const SampleRecord& rec,
                                                             double budget) {
    std::vector<std::optional<double>> out(rec.x.size());
    for (std::size_t n = 0; n < rec.x.size(); ++n) {
        double target = rec.x[n] * budget;
        if (target > 0.0)
            out[n] = rec.realized_emissions[n] / target;
    }
    return out;
}

/// tCO2 per MWh produced (not per MWh demanded); Undefined at zero production.
inline std::vector<std::optional<double>> emission_intensity(const SampleRecord& rec) {
    std::vector<std::optional<double>> out(rec.generation.size());
    for (std::size_t n = 0; n < rec.generation.size(); ++n)
        if (rec.generation[n] > 0.0) out[n] = rec.realized_emissions[n] / rec.generation[n];
    return out;
}

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

struct CorrelationMatrix {
    std::vector<std::string> nodes;
    std::vector<std::vector<double>> r;     ///< symmetric, 1 on defined diagonal
    std::vector<std::vector<bool>> valid;   ///< false when either series is constant
};

/// Pairwise Pearson correlation of per-node realized emissions across samples.
/// Pairs involving a zero-variance series are masked Undefined.
inline CorrelationMatrix correlation_matrix(const std::vector<SampleRecord>& samples,
                                            const std::vector<std::string>& nodes) {
    if (samples.size() < 2)
        throw std::invalid_argument("correlation_matrix: need at least 2 samples");
    const std::size_t N = nodes.size(), S = samples.size();
    std::vector<std::vector<double>> series(N, std::vector<double>(S));
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t n = 0; n < N; ++n) series[n][s] = samples[s].realized_emissions.at(n);

    std::vector<double> mean(N, 0.0), var(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        for (double v : series[n]) mean[n] += v;
        mean[n] /= static_cast<double>(S);
        for (double v : series[n]) var[n] += (v - mean[n]) * (v - mean[n]);
    }
    CorrelationMatrix m;
    m.nodes = nodes;
    m.r.assign(N, std::vector<double>(N, 0.0));
    m.valid.assign(N, std::vector<bool>(N, false));
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = a; b < N; ++b) {
            if (var[a] <= 0.0 || var[b] <= 0.0) continue;  // masked
            double cov = 0.0;
            for (std::size_t s = 0; s < S; ++s)
                cov += (series[a][s] - mean[a]) * (series[b][s] - mean[b]);
            double r = cov / std::sqrt(var[a] * var[b]);
            m.r[a][b] = m.r[b][a] = r;
            m.valid[a][b] = m.valid[b][a] = true;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Pareto front
// ---------------------------------------------------------------------------

struct ParetoPoint {
    double reduction = 0.0;
    double cost = 0.0;
    double co2_dual = 0.0;  ///< global cap shadow price at this point
    bool feasible = true;
};

/// Global-policy sweep over a strictly increasing reduction grid. Infeasible
/// grid points flag and truncate the front. Costs are asserted non-decreasing.
inline std::vector<ParetoPoint> pareto_front(const NetworkInstance& net,
                                             const std::vector<double>& reduction_grid,
                                             double discount_rate,
                                             const simplex::Options& opt = {}) {
    for (std::size_t i = 1; i < reduction_grid.size(); ++i)
        if (!(reduction_grid[i] > reduction_grid[i - 1]))
            throw std::invalid_argument("pareto_front: grid must be strictly increasing");
    const double baseline = net.total_historical_emissions();
    std::vector<ParetoPoint> front;
    for (double red : reduction_grid) {
        ParetoPoint pt;
        pt.reduction = red;
        auto policy = CO2Policy::global((1.0 - red) * baseline);
        auto [lp, report] = build(net, policy, discount_rate);
        (void)report;
        auto sol = solve(lp, opt);
        if (sol.status != SolveStatus::Optimal) {
            pt.feasible = false;
            front.push_back(pt);
            break;  // tightening further stays infeasible
        }
        pt.cost = sol.objective;
        pt.co2_dual = sol.dual_of(lp, "co2:global");
        if (!front.empty() && front.back().feasible &&
            pt.cost < front.back().cost * (1.0 - 1e-9))
            throw std::logic_error("pareto_front: cost decreased along the reduction grid");
        front.push_back(pt);
    }
    return front;
}

/// Convex lower bound of the front at an arbitrary reduction, built from the
/// supporting lines cost_i + dual_i * baseline * (r - r_i).
inline double pareto_lower_bound(const std::vector<ParetoPoint>& front, double baseline,
                                 double reduction) {
    double best = -kInf;
    for (const auto& p : front) {
        if (!p.feasible) continue;
        best = std::max(best, p.cost + p.co2_dual * baseline * (reduction - p.reduction));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Quantiles
// ---------------------------------------------------------------------------

struct CostQuantiles {
    double q25 = 0.0, q50 = 0.0, q75 = 0.0;
};

/// Linear interpolation between order statistics (quantile type 7).
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(v.begin(), v.end());
    double h = (static_cast<double>(v.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

/// Quantiles of the relative cost increase (cost / optimal - 1).
inline CostQuantiles cost_quantiles(const std::vector<SampleRecord>& samples,
                                    double optimal_cost) {
    if (samples.empty()) throw std::invalid_argument("cost_quantiles: empty sample set");
    std::vector<double> rel;
    rel.reserve(samples.size());
    for (const auto& s : samples) rel.push_back(s.total_cost / optimal_cost - 1.0);
    return {quantile(rel, 0.25), quantile(rel, 0.50), quantile(rel, 0.75)};
}

/// Stored duals of the national CO2 rows (0 where the target is slack).
inline const std::vector<double>& abatement_costs(const SampleRecord& rec) {
    return rec.abatement;
}
/// Stored time-averaged balance duals, currency/MWh.
inline const std::vector<double>& mean_prices(const SampleRecord& rec) {
    return rec.mean_price;
}

// ---------------------------------------------------------------------------
// Bundle + CSV exports
// ---------------------------------------------------------------------------

struct AnalysisOptions {
    double corr_export_threshold = 0.0;  ///< drop |r| below this in the CSV (0 keeps all)
    int hist_bins_reduction = 40;
    int hist_bins_cost = 40;
};

struct AnalysisBundle {
    std::vector<std::string> nodes;
    std::vector<const SampleRecord*> samples;
    std::vector<double> reductions;       ///< per sample
    std::vector<double> rel_cost;         ///< per sample
    CorrelationMatrix corr;
    CostQuantiles quantiles;
    double baseline_1990 = 0.0;
    double budget = 0.0;
    double optimal_cost = 0.0;
};

inline AnalysisBundle build_bundle(const MergedSamples& merged) {
    AnalysisBundle b;
    b.nodes = merged.reference.nodes;
    b.baseline_1990 = merged.reference.baseline.baseline_1990;
    b.budget = merged.reference.baseline.budget;
    b.optimal_cost = merged.reference.baseline.optimal_cost;
    for (const auto& s : merged.samples) b.samples.push_back(&s);
    for (const auto* s : b.samples) {
        b.reductions.push_back(joint_reduction(*s, b.baseline_1990));
        b.rel_cost.push_back(s->total_cost / b.optimal_cost - 1.0);
    }
    if (b.samples.size() >= 2) b.corr = correlation_matrix(merged.samples, b.nodes);
    if (!b.samples.empty()) b.quantiles = cost_quantiles(merged.samples, b.optimal_cost);
    return b;
}

namespace detail {
inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("analysis: cannot write " + path.string());
    out << content;
}
inline std::string fd(double v) { return util::format_double(v); }
}  // namespace detail

/// Write the seven figure-equivalent CSV files; returns their paths.
inline std::vector<std::filesystem::path> export_csv(const AnalysisBundle& b,
                                                     const std::vector<ParetoPoint>& front,
                                                     const std::filesystem::path& dir,
                                                     const AnalysisOptions& opt = {}) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<fs::path> written;
    auto emit = [&](const char* name, const std::string& body) {
        fs::path p = dir / name;
        detail::write_file(p, body);
        written.push_back(p);
    };

    {
        std::ostringstream os;
        os << "reduction,cost,co2_dual,feasible\n";
        for (const auto& p : front)
            os << detail::fd(p.reduction) << "," << detail::fd(p.cost) << ","
               << detail::fd(p.co2_dual) << "," << (p.feasible ? 1 : 0) << "\n";
        emit("pareto_front.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "chain,iter,node,intensity\n";
        for (const auto* s : b.samples) {
            auto vals = emission_intensity(*s);
            for (std::size_t n = 0; n < b.nodes.size(); ++n)
                if (vals[n])
                    os << s->chain_id << "," << s->iteration << "," << b.nodes[n] << ","
                       << detail::fd(*vals[n]) << "\n";
        }
        emit("emission_intensity.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "chain,iter,node,utilization\n";
        for (const auto* s : b.samples) {
            auto vals = target_utilization(*s, b.budget);
            for (std::size_t n = 0; n < b.nodes.size(); ++n)
                if (vals[n])
                    os << s->chain_id << "," << s->iteration << "," << b.nodes[n] << ","
                       << detail::fd(*vals[n]) << "\n";
        }
        emit("target_utilization.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "node_a,node_b,r\n";
        for (std::size_t a = 0; a < b.corr.nodes.size(); ++a)
            for (std::size_t bb = 0; bb < b.corr.nodes.size(); ++bb) {
                if (!b.corr.valid.empty() && b.corr.valid[a][bb] &&
                    std::abs(b.corr.r[a][bb]) >= opt.corr_export_threshold)
                    os << b.corr.nodes[a] << "," << b.corr.nodes[bb] << ","
                       << detail::fd(b.corr.r[a][bb]) << "\n";
            }
        emit("correlations.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "chain,iter,node,abatement_cost\n";
        for (const auto* s : b.samples)
            for (std::size_t n = 0; n < b.nodes.size(); ++n)
                os << s->chain_id << "," << s->iteration << "," << b.nodes[n] << ","
                   << detail::fd(s->abatement.at(n)) << "\n";
        emit("abatement_costs.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "chain,iter,node,price,price_demand_weighted\n";
        for (const auto* s : b.samples)
            for (std::size_t n = 0; n < b.nodes.size(); ++n)
                os << s->chain_id << "," << s->iteration << "," << b.nodes[n] << ","
                   << detail::fd(s->mean_price.at(n)) << ","
                   << detail::fd(s->mean_price_weighted.at(n)) << "\n";
        emit("electricity_prices.csv", os.str());
    }
    {
        // 2D histogram of (joint reduction, relative cost increase).
        std::ostringstream os;
        os << "reduction_lo,reduction_hi,rel_cost_lo,rel_cost_hi,count\n";
        if (!b.samples.empty()) {
            double rmin = *std::min_element(b.reductions.begin(), b.reductions.end());
            double rmax = *std::max_element(b.reductions.begin(), b.reductions.end());
            double cmin = *std::min_element(b.rel_cost.begin(), b.rel_cost.end());
            double cmax = *std::max_element(b.rel_cost.begin(), b.rel_cost.end());
            if (rmax <= rmin) rmax = rmin + 1e-9;
            if (cmax <= cmin) cmax = cmin + 1e-9;
            const int BR = opt.hist_bins_reduction, BC = opt.hist_bins_cost;
            std::vector<long> counts(static_cast<std::size_t>(BR) * BC, 0);
            for (std::size_t i = 0; i < b.samples.size(); ++i) {
                int br = std::min(BR - 1, static_cast<int>((b.reductions[i] - rmin) /
                                                           (rmax - rmin) * BR));
                int bc = std::min(BC - 1, static_cast<int>((b.rel_cost[i] - cmin) /
                                                           (cmax - cmin) * BC));
                ++counts[static_cast<std::size_t>(br) * BC + bc];
            }
            for (int i = 0; i < BR; ++i)
                for (int j = 0; j < BC; ++j) {
                    long c = counts[static_cast<std::size_t>(i) * BC + j];
                    if (c == 0) continue;
                    os << detail::fd(rmin + (rmax - rmin) * i / BR) << ","
                       << detail::fd(rmin + (rmax - rmin) * (i + 1) / BR) << ","
                       << detail::fd(cmin + (cmax - cmin) * j / BC) << ","
                       << detail::fd(cmin + (cmax - cmin) * (j + 1) / BC) << "," << c << "\n";
                }
        }
        emit("reduction_cost_hist2d.csv", os.str());
    }
    return written;
}

}  // namespace co2flex

#pragma once

// Adaptive Metropolis-Hastings exploration of national CO2 target fractions.
//
// Proposals are uniform around the previous point with width sigma, clipped to
// [0,1] per component. A proposal is evaluated by solving the system under the
// national policy x_i * budget and applying the feasibility criteria in the
// fixed order
//   (c) a technically feasible optimum exists
//   (a) realized joint reduction >= min_joint_reduction
//   (b) cost <= (1 + cost_slack) * optimal cost   (boundary inclusive)
//   (d) no node exceeds its coal-equivalent super-exporter limit
// Proposals with sum(x) < 1 are rejected before solving. On rejection the
// previous state is re-recorded (Markov re-record rule). sigma moves by
// +-epsilon per evaluation batch toward a target acceptance rate.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2flex/allocation.hpp"
#include "co2flex/lp_builder.hpp"
#include "co2flex/lp_solver.hpp"
#include "co2flex/network.hpp"
#include "co2flex/rng.hpp"
#include "co2flex/solution_view.hpp"

namespace co2flex {

struct SamplerConfig {
    int n_samples = 1000;  ///< iterations per chain
    int n_chains = 1;
    int burn_in = 100;
    double sigma0 = 0.2;
    double epsilon = 0.05;
    double target_acceptance = 0.80;
    int batch_size = 50;
    double cost_slack = 0.18;
    double min_joint_reduction = 0.55;
    double discount_rate = 0.07;
    std::uint64_t rng_seed = 0;

    double sigma_floor() const { return epsilon / 10.0; }

    void validate() const {
        if (n_samples < 1) throw std::invalid_argument("sampler: n_samples must be >= 1");
        if (n_chains < 1) throw std::invalid_argument("sampler: n_chains must be >= 1");
        if (burn_in < 0) throw std::invalid_argument("sampler: burn_in must be >= 0");
        if (!(sigma0 > 0.0) || sigma0 > 1.0)
            throw std::invalid_argument("sampler: sigma0 must be in (0,1]");
        if (!(epsilon > 0.0)) throw std::invalid_argument("sampler: epsilon must be > 0");
        if (!(target_acceptance > 0.0) || !(target_acceptance < 1.0))
            throw std::invalid_argument("sampler: target_acceptance must be in (0,1)");
        if (batch_size < 1) throw std::invalid_argument("sampler: batch_size must be >= 1");
        if (cost_slack < 0.0) throw std::invalid_argument("sampler: cost_slack must be >= 0");
        if (!(min_joint_reduction > 0.0) || !(min_joint_reduction < 1.0))
            throw std::invalid_argument("sampler: min_joint_reduction must be in (0,1)");
    }
};

enum class RejectionReason { None, BelowJointReduction, CostSlackExceeded, Infeasible, SuperExporter };

inline const char* to_string(RejectionReason r) {
    switch (r) {
        case RejectionReason::None: return "none";
        case RejectionReason::BelowJointReduction: return "below_joint_reduction";
        case RejectionReason::CostSlackExceeded: return "cost_slack_exceeded";
        case RejectionReason::Infeasible: return "infeasible";
        case RejectionReason::SuperExporter: return "super_exporter";
    }
    return "unknown";
}

struct SampleRecord {
    int chain_id = 0;
    long iteration = 0;
    std::vector<double> x;  ///< proposed fraction vector
    bool accepted = false;
    RejectionReason reason = RejectionReason::None;
    std::string reason_node;       ///< offending node for SuperExporter
    bool solved = false;           ///< false for pre-solve rejections
    bool numerical_failure = false;
    double total_cost = 0.0;
    std::vector<double> realized_emissions;  ///< tCO2/yr per node
    std::vector<double> generation;          ///< MWh/yr per node
    std::vector<double> abatement;           ///< currency/t per node
    std::vector<double> mean_price;          ///< currency/MWh per node
    std::vector<double> mean_price_weighted;
    double sigma_at_draw = 0.0;
};

/// Reference quantities computed once from the Efficiency optimum at the
/// required joint reduction.
struct Baseline {
    double baseline_1990 = 0.0;  ///< total 1990 emissions, tCO2/yr
    double budget = 0.0;         ///< (1 - min_joint_reduction) * baseline_1990
    double optimal_cost = 0.0;   ///< Efficiency system cost at the budget
    std::vector<double> x0;      ///< realized per-node emission shares of the optimum
    std::vector<double> x0_emissions;
    std::vector<double> x0_generation;
    std::vector<double> x0_abatement;
    std::vector<double> x0_mean_price;
    std::vector<double> x0_mean_price_weighted;
};

inline Baseline compute_baseline(const NetworkInstance& net, const SamplerConfig& cfg,
                                 const simplex::Options& opt = {}) {
    Baseline b;
    b.baseline_1990 = net.total_historical_emissions();
    if (!(b.baseline_1990 > 0.0))
        throw std::invalid_argument("baseline: total 1990 emissions must be > 0");
    b.budget = (1.0 - cfg.min_joint_reduction) * b.baseline_1990;

    auto policy = CO2Policy::global(b.budget);
    auto [lp, report] = build(net, policy, cfg.discount_rate);
    (void)report;
    auto sol = solve(lp, opt);
    if (sol.status != SolveStatus::Optimal)
        throw std::runtime_error("baseline: Efficiency solve not optimal (" +
                                 std::string(to_string(sol.status)) + ")");
    auto out = summarize(net, policy, lp, sol);
    b.optimal_cost = out.total_cost;
    b.x0.resize(net.n_nodes());
    for (std::size_t n = 0; n < net.n_nodes(); ++n)
        b.x0[n] = b.budget > 0.0 ? out.node_emissions[n] / b.budget : 0.0;
    b.x0_emissions = out.node_emissions;
    b.x0_generation = out.node_generation;
    b.x0_abatement = out.node_abatement;
    b.x0_mean_price = out.node_mean_price;
    b.x0_mean_price_weighted = out.node_mean_price_weighted;
    double share_sum = 0.0;
    for (double v : b.x0) share_sum += v;
    if (share_sum < 1.0 - 1e-6)
        throw std::runtime_error("baseline: the CO2 budget does not bind at the optimum; "
                                 "the sampler needs a binding joint target");
    return b;
}

// ---------------------------------------------------------------------------
// Sampler primitives
// ---------------------------------------------------------------------------

/// Uniform proposal around x_prev, clipped to [0,1] per component. Consumes
/// exactly x_prev.size() draws starting at rng_counter.
inline std::vector<double> propose(const std::vector<double>& x_prev, double sigma,
                                   const CounterRng& rng, std::uint64_t rng_counter) {
    std::vector<double> x(x_prev.size());
    for (std::size_t i = 0; i < x_prev.size(); ++i) {
        double lo = std::max(x_prev[i] - sigma / 2.0, 0.0);
        double hi = std::min(x_prev[i] + sigma / 2.0, 1.0);
        x[i] = lo + (hi - lo) * rng.uniform_at(rng_counter + i);
    }
    return x;
}

/// Batch sigma update: +-epsilon toward the target acceptance rate, holding
/// still on ties and whenever a move would leave (epsilon/10, 1].
inline double adapt_sigma(double sigma, double batch_acceptance, const SamplerConfig& cfg) {
    if (batch_acceptance > cfg.target_acceptance) {
        double next = sigma + cfg.epsilon;
        return next <= 1.0 ? next : sigma;
    }
    if (batch_acceptance < cfg.target_acceptance) {
        double next = sigma - cfg.epsilon;
        return next > cfg.sigma_floor() ? next : sigma;
    }
    return sigma;
}

struct CriteriaInput {
    bool optimal = false;
    double total_cost = 0.0;
    std::vector<double> realized_emissions;
};

struct CriteriaVerdict {
    bool accepted = false;
    RejectionReason reason = RejectionReason::None;
    int offending_node = -1;
};

/// Table-1 criteria in the fixed order (c), (a), (b), (d).
inline CriteriaVerdict check_criteria(const CriteriaInput& in, const NetworkInstance& net,
                                      const Baseline& base, const SamplerConfig& cfg) {
    CriteriaVerdict v;
    if (!in.optimal) {
        v.reason = RejectionReason::Infeasible;
        return v;
    }
    double total = 0.0;
    for (double e : in.realized_emissions) total += e;
    double reduction = 1.0 - total / base.baseline_1990;
    if (reduction < cfg.min_joint_reduction) {
        v.reason = RejectionReason::BelowJointReduction;
        return v;
    }
    if (in.total_cost > (1.0 + cfg.cost_slack) * base.optimal_cost) {
        v.reason = RejectionReason::CostSlackExceeded;
        return v;
    }
    for (std::size_t n = 0; n < net.n_nodes(); ++n) {
        if (in.realized_emissions[n] > coal_super_exporter_limit(net, static_cast<int>(n))) {
            v.reason = RejectionReason::SuperExporter;
            v.offending_node = static_cast<int>(n);
            return v;
        }
    }
    v.accepted = true;
    return v;
}

/// Solve the system under the proposal and apply the acceptance criteria.
/// Proposals whose fractions sum below 1 are rejected without solving.
inline SampleRecord evaluate(const std::vector<double>& x, const NetworkInstance& net,
                             const Baseline& base, const SamplerConfig& cfg,
                             const simplex::Options& opt = {}, long* solve_counter = nullptr) {
    SampleRecord rec;
    rec.x = x;

    double sum = 0.0;
    for (double v : x) sum += v;
    if (sum < 1.0 - 1e-7) {  // tolerance keeps the binding start point admissible
        rec.reason = RejectionReason::BelowJointReduction;
        return rec;  // assigned targets sum below the budget: rejected before solving
    }

    std::vector<double> targets(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) targets[i] = x[i] * base.budget;
    auto policy = CO2Policy::national(std::move(targets), x);
    auto [lp, report] = build(net, policy, cfg.discount_rate);
    (void)report;
    if (solve_counter) ++*solve_counter;
    auto sol = solve(lp, opt);

    if (sol.status != SolveStatus::Optimal) {
        rec.solved = true;
        rec.reason = RejectionReason::Infeasible;
        rec.numerical_failure = sol.status == SolveStatus::NumericalFailure;
        return rec;
    }
    auto out = summarize(net, policy, lp, sol);
    rec.solved = true;
    rec.total_cost = out.total_cost;
    rec.realized_emissions = out.node_emissions;
    rec.generation = out.node_generation;
    rec.abatement = out.node_abatement;
    rec.mean_price = out.node_mean_price;
    rec.mean_price_weighted = out.node_mean_price_weighted;

    CriteriaInput in;
    in.optimal = true;
    in.total_cost = out.total_cost;
    in.realized_emissions = out.node_emissions;
    auto verdict = check_criteria(in, net, base, cfg);
    rec.accepted = verdict.accepted;
    rec.reason = verdict.reason;
    if (verdict.offending_node >= 0) rec.reason_node = net.nodes[verdict.offending_node].id;
    return rec;
}

// ---------------------------------------------------------------------------
// Chain driver
// ---------------------------------------------------------------------------

struct ChainState {
    std::vector<double> x;   ///< last accepted point
    double sigma = 0.0;
    long iteration = 0;      ///< last completed iteration
    int accepted_in_batch = 0;
    int batch_progress = 0;
};

/// Starting record (iteration 0): the Efficiency optimum as an accepted state.
inline SampleRecord start_record(const NetworkInstance& net, const Baseline& base,
                                 const SamplerConfig& cfg, int chain_id) {
    (void)net;
    SampleRecord rec;
    rec.chain_id = chain_id;
    rec.iteration = 0;
    rec.x = base.x0;
    rec.accepted = true;
    rec.solved = true;
    rec.total_cost = base.optimal_cost;
    rec.realized_emissions = base.x0_emissions;
    rec.generation = base.x0_generation;
    rec.abatement = base.x0_abatement;
    rec.mean_price = base.x0_mean_price;
    rec.mean_price_weighted = base.x0_mean_price_weighted;
    rec.sigma_at_draw = cfg.sigma0;
    return rec;
}

/// Run (or resume) one chain. Each produced record is handed to `sink` in
/// iteration order; the caller persists them. Returns the final state.
/// A run aborts after `retry_budget` consecutive numerical failures.
inline ChainState run_chain(const NetworkInstance& net, const Baseline& base,
                            const SamplerConfig& cfg, int chain_id,
                            const std::function<void(const SampleRecord&)>& sink,
                            ChainState resume_from = {}, const simplex::Options& opt = {},
                            int retry_budget = 5) {
    cfg.validate();
    const std::size_t dim = net.n_nodes();
    CounterRng rng(cfg.rng_seed, static_cast<std::uint64_t>(chain_id));

    ChainState st = resume_from;
    if (st.iteration == 0) {
        st.x = base.x0;
        st.sigma = cfg.sigma0;
        st.accepted_in_batch = 0;
        st.batch_progress = 0;
        sink(start_record(net, base, cfg, chain_id));
    }

    int consecutive_failures = 0;
    for (long it = st.iteration + 1; it <= cfg.n_samples; ++it) {
        std::uint64_t counter = static_cast<std::uint64_t>(it - 1) * dim;
        auto x_prop = propose(st.x, st.sigma, rng, counter);
        SampleRecord rec = evaluate(x_prop, net, base, cfg, opt);
        rec.chain_id = chain_id;
        rec.iteration = it;
        rec.sigma_at_draw = st.sigma;
        sink(rec);

        if (rec.numerical_failure) {
            if (++consecutive_failures > retry_budget)
                throw std::runtime_error("chain " + std::to_string(chain_id) +
                                         ": aborted after " + std::to_string(retry_budget) +
                                         " consecutive numerical failures (checkpoint kept)");
        } else {
            consecutive_failures = 0;
        }

        if (rec.accepted) {
            st.x = rec.x;
            ++st.accepted_in_batch;
        }
        // else: Markov re-record; the state stays x_{t-1}.
        st.iteration = it;
        if (++st.batch_progress == cfg.batch_size) {
            double acc = static_cast<double>(st.accepted_in_batch) / cfg.batch_size;
            st.sigma = adapt_sigma(st.sigma, acc, cfg);
            st.batch_progress = 0;
            st.accepted_in_batch = 0;
        }
    }
    return st;
}

// ---------------------------------------------------------------------------
// State reconstruction (Markov re-record) and merging
// ---------------------------------------------------------------------------

/// Expand a record stream into the chain's state sequence: on rejection the
/// previous state is re-recorded at the rejected slot.
inline std::vector<SampleRecord> state_sequence(const std::vector<SampleRecord>& records) {
    std::vector<SampleRecord> states;
    const SampleRecord* current = nullptr;
    for (const auto& rec : records) {
        if (rec.iteration == 0 || rec.accepted) current = &rec;
        if (!current)
            throw std::runtime_error("state_sequence: stream does not start with a state");
        SampleRecord s = *current;
        s.iteration = rec.iteration;
        s.sigma_at_draw = rec.sigma_at_draw;
        states.push_back(std::move(s));
    }
    return states;
}

}  // namespace co2flex

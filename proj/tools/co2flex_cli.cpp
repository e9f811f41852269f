// co2flex command line: solve single policies, run allocation scenarios,
// sample national-target configurations, and export the analysis CSVs.
//
// Exit codes: 0 ok, 2 configuration error, 3 infeasible, 4 numerical failure.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include "co2flex/analysis.hpp"
#include "co2flex/allocation.hpp"
#include "co2flex/lp_builder.hpp"
#include "co2flex/lp_solver.hpp"
#include "co2flex/network.hpp"
#include "co2flex/sample_store.hpp"
#include "co2flex/sampler.hpp"
#include "co2flex/solution_view.hpp"
#include "co2flex/system_io.hpp"
#include "co2flex/version.hpp"

namespace fs = std::filesystem;
using namespace co2flex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

simplex::Options solver_options_from_env() {
    simplex::Options opt;
    if (const char* v = std::getenv("CO2FLEX_SOLVER_TOL")) {
        double tol = std::atof(v);
        if (tol > 0.0) {
            opt.feas_tol = tol;
            opt.opt_tol = tol;
        }
    }
    return opt;
}

Tolerances cert_tolerances_from_env() {
    Tolerances tol;
    if (const char* v = std::getenv("CO2FLEX_CERT_TOL")) {
        double t = std::atof(v);
        if (t > 0.0) tol = Tolerances{t, t, t};
    }
    return tol;
}

std::string iso_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

void write_manifest(const fs::path& out_dir, const json& extra) {
    json m = extra;
    m["version"] = kVersion;
    std::ofstream f(out_dir / "manifest.json");
    f << m.dump(2) << "\n";
}

NetworkInstance load_or_exit(const std::string& path) {
    return load_network(path);  // ParseError is caught in main
}

void print_outcome(const NetworkInstance& net, const SystemOutcome& out) {
    double baseline = net.total_historical_emissions();
    std::cout << "total_cost " << util::format_double(out.total_cost) << "\n";
    std::cout << "total_emissions " << util::format_double(out.total_emissions) << "\n";
    if (baseline > 0.0)
        std::cout << "joint_reduction "
                  << util::format_double(1.0 - out.total_emissions / baseline) << "\n";
    for (std::size_t n = 0; n < net.n_nodes(); ++n)
        std::cout << "emissions " << net.nodes[n].id << " "
                  << util::format_double(out.node_emissions[n]) << "\n";
}

struct PolicyRequest {
    std::string policy = "none";
    double budget = -1.0;
    double reduction = -1.0;

    CO2Policy resolve(const NetworkInstance& net) const {
        double baseline = net.total_historical_emissions();
        double cap = budget;
        if (reduction >= 0.0) cap = (1.0 - reduction) * baseline;
        if (policy == "none") return CO2Policy::none();
        if (cap < 0.0)
            throw std::invalid_argument("policy '" + policy +
                                        "' needs --budget or --reduction");
        auto kind = scheme_from_string(policy);
        if (!kind) throw std::invalid_argument("unknown policy '" + policy + "'");
        return allocate(AllocationScheme(*kind, cap), net);
    }
};

int run_solve(const std::string& network_path, const PolicyRequest& req,
              double discount_rate, const std::string& out_dir) {
    auto net = load_or_exit(network_path);
    auto policy = req.resolve(net);
    auto [lp, report] = build(net, policy, discount_rate);
    auto opt = solver_options_from_env();
    auto sol = solve(lp, opt);
    if (sol.status == SolveStatus::Infeasible) {
        std::cerr << "infeasible\n";
        return kExitInfeasible;
    }
    if (sol.status != SolveStatus::Optimal) {
        std::cerr << "solver failure: " << to_string(sol.status) << "\n";
        return kExitNumerical;
    }
    auto cert = verify_certificate(lp, sol, cert_tolerances_from_env());
    if (!cert.pass()) {
        std::cerr << "certificate check failed (gap " << cert.relative_gap << ")\n";
        return kExitNumerical;
    }
    auto out = summarize(net, policy, lp, sol);
    print_outcome(net, out);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream f(fs::path(out_dir) / "solution.csv");
        f << dump_solution_csv(lp, sol);
        std::ofstream l(fs::path(out_dir) / "problem.lp");
        l << write_lp_format(lp);
        write_manifest(out_dir,
                       json{{"command", "solve"},
                            {"network", network_path},
                            {"network_hash", network_hash(net)},
                            {"policy", req.policy},
                            {"finished_at", iso_now()}});
    }
    return kExitOk;
}

int run_scenario(const std::string& network_path, const std::string& scheme, bool all,
                 double budget, double realized, double discount_rate,
                 const std::string& out_dir) {
    auto net = load_or_exit(network_path);
    auto opt = solver_options_from_env();
    std::vector<SchemeKind> kinds;
    if (all) {
        kinds = {SchemeKind::Grandfathering, SchemeKind::Sovereignty, SchemeKind::Efficiency,
                 SchemeKind::Egalitarianism, SchemeKind::AbilityToPay};
    } else {
        auto k = scheme_from_string(scheme);
        if (!k) throw std::invalid_argument("unknown scheme '" + scheme + "'");
        kinds = {*k};
    }
    if (!out_dir.empty()) fs::create_directories(out_dir);
    for (auto kind : kinds) {
        CO2Policy policy = CO2Policy::none();
        double final_budget = budget;
        if (realized > 0.0) {
            auto res = rescale_to_realized(kind, net, realized, discount_rate, opt);
            policy = res.policy;
            final_budget = res.trace.final_budget;
            std::cout << to_string(kind) << " rescale_iterations " << res.trace.points.size()
                      << " budget " << util::format_double(final_budget) << "\n";
        } else {
            if (budget < 0.0) throw std::invalid_argument("scenario needs --budget or --realized");
            policy = allocate(AllocationScheme(kind, budget), net);
        }
        auto [lp, report] = build(net, policy, discount_rate);
        auto sol = solve(lp, opt);
        if (sol.status == SolveStatus::Infeasible) {
            std::cerr << to_string(kind) << ": infeasible\n";
            return kExitInfeasible;
        }
        if (sol.status != SolveStatus::Optimal) {
            std::cerr << to_string(kind) << ": " << to_string(sol.status) << "\n";
            return kExitNumerical;
        }
        auto out = summarize(net, policy, lp, sol);
        std::cout << "scheme " << to_string(kind) << "\n";
        print_outcome(net, out);
        if (!out_dir.empty()) {
            std::ofstream f(fs::path(out_dir) / (std::string(to_string(kind)) + "_solution.csv"));
            f << dump_solution_csv(lp, sol);
        }
    }
    if (!out_dir.empty())
        write_manifest(out_dir, json{{"command", "scenario"},
                                     {"network", network_path},
                                     {"network_hash", network_hash(net)},
                                     {"finished_at", iso_now()}});
    return kExitOk;
}

int run_sample(const std::string& network_path, SamplerConfig cfg, bool resume,
               const std::string& out_dir) {
    cfg.validate();
    auto net = load_or_exit(network_path);
    auto opt = solver_options_from_env();
    fs::create_directories(out_dir);

    const std::string net_hash = network_hash(net);
    const std::string cfg_hash = config_hash(cfg);
    write_manifest(out_dir, json{{"command", "sample"},
                                 {"network", network_path},
                                 {"network_hash", net_hash},
                                 {"config", to_json(cfg)},
                                 {"config_hash", cfg_hash},
                                 {"seed", cfg.rng_seed},
                                 {"started_at", iso_now()}});

    Baseline base = compute_baseline(net, cfg, opt);

    std::vector<std::string> node_ids;
    for (const auto& n : net.nodes) node_ids.push_back(n.id);

    std::atomic<int> failures{0};
    std::atomic<int> config_failures{0};
    auto run_one = [&](int chain) {
        try {
            fs::path path = fs::path(out_dir) / ("chain_" + std::to_string(chain) + ".jsonl");
            StoreHeader header;
            header.chain_id = chain;
            header.config = cfg;
            header.cfg_hash = cfg_hash;
            header.net_hash = net_hash;
            header.baseline = base;
            header.nodes = node_ids;

            ChainState state;
            bool append = false;
            if (resume && fs::exists(path)) {
                auto store = load_chain_store(path);
                if (store.header.cfg_hash != cfg_hash || store.header.net_hash != net_hash ||
                    store.header.chain_id != chain)
                    throw std::invalid_argument("resume: checkpoint does not match this run");
                if (store.had_torn_tail) {
                    // rewrite the intact prefix so appends stay well-formed
                    ChainWriter rw(path, store.header, false);
                    for (const auto& r : store.records) rw.append(r);
                }
                state = replay_state(store);
                append = true;
                if (state.iteration >= cfg.n_samples) return;
            }
            ChainWriter writer(path, header, append);
            run_chain(net, base, cfg, chain, [&](const SampleRecord& r) { writer.append(r); },
                      state, opt);
        } catch (const std::invalid_argument& e) {
            std::cerr << "chain " << chain << ": " << e.what() << "\n";
            ++config_failures;
        } catch (const std::exception& e) {
            std::cerr << "chain " << chain << ": " << e.what() << "\n";
            ++failures;
        }
    };

    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(cfg.n_chains));
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int c = next.fetch_add(1);
                if (c >= cfg.n_chains) return;
                run_one(c);
            }
        });
    for (auto& t : pool) t.join();
    if (config_failures > 0) return kExitConfig;
    if (failures > 0) return kExitNumerical;

    write_manifest(out_dir, json{{"command", "sample"},
                                 {"network", network_path},
                                 {"network_hash", net_hash},
                                 {"config", to_json(cfg)},
                                 {"config_hash", cfg_hash},
                                 {"seed", cfg.rng_seed},
                                 {"finished_at", iso_now()}});
    std::cout << "chains " << cfg.n_chains << " samples_per_chain " << cfg.n_samples << "\n";
    return kExitOk;
}

int run_analyze(const std::string& store_dir, const std::string& out_dir,
                const AnalysisOptions& aopt, const std::string& network_path,
                double discount_rate, bool with_front) {
    std::vector<ChainStore> stores;
    for (const auto& entry : fs::directory_iterator(store_dir)) {
        if (entry.path().extension() == ".jsonl") stores.push_back(load_chain_store(entry.path()));
    }
    if (stores.empty()) throw std::invalid_argument("no .jsonl stores in " + store_dir);
    auto merged = merge_chains(std::move(stores));
    auto bundle = build_bundle(merged);

    std::vector<ParetoPoint> front;
    if (with_front) {
        auto net = load_or_exit(network_path);
        if (network_hash(net) != merged.reference.net_hash)
            throw std::invalid_argument("analyze: network hash mismatch with stores");
        std::vector<double> grid;
        for (double r = 0.55; r <= 0.951; r += 0.05) grid.push_back(r);
        front = pareto_front(net, grid, discount_rate, solver_options_from_env());
    }
    auto files = export_csv(bundle, front, out_dir, aopt);
    write_manifest(out_dir, json{{"command", "analyze"},
                                 {"store", store_dir},
                                 {"network_hash", merged.reference.net_hash},
                                 {"config_hash", merged.reference.cfg_hash},
                                 {"samples", bundle.samples.size()},
                                 {"finished_at", iso_now()}});

    std::cout << "samples " << bundle.samples.size() << "\n";
    if (!bundle.samples.empty()) {
        std::cout << "rel_cost_increase_q25 " << util::format_double(bundle.quantiles.q25) << "\n";
        std::cout << "rel_cost_increase_q50 " << util::format_double(bundle.quantiles.q50) << "\n";
        std::cout << "rel_cost_increase_q75 " << util::format_double(bundle.quantiles.q75) << "\n";
    } else {
        std::cout << "warning: empty accepted sample set; histogram-only outputs\n";
    }
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    return kExitOk;
}

int run_pareto(const std::string& network_path, double from, double to, double step,
               double discount_rate, const std::string& out_dir) {
    if (!(step > 0.0) || to < from) throw std::invalid_argument("bad pareto grid");
    auto net = load_or_exit(network_path);
    std::vector<double> grid;
    for (double r = from; r <= to + 1e-12; r += step) grid.push_back(r);
    auto front = pareto_front(net, grid, discount_rate, solver_options_from_env());
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / "pareto_front.csv");
    f << "reduction,cost,co2_dual,feasible\n";
    for (const auto& p : front)
        f << util::format_double(p.reduction) << "," << util::format_double(p.cost) << ","
          << util::format_double(p.co2_dual) << "," << (p.feasible ? 1 : 0) << "\n";
    write_manifest(out_dir, json{{"command", "pareto"},
                                 {"network", network_path},
                                 {"network_hash", network_hash(net)},
                                 {"points", front.size()},
                                 {"finished_at", iso_now()}});
    for (const auto& p : front)
        std::cout << util::format_double(p.reduction) << " "
                  << util::format_double(p.cost) << (p.feasible ? "" : " infeasible") << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"co2flex: capacity-expansion LP + CO2 target configuration sampler"};
    app.set_config("--config", "", "configuration file (key=value, CLI flags win)");
    app.require_subcommand(1);

    std::string network, out_dir, store_dir, policy = "none", scheme;
    double budget = -1.0, reduction = -1.0, realized = -1.0, discount = 0.07;
    bool all_schemes = false, resume = false, no_front = false;
    SamplerConfig cfg;
    AnalysisOptions aopt;
    double from = 0.55, to = 0.95, step = 0.05;

    auto add_net = [&](CLI::App* c) {
        c->add_option("--network", network, "system description file")->required();
        c->add_option("--discount-rate", discount, "annual discount rate");
    };

    auto* c_solve = app.add_subcommand("solve", "solve one policy");
    add_net(c_solve);
    c_solve->add_option("--policy", policy, "none|efficiency|grandfathering|sovereignty|egalitarianism|ability_to_pay");
    c_solve->add_option("--budget", budget, "CO2 budget, t/yr");
    c_solve->add_option("--reduction", reduction, "joint reduction vs 1990, e.g. 0.55");
    c_solve->add_option("--out", out_dir, "output directory");

    auto* c_scen = app.add_subcommand("scenario", "allocation scheme runs");
    add_net(c_scen);
    c_scen->add_option("--scheme", scheme, "allocation scheme");
    c_scen->add_flag("--all", all_schemes, "run all five schemes");
    c_scen->add_option("--budget", budget, "CO2 budget, t/yr");
    c_scen->add_option("--realized", realized, "rescale budgets to this realized reduction");
    c_scen->add_option("--out", out_dir, "output directory");

    auto* c_sample = app.add_subcommand("sample", "run sampler chains");
    add_net(c_sample);
    c_sample->add_option("--chains", cfg.n_chains, "number of chains");
    c_sample->add_option("--samples", cfg.n_samples, "iterations per chain");
    c_sample->add_option("--seed", cfg.rng_seed, "rng seed");
    c_sample->add_option("--sigma0", cfg.sigma0, "initial proposal width");
    c_sample->add_option("--epsilon", cfg.epsilon, "sigma increment");
    c_sample->add_option("--target-acceptance", cfg.target_acceptance, "acceptance target");
    c_sample->add_option("--cost-slack", cfg.cost_slack, "allowed cost increase fraction");
    c_sample->add_option("--min-reduction", cfg.min_joint_reduction, "required joint reduction");
    c_sample->add_option("--burn-in", cfg.burn_in, "burn-in iterations per chain");
    c_sample->add_option("--batch-size", cfg.batch_size, "sigma adaptation batch");
    c_sample->add_flag("--resume", resume, "resume from existing chain files");
    c_sample->add_option("--out", out_dir, "output directory")->required();

    auto* c_an = app.add_subcommand("analyze", "merge stores and export CSVs");
    c_an->add_option("--store", store_dir, "directory of chain .jsonl files")->required();
    c_an->add_option("--out", out_dir, "output directory")->required();
    c_an->add_option("--network", network, "system file (for the Pareto front)");
    c_an->add_option("--discount-rate", discount, "annual discount rate");
    c_an->add_option("--corr-threshold", aopt.corr_export_threshold, "drop |r| below this");
    c_an->add_option("--hist-bins-reduction", aopt.hist_bins_reduction, "histogram bins");
    c_an->add_option("--hist-bins-cost", aopt.hist_bins_cost, "histogram bins");
    c_an->add_flag("--no-front", no_front, "skip the Pareto front solves");

    auto* c_par = app.add_subcommand("pareto", "Global-policy reduction sweep");
    add_net(c_par);
    c_par->add_option("--from", from, "first reduction");
    c_par->add_option("--to", to, "last reduction");
    c_par->add_option("--step", step, "grid step");
    c_par->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand(c_solve))
            return run_solve(network, PolicyRequest{policy, budget, reduction}, discount, out_dir);
        if (app.got_subcommand(c_scen))
            return run_scenario(network, scheme, all_schemes, budget, realized, discount, out_dir);
        if (app.got_subcommand(c_sample))
            return run_sample(network, cfg, resume, out_dir);
        if (app.got_subcommand(c_an))
            return run_analyze(store_dir, out_dir, aopt, network, discount,
                               !no_front && !network.empty());
        if (app.got_subcommand(c_par))
            return run_pareto(network, from, to, step, discount, out_dir);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}

#pragma once

// JSONL chain store: one header line (config, hashes, baseline, node order)
// followed by one record per sampler iteration. Lines are flushed as they are
// written, so the last complete line is always a valid resume checkpoint; a
// torn trailing line from a killed run is detected and dropped on load.

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2flex/sampler.hpp"
#include "co2flex/util.hpp"
#include "co2flex/version.hpp"

namespace co2flex {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON mappings
// ---------------------------------------------------------------------------

inline json to_json(const SamplerConfig& c) {
    return json{{"n_samples", c.n_samples},
                {"n_chains", c.n_chains},
                {"burn_in", c.burn_in},
                {"sigma0", c.sigma0},
                {"epsilon", c.epsilon},
                {"target_acceptance", c.target_acceptance},
                {"batch_size", c.batch_size},
                {"cost_slack", c.cost_slack},
                {"min_joint_reduction", c.min_joint_reduction},
                {"discount_rate", c.discount_rate},
                {"rng_seed", c.rng_seed}};
}

inline SamplerConfig sampler_config_from_json(const json& j) {
    SamplerConfig c;
    c.n_samples = j.at("n_samples").get<int>();
    c.n_chains = j.at("n_chains").get<int>();
    c.burn_in = j.at("burn_in").get<int>();
    c.sigma0 = j.at("sigma0").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.target_acceptance = j.at("target_acceptance").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.cost_slack = j.at("cost_slack").get<double>();
    c.min_joint_reduction = j.at("min_joint_reduction").get<double>();
    c.discount_rate = j.at("discount_rate").get<double>();
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return c;
}

inline std::string config_hash(const SamplerConfig& c) {
    return util::fnv1a_hex(to_json(c).dump());
}

inline json to_json(const Baseline& b) {
    return json{{"baseline_1990", b.baseline_1990},
                {"budget", b.budget},
                {"optimal_cost", b.optimal_cost},
                {"x0", b.x0},
                {"x0_emissions", b.x0_emissions},
                {"x0_generation", b.x0_generation},
                {"x0_abatement", b.x0_abatement},
                {"x0_mean_price", b.x0_mean_price},
                {"x0_mean_price_weighted", b.x0_mean_price_weighted}};
}

inline Baseline baseline_from_json(const json& j) {
    Baseline b;
    b.baseline_1990 = j.at("baseline_1990").get<double>();
    b.budget = j.at("budget").get<double>();
    b.optimal_cost = j.at("optimal_cost").get<double>();
    b.x0 = j.at("x0").get<std::vector<double>>();
    b.x0_emissions = j.at("x0_emissions").get<std::vector<double>>();
    b.x0_generation = j.at("x0_generation").get<std::vector<double>>();
    b.x0_abatement = j.at("x0_abatement").get<std::vector<double>>();
    b.x0_mean_price = j.at("x0_mean_price").get<std::vector<double>>();
    b.x0_mean_price_weighted = j.at("x0_mean_price_weighted").get<std::vector<double>>();
    return b;
}

inline json to_json(const SampleRecord& r) {
    json j{{"chain", r.chain_id},
           {"iter", r.iteration},
           {"x", r.x},
           {"accepted", r.accepted},
           {"reason", to_string(r.reason)},
           {"solved", r.solved},
           {"sigma", r.sigma_at_draw}};
    if (!r.reason_node.empty()) j["reason_node"] = r.reason_node;
    if (r.numerical_failure) j["numerical_failure"] = true;
    if (r.solved && r.reason != RejectionReason::Infeasible) {
        j["cost"] = r.total_cost;
        j["emissions"] = r.realized_emissions;
        j["generation"] = r.generation;
        j["abatement"] = r.abatement;
        j["price"] = r.mean_price;
        j["price_weighted"] = r.mean_price_weighted;
    }
    return j;
}

inline RejectionReason rejection_reason_from_string(const std::string& s) {
    if (s == "none") return RejectionReason::None;
    if (s == "below_joint_reduction") return RejectionReason::BelowJointReduction;
    if (s == "cost_slack_exceeded") return RejectionReason::CostSlackExceeded;
    if (s == "infeasible") return RejectionReason::Infeasible;
    if (s == "super_exporter") return RejectionReason::SuperExporter;
    throw std::invalid_argument("unknown rejection reason '" + s + "'");
}

inline SampleRecord sample_record_from_json(const json& j) {
    SampleRecord r;
    r.chain_id = j.at("chain").get<int>();
    r.iteration = j.at("iter").get<long>();
    r.x = j.at("x").get<std::vector<double>>();
    r.accepted = j.at("accepted").get<bool>();
    r.reason = rejection_reason_from_string(j.at("reason").get<std::string>());
    r.solved = j.at("solved").get<bool>();
    r.sigma_at_draw = j.at("sigma").get<double>();
    if (j.contains("reason_node")) r.reason_node = j.at("reason_node").get<std::string>();
    if (j.contains("numerical_failure")) r.numerical_failure = j.at("numerical_failure").get<bool>();
    if (j.contains("cost")) {
        r.total_cost = j.at("cost").get<double>();
        r.realized_emissions = j.at("emissions").get<std::vector<double>>();
        r.generation = j.at("generation").get<std::vector<double>>();
        r.abatement = j.at("abatement").get<std::vector<double>>();
        r.mean_price = j.at("price").get<std::vector<double>>();
        r.mean_price_weighted = j.at("price_weighted").get<std::vector<double>>();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Store header and files
// ---------------------------------------------------------------------------

struct StoreHeader {
    std::string kind = "co2flex-chain";
    std::string version = kVersion;
    int chain_id = 0;
    SamplerConfig config;
    std::string cfg_hash;
    std::string net_hash;
    Baseline baseline;
    std::vector<std::string> nodes;
};

inline json to_json(const StoreHeader& h) {
    return json{{"kind", h.kind},         {"version", h.version},
                {"chain", h.chain_id},    {"seed", h.config.rng_seed},
                {"config", to_json(h.config)}, {"config_hash", h.cfg_hash},
                {"network_hash", h.net_hash},  {"baseline", to_json(h.baseline)},
                {"nodes", h.nodes}};
}

inline StoreHeader store_header_from_json(const json& j) {
    StoreHeader h;
    h.kind = j.at("kind").get<std::string>();
    if (h.kind != "co2flex-chain")
        throw std::invalid_argument("store: unexpected header kind '" + h.kind + "'");
    h.version = j.at("version").get<std::string>();
    h.chain_id = j.at("chain").get<int>();
    h.config = sampler_config_from_json(j.at("config"));
    h.cfg_hash = j.at("config_hash").get<std::string>();
    h.net_hash = j.at("network_hash").get<std::string>();
    h.baseline = baseline_from_json(j.at("baseline"));
    h.nodes = j.at("nodes").get<std::vector<std::string>>();
    return h;
}

class ChainWriter {
public:
    ChainWriter(const std::filesystem::path& path, const StoreHeader& header, bool append_mode)
        : out_(path, append_mode ? std::ios::app : std::ios::trunc) {
        if (!out_) throw std::runtime_error("store: cannot open " + path.string());
        if (!append_mode) {
            out_ << to_json(header).dump() << "\n";
            out_.flush();
        }
    }
    void append(const SampleRecord& rec) {
        out_ << to_json(rec).dump() << "\n";
        out_.flush();
    }

private:
    std::ofstream out_;
};

struct ChainStore {
    StoreHeader header;
    std::vector<SampleRecord> records;  ///< proposal records, iteration order
    bool had_torn_tail = false;
};

/// Load a chain store; a torn trailing line (killed run) is dropped.
inline ChainStore load_chain_store(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("store: cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    ChainStore store;
    std::size_t pos = 0;
    bool first = true;
    long expected_iter = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        if (nl == std::string::npos) {
            store.had_torn_tail = true;  // no terminating newline: torn write
            break;
        }
        std::string line = content.substr(pos, nl - pos);
        pos = nl + 1;
        if (util::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            if (pos >= content.size()) {  // torn but newline survived
                store.had_torn_tail = true;
                break;
            }
            throw std::runtime_error("store: corrupt line in " + path.string());
        }
        if (first) {
            store.header = store_header_from_json(j);
            first = false;
            continue;
        }
        auto rec = sample_record_from_json(j);
        if (rec.iteration != expected_iter)
            throw std::runtime_error("store: non-contiguous iterations in " + path.string() +
                                     " (expected " + std::to_string(expected_iter) + ", got " +
                                     std::to_string(rec.iteration) + ")");
        ++expected_iter;
        store.records.push_back(std::move(rec));
    }
    if (first) throw std::runtime_error("store: missing header in " + path.string());
    return store;
}

/// Rebuild the chain state after the last complete record, verifying the
/// recorded sigma trail against a deterministic replay.
inline ChainState replay_state(const ChainStore& store) {
    const auto& cfg = store.header.config;
    ChainState st;
    st.sigma = cfg.sigma0;
    for (const auto& rec : store.records) {
        if (rec.iteration == 0) {
            st.x = rec.x;
            st.iteration = 0;
            continue;
        }
        if (rec.sigma_at_draw != st.sigma)
            throw std::runtime_error("store: checkpoint corruption - sigma trail mismatch at "
                                     "iteration " + std::to_string(rec.iteration));
        if (rec.accepted) {
            st.x = rec.x;
            ++st.accepted_in_batch;
        }
        st.iteration = rec.iteration;
        if (++st.batch_progress == cfg.batch_size) {
            double acc = static_cast<double>(st.accepted_in_batch) / cfg.batch_size;
            st.sigma = adapt_sigma(st.sigma, acc, cfg);
            st.batch_progress = 0;
            st.accepted_in_batch = 0;
        }
    }
    if (st.x.empty()) throw std::runtime_error("store: no starting state recorded");
    return st;
}

// ---------------------------------------------------------------------------
// Merging
// ---------------------------------------------------------------------------

struct MergedSamples {
    StoreHeader reference;               ///< header of the first chain
    std::vector<SampleRecord> samples;   ///< post burn-in state sequence, all chains
    long proposals_seen = 0;             ///< post burn-in proposal count
    long proposals_accepted = 0;
};

/// Concatenate chains into one analysis sample set. Stores must share the
/// same config and network hashes; burn-in slots are dropped per chain and
/// the result is ordered by (chain_id, iteration).
inline MergedSamples merge_chains(std::vector<ChainStore> stores) {
    if (stores.empty()) throw std::invalid_argument("merge: no stores given");
    std::sort(stores.begin(), stores.end(),
              [](const ChainStore& a, const ChainStore& b) {
                  return a.header.chain_id < b.header.chain_id;
              });
    MergedSamples out;
    out.reference = stores.front().header;
    for (const auto& s : stores) {
        if (s.header.cfg_hash != out.reference.cfg_hash)
            throw std::invalid_argument("merge: config hash mismatch between chains");
        if (s.header.net_hash != out.reference.net_hash)
            throw std::invalid_argument("merge: network hash mismatch between chains");
        auto states = state_sequence(s.records);
        for (auto& st : states)
            if (st.iteration > s.header.config.burn_in) out.samples.push_back(std::move(st));
        for (const auto& rec : s.records) {
            if (rec.iteration <= s.header.config.burn_in || rec.iteration == 0) continue;
            ++out.proposals_seen;
            if (rec.accepted) ++out.proposals_accepted;
        }
    }
    return out;
}

}  // namespace co2flex

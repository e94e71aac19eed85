#ifndef PSRC_SIM_HPP
#define PSRC_SIM_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "psrc/codec.hpp"
#include "psrc/repair.hpp"

namespace psrc {

enum class repair_policy { none, eager_pair, min_download };

enum class retrieve_strategy { random_k, systematic };

struct scenario_config {
    int B = 0;
    int alpha = 0;
    std::size_t object_bytes = 0;
    double p_node = 1.0;  // per-epoch survival probability; kill prob is 1 - p_node
    repair_policy policy = repair_policy::eager_pair;
    int d = 3;  // repair degree for the min-download policy
    int epochs = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::map<int, std::vector<int>> kills;  // scripted: epoch -> node ids
};

// key=value scenario text; `kill=epoch:node,node` may repeat.
inline scenario_config parse_scenario(std::istream& is) {
    scenario_config cfg;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw error(errc::parse_error, "scenario line without '=': " + line);
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "B") cfg.B = std::stoi(val);
        else if (key == "alpha") cfg.alpha = std::stoi(val);
        else if (key == "object_bytes") cfg.object_bytes = std::stoul(val);
        else if (key == "p_node") cfg.p_node = std::stod(val);
        else if (key == "policy") {
            if (val == "none") cfg.policy = repair_policy::none;
            else if (val == "eager") cfg.policy = repair_policy::eager_pair;
            else if (val == "min-download") cfg.policy = repair_policy::min_download;
            else throw error(errc::parse_error, "unknown policy: " + val);
        } else if (key == "d") cfg.d = std::stoi(val);
        else if (key == "epochs") cfg.epochs = std::stoi(val);
        else if (key == "seed") {
            cfg.seed = std::stoull(val);
            cfg.seed_set = true;
        } else if (key == "kill") {
            auto colon = val.find(':');
            if (colon == std::string::npos)
                throw error(errc::parse_error, "kill entry needs epoch:nodes, got " + val);
            const int epoch = std::stoi(val.substr(0, colon));
            std::istringstream ns(val.substr(colon + 1));
            std::string tok;
            while (std::getline(ns, tok, ','))
                if (!tok.empty()) cfg.kills[epoch].push_back(std::stoi(tok));
        } else {
            throw error(errc::parse_error, "unknown scenario key: " + key);
        }
    }
    if (cfg.p_node < 0.0 || cfg.p_node > 1.0)
        throw error(errc::parse_error, "p_node outside [0,1]");
    if (!cfg.seed_set) throw error(errc::parse_error, "scenario requires a seed");
    return cfg;
}

struct sim_metrics {
    std::uint64_t pieces_transferred = 0;
    std::uint64_t repairs_performed = 0;
    std::uint64_t repairs_failed = 0;
    std::uint64_t retrieval_attempts = 0;
    std::uint64_t retrieval_successes = 0;
};

struct epoch_record {
    int epoch = 0;
    int live = 0;
    std::uint64_t transfers = 0;
    std::uint64_t repairs_ok = 0;
    std::uint64_t repairs_failed = 0;
    bool decodable = false;
};

struct node_state {
    bool alive = true;
    std::optional<node_pieces> data;
};

class cluster_state {
public:
    cluster_state(const scenario_config& cfg)
        : cfg_(cfg), layout_(derive_params(cfg.B, cfg.alpha)), rng_(cfg.seed) {
        if (cfg.object_bytes == 0)
            throw error(errc::fragment_length_mismatch, "object_bytes must be >= 1");
        std::vector<std::uint8_t> bytes(cfg.object_bytes);
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng_());
        original_ = split_object(bytes, layout_.B());
        auto encoded = encode(layout_, original_);
        nodes_.resize(static_cast<std::size_t>(layout_.n()));
        for (int l = 1; l <= layout_.n(); ++l)
            nodes_[static_cast<std::size_t>(l - 1)].data = std::move(
                encoded[static_cast<std::size_t>(l - 1)]);
    }

    const spread_layout& layout() const { return layout_; }
    const scenario_config& config() const { return cfg_; }
    const sim_metrics& metrics() const { return metrics_; }
    const std::vector<epoch_record>& history() const { return history_; }
    const object_data& original() const { return original_; }
    int epoch() const { return epoch_; }

    bool node_alive(int id) const {
        layout_.check_node(id);
        return nodes_[static_cast<std::size_t>(id - 1)].alive;
    }

    std::vector<int> live_nodes() const {
        std::vector<int> live;
        for (int l = 1; l <= layout_.n(); ++l)
            if (node_alive(l)) live.push_back(l);
        return live;
    }

    // Pieces held by live nodes with data.
    std::vector<piece> live_pieces(const std::vector<int>& from) const {
        std::vector<piece> out;
        for (int l : from) {
            const auto& st = nodes_[static_cast<std::size_t>(l - 1)];
            if (st.alive && st.data)
                for (const auto& pc : st.data->pieces) out.push_back(pc);
        }
        return out;
    }

    piece_oracle oracle() const {
        return [this](int node, int idx) -> std::optional<piece> {
            const auto& st = nodes_[static_cast<std::size_t>(node - 1)];
            if (!st.alive || !st.data) return std::nullopt;
            return st.data->pieces[static_cast<std::size_t>(idx)];
        };
    }

    // One epoch: failures first, then repairs against the post-failure
    // pre-repair live set. Repaired nodes receive freshly reconstructed
    // pieces; nodes without a viable plan stay dead and retry next epoch.
    void step() {
        ++epoch_;
        epoch_record rec;
        rec.epoch = epoch_;

        // failures
        if (auto it = cfg_.kills.find(epoch_); it != cfg_.kills.end()) {
            for (int id : it->second) {
                layout_.check_node(id);
                kill(id);
            }
        }
        if (cfg_.p_node < 1.0) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int l = 1; l <= layout_.n(); ++l)
                if (node_alive(l) && u(rng_) >= cfg_.p_node) kill(l);
        }

        // repairs, all against the same live snapshot
        const std::vector<int> live = live_nodes();
        if (cfg_.policy != repair_policy::none) {
            for (int l = 1; l <= layout_.n(); ++l) {
                if (node_alive(l)) continue;
                auto plan = make_plan(l, live);
                if (!plan) {
                    ++metrics_.repairs_failed;
                    ++rec.repairs_failed;
                    continue;
                }
                auto restored = execute_plan(layout_, *plan, oracle());
                auto& st = nodes_[static_cast<std::size_t>(l - 1)];
                st.alive = true;
                st.data = std::move(restored);
                metrics_.pieces_transferred += static_cast<std::uint64_t>(plan->download_units);
                rec.transfers += static_cast<std::uint64_t>(plan->download_units);
                ++metrics_.repairs_performed;
                ++rec.repairs_ok;
            }
        }

        rec.live = static_cast<int>(live_nodes().size());
        rec.decodable = decodable_now();
        history_.push_back(rec);
    }

    // Decode attempt against the chosen node set; compares bytes with the
    // original object.
    struct retrieve_outcome {
        bool success = false;
        std::vector<int> contacted;
    };

    retrieve_outcome retrieve(retrieve_strategy strategy) {
        ++metrics_.retrieval_attempts;
        retrieve_outcome out;
        if (strategy == retrieve_strategy::systematic) {
            try {
                for (const auto& ent : systematic_map(layout_))
                    out.contacted.push_back(ent.node_id);
                auto obj = retrieve_systematic(layout_, oracle());
                out.success = (obj == original_);
            } catch (const error&) {
                out.success = false;
            }
        } else {
            auto live = live_nodes();
            if (static_cast<int>(live.size()) < layout_.k()) {
                out.success = false;
            } else {
                for (int i = 0; i < layout_.k(); ++i) {
                    std::uniform_int_distribution<int> dist(i, static_cast<int>(live.size()) - 1);
                    std::swap(live[static_cast<std::size_t>(i)],
                              live[static_cast<std::size_t>(dist(rng_))]);
                }
                out.contacted.assign(live.begin(), live.begin() + layout_.k());
                auto res = decode(layout_, live_pieces(out.contacted));
                out.success = res.object && *res.object == original_;
            }
        }
        if (out.success) ++metrics_.retrieval_successes;
        return out;
    }

    bool decodable_now() const {
        echelon e(layout_.B());
        for (int l = 1; l <= layout_.n(); ++l)
            if (node_alive(l))
                for (const auto& v : layout_.node_basis(l)) e.add(v);
        return e.rank() == layout_.B();
    }

private:
    void kill(int id) {
        auto& st = nodes_[static_cast<std::size_t>(id - 1)];
        st.alive = false;
        st.data.reset();
    }

    std::optional<repair_plan> make_plan(int failed, const std::vector<int>& live) {
        try {
            if (cfg_.policy == repair_policy::min_download)
                return plan_min_download(layout_, failed, cfg_.d, live);
            auto pairs = repair_pairs(layout_, failed, live);
            if (pairs.empty()) return std::nullopt;
            return plan_pair_repair(layout_, failed, pairs.front());
        } catch (const error&) {
            return std::nullopt;
        }
    }

    scenario_config cfg_;
    spread_layout layout_;
    std::mt19937_64 rng_;
    object_data original_;
    std::vector<node_state> nodes_;
    sim_metrics metrics_;
    std::vector<epoch_record> history_;
    int epoch_ = 0;
};

inline cluster_state sim_init(const scenario_config& cfg) { return cluster_state(cfg); }

inline void sim_report(std::ostream& os, const cluster_state& state) {
    os << "epoch,live,transfers,repairs_ok,repairs_failed,decodable\n";
    for (const auto& rec : state.history())
        os << rec.epoch << "," << rec.live << "," << rec.transfers << "," << rec.repairs_ok
           << "," << rec.repairs_failed << "," << (rec.decodable ? 1 : 0) << "\n";
}

}  // namespace psrc

#endif

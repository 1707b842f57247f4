// Copyright 2026 The QLego Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlego/backend.hpp"
#include "qlego/evaluator.hpp"
#include "qlego/hash.hpp"
#include "qlego/lego.hpp"
#include "qlego/rng.hpp"

namespace qlego {

// ---------------------------------------------------------------------------
// Game

enum class ActionKind { AddBlock, Contract, AssignLogical, Stop };

struct Action {
    ActionKind kind = ActionKind::Stop;
    uint32_t block = 0;  // palette index for AddBlock
    LegRef a;
    LegRef b;

    friend bool operator==(const Action&, const Action&) = default;
};

inline Action add_block(uint32_t palette_index) { return {ActionKind::AddBlock, palette_index, {}, {}}; }
inline Action contract(LegRef a, LegRef b) { return {ActionKind::Contract, 0, a, b}; }
inline Action assign_logical(LegRef leg) { return {ActionKind::AssignLogical, 0, leg, {}}; }
inline Action stop() { return {}; }

/// `ADD T6`, `CONTRACT (0.1)-(1.3)`, `LOGICAL (0.4)`, `STOP`.
inline std::string to_string(const Action& a, const Palette& palette) {
    switch (a.kind) {
        case ActionKind::AddBlock: return "ADD " + palette.blocks().at(a.block).name;
        case ActionKind::Contract: return "CONTRACT " + to_string(a.a) + "-" + to_string(a.b);
        case ActionKind::AssignLogical: return "LOGICAL " + to_string(a.a);
        case ActionKind::Stop: return "STOP";
    }
    return "?";
}

inline Action action_from_string(const std::string& s, const Palette& palette) {
    static const std::regex kAdd(R"(ADD (\S+))");
    static const std::regex kContract(R"(CONTRACT \((\d+)\.(\d+)\)-\((\d+)\.(\d+)\))");
    static const std::regex kLogical(R"(LOGICAL \((\d+)\.(\d+)\))");
    auto u = [](const std::ssub_match& m) { return static_cast<uint32_t>(std::stoul(m.str())); };
    std::smatch m;
    if (s == "STOP") return stop();
    if (std::regex_match(s, m, kAdd)) {
        const auto& blocks = palette.blocks();
        for (uint32_t i = 0; i < blocks.size(); ++i)
            if (blocks[i].name == m[1].str()) return add_block(i);
        throw ParseError("action: unknown block '" + m[1].str() + "'");
    }
    if (std::regex_match(s, m, kContract)) return contract({u(m[1]), u(m[2])}, {u(m[3]), u(m[4])});
    if (std::regex_match(s, m, kLogical)) return assign_logical({u(m[1]), u(m[2])});
    throw ParseError("action: cannot parse '" + s + "'");
}

enum class Outcome { Running, Stopped, Truncated, Degenerate };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Running: return "running";
        case Outcome::Stopped: return "stopped";
        case Outcome::Truncated: return "truncated";
        case Outcome::Degenerate: return "degenerate";
    }
    return "?";
}

struct GameState {
    LegoNetwork network;
    std::vector<Action> history;
    Outcome outcome = Outcome::Running;
    /// Set on terminal states whose network reads as a valid one-logical code.
    std::optional<CheckMatrix> code;
    /// Why a terminal state has no code.
    std::string note;

    bool terminal() const { return outcome != Outcome::Running; }
    size_t open() const { return network.open_legs().size(); }
    /// Physical qubits if the network were read as a code right now.
    size_t qubits() const { return open() > 0 ? open() - 1 : 0; }
};

enum class AgentKind { Random, EpsilonGreedy, Mcts };

inline const char* to_string(AgentKind a) {
    switch (a) {
        case AgentKind::Random: return "random";
        case AgentKind::EpsilonGreedy: return "greedy-epsilon";
        case AgentKind::Mcts: return "mcts";
    }
    return "?";
}

inline AgentKind agent_kind_from_string(const std::string& s) {
    if (s == "random") return AgentKind::Random;
    if (s == "greedy-epsilon" || s == "epsilon-greedy") return AgentKind::EpsilonGreedy;
    if (s == "mcts") return AgentKind::Mcts;
    throw UsageError("unknown agent '" + s + "' (expected random, greedy-epsilon or mcts)");
}

/// How a code is evaluated: exact distributions, sampled shots, or exact
/// up to `exact_threshold` physical qubits and sampled above.
enum class EvalRouting { Threshold, Exact, Sampled };

inline const char* to_string(EvalRouting r) {
    switch (r) {
        case EvalRouting::Threshold: return "threshold";
        case EvalRouting::Exact: return "exact";
        case EvalRouting::Sampled: return "sampled";
    }
    return "?";
}

inline EvalRouting eval_routing_from_string(const std::string& s) {
    if (s == "threshold") return EvalRouting::Threshold;
    if (s == "exact") return EvalRouting::Exact;
    if (s == "sampled") return EvalRouting::Sampled;
    throw UsageError("unknown evaluation routing '" + s + "'");
}

struct LearningConfig {
    size_t max_qubits = 10;
    size_t shots = 10000;
    NoiseModel noise;
    AgentKind agent = AgentKind::Mcts;
    size_t episodes = 100;
    uint64_t seed = 0;
    EvalRouting routing = EvalRouting::Threshold;
    size_t exact_threshold = 10;
    /// Backend registry name, or "auto": local-tableau for Pauli noise,
    /// local-dense when relaxation is present.
    std::string backend = "auto";
    std::optional<FidelityModel> renormalize_with;
    double exploration = 1.0;  // UCB1 constant
    double epsilon = 0.2;
    Palette palette = default_palette();

    size_t episode_cap() const { return 4 * max_qubits; }

    void validate() const {
        if (max_qubits == 0) throw UsageError("learning: max qubits must be positive");
        if (shots == 0) throw UsageError("learning: shots must be positive");
        if (episodes == 0) throw UsageError("learning: episode budget must be positive");
        if (epsilon < 0 || epsilon > 1) throw UsageError("learning: epsilon must lie in [0, 1]");
        if (exploration < 0) throw UsageError("learning: exploration constant must be non-negative");
        if (palette.blocks().empty()) throw UsageError("learning: empty palette");
        noise.validate();
    }
};

inline Json to_json(const LearningConfig& c) {
    Json palette = Json::array();
    for (const auto& b : c.palette.blocks()) palette.push_back(b.name);
    Json j{{"max_qubits", c.max_qubits},
           {"shots", c.shots},
           {"noise", to_spec(c.noise)},
           {"agent", to_string(c.agent)},
           {"episodes", c.episodes},
           {"seed", c.seed},
           {"routing", to_string(c.routing)},
           {"exact_threshold", c.exact_threshold},
           {"backend", c.backend},
           {"exploration", c.exploration},
           {"epsilon", c.epsilon},
           {"palette", palette}};
    if (c.renormalize_with) {
        const auto& m = *c.renormalize_with;
        j["renormalize"] = {{"c_q", m.c_q}, {"c_1", m.c_1}, {"c_2", m.c_2}, {"alpha", m.alpha}};
    }
    return j;
}

/// Legal moves, in a fixed order: additions by palette order, contractions
/// by leg pair, logical assignments by leg, then STOP.
///
/// - ADD_BLOCK keeps the network within the cap once the new block is joined
///   by one contraction; never offered at or above the cap.
/// - CONTRACT pairs two open non-logical legs and needs four open legs, so a
///   logical and a physical leg remain. Degenerate pairs are still offered.
/// - ASSIGN_LOGICAL picks a leg the group acts on with full rank, once.
/// - STOP needs one logical leg and between 1 and cap physical legs.
inline std::vector<Action> legal_actions(const GameState& s, const LearningConfig& cfg) {
    std::vector<Action> out;
    if (s.terminal()) return out;
    const size_t cap = cfg.max_qubits;
    const size_t open = s.open();
    const auto& blocks = cfg.palette.blocks();
    for (uint32_t i = 0; i < blocks.size(); ++i) {
        size_t legs = blocks[i].legs;
        bool ok = s.network.empty() ? legs - 1 <= cap : (s.qubits() < cap && open + legs - 2 - 1 <= cap);
        if (ok) out.push_back(add_block(i));
    }
    const auto& legs = s.network.open_legs();
    if (open >= 4) {
        for (size_t i = 0; i < legs.size(); ++i) {
            if (s.network.is_logical(legs[i])) continue;
            for (size_t j = i + 1; j < legs.size(); ++j)
                if (!s.network.is_logical(legs[j])) out.push_back(contract(legs[i], legs[j]));
        }
    }
    const size_t logical = s.network.logical_legs().size();
    if (logical == 0 && open >= 2) {
        for (auto leg : legs)
            if (leg_rank(s.network, leg) == 2) out.push_back(assign_logical(leg));
    }
    if (logical == 1 && open >= 2 && open - 1 <= cap) out.push_back(stop());
    return out;
}

namespace detail {

inline void finish_as_code(GameState& s, const LearningConfig& cfg) {
    if (s.network.logical_legs().size() != 1 || s.open() < 2 || s.qubits() > cfg.max_qubits) {
        s.note = "no one-logical code within the cap";
        return;
    }
    try {
        s.code = derive_code(s.network);
    } catch (const InvalidAssignment& e) {
        s.note = e.what();
    }
}

}  // namespace detail

/// Applies a legal action. A degenerate contraction ends the episode; hitting
/// the episode length cap ends it as truncated, still read as a code when the
/// network allows it.
inline GameState apply_action(const GameState& s, const Action& a, const LearningConfig& cfg) {
    if (s.terminal()) throw UsageError("apply_action: state is terminal");
    GameState t = s;
    t.history.push_back(a);
    switch (a.kind) {
        case ActionKind::AddBlock: t.network = s.network.with_block(cfg.palette.blocks().at(a.block)); break;
        case ActionKind::Contract:
            try {
                t.network = contract_pair(s.network, a.a, a.b);
            } catch (const DegenerateContraction& e) {
                t.outcome = Outcome::Degenerate;
                t.note = e.what();
                return t;
            }
            break;
        case ActionKind::AssignLogical: t.network = s.network.with_logical(a.a); break;
        case ActionKind::Stop:
            t.outcome = Outcome::Stopped;
            detail::finish_as_code(t, cfg);
            return t;
    }
    if (t.history.size() >= cfg.episode_cap()) {
        t.outcome = Outcome::Truncated;
        detail::finish_as_code(t, cfg);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Reward

/// Stabilizers in rref with each logical operator reduced against them, as text.
inline std::string canonical_key(const CheckMatrix& code) {
    auto r = rref(code.stabilizers);
    CheckMatrix c = code;
    c.stabilizers = r.basis;
    for (auto& p : c.logical_x) p = reduce(p, r);
    for (auto& p : c.logical_z) p = reduce(p, r);
    return to_text(c);
}

struct Score {
    double p_nd = 1.0;
    bool exact = false;
    bool cached = false;
    std::string error;  // non-empty when evaluation failed
};

/// Evaluates codes through the full protocol, caching by canonical key.
class CodeScorer {
  public:
    explicit CodeScorer(const LearningConfig& cfg) : cfg_(cfg) {
        std::string name = cfg.backend;
        if (name == "auto") name = cfg.noise.has_relaxation() ? "local-dense" : "local-tableau";
        backend_ = make_backend(name);
    }

    bool use_exact(const CheckMatrix& code) const {
        switch (cfg_.routing) {
            case EvalRouting::Exact: return true;
            case EvalRouting::Sampled: return false;
            case EvalRouting::Threshold: return code.n <= cfg_.exact_threshold;
        }
        return false;
    }

    Score score(const CheckMatrix& code) {
        std::string key = canonical_key(code);
        if (auto it = cache_.find(key); it != cache_.end()) {
            Score s = it->second;
            s.cached = true;
            return s;
        }
        Score s;
        s.exact = use_exact(code);
        try {
            EvaluateOptions opt;
            opt.protocol.shots = cfg_.shots;
            opt.protocol.exact = s.exact;
            opt.protocol.seed = derive_seed(cfg_.seed, {std::stoull(sha256_hex(key).substr(0, 15), nullptr, 16)});
            opt.renormalize_with = cfg_.renormalize_with;
            s.p_nd = evaluate(code, cfg_.noise, *backend_, opt).report.p_nd;
        } catch (const std::exception& e) {
            s.p_nd = 1.0;
            s.error = e.what();
        }
        cache_[key] = s;
        return s;
    }

    /// Seeds the cache from a previous run.
    void remember(const std::string& key, const Score& s) { cache_[key] = s; }
    size_t cache_size() const { return cache_.size(); }
    const BackendDescriptor& backend() const { return backend_->descriptor(); }

  private:
    const LearningConfig& cfg_;
    std::unique_ptr<Backend> backend_;
    std::map<std::string, Score> cache_;
};

/// -p_ND for a terminal state with a code, -1 otherwise. Always in [-1, 0].
inline double reward_of(const Score& s, bool has_code) {
    if (!has_code || !s.error.empty()) return -1.0;
    return -std::clamp(s.p_nd, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Agents

inline size_t pick_index(Rng& rng, size_t n) { return static_cast<size_t>(rng() % n); }

class Agent {
  public:
    virtual ~Agent() = default;
    /// Plays one episode from the empty network and returns its terminal state.
    virtual GameState play(Rng& rng) = 0;
    /// Reward for the episode just played.
    virtual void learn(double reward) = 0;
};

/// Uniform over the action kinds present, then uniform within the kind, so
/// the many contraction pairs do not crowd out additions and STOP.
inline const Action& rollout_choice(const std::vector<Action>& moves, Rng& rng) {
    std::array<std::vector<size_t>, 4> by_kind;
    for (size_t i = 0; i < moves.size(); ++i) by_kind[static_cast<size_t>(moves[i].kind)].push_back(i);
    std::vector<size_t> kinds;
    for (size_t k = 0; k < 4; ++k)
        if (!by_kind[k].empty()) kinds.push_back(k);
    const auto& pool = by_kind[kinds[pick_index(rng, kinds.size())]];
    return moves[pool[pick_index(rng, pool.size())]];
}

inline GameState random_rollout(GameState s, const LearningConfig& cfg, Rng& rng) {
    while (!s.terminal()) {
        auto moves = legal_actions(s, cfg);
        if (moves.empty()) {
            s.outcome = Outcome::Truncated;
            s.note = "no legal actions";
            break;
        }
        s = apply_action(s, rollout_choice(moves, rng), cfg);
    }
    return s;
}

class RandomAgent : public Agent {
  public:
    explicit RandomAgent(const LearningConfig& cfg) : cfg_(cfg) {}
    GameState play(Rng& rng) override { return random_rollout({}, cfg_, rng); }
    void learn(double) override {}

  private:
    const LearningConfig& cfg_;
};

/// Tabular Monte Carlo control over hashed states with epsilon-greedy moves.
/// Unvisited actions score 0, the best possible reward, so each is tried once.
class EpsilonGreedyAgent : public Agent {
  public:
    explicit EpsilonGreedyAgent(const LearningConfig& cfg) : cfg_(cfg) {}

    GameState play(Rng& rng) override {
        trail_.clear();
        GameState s;
        while (!s.terminal()) {
            auto moves = legal_actions(s, cfg_);
            if (moves.empty()) {
                s.outcome = Outcome::Truncated;
                break;
            }
            std::string key = state_key(s);
            size_t choice;
            if (uniform01(rng) < cfg_.epsilon) {
                choice = pick_index(rng, moves.size());
            } else {
                auto& row = q_[key];
                double best = -2;
                std::vector<size_t> ties;
                for (size_t i = 0; i < moves.size(); ++i) {
                    auto it = row.find(to_string(moves[i], cfg_.palette));
                    double v = it == row.end() ? 0.0 : it->second.value;
                    if (v > best + 1e-15) {
                        best = v;
                        ties.assign(1, i);
                    } else if (std::abs(v - best) <= 1e-15) {
                        ties.push_back(i);
                    }
                }
                choice = ties[pick_index(rng, ties.size())];
            }
            trail_.emplace_back(key, to_string(moves[choice], cfg_.palette));
            s = apply_action(s, moves[choice], cfg_);
        }
        return s;
    }

    void learn(double reward) override {
        for (const auto& [state, action] : trail_) {
            auto& e = q_[state][action];
            ++e.visits;
            e.value += (reward - e.value) / double(e.visits);
        }
    }

  private:
    struct Entry {
        size_t visits = 0;
        double value = 0;
    };
    static std::string state_key(const GameState& s) { return to_text(s.network) + "#" + std::to_string(s.history.size()); }

    const LearningConfig& cfg_;
    std::map<std::string, std::map<std::string, Entry>> q_;
    std::vector<std::pair<std::string, std::string>> trail_;
};

/// UCB1 tree search: each episode descends the tree, expands one untried
/// action, finishes with a random rollout and backs the reward up the path.
/// Selection scores a child by the best reward seen below it rather than the
/// mean: the game is single-player and deterministic under exact evaluation,
/// and the mean is dominated by the many invalid terminals.
class MctsAgent : public Agent {
  public:
    explicit MctsAgent(const LearningConfig& cfg) : cfg_(cfg) { nodes_.push_back(make_node(GameState{}, kNone)); }

    GameState play(Rng& rng) override {
        path_.assign(1, 0);
        size_t cur = 0;
        while (!nodes_[cur].state.terminal() && nodes_[cur].untried.empty() && !nodes_[cur].children.empty()) {
            cur = select(cur);
            path_.push_back(cur);
        }
        if (!nodes_[cur].state.terminal() && !nodes_[cur].untried.empty()) {
            auto& untried = nodes_[cur].untried;
            size_t i = pick_index(rng, untried.size());
            Action a = untried[i];
            untried.erase(untried.begin() + static_cast<std::ptrdiff_t>(i));
            GameState next = apply_action(nodes_[cur].state, a, cfg_);
            size_t child = nodes_.size();
            nodes_.push_back(make_node(std::move(next), cur));
            nodes_[cur].children.push_back(child);
            cur = child;
            path_.push_back(cur);
        }
        return random_rollout(nodes_[cur].state, cfg_, rng);
    }

    void learn(double reward) override {
        for (size_t n : path_) {
            ++nodes_[n].visits;
            nodes_[n].total += reward;
            nodes_[n].best = std::max(nodes_[n].best, reward);
        }
    }

    size_t tree_size() const { return nodes_.size(); }

  private:
    static constexpr size_t kNone = static_cast<size_t>(-1);
    struct Node {
        GameState state;
        size_t parent = kNone;
        std::vector<Action> untried;
        std::vector<size_t> children;
        size_t visits = 0;
        double total = 0;
        double best = -1;
    };

    Node make_node(GameState s, size_t parent) const {
        Node n;
        n.untried = legal_actions(s, cfg_);
        n.state = std::move(s);
        n.parent = parent;
        return n;
    }

    size_t select(size_t parent) const {
        const auto& p = nodes_[parent];
        double log_n = std::log(double(std::max<size_t>(p.visits, 1)));
        size_t best = p.children.front();
        double best_v = -1e300;
        for (size_t c : p.children) {
            const auto& ch = nodes_[c];
            double v = ch.visits == 0 ? 1e300 : ch.best + cfg_.exploration * std::sqrt(log_n / double(ch.visits));
            if (v > best_v) {
                best_v = v;
                best = c;
            }
        }
        return best;
    }

    const LearningConfig& cfg_;
    std::vector<Node> nodes_;
    std::vector<size_t> path_;
};

inline std::unique_ptr<Agent> make_agent(const LearningConfig& cfg) {
    switch (cfg.agent) {
        case AgentKind::Random: return std::make_unique<RandomAgent>(cfg);
        case AgentKind::EpsilonGreedy: return std::make_unique<EpsilonGreedyAgent>(cfg);
        case AgentKind::Mcts: return std::make_unique<MctsAgent>(cfg);
    }
    throw UsageError("unknown agent");
}

// ---------------------------------------------------------------------------
// Learning loop

struct EpisodeRecord {
    size_t episode = 0;
    std::vector<std::string> actions;
    Outcome outcome = Outcome::Running;
    std::string network;           // network text at the end of the episode
    std::optional<CheckMatrix> code;
    std::string key;               // canonical code key, empty without a code
    double p_nd = 1.0;
    double reward = -1.0;
    bool exact = false;
    bool cached = false;
    bool failed = false;  // evaluation raised; scored -1
    std::string note;

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

inline Json to_json(const EpisodeRecord& r) {
    Json j{{"episode", r.episode},
           {"actions", r.actions},
           {"outcome", to_string(r.outcome)},
           {"network", r.network},
           {"n", r.code ? r.code->n : 0},
           {"code", r.code ? to_text(*r.code) : ""},
           {"key", r.key},
           {"p_nd", r.p_nd},
           {"reward", r.reward},
           {"exact", r.exact},
           {"cached", r.cached},
           {"failed", r.failed},
           {"note", r.note}};
    return j;
}

inline EpisodeRecord episode_from_json(const Json& j) {
    EpisodeRecord r;
    r.episode = j.at("episode");
    r.actions = j.at("actions").get<std::vector<std::string>>();
    std::string o = j.at("outcome");
    for (auto k : {Outcome::Running, Outcome::Stopped, Outcome::Truncated, Outcome::Degenerate})
        if (o == to_string(k)) r.outcome = k;
    r.network = j.at("network");
    std::string code = j.at("code");
    if (!code.empty()) r.code = check_matrix_from_text(code);
    r.key = j.at("key");
    r.p_nd = j.at("p_nd");
    r.reward = j.at("reward");
    r.exact = j.at("exact");
    r.cached = j.at("cached");
    r.failed = j.at("failed");
    r.note = j.at("note");
    return r;
}

struct RankedCode {
    CheckMatrix code;
    std::string key;
    std::string network;  // first network that produced the code
    double p_nd = 1.0;
    bool exact = false;
    size_t first_episode = 0;
    size_t hits = 0;
};

struct LearningResult {
    /// Distinct codes sorted by p_ND (to 1e-12), then qubit count, then discovery.
    std::vector<RankedCode> ranking;
    /// Best code per physical qubit count, ascending.
    std::vector<RankedCode> best_by_qubits;
    std::vector<EpisodeRecord> episodes;
    /// The unencoded qubit under the same noise and evaluation.
    double bare_qubit_p_nd = 0;
    size_t resumed_episodes = 0;
};

inline Json to_json(const RankedCode& r) {
    return {{"n", r.code.n},
            {"k", r.code.k},
            {"p_nd", r.p_nd},
            {"exact", r.exact},
            {"first_episode", r.first_episode},
            {"hits", r.hits},
            {"network", r.network},
            {"code", to_text(r.code)}};
}

namespace detail {

inline long long pnd_bucket(double p) { return std::llround(p * 1e12); }

inline std::vector<RankedCode> rank_codes(const std::vector<EpisodeRecord>& episodes) {
    std::map<std::string, RankedCode> by_key;
    std::vector<std::string> order;
    for (const auto& e : episodes) {
        if (!e.code || e.failed) continue;
        auto [it, fresh] = by_key.try_emplace(e.key);
        if (fresh) {
            it->second = {*e.code, e.key, e.network, e.p_nd, e.exact, e.episode, 0};
            order.push_back(e.key);
        }
        ++it->second.hits;
    }
    std::vector<RankedCode> out;
    for (const auto& k : order) out.push_back(by_key.at(k));
    std::stable_sort(out.begin(), out.end(), [](const RankedCode& a, const RankedCode& b) {
        auto pa = pnd_bucket(a.p_nd), pb = pnd_bucket(b.p_nd);
        if (pa != pb) return pa < pb;
        if (a.code.n != b.code.n) return a.code.n < b.code.n;
        return a.first_episode < b.first_episode;
    });
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw IntegrityError("cannot write " + p.string());
    }
    std::filesystem::rename(tmp, p);
}

}  // namespace detail

inline Json to_json(const LearningResult& r, const LearningConfig& cfg) {
    Json ranking = Json::array(), groups = Json::array();
    for (const auto& c : r.ranking) ranking.push_back(to_json(c));
    for (const auto& c : r.best_by_qubits) groups.push_back(to_json(c));
    size_t stopped = 0, degenerate = 0, truncated = 0, failed = 0;
    for (const auto& e : r.episodes) {
        stopped += e.outcome == Outcome::Stopped;
        degenerate += e.outcome == Outcome::Degenerate;
        truncated += e.outcome == Outcome::Truncated;
        failed += e.failed;
    }
    return {{"config", to_json(cfg)},
            {"episodes", r.episodes.size()},
            {"outcomes", {{"stopped", stopped}, {"truncated", truncated}, {"degenerate", degenerate}, {"failed", failed}}},
            {"bare_qubit_p_nd", r.bare_qubit_p_nd},
            {"best", r.ranking.empty() ? Json(nullptr) : to_json(r.ranking.front())},
            {"best_by_qubits", groups},
            {"ranking", ranking}};
}

/// Runs the episode budget. With `out_dir`, writes `config.json`, appends one
/// line per episode to `episodes.log` as it goes, and writes `learning.json`
/// at the end. If `episodes.log` already exists for the same configuration,
/// the logged episodes are replayed from their recorded rewards (the agent is
/// deterministic) and the run continues after them.
inline LearningResult run_learning(const LearningConfig& cfg, const std::optional<std::filesystem::path>& out_dir = {}) {
    cfg.validate();
    CodeScorer scorer(cfg);
    LearningResult result;

    std::vector<EpisodeRecord> logged;
    std::filesystem::path log_path;
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        auto cfg_path = *out_dir / "config.json";
        std::string cfg_text = to_json(cfg).dump(2) + "\n";
        log_path = *out_dir / "episodes.log";
        if (std::filesystem::exists(log_path)) {
            if (!std::filesystem::exists(cfg_path) || detail::read_file(cfg_path) != cfg_text)
                throw UsageError("learning: " + out_dir->string() + " holds a run with a different configuration");
            std::istringstream is(detail::read_file(log_path));
            std::string line, kept;
            while (std::getline(is, line)) {
                if (is.eof()) break;  // a final line without newline was cut short
                try {
                    logged.push_back(episode_from_json(Json::parse(line)));
                } catch (const std::exception& e) {
                    throw IntegrityError("learning: unreadable line " + std::to_string(logged.size() + 1) + " in " +
                                         log_path.string() + ": " + e.what());
                }
                kept += line + "\n";
            }
            detail::write_file_atomic(log_path, kept);
            for (const auto& e : logged)
                if (!e.key.empty() && !e.cached) scorer.remember(e.key, {e.p_nd, e.exact, false, e.failed ? e.note : ""});
        } else {
            detail::write_file_atomic(cfg_path, cfg_text);
            detail::write_file_atomic(log_path, "");
        }
    }
    std::ofstream log;
    if (out_dir) log.open(log_path, std::ios::binary | std::ios::app);

    auto agent = make_agent(cfg);
    Rng rng = make_rng(cfg.seed, {0x1ea4});
    for (size_t ep = 0; ep < cfg.episodes; ++ep) {
        GameState end = agent->play(rng);
        EpisodeRecord rec;
        rec.episode = ep;
        for (const auto& a : end.history) rec.actions.push_back(to_string(a, cfg.palette));
        rec.outcome = end.outcome;
        rec.network = to_text(end.network);
        rec.note = end.note;
        rec.code = end.code;
        if (end.code) {
            rec.key = canonical_key(*end.code);
            Score s = scorer.score(*end.code);
            rec.p_nd = s.p_nd;
            rec.exact = s.exact;
            rec.cached = s.cached;
            if (!s.error.empty()) {
                rec.failed = true;
                rec.note = "evaluation failed: " + s.error;
            }
            rec.reward = reward_of(s, true);
        }
        agent->learn(rec.reward);
        if (ep < logged.size()) {
            EpisodeRecord expect = logged[ep];
            // Cache hits differ between a fresh and a resumed run only in the flag.
            expect.cached = rec.cached;
            if (!(expect == rec))
                throw IntegrityError("learning: episode " + std::to_string(ep) + " does not match the existing log");
            rec = logged[ep];
            ++result.resumed_episodes;
        } else if (log.is_open()) {
            log << to_json(rec).dump() << '\n';
            log.flush();
        }
        result.episodes.push_back(std::move(rec));
    }

    result.ranking = detail::rank_codes(result.episodes);
    std::map<size_t, RankedCode> best;
    for (const auto& r : result.ranking) best.try_emplace(r.code.n, r);
    for (auto& [n, r] : best) result.best_by_qubits.push_back(r);
    result.bare_qubit_p_nd = scorer.score(trivial_code()).p_nd;
    if (out_dir) detail::write_file_atomic(*out_dir / "learning.json", to_json(result, cfg).dump(2) + "\n");
    return result;
}

}  // namespace qlego

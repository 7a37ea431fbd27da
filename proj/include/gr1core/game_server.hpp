#pragma once

#include "gr1core/core_engine.hpp"
#include "gr1core/parser.hpp"
#include "gr1core/report.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

namespace gr1core {

struct MoveOutcome {
    bool accepted = false;
    std::vector<CoreStatement> core;
    std::vector<std::string> notes;
};

class GameSession {
public:
    enum class Mode { Counterstrategy, Sandbox };

    struct Turn {
        State state = 0;   // state the move was made from
        State move = 0;    // proposed outputs (output bits only)
        bool accepted = false;
    };

    GameSession(std::string id, std::string spec_id, std::shared_ptr<const GR1Spec> spec, const Config& cfg,
                std::uint64_t seed)
        : id_(std::move(id)), spec_id_(std::move(spec_id)), spec_(std::move(spec)), cfg_(cfg), rng_(seed) {
        Budget b = detail::call_budget(cfg_);
        Arena a(*spec_, {cfg_.state_cap, &b});
        auto real = check_realizability(a, &b);
        if (!real.realizable) {
            cs_ = extract_counterstrategy(a, std::nullopt, &b);
            if (!cs_->initial.empty()) {
                node_ = cs_->initial.front();
                current_ = cs_->nodes[node_].state;
                pending_ = cs_->nodes[node_].einput;
                goal_ = cs_->nodes[node_].goal;
                mode_ = Mode::Counterstrategy;
                return;
            }
            banner_ = "no counterstrategy initial state; sandbox mode";
        } else {
            banner_ = "specification is realizable; sandbox mode";
        }
        mode_ = Mode::Sandbox;
        goal_ = spec_->in_slot(Slot::SysGoal).empty() ? 0 : 1;
        bool found = false;
        for (State s = 0; s < a.size() && !found; ++s)
            if (a.env_init(a.inputs_of(s)) && a.sys_init(s)) {
                current_ = s;
                found = true;
            }
        if (!found) banner_ += "; no admissible initial state";
        choose_sandbox_inputs();
    }

    const std::string& id() const { return id_; }
    const std::string& spec_id() const { return spec_id_; }
    const GR1Spec& spec() const { return *spec_; }
    std::mutex& mutex() const { return mutex_; }
    Mode mode() const { return mode_; }
    State current() const { return current_; }
    State pending_inputs() const { return pending_; }
    int goal() const { return goal_; }
    int counterstrategy_node() const { return node_; }
    const std::vector<Turn>& history() const { return history_; }
    const std::string& banner() const { return banner_; }

    // Single-step check of a proposed output assignment; `dry` leaves the
    // session untouched.
    MoveOutcome try_move(const std::map<std::string, bool>& outputs, bool dry = false) {
        State proposed = 0;
        for (const auto& [name, val] : outputs) {
            int p = spec_->index_of(name);
            if (p < int(spec_->inputs.size())) throw MalformedMove("'" + name + "' is not an output proposition");
            if (val) proposed |= State(1) << p;
        }
        for (const auto& o : spec_->outputs)
            if (!outputs.count(o.name)) throw MalformedMove("missing output '" + o.name + "'");

        MoveOutcome out;
        auto cnf = to_cnf(move_formula(*spec_, current_, pending_, proposed));
        Budget b = detail::call_budget(cfg_);
        auto r = solve(cnf, {}, {-1, &b});
        State next = pending_ | proposed;
        if (r.sat()) {
            for (const auto* st : spec_->in_slot(Slot::SysTrans))
                if (!eval(st->expr, current_, next))
                    throw Error("internal error: accepted move violates statement " + std::to_string(st->id));
            out.accepted = true;
        } else {
            auto mus = extract_mus(cnf, {-1, &b});
            out.core = core_statements(*spec_, map_back(mus.core_groups, &out.notes));
        }
        if (dry) return out;
        history_.push_back({current_, proposed, out.accepted});
        if (out.accepted) advance(next);
        return out;
    }

private:
    void advance(State next) {
        current_ = next;
        if (mode_ == Mode::Counterstrategy) {
            const auto& succ = cs_->nodes[node_].succ;
            auto it = std::find_if(succ.begin(), succ.end(), [&](int q) { return cs_->nodes[q].state == next; });
            if (it != succ.end()) {
                node_ = *it;
                pending_ = cs_->nodes[node_].einput;
                goal_ = cs_->nodes[node_].goal;
                return;
            }
            mode_ = Mode::Sandbox;
            node_ = -1;
            banner_ = "move left the counterstrategy; continuing in sandbox mode";
        }
        choose_sandbox_inputs();
    }

    // Uniform choice among the inputs env_trans allows from the current state.
    void choose_sandbox_inputs() {
        Program env(spec_->exprs(Slot::EnvTrans));
        State all = full_mask(*spec_), in = input_mask(*spec_);
        std::vector<State> options;
        for (State x = 0; x <= in; ++x)
            if (env.run(current_, all, x, in) == Program::T) options.push_back(x);
        if (options.empty()) {
            banner_ += "; environment has no admissible move";
            pending_ = 0;
            return;
        }
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        pending_ = options[pick(rng_)];
    }

    std::string id_, spec_id_;
    std::shared_ptr<const GR1Spec> spec_;
    Config cfg_;
    std::mt19937_64 rng_;
    mutable std::mutex mutex_;
    std::optional<Counterstrategy> cs_;
    int node_ = -1;
    Mode mode_ = Mode::Sandbox;
    State current_ = 0, pending_ = 0;
    int goal_ = 0;
    std::vector<GameSession::Turn> history_;
    std::string banner_;
};

// Transport-independent request handling for the /api protocol.
class GameServer {
public:
    struct Response {
        int status = 200;
        std::string body;
    };

    // `resolver` serves `map <file>` lines of posted specifications.
    explicit GameServer(Config cfg = {}, std::uint64_t seed = 0, MapResolver resolver = {})
        : cfg_(cfg), seed_(seed), resolver_(std::move(resolver)), ids_(std::random_device{}()) {}

    // Returns the new session id.
    std::string create_session(const std::string& spec_text) {
        return create_session(std::make_shared<const GR1Spec>(parse_spec(spec_text, resolver_)));
    }

    std::string create_session(std::shared_ptr<const GR1Spec> spec) {
        std::unique_lock lock(mutex_);
        std::string spec_id = "spec-" + std::to_string(specs_.size() + 1);
        specs_[spec_id] = spec;
        std::string id = fresh_id();
        std::uint64_t seed = seed_ + sessions_.size();
        lock.unlock();
        auto session = std::make_shared<GameSession>(id, spec_id, spec, cfg_, seed);
        lock.lock();
        sessions_[id] = session;
        return id;
    }

    std::shared_ptr<GameSession> session(const std::string& id) const {
        std::shared_lock lock(mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw SessionNotFound(id);
        return it->second;
    }

    json snapshot(const std::string& id) const {
        auto s = session(id);
        std::lock_guard lock(s->mutex());
        return snapshot_of(*s);
    }

    json move(const std::string& id, const json& body, bool dry) {
        auto s = session(id);
        if (!body.is_object() || !body.contains("outputs") || !body["outputs"].is_object())
            throw MalformedMove("body must contain an 'outputs' object");
        std::map<std::string, bool> outputs;
        for (const auto& [k, v] : body["outputs"].items()) {
            if (!v.is_boolean()) throw MalformedMove("output '" + k + "' must be true or false");
            outputs[k] = v.get<bool>();
        }
        std::lock_guard lock(s->mutex());
        auto r = s->try_move(outputs, dry);
        json out{{"v", 1}, {"accepted", r.accepted}, {"dry", dry}, {"notes", r.notes}};
        json core = json::array();
        for (const auto& c : r.core)
            core.push_back({{"id", c.id},
                            {"text", c.text},
                            {"sentence_text", c.sentence_text},
                            {"span", {{"line", c.span.line}, {"col_begin", c.span.col_begin}, {"col_end", c.span.col_end}}}});
        out["core"] = core;
        out["snapshot"] = snapshot_of(*s);
        return out;
    }

    json map(const std::string& spec_id) const {
        std::shared_lock lock(mutex_);
        auto it = specs_.find(spec_id);
        if (it == specs_.end()) throw Error("no specification '" + spec_id + "'");
        json out{{"v", 1}, {"regions", json::array()}, {"adjacency", json::array()}};
        if (it->second->topology) {
            out["regions"] = it->second->topology->regions;
            for (const auto& [a, b] : it->second->topology->adjacency) out["adjacency"].push_back({a, b});
        }
        return out;
    }

    Response handle(const std::string& method, const std::string& path,
                    const std::map<std::string, std::string>& query, const std::string& body) {
        try {
            auto parts = split(path);
            if (parts.size() < 2 || parts[0] != "api") return error(404, "unknown endpoint");
            if (method == "POST" && parts.size() == 2 && parts[1] == "session") {
                auto j = json::parse(body);
                if (!j.contains("spec") || !j["spec"].is_string()) return error(400, "body must contain 'spec'");
                auto id = create_session(j["spec"].get<std::string>());
                return {200, json{{"v", 1}, {"session_id", id}, {"snapshot", snapshot(id)}}.dump()};
            }
            if (method == "GET" && parts.size() == 3 && parts[1] == "session") return {200, snapshot(parts[2]).dump()};
            if (method == "POST" && parts.size() == 4 && parts[1] == "session" && parts[3] == "move") {
                auto dry = query.find("dry");
                bool is_dry = dry != query.end() && (dry->second == "true" || dry->second == "1");
                return {200, move(parts[2], json::parse(body), is_dry).dump()};
            }
            if (method == "GET" && parts.size() == 3 && parts[1] == "map") return {200, map(parts[2]).dump()};
            return error(404, "unknown endpoint");
        } catch (const SessionNotFound& e) {
            return error(404, e.what());
        } catch (const json::exception& e) {
            return error(400, e.what());
        } catch (const Error& e) {
            return error(400, e.what());
        }
    }

private:
    json snapshot_of(const GameSession& s) const {
        const auto& spec = s.spec();
        auto names = spec.names();
        json state = json::object(), pending = json::object();
        for (int p = 0; p < spec.prop_count(); ++p) state[names[p]] = bool((s.current() >> p) & 1u);
        for (std::size_t p = 0; p < spec.inputs.size(); ++p) pending[names[p]] = bool((s.pending_inputs() >> p) & 1u);
        json goal = nullptr;
        if (s.goal() > 0 && !spec.in_slot(Slot::SysGoal).empty()) {
            const auto& g = sys_goal(spec, s.goal());
            goal = {{"id", g.id}, {"text", spec.sentence_text(g)}};
        }
        json history = json::array();
        for (const auto& t : s.history()) {
            json from = json::object(), move = json::object();
            for (int p = 0; p < spec.prop_count(); ++p) from[names[p]] = bool((t.state >> p) & 1u);
            for (int p = int(spec.inputs.size()); p < spec.prop_count(); ++p) move[names[p]] = bool((t.move >> p) & 1u);
            history.push_back({{"state", from}, {"move", move}, {"accepted", t.accepted}});
        }
        return {{"v", 1},
                {"session_id", s.id()},
                {"spec_id", s.spec_id()},
                {"mode", s.mode() == GameSession::Mode::Counterstrategy ? "counterstrategy" : "sandbox"},
                {"banner", s.banner()},
                {"state", state},
                {"pending_inputs", pending},
                {"goal", goal},
                {"counterstrategy_state", s.counterstrategy_node() >= 0 ? json(s.counterstrategy_node()) : json(nullptr)},
                {"history", history}};
    }

    static std::vector<std::string> split(const std::string& path) {
        std::vector<std::string> out;
        std::stringstream ss(path);
        std::string part;
        while (std::getline(ss, part, '/'))
            if (!part.empty()) out.push_back(part);
        return out;
    }

    static Response error(int status, const std::string& msg) { return {status, json{{"v", 1}, {"error", msg}}.dump()}; }

    std::string fresh_id() {
        std::uniform_int_distribution<std::uint64_t> d;
        std::ostringstream out;
        out << std::hex;
        for (int i = 0; i < 2; ++i) {
            auto v = d(ids_);
            for (int k = 60; k >= 0; k -= 4) out << ((v >> k) & 0xf);
        }
        return out.str();
    }

    Config cfg_;
    std::uint64_t seed_;
    MapResolver resolver_;
    mutable std::shared_mutex mutex_;
    std::mt19937_64 ids_;
    std::map<std::string, std::shared_ptr<GameSession>> sessions_;
    std::map<std::string, std::shared_ptr<const GR1Spec>> specs_;
};

} // namespace gr1core

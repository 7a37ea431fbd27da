#pragma once

#include "gr1core/cs_analysis.hpp"
#include "gr1core/sat.hpp"
#include "gr1core/unroller.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gr1core {

enum class Verdict { Synthesizable, Unsatisfiable, Unrealizable };
enum class FailureMode { Deadlock, Livelock };
enum class Method { SatUnroll, CounterstrategySat, IteratedRealizability };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Synthesizable: return "synthesizable";
    case Verdict::Unsatisfiable: return "unsatisfiable";
    case Verdict::Unrealizable: return "unrealizable";
    }
    return "?";
}
inline const char* to_string(FailureMode f) { return f == FailureMode::Deadlock ? "deadlock" : "livelock"; }
inline const char* to_string(Method m) {
    switch (m) {
    case Method::SatUnroll: return "sat-unroll";
    case Method::CounterstrategySat: return "counterstrategy-sat";
    case Method::IteratedRealizability: return "iterated-realizability";
    }
    return "?";
}

// Note strings with a fixed meaning.
inline const std::string kNotMeaningful = "possibly-not-meaningful";
inline const std::string kGroupMinimal = "group-minimal";

struct CoreStatement {
    int id = 0;
    std::string text;
    Span span;
    Slot slot = Slot::SysTrans;
    std::string sentence;      // sentence label
    std::string sentence_text; // what the user reads
    bool goal = false;
    bool topology = false;
    bool operator==(const CoreStatement&) const = default;
};

struct Diagnosis {
    Verdict verdict = Verdict::Synthesizable;
    std::optional<FailureMode> failure_mode;
    std::optional<int> livelocked_goal;                   // statement id of B_k
    std::optional<std::map<std::string, bool>> bad_init; // full losing initial state
    std::vector<CoreStatement> core;                      // ascending id
    std::optional<Method> method;
    std::optional<int> depth_used;
    std::vector<std::string> notes;
    bool operator==(const Diagnosis&) const = default;

    std::set<int> core_ids() const {
        std::set<int> out;
        for (const auto& c : core) out.insert(c.id);
        return out;
    }
    // Core projected to sentence labels, topology collapsed to one entry.
    std::set<std::string> core_sentences() const {
        std::set<std::string> out;
        for (const auto& c : core) out.insert(c.sentence);
        return out;
    }
    bool has_note(const std::string& n) const { return std::find(notes.begin(), notes.end(), n) != notes.end(); }
};

struct Config {
    int max_depth = 15;
    std::chrono::milliseconds budget{30000}; // per realizability or SAT call
    std::uint64_t state_cap = std::uint64_t(1) << 20;
    bool check_minimality = true;
    CycleOptions cycles;
};

namespace detail {

inline Budget call_budget(const Config& cfg) {
    return cfg.budget.count() > 0 ? Budget(cfg.budget) : Budget::unlimited();
}

inline std::map<std::string, bool> assignment(const GR1Spec& spec, State s) {
    std::map<std::string, bool> out;
    auto names = spec.names();
    for (int p = 0; p < spec.prop_count(); ++p) out[names[p]] = (s >> p) & 1u;
    return out;
}

inline MusResult mus_of(const std::vector<Conjunct>& conjuncts, const Config& cfg, bool& unsat) {
    auto cnf = to_cnf(conjuncts);
    Budget b = call_budget(cfg);
    auto r = solve(cnf, {}, {-1, &b});
    unsat = !r.sat();
    if (!unsat) return r;
    return extract_mus(cnf, {-1, &b});
}

} // namespace detail

// Projects provenance groups onto statements; synthetic groups become notes.
inline std::set<int> map_back(const std::vector<GroupKey>& groups, std::vector<std::string>* notes = nullptr) {
    std::set<int> ids;
    std::set<int> pins;
    std::vector<std::string> extra;
    for (const auto& g : groups) {
        switch (g.kind) {
        case GroupKind::Statement: ids.insert(g.statement); break;
        case GroupKind::StateAnchor: extra.push_back("core uses the anchored counterstrategy state"); break;
        case GroupKind::InputPin: pins.insert(g.step); break;
        case GroupKind::OutputPin: extra.push_back("core uses the proposed move"); break;
        }
    }
    if (!notes) return ids;
    if (!pins.empty()) {
        std::string n = pins.size() == 1 ? "core uses the environment inputs at step " : "core uses the environment inputs at steps ";
        int lo = *pins.begin(), hi = *pins.rbegin();
        if (pins.size() > 1 && hi - lo + 1 == int(pins.size())) n += std::to_string(lo) + "-" + std::to_string(hi);
        else {
            bool first = true;
            for (int p : pins) n += (first ? "" : ",") + std::to_string(p), first = false;
        }
        extra.push_back(n);
    }
    for (auto& n : extra)
        if (std::find(notes->begin(), notes->end(), n) == notes->end()) notes->push_back(n);
    return ids;
}

inline std::vector<CoreStatement> core_statements(const GR1Spec& spec, const std::set<int>& ids) {
    std::vector<CoreStatement> out;
    for (int id : ids) {
        const auto& st = spec.statement(id);
        out.push_back({st.id, st.text, st.span, st.slot, st.sentence, spec.sentence_text(st), st.slot == Slot::SysGoal,
                       st.topology});
    }
    return out;
}

struct Classification {
    Verdict verdict = Verdict::Synthesizable;
    std::optional<FailureMode> failure_mode;
    int goal = 0; // 1-based sys goal index for livelock, 0 otherwise
    bool joint_goals = false; // no single goal is lost from bad_init on its own
    std::optional<State> bad_init;
    std::optional<Counterstrategy> counterstrategy;
    bool vacuous = false;
};

namespace detail {

inline std::set<int> env_and_trans(const GR1Spec& spec) {
    std::set<int> keep;
    for (const auto& st : spec.statements)
        if (!is_sys(st.slot) || st.slot == Slot::SysTrans) keep.insert(st.id);
    return keep;
}

// Does sys lose from `s` when asked only for goal k?
inline bool loses_single_goal(const GR1Spec& spec, State s, int k, const Config& cfg, const Budget* b) {
    auto keep = env_and_trans(spec);
    keep.insert(sys_goal(spec, k).id);
    GR1Spec sub = statement_slice(spec, keep);
    Arena a(sub, {cfg.state_cap, b});
    return !winning_from(a, s, b);
}

} // namespace detail

// Deadlock when the environment can force a state with no legal system move
// even if every system goal is dropped; otherwise livelock on the lowest
// goal the environment can prevent by itself from the counterstrategy's
// initial state, preferring the goal the counterstrategy's cycles prevent.
inline Classification classify(const GR1Spec& spec, const Config& cfg = {}) {
    Budget b = detail::call_budget(cfg);
    Arena a(spec, {cfg.state_cap, &b});
    auto real = check_realizability(a, &b);
    Classification c;
    c.vacuous = real.vacuous;
    if (real.realizable) return c;
    c.bad_init = real.bad_init;
    auto sat = check_satisfiability(a, &b);
    if (!sat.satisfiable) {
        c.verdict = Verdict::Unsatisfiable;
        c.failure_mode = sat.deadlock ? FailureMode::Deadlock : FailureMode::Livelock;
        c.goal = sat.goal;
        return c;
    }
    c.verdict = Verdict::Unrealizable;
    const int ngoals = int(spec.in_slot(Slot::SysGoal).size());
    std::optional<Counterstrategy> cs;
    if (ngoals == 0) {
        cs = extract_counterstrategy(a, std::nullopt, &b);
        c.failure_mode = FailureMode::Deadlock;
    } else {
        std::set<int> keep = detail::env_and_trans(spec);
        for (const auto* st : spec.in_slot(Slot::SysInit)) keep.insert(st->id);
        GR1Spec safety = statement_slice(spec, keep);
        Arena sa(safety, {cfg.state_cap, &b});
        auto sreal = check_realizability(sa, &b);
        if (!sreal.realizable) {
            c.failure_mode = FailureMode::Deadlock;
            c.bad_init = sreal.bad_init;
            cs = extract_counterstrategy(sa, std::nullopt, &b);
        }
    }
    if (!cs) {
        cs = extract_counterstrategy(a, std::nullopt, &b);
        c.failure_mode = FailureMode::Livelock;
        State s0 = cs->nodes[cs->initial.front()].state;
        int pg = std::max(1, prevented_goal(*cs));
        if (detail::loses_single_goal(spec, s0, pg, cfg, &b)) {
            c.goal = pg;
        } else {
            for (int j = 1; j <= ngoals && c.goal == 0; ++j)
                if (j != pg && detail::loses_single_goal(spec, s0, j, cfg, &b)) c.goal = j;
            if (c.goal == 0) {
                c.goal = pg;
                c.joint_goals = true;
            }
        }
    }
    if (!cs->initial.empty()) c.bad_init = cs->nodes[cs->initial.front()].state;
    c.counterstrategy = std::move(cs);
    return c;
}

// Goals that iterated realizability should keep for this classification.
inline std::vector<int> iterate_goals(const GR1Spec& spec, const Classification& cls) {
    std::vector<int> out;
    if (cls.failure_mode != FailureMode::Livelock) return out;
    if (!cls.joint_goals) return {cls.goal};
    for (int j = 1; j <= int(spec.in_slot(Slot::SysGoal).size()); ++j) out.push_back(j);
    return out;
}

inline Diagnosis unsat_bmc(const GR1Spec& spec, int max_depth, FailureMode reason, int goal = 1,
                           const Config& cfg = {}) {
    Diagnosis d;
    d.verdict = Verdict::Unsatisfiable;
    d.failure_mode = reason;
    d.method = Method::SatUnroll;
    if (reason == FailureMode::Deadlock) {
        for (int depth = 0; depth <= max_depth; ++depth) {
            bool unsat = false;
            auto r = detail::mus_of(unroll_from_init(spec, depth), cfg, unsat);
            if (!unsat) continue;
            d.depth_used = depth;
            d.core = core_statements(spec, map_back(r.core_groups, &d.notes));
            return d;
        }
        throw DepthExhausted(max_depth);
    }
    auto conj = unroll_from_init(spec, max_depth);
    conj.push_back(goal_clause(spec, goal, max_depth));
    bool unsat = false;
    auto r = detail::mus_of(conj, cfg, unsat);
    if (!unsat) throw NotUnsatAtDepth(max_depth);
    d.depth_used = max_depth;
    d.livelocked_goal = sys_goal(spec, goal).id;
    d.core = core_statements(spec, map_back(r.core_groups, &d.notes));
    bool meaningful = std::any_of(d.core.begin(), d.core.end(),
                                  [](const CoreStatement& c) { return c.slot == Slot::SysTrans && !c.topology; });
    if (!meaningful) d.notes.push_back(kNotMeaningful);
    return d;
}

// Iterated realizability: drop sys_trans conjuncts in ascending id order while the
// reduced spec, started from bad_init and asked only for the given goals (or
// for nothing but safety when there are none), stays unsynthesizable.
inline Diagnosis unreal_iterate(const GR1Spec& spec, State bad_init, const std::vector<int>& goals,
                                const Config& cfg = {}) {
    std::set<int> env_ids;
    for (const auto& st : spec.statements)
        if (!is_sys(st.slot)) env_ids.insert(st.id);
    std::set<int> s;
    for (const auto* st : spec.in_slot(Slot::SysTrans)) s.insert(st->id);
    std::set<int> goal_ids;
    for (int k : goals) goal_ids.insert(sys_goal(spec, k).id);

    auto synthesizable = [&](const std::set<int>& trans) {
        std::set<int> keep = env_ids;
        keep.insert(trans.begin(), trans.end());
        keep.insert(goal_ids.begin(), goal_ids.end());
        GR1Spec sub = statement_slice(spec, keep);
        Budget b = detail::call_budget(cfg);
        Arena a(sub, {cfg.state_cap, &b});
        return winning_from(a, bad_init, &b);
    };

    if (synthesizable(s)) throw NotUnsynthesizable();
    std::set<int> all = s;
    for (int id : all) {
        std::set<int> trial = s;
        trial.erase(id);
        if (!synthesizable(trial)) s = std::move(trial);
    }

    Diagnosis d;
    d.verdict = Verdict::Unrealizable;
    d.failure_mode = goals.empty() ? FailureMode::Deadlock : FailureMode::Livelock;
    d.method = Method::IteratedRealizability;
    d.bad_init = detail::assignment(spec, bad_init);
    if (!goals.empty()) d.livelocked_goal = sys_goal(spec, goals.front()).id;
    s.insert(goal_ids.begin(), goal_ids.end());
    d.core = core_statements(spec, s);
    return d;
}

inline Diagnosis unreal_iterate(const GR1Spec& spec, State bad_init, int k, const Config& cfg = {}) {
    return unreal_iterate(spec, bad_init, k > 0 ? std::vector<int>{k} : std::vector<int>{}, cfg);
}

// Sum over weakly connected components of the longest shortest path.
inline int counterstrategy_diameter(const Counterstrategy& cs) {
    const int n = int(cs.size());
    std::vector<std::vector<int>> und(n);
    for (int q = 0; q < n; ++q)
        for (int t : cs.nodes[q].succ) {
            und[q].push_back(t);
            und[t].push_back(q);
        }
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (int q = 0; q < n; ++q) {
        if (comp[q] >= 0) continue;
        std::vector<int> st{q};
        comp[q] = ncomp;
        while (!st.empty()) {
            int u = st.back();
            st.pop_back();
            for (int v : und[u])
                if (comp[v] < 0) {
                    comp[v] = ncomp;
                    st.push_back(v);
                }
        }
        ++ncomp;
    }
    std::vector<int> diam(ncomp, 0);
    for (int q = 0; q < n; ++q) {
        std::vector<int> dist(n, -1);
        std::queue<int> work;
        dist[q] = 0;
        work.push(q);
        while (!work.empty()) {
            int u = work.front();
            work.pop();
            diam[comp[q]] = std::max(diam[comp[q]], dist[u]);
            for (int v : cs.nodes[u].succ)
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    work.push(v);
                }
        }
    }
    int sum = 0;
    for (int x : diam) sum += x;
    return sum;
}

// Counterstrategy-guided SAT cores. `depth` overrides the livelock unrolling depth.
inline Diagnosis unreal_bmc(const GR1Spec& spec, const Classification& cls, const Config& cfg = {},
                            std::optional<int> depth = {}) {
    if (!cls.counterstrategy) throw Error("unreal_bmc needs a counterstrategy");
    const auto& cs = *cls.counterstrategy;
    Diagnosis d;
    d.verdict = Verdict::Unrealizable;
    d.failure_mode = cls.failure_mode;
    d.method = Method::CounterstrategySat;
    std::set<int> ids;

    if (cls.failure_mode == FailureMode::Deadlock) {
        d.depth_used = 0;
        if (cs.initial.empty()) {
            // No system initial state fits the environment's first inputs.
            State x0 = cls.bad_init ? *cls.bad_init & input_mask(spec) : 0;
            std::vector<Conjunct> conj;
            for (const auto* st : spec.in_slot(Slot::SysInit)) conj.push_back({GroupKey::of(st->id, 0), 0, st->expr});
            conj.push_back({GroupKey::input_pin(0), 0, inputs_formula(spec, x0)});
            bool unsat = false;
            auto r = detail::mus_of(conj, cfg, unsat);
            if (unsat) ids = map_back(r.core_groups, &d.notes);
            d.notes.push_back("no system initial state is compatible with the environment's initial inputs");
        }
        for (int q : deadlocked_states(cs)) {
            bool unsat = false;
            auto r = detail::mus_of(deadlock_formula(spec, cs.nodes[q].state, cs.nodes[q].einput), cfg, unsat);
            if (!unsat) throw NotDeadlocked(q);
            auto part = map_back(r.core_groups, &d.notes);
            ids.insert(part.begin(), part.end());
        }
        d.core = core_statements(spec, ids);
        if (cls.bad_init) d.bad_init = detail::assignment(spec, *cls.bad_init);
        return d;
    }

    int k = cls.goal;
    int q0 = cs.initial.front();
    auto fallback = [&](const std::string& why) {
        auto it = unreal_iterate(spec, cs.nodes[q0].state, k, cfg);
        it.notes.insert(it.notes.begin(), why);
        return it;
    };
    if (cls.joint_goals) {
        auto it = unreal_iterate(spec, cs.nodes[q0].state, iterate_goals(spec, cls), cfg);
        it.livelocked_goal = sys_goal(spec, k).id;
        it.notes.insert(it.notes.begin(), "no single goal is prevented on its own; core keeps every goal");
        return it;
    }
    if (!is_countertrace(cs)) return fallback("counterstrategy is not a countertrace; used iterated realizability");
    std::vector<Cycle> cycles;
    try {
        cycles = preventing_cycles(cs, k, cfg.cycles);
    } catch (const CycleLimit&) {
        return fallback("preventing-cycle enumeration limit reached; used iterated realizability");
    } catch (const GoalNotPrevented&) {
        return fallback("no counterstrategy state is marked with the prevented goal; used iterated realizability");
    }
    int dd = depth ? *depth : std::max(cfg.max_depth, counterstrategy_diameter(cs));
    d.depth_used = dd;
    d.livelocked_goal = sys_goal(spec, k).id;
    for (const auto& c : cycles) {
        std::vector<State> inputs;
        auto at = std::find(c.begin(), c.end(), q0);
        if (at != c.end()) {
            for (std::size_t i = 0; i < c.size(); ++i)
                inputs.push_back(cs.gamma_x(c[(at - c.begin() + i) % c.size()]));
        } else {
            inputs = countertrace_inputs(cs, dd + 2);
        }
        bool unsat = false;
        auto r = detail::mus_of(livelock_formula(spec, k, inputs, cs.nodes[q0].state, dd), cfg, unsat);
        if (!unsat) {
            d.notes.push_back("goal reachable along a preventing cycle at depth " + std::to_string(dd) +
                              "; cycle skipped");
            continue;
        }
        auto part = map_back(r.core_groups, &d.notes);
        ids.insert(part.begin(), part.end());
    }
    if (ids.empty()) return fallback("no preventing cycle gave an unsatisfiable unrolling; used iterated realizability");
    d.core = core_statements(spec, ids);
    d.bad_init = detail::assignment(spec, cs.nodes[q0].state);
    bool meaningful = std::any_of(d.core.begin(), d.core.end(),
                                  [](const CoreStatement& c) { return c.slot == Slot::SysTrans && !c.topology; });
    if (!meaningful) d.notes.push_back(kNotMeaningful);
    return d;
}

// Statement-level check of a SAT-derived core: if the spec restricted to
// the core (plus environment assumptions, and the system initial
// conditions when the core was anchored at a counterstrategy state) stays
// unsynthesizable after dropping one member, the core is only group-minimal.
// The topology statements are dropped together.
inline void check_statement_minimality(const GR1Spec& spec, Diagnosis& d, const Config& cfg = {}) {
    std::set<int> support;
    for (const auto& st : spec.statements) {
        if (!is_sys(st.slot)) support.insert(st.id);
        if (d.verdict == Verdict::Unrealizable && st.slot == Slot::SysInit) support.insert(st.id);
    }
    if (d.livelocked_goal) support.insert(*d.livelocked_goal);
    auto ids = d.core_ids();
    auto unsynth = [&](const std::set<int>& core) {
        std::set<int> keep = support;
        keep.insert(core.begin(), core.end());
        GR1Spec sub = statement_slice(spec, keep);
        Budget b = detail::call_budget(cfg);
        Arena a(sub, {cfg.state_cap, &b});
        return !check_realizability(a, &b).realizable;
    };
    if (!unsynth(ids)) {
        d.notes.push_back("core alone does not reproduce the failure at statement level");
        return;
    }
    std::vector<std::set<int>> units;
    std::set<int> topo;
    for (int id : ids) {
        const auto& st = spec.statement(id);
        if (d.livelocked_goal && id == *d.livelocked_goal) continue;
        if (d.verdict == Verdict::Unrealizable && st.slot == Slot::SysInit) continue;
        if (st.topology) topo.insert(id);
        else units.push_back({id});
    }
    if (!topo.empty()) units.push_back(topo);
    for (const auto& u : units) {
        std::set<int> smaller;
        for (int id : ids)
            if (!u.count(id)) smaller.insert(id);
        if (unsynth(smaller)) {
            d.notes.push_back(kGroupMinimal);
            return;
        }
    }
}

// Full pipeline: classify, then the matching core algorithm.
inline Diagnosis diagnose(const GR1Spec& spec, const Config& cfg = {}) {
    auto cls = classify(spec, cfg);
    Diagnosis d;
    if (cls.verdict == Verdict::Synthesizable) {
        if (cls.vacuous) d.notes.push_back("no environment initial state is admissible; realizable vacuously");
        return d;
    }
    if (cls.verdict == Verdict::Unsatisfiable) {
        d = unsat_bmc(spec, cfg.max_depth, *cls.failure_mode, std::max(1, cls.goal), cfg);
        if (cls.bad_init) d.bad_init = detail::assignment(spec, *cls.bad_init);
    } else {
        d = unreal_bmc(spec, cls, cfg);
    }
    if (cfg.check_minimality && d.method != Method::IteratedRealizability) check_statement_minimality(spec, d, cfg);
    return d;
}

} // namespace gr1core

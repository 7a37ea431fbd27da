#pragma once

#include "gr1core/arena.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

namespace gr1core {

namespace detail {

inline StateSet set_and(const StateSet& a, const StateSet& b) {
    StateSet out(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) out[s] = a[s] && b[s];
    return out;
}

inline StateSet set_or(const StateSet& a, const StateSet& b) {
    StateSet out(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) out[s] = a[s] || b[s];
    return out;
}

inline StateSet set_not(const StateSet& a) {
    StateSet out(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) out[s] = !a[s];
    return out;
}

inline void check(const Budget* b, const char* phase) {
    if (b) b->check(phase);
}

} // namespace detail

// System winning states:
//   nu Z. and_j mu Y. or_i nu X. (B_j & cox Z) | cox Y | (!A_i & cox X)
inline StateSet winning_set(const Arena& a, const Budget* budget = nullptr) {
    using namespace detail;
    const auto& A = a.env_goals();
    const auto& B = a.sys_goals();
    StateSet z(a.size(), 1);
    for (;;) {
        StateSet cz = a.cox(z);
        StateSet znew(a.size(), 1);
        for (const auto& bj : B) {
            StateSet reach_goal = set_and(bj, cz);
            StateSet y(a.size(), 0);
            for (;;) {
                check(budget, "realizability fixpoint");
                StateSet start = set_or(reach_goal, a.cox(y));
                StateSet ynew(a.size(), 0);
                for (const auto& ai : A) {
                    StateSet not_a = set_not(ai);
                    StateSet x(a.size(), 1);
                    for (;;) {
                        StateSet xnew = set_or(start, set_and(not_a, a.cox(x)));
                        if (xnew == x) break;
                        x = std::move(xnew);
                    }
                    ynew = set_or(ynew, x);
                }
                if (ynew == y) break;
                y = std::move(ynew);
            }
            znew = set_and(znew, y);
        }
        if (znew == z) return z;
        z = std::move(znew);
    }
}

struct Realizability {
    bool realizable = false;
    bool vacuous = false;              // no input assignment satisfies env_init
    StateSet winning;
    std::vector<State> losing_inputs;  // x0 with no winning sys_init completion
    std::optional<State> bad_init;     // lowest losing x0, lowest sys_init completion
};

inline Realizability check_realizability(const Arena& a, const Budget* budget = nullptr) {
    Realizability r;
    r.winning = winning_set(a, budget);
    State nx = State(1) << a.spec().inputs.size();
    bool any_init = false;
    for (State x = 0; x < nx; ++x) {
        if (!a.env_init(x)) continue;
        any_init = true;
        bool won = false;
        for (State s = x; s < a.size() && !won; s += nx) won = a.sys_init(s) && r.winning[s];
        if (!won) r.losing_inputs.push_back(x);
    }
    r.vacuous = !any_init;
    r.realizable = r.losing_inputs.empty();
    if (!r.realizable) {
        State x = r.losing_inputs.front();
        State pick = x;
        for (State s = x; s < a.size(); s += nx)
            if (a.sys_init(s)) {
                pick = s;
                break;
            }
        r.bad_init = pick;
    }
    return r;
}

// Whether the system wins from one given full state.
inline bool winning_from(const Arena& a, State s, const Budget* budget = nullptr) {
    return winning_set(a, budget)[s] != 0;
}

struct Satisfiability {
    bool satisfiable = false;
    bool deadlock = false; // no infinite cooperative run exists at all
    int goal = 0;          // 1-based sys goal that no reachable cycle meets
};

// Cooperative check: one player controls X ∪ Y and looks for a reachable
// cycle meeting every env goal and every sys goal.
inline Satisfiability check_satisfiability(const Arena& a, const Budget* budget = nullptr) {
    const State n = a.size();
    auto successors = [&](State s, std::vector<State>& out) {
        out.clear();
        for (auto e = a.env_begin(s); e < a.env_end(s); ++e)
            for (auto k = a.succ_begin(e); k < a.succ_end(e); ++k) out.push_back(a.succ(k));
    };

    StateSet reach(n, 0);
    std::vector<State> stack, buf;
    for (State s = 0; s < n; ++s)
        if (a.sys_init(s) && a.env_init(a.inputs_of(s))) {
            reach[s] = 1;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        State s = stack.back();
        stack.pop_back();
        successors(s, buf);
        for (State t : buf)
            if (!reach[t]) {
                reach[t] = 1;
                stack.push_back(t);
            }
    }

    // Iterative Tarjan over reachable states.
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> index(n, kNone), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<State> scc_stack;
    std::uint32_t counter = 0;
    struct Frame {
        State s;
        std::vector<State> succ;
        std::size_t next;
    };
    const auto& A = a.env_goals();
    const auto& B = a.sys_goals();
    std::vector<char> goal_met(B.size(), 0);
    bool any_cycle = false;

    for (State root = 0; root < n; ++root) {
        if (!reach[root] || index[root] != kNone) continue;
        std::vector<Frame> frames;
        auto open = [&](State s) {
            index[s] = low[s] = counter++;
            scc_stack.push_back(s);
            on_stack[s] = 1;
            Frame f{s, {}, 0};
            successors(s, f.succ);
            frames.push_back(std::move(f));
        };
        open(root);
        while (!frames.empty()) {
            detail::check(budget, "satisfiability search");
            Frame& f = frames.back();
            if (f.next < f.succ.size()) {
                State t = f.succ[f.next++];
                if (index[t] == kNone) open(t);
                else if (on_stack[t]) low[f.s] = std::min(low[f.s], index[t]);
                continue;
            }
            State s = f.s;
            bool self_loop = std::find(f.succ.begin(), f.succ.end(), s) != f.succ.end();
            frames.pop_back();
            if (!frames.empty()) low[frames.back().s] = std::min(low[frames.back().s], low[s]);
            if (low[s] != index[s]) continue;
            std::vector<State> comp;
            State t;
            do {
                t = scc_stack.back();
                scc_stack.pop_back();
                on_stack[t] = 0;
                comp.push_back(t);
            } while (t != s);
            if (comp.size() == 1 && !self_loop) continue;
            any_cycle = true;
            auto meets = [&](const StateSet& g) {
                return std::any_of(comp.begin(), comp.end(), [&](State q) { return g[q] != 0; });
            };
            bool all = true;
            for (const auto& ai : A) all = all && meets(ai);
            for (std::size_t j = 0; j < B.size(); ++j) {
                bool m = meets(B[j]);
                if (m) goal_met[j] = 1;
                all = all && m;
            }
            if (all) return {true, false, 0};
        }
    }
    Satisfiability r;
    bool has_goals = !a.spec().in_slot(Slot::SysGoal).empty();
    if (!any_cycle || !has_goals) {
        r.deadlock = true;
        return r;
    }
    r.goal = 1;
    for (std::size_t j = 0; j < goal_met.size(); ++j)
        if (!goal_met[j]) {
            r.goal = int(j) + 1;
            break;
        }
    return r;
}

// Environment winning region as the dual fixpoint
//   mu Z. or_j nu Y. and_i mu X. (!B_j | epre Z) & epre Y & (A_i | epre X)
// keeping every level for strategy extraction.
struct EnvSolution {
    std::vector<StateSet> z;                  // z[0] = {}, z[r] grows with r
    std::vector<std::vector<StateSet>> y;     // y[r][j], r >= 1
    std::vector<std::vector<std::vector<int>>> xrank; // xrank[r][j * m + i][s], 0 = not in X
    std::vector<int> rank;                    // least r with s in z[r], 0 if winning for the system

    const StateSet& losing() const { return z.back(); }
};

inline EnvSolution solve_env(const Arena& a, const Budget* budget = nullptr) {
    using namespace detail;
    const auto& A = a.env_goals();
    const auto& B = a.sys_goals();
    const std::size_t m = A.size();
    EnvSolution sol;
    sol.z.push_back(StateSet(a.size(), 0));
    sol.y.emplace_back();
    sol.xrank.emplace_back();
    for (;;) {
        const StateSet& zprev = sol.z.back();
        StateSet ez = a.epre(zprev);
        std::vector<StateSet> ys;
        std::vector<std::vector<int>> ranks(B.size() * m);
        StateSet znew(a.size(), 0);
        for (std::size_t j = 0; j < B.size(); ++j) {
            StateSet esc = set_or(set_not(B[j]), ez);
            StateSet y(a.size(), 1);
            for (;;) {
                check(budget, "counterstrategy fixpoint");
                StateSet base = set_and(esc, a.epre(y));
                StateSet ynew(a.size(), 1);
                for (std::size_t i = 0; i < m; ++i) {
                    std::vector<int> rk(a.size(), 0);
                    StateSet x(a.size(), 0);
                    for (int l = 1;; ++l) {
                        StateSet xnew = set_and(base, set_or(A[i], a.epre(x)));
                        bool grew = false;
                        for (State s = 0; s < a.size(); ++s)
                            if (xnew[s] && !x[s]) {
                                rk[s] = l;
                                grew = true;
                            }
                        if (!grew) break;
                        x = std::move(xnew);
                    }
                    ynew = set_and(ynew, x);
                    ranks[j * m + i] = std::move(rk);
                }
                if (ynew == y) break;
                y = std::move(ynew);
            }
            znew = set_or(znew, y);
            ys.push_back(std::move(y));
        }
        if (znew == zprev) break;
        sol.z.push_back(std::move(znew));
        sol.y.push_back(std::move(ys));
        sol.xrank.push_back(std::move(ranks));
    }
    sol.rank.assign(a.size(), 0);
    for (std::size_t r = sol.z.size() - 1; r >= 1; --r)
        for (State s = 0; s < a.size(); ++s)
            if (sol.z[r][s]) sol.rank[s] = int(r);
    return sol;
}

// Explicit environment counterstrategy. Node ids are dense from 0 in
// breadth-first order from the initial nodes.
struct Counterstrategy {
    struct Node {
        State state = 0;   // gamma_X and gamma_Y together
        State einput = 0;  // delta_e, the next inputs chosen here
        int goal = 1;      // gamma_goals, 1-based
        std::vector<int> succ; // delta_s(q, delta_e(q)), ascending
        int level = 0, env_goal = 0; // strategy memory besides the goal
    };
    int num_inputs = 0;
    int num_props = 0;
    std::vector<Node> nodes;
    std::vector<int> initial;

    State in_mask() const { return (State(1) << num_inputs) - 1; }
    State gamma_x(int q) const { return nodes[q].state & in_mask(); }
    State gamma_y(int q) const { return nodes[q].state & ~in_mask(); }
    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline Counterstrategy build_counterstrategy(const Arena& a, const EnvSolution& sol, State x0) {
    const auto& A = a.env_goals();
    const auto& B = a.sys_goals();
    const int m = int(A.size());
    Counterstrategy cs;
    cs.num_inputs = int(a.spec().inputs.size());
    cs.num_props = a.props();

    using Key = std::tuple<State, int, int, int>; // state, r, j, i
    std::map<Key, int> ids;
    std::queue<Key> work;
    auto lowest_j = [&](State s, int r) {
        for (std::size_t j = 0; j < B.size(); ++j)
            if (sol.y[r][j][s]) return int(j);
        return 0;
    };
    auto intern = [&](Key k) {
        auto [it, fresh] = ids.try_emplace(k, int(cs.nodes.size()));
        if (fresh) {
            Counterstrategy::Node n;
            n.state = std::get<0>(k);
            n.goal = std::get<2>(k) + 1;
            n.level = std::get<1>(k);
            n.env_goal = std::get<3>(k);
            cs.nodes.push_back(n);
            work.push(k);
        }
        return it->second;
    };
    auto entry = [&](State t) {
        int r = sol.rank[t];
        return Key{t, r, lowest_j(t, r), 0};
    };

    State nx = State(1) << cs.num_inputs;
    for (State s = x0; s < a.size(); s += nx)
        if (a.sys_init(s) && sol.rank[s] > 0) cs.initial.push_back(intern(entry(s)));

    while (!work.empty()) {
        auto [s, r, j, i] = work.front();
        work.pop();
        int id = ids.at(Key{s, r, j, i});
        // Prefer repeating the current inputs, otherwise the lowest inputs.
        auto pick = [&](auto&& ok) -> std::optional<std::uint32_t> {
            std::optional<std::uint32_t> best;
            for (auto e = a.env_begin(s); e < a.env_end(s); ++e) {
                if (!ok(e)) continue;
                if (a.env_input(e) == a.inputs_of(s)) return e;
                if (!best || a.env_input(e) < a.env_input(*best)) best = e;
            }
            return best;
        };
        std::vector<Key> next;
        auto chosen = pick([&](std::uint32_t e) { return a.succ_begin(e) == a.succ_end(e); });
        if (!chosen) {
            if (B[j][s]) {
                chosen = pick([&](std::uint32_t e) { return a.forces(e, sol.z[r - 1]); });
                if (chosen)
                    for (auto k = a.succ_begin(*chosen); k < a.succ_end(*chosen); ++k) next.push_back(entry(a.succ(k)));
            } else if (A[i][s]) {
                chosen = pick([&](std::uint32_t e) { return a.forces(e, sol.y[r][j]); });
                if (chosen)
                    for (auto k = a.succ_begin(*chosen); k < a.succ_end(*chosen); ++k)
                        next.push_back(Key{a.succ(k), r, j, (i + 1) % m});
            } else {
                const auto& rk = sol.xrank[r][j * m + i];
                int l = rk[s];
                chosen = pick([&](std::uint32_t e) {
                    for (auto k = a.succ_begin(e); k < a.succ_end(e); ++k) {
                        int lt = rk[a.succ(k)];
                        if (lt == 0 || lt >= l) return false;
                    }
                    return true;
                });
                if (chosen)
                    for (auto k = a.succ_begin(*chosen); k < a.succ_end(*chosen); ++k)
                        next.push_back(Key{a.succ(k), r, j, i});
            }
        }
        if (!chosen) throw Error("internal error: no environment witness at a losing state");
        cs.nodes[id].einput = a.env_input(*chosen);
        std::vector<int> succ;
        for (const auto& k : next) succ.push_back(intern(k));
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        cs.nodes[id].succ = std::move(succ);
    }
    return cs;
}

} // namespace detail

// Counterstrategy from a losing initial input. When `x0` is not given every
// losing initial input is tried and the smallest automaton kept, preferring
// one whose first move repeats the initial input, then the lowest input.
inline Counterstrategy extract_counterstrategy(const Arena& a, std::optional<State> x0 = {},
                                               const Budget* budget = nullptr) {
    auto real = check_realizability(a, budget);
    if (real.realizable) throw SpecRealizable();
    auto sol = solve_env(a, budget);
    if (x0) return detail::build_counterstrategy(a, sol, *x0);

    constexpr std::size_t kMaxTries = 256;
    std::optional<Counterstrategy> best;
    State best_x = 0;
    auto score = [](const Counterstrategy& cs, State x) {
        bool sticky = !cs.initial.empty() && cs.nodes[cs.initial.front()].einput == x;
        return std::make_pair(cs.size(), sticky ? 0 : 1);
    };
    for (std::size_t n = 0; n < real.losing_inputs.size() && n < kMaxTries; ++n) {
        State x = real.losing_inputs[n];
        auto cs = detail::build_counterstrategy(a, sol, x);
        if (!best || score(cs, x) < score(*best, best_x)) {
            best = std::move(cs);
            best_x = x;
        }
    }
    return std::move(*best);
}

} // namespace gr1core

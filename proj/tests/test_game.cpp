#include "gr1core/gr1core.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace gr1core;

namespace {

std::string fixture(const std::string& name) { return std::string(GR1CORE_FIXTURES) + "/" + name; }

// Transitive closure of the counterstrategy graph restricted to `keep`.
std::vector<std::vector<char>> closure(const Counterstrategy& cs, const std::vector<char>& keep) {
    const int n = int(cs.size());
    std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
    for (int q = 0; q < n; ++q)
        if (keep[q])
            for (int t : cs.nodes[q].succ)
                if (keep[t]) r[q][t] = 1;
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
            if (r[a][k])
                for (int b = 0; b < n; ++b)
                    if (r[k][b]) r[a][b] = 1;
    return r;
}

// Every infinite play of the counterstrategy satisfies all environment goals
// and misses some system goal.
void expect_winning_for_env(const GR1Spec& spec, const Counterstrategy& cs) {
    const int n = int(cs.size());
    auto A = oracle::goals(spec, Slot::EnvGoal);
    auto B = oracle::goals(spec, Slot::SysGoal);
    auto all = closure(cs, std::vector<char>(n, 1));
    for (int q = 0; q < n; ++q) {
        if (!all[q][q]) continue;
        bool every_b = true;
        for (const auto& b : B) {
            bool met = false;
            for (int t = 0; t < n && !met; ++t) met = all[q][t] && all[t][q] && oracle::holds(b, cs.nodes[t].state, 0);
            every_b = every_b && met;
        }
        EXPECT_FALSE(every_b) << "a cycle through node " << q << " meets every system goal";
    }
    for (const auto& a : A) {
        std::vector<char> keep(n);
        for (int q = 0; q < n; ++q) keep[q] = !oracle::holds(a, cs.nodes[q].state, 0);
        auto r = closure(cs, keep);
        for (int q = 0; q < n; ++q) EXPECT_FALSE(r[q][q]) << "a cycle through node " << q << " avoids an env goal";
    }
}

void expect_well_formed(const GR1Spec& spec, const Arena& a, const Counterstrategy& cs) {
    auto win = winning_set(a);
    const State in_mask = input_mask(spec);
    const State ny = State(1) << spec.outputs.size();
    ASSERT_FALSE(cs.initial.empty() && cs.nodes.empty());
    for (const auto& node : cs.nodes) {
        EXPECT_FALSE(win[node.state]);
        EXPECT_TRUE(oracle::all_hold(spec, Slot::EnvTrans, node.state, node.einput));
        std::set<State> responses, succ;
        for (State y = 0; y < ny; ++y) {
            State t = node.einput | (y << spec.inputs.size());
            if (oracle::all_hold(spec, Slot::SysTrans, node.state, t)) responses.insert(t);
        }
        for (int q : node.succ) succ.insert(cs.nodes[q].state);
        EXPECT_EQ(succ, responses);
        EXPECT_EQ(node.einput & ~in_mask, 0u);
    }
    if (cs.initial.empty()) return;
    State x0 = cs.nodes[cs.initial.front()].state & in_mask;
    EXPECT_TRUE(oracle::all_hold(spec, Slot::EnvInit, x0));
    std::set<State> q0, expect;
    for (int q : cs.initial) q0.insert(cs.nodes[q].state);
    for (State y = 0; y < ny; ++y) {
        State s = x0 | (y << spec.inputs.size());
        if (oracle::all_hold(spec, Slot::SysInit, s)) expect.insert(s);
    }
    EXPECT_EQ(q0, expect);
}

} // namespace

TEST(Arena, MovesMatchTheTransitionRelation) {
    oracle::SpecGen gen(21);
    for (int t = 0; t < 30; ++t) {
        auto spec = gen.spec();
        Arena a(spec, {});
        const State nx = State(1) << spec.inputs.size(), ny = State(1) << spec.outputs.size();
        for (State s = 0; s < a.size(); ++s) {
            std::set<State> moves, expect;
            for (auto e = a.env_begin(s); e < a.env_end(s); ++e) {
                moves.insert(a.env_input(e));
                std::set<State> succ, resp;
                for (auto k = a.succ_begin(e); k < a.succ_end(e); ++k) succ.insert(a.succ(k));
                for (State y = 0; y < ny; ++y) {
                    State t2 = a.env_input(e) | (y << spec.inputs.size());
                    if (oracle::all_hold(spec, Slot::SysTrans, s, t2)) resp.insert(t2);
                }
                ASSERT_EQ(succ, resp);
            }
            for (State x = 0; x < nx; ++x)
                if (oracle::all_hold(spec, Slot::EnvTrans, s, x)) expect.insert(x);
            ASSERT_EQ(moves, expect);
        }
    }
}

TEST(Arena, StateCap) {
    auto spec = parse_spec_file(fixture("spec5.spec"));
    EXPECT_THROW(Arena(spec, {1000, nullptr}), StateSpaceTooLarge);
}

TEST(Game, WinningSetMatchesParityOracle) {
    oracle::SpecGen gen(22);
    oracle::RandomSpecOptions o;
    o.max_props = 7;
    o.max_env_goals = 2;
    int losing = 0;
    for (int t = 0; t < 80; ++t) {
        auto spec = gen.spec(o);
        Arena a(spec, {});
        oracle::GR1Oracle ref(spec);
        auto w = winning_set(a);
        for (State s = 0; s < a.size(); ++s) {
            ASSERT_EQ(bool(w[s]), ref.wins_from(s)) << "spec " << t << " state " << s << "\n" << to_source(spec);
            losing += !w[s];
        }
        EXPECT_EQ(check_realizability(a).realizable, ref.realizable()) << "spec " << t;
    }
    EXPECT_GT(losing, 0);
}

TEST(Game, EnvSolutionIsTheComplement) {
    oracle::SpecGen gen(23);
    for (int t = 0; t < 40; ++t) {
        auto spec = gen.spec();
        Arena a(spec, {});
        auto w = winning_set(a);
        auto env = solve_env(a);
        for (State s = 0; s < a.size(); ++s) {
            ASSERT_NE(bool(w[s]), bool(env.losing()[s]));
            EXPECT_EQ(env.rank[s] == 0, bool(w[s]));
        }
    }
}

TEST(Game, SatisfiabilityMatchesLassoOracle) {
    oracle::SpecGen gen(24);
    oracle::RandomSpecOptions o;
    o.max_props = 5;
    o.max_env_goals = 2;
    int unsat = 0;
    for (int t = 0; t < 150; ++t) {
        auto spec = gen.spec(o);
        Arena a(spec, {});
        auto sat = check_satisfiability(a);
        ASSERT_EQ(sat.satisfiable, oracle::cooperative_lasso(spec)) << "spec " << t << "\n" << to_source(spec);
        unsat += !sat.satisfiable;
        if (!sat.satisfiable && !sat.deadlock) {
            EXPECT_GE(sat.goal, 1);
        }
    }
    EXPECT_GT(unsat, 0);
}

TEST(Game, RealizabilityOfFixtures) {
    struct Case {
        const char* file;
        bool realizable;
    };
    for (auto c : {Case{"spec1.spec", false}, Case{"spec2.spec", false}, Case{"spec3.spec", false},
                   Case{"spec4.spec", false}, Case{"spec5.spec", false}, Case{"fig5_deadlock.spec", false},
                   Case{"fig6_livelock.spec", false}, Case{"twodoor.spec", false}}) {
        auto spec = parse_spec_file(fixture(c.file));
        Arena a(spec, {});
        EXPECT_EQ(check_realizability(a).realizable, c.realizable) << c.file;
    }
    // without the person constraint the hallway is easy
    auto spec = parse_spec_file(fixture("spec1.spec"));
    std::set<int> keep = spec.ids();
    keep.erase(2);
    auto sub = statement_slice(spec, keep);
    Arena a(sub, {});
    EXPECT_TRUE(check_realizability(a).realizable);
}

TEST(Game, VacuousEnvironment) {
    auto spec = parse_spec("[INPUT]\nx\n[OUTPUT]\ny\n[ENV_INIT]\nx & !x\n[SYS_TRANS]\nnext(y) & !next(y)\n");
    Arena a(spec, {});
    auto r = check_realizability(a);
    EXPECT_TRUE(r.realizable);
    EXPECT_TRUE(r.vacuous);
}

TEST(Game, BadInitIsTheLowestLosingInput) {
    auto spec = parse_spec("[INPUT]\nx\n[OUTPUT]\ny\nz\n[SYS_INIT]\n!y\n[SYS_TRANS]\nnext(x) -> next(y) & !next(y)\n");
    Arena a(spec, {});
    auto r = check_realizability(a);
    ASSERT_FALSE(r.realizable);
    EXPECT_EQ(r.losing_inputs, (std::vector<State>{0, 1}));
    EXPECT_EQ(*r.bad_init, 0u);
}

TEST(Counterstrategy, RandomSpecsGiveWellFormedEnvStrategies) {
    oracle::SpecGen gen(25);
    oracle::RandomSpecOptions o;
    o.max_props = 5;
    o.max_env_goals = 2;
    int checked = 0;
    for (int t = 0; t < 400 && checked < 60; ++t) {
        auto spec = gen.spec(o);
        Arena a(spec, {});
        if (check_realizability(a).realizable) {
            EXPECT_THROW(extract_counterstrategy(a), SpecRealizable);
            continue;
        }
        ++checked;
        auto cs = extract_counterstrategy(a);
        SCOPED_TRACE(to_source(spec));
        expect_well_formed(spec, a, cs);
        expect_winning_for_env(spec, cs);
    }
    EXPECT_EQ(checked, 60);
}

TEST(Counterstrategy, Spec4HasOneDeadlockedState) {
    auto spec = parse_spec_file(fixture("spec4.spec"));
    Arena a(spec, {});
    auto cs = extract_counterstrategy(a);
    ASSERT_EQ(cs.size(), 1u);
    State person = State(1) << spec.index_of("person");
    EXPECT_EQ(cs.nodes[0].einput, person);
    EXPECT_TRUE(cs.nodes[0].succ.empty());
    expect_well_formed(spec, a, cs);
}

TEST(Counterstrategy, ExplicitInitialInput) {
    auto spec = parse_spec_file(fixture("spec5.spec"));
    Arena a(spec, {});
    auto r = check_realizability(a);
    ASSERT_FALSE(r.losing_inputs.empty());
    for (State x : r.losing_inputs) {
        auto cs = extract_counterstrategy(a, x);
        ASSERT_FALSE(cs.initial.empty());
        EXPECT_EQ(cs.nodes[cs.initial.front()].state & input_mask(spec), x);
    }
}

#include "gr1core/sat.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gr1core;

namespace {

std::uint32_t mask_of(const CnfInstance& cnf, const std::vector<GroupKey>& groups) {
    std::uint32_t m = 0;
    for (const auto& g : groups) {
        auto it = std::find(cnf.groups.begin(), cnf.groups.end(), g);
        m |= std::uint32_t(1) << (it - cnf.groups.begin());
    }
    return m;
}

} // namespace

TEST(Solver, AgreesWithTruthTable) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 500; ++t) {
        auto cnf = oracle::random_cnf(rng, 8, 12);
        auto r = solve(cnf);
        bool expect = oracle::satisfiable(cnf.clauses, cnf.num_vars);
        ASSERT_EQ(r.sat(), expect) << "instance " << t;
        if (!r.sat()) continue;
        std::uint32_t a = 0;
        for (int v = 0; v < cnf.num_vars; ++v)
            if (r.model[v]) a |= std::uint32_t(1) << v;
        for (const auto& c : cnf.clauses) EXPECT_TRUE(oracle::clause_sat(c, a));
    }
}

TEST(Solver, FailedAssumptionsAreAConflictingSubset) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 300; ++t) {
        auto cnf = oracle::random_cnf(rng, 8, 6);
        std::vector<Lit> assume;
        for (int v = 1; v <= cnf.num_vars; ++v)
            if (rng() % 2) assume.push_back(rng() % 2 ? v : -v);
        auto with_units = cnf.clauses;
        for (Lit l : assume) with_units.push_back({l});
        auto r = solve(cnf, assume);
        ASSERT_EQ(r.sat(), oracle::satisfiable(with_units, cnf.num_vars));
        if (r.sat()) {
            for (Lit l : assume) EXPECT_EQ(r.model[std::abs(l) - 1], l > 0);
            continue;
        }
        auto core = cnf.clauses;
        for (Lit l : r.failed_assumptions) {
            EXPECT_NE(std::find(assume.begin(), assume.end(), l), assume.end());
            core.push_back({l});
        }
        EXPECT_FALSE(oracle::satisfiable(core, cnf.num_vars));
    }
}

TEST(Solver, IncrementalCallsStayCorrect) {
    Solver s(3);
    s.add_clause(Clause{1, 2});
    s.add_clause(Clause{-1, 3});
    std::vector<Lit> a{-2};
    EXPECT_EQ(s.solve(a), Solver::Result::Sat);
    EXPECT_TRUE(s.model_value(1));
    EXPECT_TRUE(s.model_value(3));
    std::vector<Lit> b{-2, -3};
    EXPECT_EQ(s.solve(b), Solver::Result::Unsat);
    EXPECT_EQ(s.solve({}), Solver::Result::Sat);
    s.add_clause(Clause{-3});
    s.add_clause(Clause{-2});
    EXPECT_EQ(s.solve({}), Solver::Result::Unsat);
}

TEST(Solver, EmptyClauseIsUnsat) {
    Solver s(1);
    s.add_clause(Clause{});
    EXPECT_EQ(s.solve({}), Solver::Result::Unsat);
}

TEST(Solver, ConflictLimit) {
    // pigeonhole 5 into 4 needs many conflicts
    const int P = 5, H = 4;
    Solver s(P * H);
    auto var = [&](int p, int h) { return p * H + h + 1; };
    for (int p = 0; p < P; ++p) {
        Clause c;
        for (int h = 0; h < H; ++h) c.push_back(var(p, h));
        s.add_clause(c);
    }
    for (int h = 0; h < H; ++h)
        for (int p = 0; p < P; ++p)
            for (int q = p + 1; q < P; ++q) s.add_clause(Clause{-var(p, h), -var(q, h)});
    EXPECT_THROW(s.solve({}, {1, nullptr}), ResourceLimit);
    EXPECT_EQ(s.solve({}), Solver::Result::Unsat);
}

TEST(Mus, MatchesPowerSetOracle) {
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int t = 0; checked < 150 && t < 5000; ++t) {
        auto cnf = oracle::random_cnf(rng, 5, 10);
        if (oracle::satisfiable(cnf.clauses, cnf.num_vars)) continue;
        ++checked;
        auto r = extract_mus(cnf);
        auto muses = oracle::all_muses(cnf);
        EXPECT_TRUE(muses.count(mask_of(cnf, r.core_groups))) << "instance " << t;
    }
    EXPECT_EQ(checked, 150);
}

TEST(Mus, ThrowsOnSatisfiable) {
    CnfInstance cnf;
    cnf.num_vars = 1;
    cnf.groups = {GroupKey::of(1, 0)};
    cnf.clauses = {{1}};
    cnf.clause_group = {0};
    EXPECT_THROW(extract_mus(cnf), NotUnsat);
}

TEST(Mus, PrefersLowerGroupsWhenSeveralCoresExist) {
    // groups 1 and 2 conflict, and so do groups 3 and 4
    CnfInstance cnf;
    cnf.num_vars = 2;
    cnf.groups = {GroupKey::of(1, 0), GroupKey::of(2, 0), GroupKey::of(3, 0), GroupKey::of(4, 0)};
    cnf.clauses = {{1}, {-1}, {2}, {-2}};
    cnf.clause_group = {0, 1, 2, 3};
    auto r = extract_mus(cnf);
    EXPECT_EQ(statements_of(r.core_groups), (std::set<int>{1, 2}));
}

TEST(Mus, SyntheticGroupsSortAfterStatements) {
    EXPECT_LT(GroupKey::of(99, 5), GroupKey::anchor());
    EXPECT_LT(GroupKey::anchor(), GroupKey::input_pin(0));
    EXPECT_LT(GroupKey::input_pin(7), GroupKey::output_pin(0));
    EXPECT_TRUE(GroupKey::input_pin(1).synthetic());
    EXPECT_FALSE(GroupKey::of(1, 0).synthetic());
}

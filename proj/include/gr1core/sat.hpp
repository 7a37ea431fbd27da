#pragma once

#include "gr1core/cnf.hpp"
#include "gr1core/error.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace gr1core {

struct SolveLimits {
    std::int64_t max_conflicts = -1; // negative: unlimited
    const Budget* budget = nullptr;
};

// Clause-learning SAT solver: two watched literals, first-UIP learning,
// assumptions as the first decisions, no restarts. Branching always takes
// the lowest unassigned variable with phase false, so runs are reproducible.
class Solver {
public:
    enum class Result { Sat, Unsat };

    using Limits = SolveLimits;

    explicit Solver(int num_vars = 0) { ensure_vars(num_vars); }

    int num_vars() const { return int(assign_.size()); }

    int new_var() {
        ensure_vars(num_vars() + 1);
        return num_vars();
    }

    void add_clause(std::span<const Lit> lits) {
        Clause c;
        for (Lit l : lits) {
            ensure_vars(std::abs(l));
            if (std::find(c.begin(), c.end(), -l) != c.end()) return;
            if (std::find(c.begin(), c.end(), l) == c.end()) c.push_back(l);
        }
        if (c.empty()) {
            trivially_unsat_ = true;
            return;
        }
        if (c.size() == 1) {
            units_.push_back(code(c[0]));
            return;
        }
        attach(encode(c), false);
    }

    Result solve(std::span<const Lit> assumptions = {}, Limits limits = {}) {
        failed_.clear();
        backtrack(0);
        if (trivially_unsat_) return Result::Unsat;
        for (int u : units_) {
            if (value(u) == kFalse) return Result::Unsat;
            if (value(u) == kUndef) enqueue(u, -1);
        }
        std::vector<int> assume;
        for (Lit l : assumptions) {
            ensure_vars(std::abs(l));
            assume.push_back(code(l));
        }
        std::int64_t conflicts = 0;
        std::vector<int> learnt;
        for (;;) {
            int confl = propagate();
            if (confl >= 0) {
                ++conflicts;
                if (limits.max_conflicts >= 0 && conflicts > limits.max_conflicts)
                    throw ResourceLimit("SAT conflict limit reached");
                if (limits.budget && (conflicts & 255) == 0) limits.budget->check("SAT search");
                if (level() == 0) return Result::Unsat;
                int bt = analyze(confl, learnt);
                backtrack(bt);
                if (learnt.size() == 1) {
                    units_.push_back(learnt[0]);
                    backtrack(0);
                    enqueue(learnt[0], -1);
                } else {
                    int ci = attach(learnt, true);
                    enqueue(learnt[0], ci);
                }
                continue;
            }
            int next = -1;
            while (level() < int(assume.size())) {
                int p = assume[level()];
                if (value(p) == kTrue) {
                    new_level();
                } else if (value(p) == kFalse) {
                    analyze_final(p);
                    return Result::Unsat;
                } else {
                    next = p;
                    break;
                }
            }
            if (next < 0) {
                while (cursor_ < num_vars() && assign_[cursor_] != kUndef) ++cursor_;
                if (cursor_ == num_vars()) {
                    model_ = assign_;
                    return Result::Sat;
                }
                next = 2 * cursor_ + 1; // negative phase
            }
            new_level();
            enqueue(next, -1);
        }
    }

    // Valid after Sat.
    bool model_value(int var) const { return model_[var - 1] == kTrue; }
    std::vector<bool> model() const {
        std::vector<bool> m;
        for (auto v : model_) m.push_back(v == kTrue);
        return m;
    }

    // After Unsat under assumptions: the assumption literals involved.
    const std::vector<Lit>& failed_assumptions() const { return failed_; }

private:
    static constexpr std::int8_t kTrue = 1, kFalse = 0, kUndef = 2;

    struct StoredClause {
        std::vector<int> lits;
        bool learnt;
    };

    static int code(Lit l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }
    static Lit decode(int c) { return (c & 1) ? -(c / 2 + 1) : (c / 2 + 1); }
    static int neg(int c) { return c ^ 1; }

    static std::vector<int> encode(const Clause& c) {
        std::vector<int> out;
        for (Lit l : c) out.push_back(code(l));
        return out;
    }

    void ensure_vars(int n) {
        if (n <= num_vars()) return;
        assign_.resize(n, kUndef);
        level_.resize(n, 0);
        reason_.resize(n, -1);
        seen_.resize(n, 0);
        watches_.resize(2 * n);
    }

    std::int8_t value(int c) const {
        auto a = assign_[c >> 1];
        if (a == kUndef) return kUndef;
        return (c & 1) ? std::int8_t(a ^ 1) : a;
    }

    int level() const { return int(trail_lim_.size()); }
    void new_level() { trail_lim_.push_back(int(trail_.size())); }

    void enqueue(int c, int reason) {
        int v = c >> 1;
        assign_[v] = (c & 1) ? kFalse : kTrue;
        level_[v] = level();
        reason_[v] = reason;
        trail_.push_back(c);
    }

    int attach(std::vector<int> lits, bool learnt) {
        int ci = int(clauses_.size());
        watches_[lits[0]].push_back(ci);
        watches_[lits[1]].push_back(ci);
        clauses_.push_back({std::move(lits), learnt});
        return ci;
    }

    void backtrack(int lvl) {
        if (level() <= lvl) return;
        for (int i = int(trail_.size()) - 1; i >= trail_lim_[lvl]; --i) {
            int v = trail_[i] >> 1;
            assign_[v] = kUndef;
            reason_[v] = -1;
            if (v < cursor_) cursor_ = v;
        }
        trail_.resize(trail_lim_[lvl]);
        trail_lim_.resize(lvl);
        qhead_ = std::min(qhead_, int(trail_.size()));
    }

    // Returns the index of a conflicting clause or -1.
    int propagate() {
        while (qhead_ < int(trail_.size())) {
            int false_lit = neg(trail_[qhead_++]);
            auto& ws = watches_[false_lit];
            std::size_t i = 0, j = 0;
            int confl = -1;
            for (; i < ws.size(); ++i) {
                int ci = ws[i];
                auto& c = clauses_[ci].lits;
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                if (value(c[0]) == kTrue) {
                    ws[j++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k) {
                    if (value(c[k]) != kFalse) {
                        std::swap(c[1], c[k]);
                        watches_[c[1]].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[j++] = ci;
                if (value(c[0]) == kFalse) {
                    confl = ci;
                    for (++i; i < ws.size(); ++i) ws[j++] = ws[i];
                    break;
                }
                enqueue(c[0], ci);
            }
            ws.resize(j);
            if (confl >= 0) {
                qhead_ = int(trail_.size());
                return confl;
            }
        }
        return -1;
    }

    int analyze(int confl, std::vector<int>& learnt) {
        learnt.assign(1, -1);
        int path = 0;
        int p = -1;
        int index = int(trail_.size()) - 1;
        do {
            const auto& c = clauses_[confl].lits;
            for (std::size_t j = (p == -1 ? 0 : 1); j < c.size(); ++j) {
                int q = c[j];
                int v = q >> 1;
                if (!seen_[v] && level_[v] > 0) {
                    seen_[v] = 1;
                    if (level_[v] >= level()) ++path;
                    else learnt.push_back(q);
                }
            }
            while (!seen_[trail_[index] >> 1]) --index;
            p = trail_[index];
            --index;
            confl = reason_[p >> 1];
            seen_[p >> 1] = 0;
            --path;
        } while (path > 0);
        learnt[0] = neg(p);

        int bt = 0;
        std::size_t max_i = 1;
        for (std::size_t i = 1; i < learnt.size(); ++i) {
            int lv = level_[learnt[i] >> 1];
            if (lv > bt) {
                bt = lv;
                max_i = i;
            }
        }
        if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
        for (std::size_t i = 1; i < learnt.size(); ++i) seen_[learnt[i] >> 1] = 0;
        return bt;
    }

    // `p` is an assumption found false; collect the assumptions implying ~p.
    void analyze_final(int p) {
        failed_.push_back(decode(p));
        if (level() == 0) return;
        seen_[p >> 1] = 1;
        for (int i = int(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
            int v = trail_[i] >> 1;
            if (!seen_[v]) continue;
            if (reason_[v] < 0) {
                if (level_[v] > 0) failed_.push_back(decode(trail_[i]));
            } else {
                const auto& c = clauses_[reason_[v]].lits;
                for (std::size_t j = 1; j < c.size(); ++j)
                    if (level_[c[j] >> 1] > 0) seen_[c[j] >> 1] = 1;
            }
            seen_[v] = 0;
        }
        seen_[p >> 1] = 0;
    }

    std::vector<StoredClause> clauses_;
    std::vector<std::vector<int>> watches_;
    std::vector<int> units_;
    std::vector<std::int8_t> assign_;
    std::vector<std::int8_t> model_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<char> seen_;
    std::vector<int> trail_;
    std::vector<int> trail_lim_;
    std::vector<Lit> failed_;
    int qhead_ = 0;
    int cursor_ = 0;
    bool trivially_unsat_ = false;
};

struct MusResult {
    enum class Status { Sat, Unsat } status = Status::Sat;
    std::vector<bool> model;             // Sat: index v-1 for variable v
    std::vector<GroupKey> core_groups;   // Unsat
    std::vector<Lit> failed_assumptions; // Unsat, for solve() with assumptions

    bool sat() const { return status == Status::Sat; }
};

inline MusResult solve(const CnfInstance& cnf, std::span<const Lit> assumptions = {},
                       Solver::Limits limits = {}) {
    Solver s(cnf.num_vars);
    for (const auto& c : cnf.clauses) s.add_clause(c);
    MusResult r;
    if (s.solve(assumptions, limits) == Solver::Result::Sat) {
        r.status = MusResult::Status::Sat;
        r.model = s.model();
    } else {
        r.status = MusResult::Status::Unsat;
        r.failed_assumptions = s.failed_assumptions();
    }
    return r;
}

// Group-minimal unsatisfiable subset by selector literals and deletion
// shrinking in ascending group order.
inline MusResult extract_mus(const CnfInstance& cnf, Solver::Limits limits = {}) {
    Solver s(cnf.num_vars);
    std::vector<int> order(cnf.groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return cnf.groups[a] < cnf.groups[b]; });

    std::vector<Lit> selector(cnf.groups.size());
    for (std::size_t g = 0; g < cnf.groups.size(); ++g) selector[g] = s.new_var();
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
        Clause c = cnf.clauses[i];
        c.push_back(-selector[cnf.clause_group[i]]);
        s.add_clause(c);
    }
    std::vector<int> group_of_selector(s.num_vars() + 1, -1);
    for (std::size_t g = 0; g < selector.size(); ++g) group_of_selector[selector[g]] = int(g);

    // position in `order` for sorting cores
    std::vector<int> rank(cnf.groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = int(i);
    auto by_rank = [&](int a, int b) { return rank[a] < rank[b]; };

    auto try_groups = [&](const std::vector<int>& groups, std::vector<int>& core_out) {
        std::vector<Lit> assume;
        for (int g : groups) assume.push_back(selector[g]);
        if (s.solve(assume, limits) == Solver::Result::Sat) return false;
        core_out.clear();
        for (Lit l : s.failed_assumptions()) core_out.push_back(group_of_selector[std::abs(l)]);
        std::sort(core_out.begin(), core_out.end(), by_rank);
        return true;
    };

    std::vector<int> core;
    if (!try_groups(order, core)) throw NotUnsat();

    std::size_t i = 0;
    std::vector<int> reduced;
    while (i < core.size()) {
        std::vector<int> trial;
        for (std::size_t j = 0; j < core.size(); ++j)
            if (j != i) trial.push_back(core[j]);
        if (try_groups(trial, reduced)) core = reduced;
        else ++i;
    }

    MusResult r;
    r.status = MusResult::Status::Unsat;
    for (int g : core) r.core_groups.push_back(cnf.groups[g]);
    return r;
}

// Statement ids named by a set of groups (synthetic groups dropped).
inline std::set<int> statements_of(const std::vector<GroupKey>& groups) {
    std::set<int> out;
    for (const auto& g : groups)
        if (!g.synthetic()) out.insert(g.statement);
    return out;
}

} // namespace gr1core

#pragma once

#include "gr1core/expr.hpp"

#include <algorithm>
#include <compare>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace gr1core {

// Literals use DIMACS conventions: variable v >= 1, negative means negated.
using Lit = int;
using Clause = std::vector<Lit>;

struct TimedAtom {
    int prop = 0;
    int step = 0;
    auto operator<=>(const TimedAtom&) const = default;
};

// Provenance of a clause. Statement groups come first in the ordering, so
// MUS shrinking visits them in ascending statement id.
enum class GroupKind : int { Statement = 0, StateAnchor = 1, InputPin = 2, OutputPin = 3 };

struct GroupKey {
    GroupKind kind = GroupKind::Statement;
    int statement = 0; // statement id for Statement groups, otherwise 0
    int step = 0;
    auto operator<=>(const GroupKey&) const = default;

    bool synthetic() const { return kind != GroupKind::Statement; }

    static GroupKey of(int statement, int step) { return {GroupKind::Statement, statement, step}; }
    static GroupKey anchor() { return {GroupKind::StateAnchor, 0, 0}; }
    static GroupKey input_pin(int step) { return {GroupKind::InputPin, 0, step}; }
    static GroupKey output_pin(int step) { return {GroupKind::OutputPin, 0, step}; }
};

inline std::string to_string(const GroupKey& g) {
    switch (g.kind) {
    case GroupKind::Statement: return "s" + std::to_string(g.statement) + "@" + std::to_string(g.step);
    case GroupKind::StateAnchor: return "state-anchor";
    case GroupKind::InputPin: return "env-input@" + std::to_string(g.step);
    case GroupKind::OutputPin: return "move@" + std::to_string(g.step);
    }
    return "?";
}

// One conjunct of an unrolling: atom (p, offset) inside `expr` denotes p at
// time step + offset.
struct Conjunct {
    GroupKey group;
    int step = 0;
    Expr expr;
};

struct CnfInstance {
    int num_vars = 0;
    std::map<TimedAtom, int> atom_vars;
    std::vector<Clause> clauses;
    std::vector<int> clause_group; // index into groups
    std::vector<GroupKey> groups;

    int var_of(TimedAtom a) const {
        auto it = atom_vars.find(a);
        return it == atom_vars.end() ? 0 : it->second;
    }

    std::vector<int> clauses_of(int group) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < clauses.size(); ++i)
            if (clause_group[i] == group) out.push_back(int(i));
        return out;
    }
};

namespace detail {

// Negation normal form with literals already resolved to solver variables.
struct NNode {
    enum Kind { True, False, Lit, And, Or } kind = True;
    int lit = 0;
    std::vector<NNode> kids;
};

class Clausifier {
public:
    explicit Clausifier(CnfInstance& cnf) : cnf_(cnf) {}

    void add(const Conjunct& c) {
        int g = group_index(c.group);
        NNode n = nnf(c.expr, c.step, true);
        std::vector<Clause> defs;
        auto cls = clausify(n, defs);
        for (auto& cl : defs) push(std::move(cl), g);
        for (auto& cl : cls) push(std::move(cl), g);
    }

private:
    static constexpr std::size_t kProductCap = 64;

    int group_index(const GroupKey& k) {
        auto it = std::find(cnf_.groups.begin(), cnf_.groups.end(), k);
        if (it != cnf_.groups.end()) return int(it - cnf_.groups.begin());
        cnf_.groups.push_back(k);
        return int(cnf_.groups.size()) - 1;
    }

    void push(Clause cl, int g) {
        cnf_.clauses.push_back(std::move(cl));
        cnf_.clause_group.push_back(g);
    }

    int var(int prop, int step) {
        auto [it, fresh] = cnf_.atom_vars.try_emplace(TimedAtom{prop, step}, 0);
        if (fresh) it->second = ++cnf_.num_vars;
        return it->second;
    }

    NNode nnf(const Expr& e, int step, bool pos) {
        switch (e->op) {
        case Op::Const: return {(e->value == pos) ? NNode::True : NNode::False, 0, {}};
        case Op::Atom: {
            int v = var(e->prop, step + e->offset);
            return {NNode::Lit, pos ? v : -v, {}};
        }
        case Op::Not: return nnf(e->kids[0], step, !pos);
        case Op::And:
        case Op::Or: {
            bool is_and = (e->op == Op::And) == pos;
            NNode out{is_and ? NNode::And : NNode::Or, 0, {}};
            for (const auto& k : e->kids) out.kids.push_back(nnf(k, step, pos));
            return out;
        }
        case Op::Implies: {
            const auto& a = e->kids[0];
            const auto& b = e->kids[1];
            if (pos) return {NNode::Or, 0, {nnf(a, step, false), nnf(b, step, true)}};
            return {NNode::And, 0, {nnf(a, step, true), nnf(b, step, false)}};
        }
        case Op::Iff: {
            const auto& a = e->kids[0];
            const auto& b = e->kids[1];
            if (pos)
                return {NNode::And,
                        0,
                        {NNode{NNode::Or, 0, {nnf(a, step, false), nnf(b, step, true)}},
                         NNode{NNode::Or, 0, {nnf(a, step, true), nnf(b, step, false)}}}};
            return {NNode::And,
                    0,
                    {NNode{NNode::Or, 0, {nnf(a, step, true), nnf(b, step, true)}},
                     NNode{NNode::Or, 0, {nnf(a, step, false), nnf(b, step, false)}}}};
        }
        }
        return {};
    }

    static bool merge_into(Clause& out, const Clause& a, const Clause& b) {
        out = a;
        for (Lit l : b) {
            if (std::find(out.begin(), out.end(), -l) != out.end()) return false; // tautology
            if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
        }
        return true;
    }

    // Direct distribution while products stay small; larger disjuncts get a
    // one-sided definition literal (aux -> disjunct), which preserves
    // satisfiability because the disjunct occurs positively.
    std::vector<Clause> clausify(const NNode& n, std::vector<Clause>& defs) {
        switch (n.kind) {
        case NNode::True: return {};
        case NNode::False: return {Clause{}};
        case NNode::Lit: return {Clause{n.lit}};
        case NNode::And: {
            std::vector<Clause> out;
            for (const auto& k : n.kids) {
                auto part = clausify(k, defs);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        }
        case NNode::Or: {
            std::vector<Clause> acc{Clause{}};
            for (const auto& k : n.kids) {
                auto part = clausify(k, defs);
                if (acc.size() * part.size() > kProductCap && part.size() > 1) {
                    int aux = ++cnf_.num_vars;
                    for (auto& cl : part) {
                        cl.insert(cl.begin(), -aux);
                        defs.push_back(std::move(cl));
                    }
                    part = {Clause{aux}};
                }
                std::vector<Clause> next;
                for (const auto& a : acc)
                    for (const auto& b : part) {
                        Clause m;
                        if (merge_into(m, a, b)) next.push_back(std::move(m));
                    }
                acc = std::move(next);
            }
            return acc;
        }
        }
        return {};
    }

    CnfInstance& cnf_;
};

} // namespace detail

// Equisatisfiable CNF; each clause is tagged with the group of the conjunct
// that produced it, definitional clauses included.
inline CnfInstance to_cnf(const std::vector<Conjunct>& conjuncts) {
    CnfInstance cnf;
    detail::Clausifier c(cnf);
    for (const auto& cj : conjuncts) c.add(cj);
    return cnf;
}

// DIMACS with group membership as `c g <group> <clause-index>` comments.
inline void write_dimacs(std::ostream& out, const CnfInstance& cnf) {
    for (std::size_t g = 0; g < cnf.groups.size(); ++g)
        out << "c group " << g << " " << to_string(cnf.groups[g]) << "\n";
    for (const auto& [a, v] : cnf.atom_vars) out << "c var " << v << " p" << a.prop << "@" << a.step << "\n";
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i) out << "c g " << cnf.clause_group[i] << " " << i << "\n";
    out << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
    for (const auto& cl : cnf.clauses) {
        for (Lit l : cl) out << l << " ";
        out << "0\n";
    }
}

} // namespace gr1core

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gr1core {

// Boolean expressions over atoms `p` (offset 0) and `next(p)` (offset 1).
// Propositions are referenced by their index in the owning spec; inputs come
// first, outputs after. Nodes are immutable and freely shared.
enum class Op : std::uint8_t { Const, Atom, Not, And, Or, Implies, Iff };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Const;
    bool value = false; // Const
    int prop = -1;      // Atom
    int offset = 0;     // Atom: 0 = current step, 1 = next step
    std::vector<Expr> kids;
};

inline Expr constant(bool b) {
    static const Expr t = std::make_shared<const Node>(Node{Op::Const, true, -1, 0, {}});
    static const Expr f = std::make_shared<const Node>(Node{Op::Const, false, -1, 0, {}});
    return b ? t : f;
}

inline Expr atom(int prop, int offset = 0) {
    return std::make_shared<const Node>(Node{Op::Atom, false, prop, offset, {}});
}

inline Expr negate(Expr e) {
    return std::make_shared<const Node>(Node{Op::Not, false, -1, 0, {std::move(e)}});
}

inline Expr literal(int prop, bool positive, int offset = 0) {
    return positive ? atom(prop, offset) : negate(atom(prop, offset));
}

inline Expr nary(Op op, std::vector<Expr> kids) {
    if (kids.empty()) return constant(op == Op::And);
    if (kids.size() == 1) return kids.front();
    return std::make_shared<const Node>(Node{op, false, -1, 0, std::move(kids)});
}

inline Expr conj(std::vector<Expr> kids) { return nary(Op::And, std::move(kids)); }
inline Expr disj(std::vector<Expr> kids) { return nary(Op::Or, std::move(kids)); }

inline Expr implies(Expr a, Expr b) {
    return std::make_shared<const Node>(Node{Op::Implies, false, -1, 0, {std::move(a), std::move(b)}});
}

inline Expr iff(Expr a, Expr b) {
    return std::make_shared<const Node>(Node{Op::Iff, false, -1, 0, {std::move(a), std::move(b)}});
}

// Shifts every atom by `by` steps. Used to distribute next() inward.
inline Expr shift(const Expr& e, int by) {
    if (by == 0) return e;
    if (e->op == Op::Const) return e;
    if (e->op == Op::Atom) return atom(e->prop, e->offset + by);
    Node n = *e;
    for (auto& k : n.kids) k = shift(k, by);
    return std::make_shared<const Node>(std::move(n));
}

inline int max_offset(const Expr& e) {
    if (e->op == Op::Atom) return e->offset;
    int m = 0;
    for (const auto& k : e->kids) m = std::max(m, max_offset(k));
    return m;
}

inline void for_each_atom(const Expr& e, const std::function<void(int prop, int offset)>& f) {
    if (e->op == Op::Atom) {
        f(e->prop, e->offset);
        return;
    }
    for (const auto& k : e->kids) for_each_atom(k, f);
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (a->op != b->op || a->value != b->value || a->prop != b->prop || a->offset != b->offset ||
        a->kids.size() != b->kids.size())
        return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!structurally_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

// Two-valued evaluation. Bit i of `cur` / `nxt` is proposition i.
inline bool eval(const Expr& e, std::uint32_t cur, std::uint32_t nxt) {
    switch (e->op) {
    case Op::Const: return e->value;
    case Op::Atom: return (((e->offset == 0 ? cur : nxt) >> e->prop) & 1u) != 0;
    case Op::Not: return !eval(e->kids[0], cur, nxt);
    case Op::And:
        for (const auto& k : e->kids)
            if (!eval(k, cur, nxt)) return false;
        return true;
    case Op::Or:
        for (const auto& k : e->kids)
            if (eval(k, cur, nxt)) return true;
        return false;
    case Op::Implies: return !eval(e->kids[0], cur, nxt) || eval(e->kids[1], cur, nxt);
    case Op::Iff: return eval(e->kids[0], cur, nxt) == eval(e->kids[1], cur, nxt);
    }
    return false;
}

// Prints in the textual input syntax, fully parenthesizing binary operators.
inline std::string to_string(const Expr& e, const std::vector<std::string>& names) {
    auto name = [&](int p) { return p >= 0 && p < int(names.size()) ? names[p] : "p" + std::to_string(p); };
    switch (e->op) {
    case Op::Const: return e->value ? "TRUE" : "FALSE";
    case Op::Atom: return e->offset == 0 ? name(e->prop) : "next(" + name(e->prop) + ")";
    case Op::Not: return "!" + to_string(e->kids[0], names);
    case Op::And:
    case Op::Or: {
        std::string out = "(";
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
            if (i) out += e->op == Op::And ? " & " : " | ";
            out += to_string(e->kids[i], names);
        }
        return out + ")";
    }
    case Op::Implies: return "(" + to_string(e->kids[0], names) + " -> " + to_string(e->kids[1], names) + ")";
    case Op::Iff: return "(" + to_string(e->kids[0], names) + " <-> " + to_string(e->kids[1], names) + ")";
    }
    return "?";
}

// Flattened conjunction for fast three-valued evaluation over partially known
// assignments (used when enumerating game moves). Holds scratch state, so a
// Program must not be run from two threads at once.
class Program {
public:
    enum : std::uint8_t { F = 0, T = 1, U = 2 };

    Program() = default;
    explicit Program(const std::vector<Expr>& conjuncts) {
        std::vector<int> roots;
        for (const auto& c : conjuncts) roots.push_back(compile(c));
        root_ = emit({Op::And, 0, 0, int(args_.size()), int(roots.size())});
        args_.insert(args_.end(), roots.begin(), roots.end());
        vals_.resize(code_.size());
    }

    // cur_known / nxt_known select which bits of cur / nxt are meaningful.
    std::uint8_t run(std::uint32_t cur, std::uint32_t cur_known, std::uint32_t nxt,
                     std::uint32_t nxt_known) const {
        if (code_.empty()) return T;
        for (std::size_t i = 0; i < code_.size(); ++i) {
            const Ins& in = code_[i];
            std::uint8_t v = U;
            switch (in.op) {
            case Op::Const: v = in.a ? T : F; break;
            case Op::Atom: {
                std::uint32_t bit = 1u << in.a;
                if (in.b == 0) v = (cur_known & bit) ? ((cur & bit) ? T : F) : U;
                else v = (nxt_known & bit) ? ((nxt & bit) ? T : F) : U;
                break;
            }
            case Op::Not: {
                std::uint8_t x = vals_[args_[in.first]];
                v = x == U ? std::uint8_t(U) : std::uint8_t(x ^ 1u);
                break;
            }
            case Op::And: {
                v = T;
                for (int k = 0; k < in.count; ++k) {
                    std::uint8_t x = vals_[args_[in.first + k]];
                    if (x == F) { v = F; break; }
                    if (x == U) v = U;
                }
                break;
            }
            case Op::Or: {
                v = F;
                for (int k = 0; k < in.count; ++k) {
                    std::uint8_t x = vals_[args_[in.first + k]];
                    if (x == T) { v = T; break; }
                    if (x == U) v = U;
                }
                break;
            }
            case Op::Implies: {
                std::uint8_t x = vals_[args_[in.first]], y = vals_[args_[in.first + 1]];
                if (x == F || y == T) v = T;
                else if (x == T && y == F) v = F;
                break;
            }
            case Op::Iff: {
                std::uint8_t x = vals_[args_[in.first]], y = vals_[args_[in.first + 1]];
                if (x != U && y != U) v = x == y ? T : F;
                break;
            }
            }
            vals_[i] = v;
        }
        return vals_[root_];
    }

private:
    struct Ins {
        Op op;
        int a;
        int b;
        int first;
        int count;
    };

    int emit(Ins in) {
        code_.push_back(in);
        return int(code_.size()) - 1;
    }

    int compile(const Expr& e) {
        switch (e->op) {
        case Op::Const: return emit({Op::Const, e->value ? 1 : 0, 0, 0, 0});
        case Op::Atom: return emit({Op::Atom, e->prop, e->offset, 0, 0});
        default: break;
        }
        std::vector<int> kids;
        for (const auto& k : e->kids) kids.push_back(compile(k));
        int first = int(args_.size());
        args_.insert(args_.end(), kids.begin(), kids.end());
        return emit({e->op, 0, 0, first, int(kids.size())});
    }

    std::vector<Ins> code_;
    std::vector<int> args_;
    int root_ = 0;
    mutable std::vector<std::uint8_t> vals_;
};

} // namespace gr1core

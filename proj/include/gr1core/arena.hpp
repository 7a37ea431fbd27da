#pragma once

#include "gr1core/error.hpp"
#include "gr1core/unroller.hpp"

#include <cstdint>
#include <vector>

namespace gr1core {

using StateSet = std::vector<char>;

// Explicit game graph. For every state s the environment picks next inputs
// x' allowed by env_trans, then the system picks a successor t with inputs
// x' allowed by sys_trans. Moves are stored in flat arrays:
//   env moves of s:       env_x[env_begin[s] .. env_begin[s+1])
//   successors of move e: succ[succ_begin[e] .. succ_begin[e+1])
class Arena {
public:
    struct Options {
        std::uint64_t state_cap = std::uint64_t(1) << 20;
        const Budget* budget = nullptr;
    };

    Arena(const GR1Spec& spec, Options opt) : spec_(&spec) {
        n_ = spec.prop_count();
        nx_ = int(spec.inputs.size());
        if (n_ >= 31 || (std::uint64_t(1) << n_) > opt.state_cap)
            throw StateSpaceTooLarge("state space of 2^" + std::to_string(n_) + " exceeds the configured cap of " +
                                     std::to_string(opt.state_cap));
        size_ = State(1) << n_;
        in_mask_ = input_mask(spec);

        Program env_trans(spec.exprs(Slot::EnvTrans));
        Program sys_trans(spec.exprs(Slot::SysTrans));
        Program env_init(spec.exprs(Slot::EnvInit));
        Program sys_init(spec.exprs(Slot::SysInit));
        std::uint32_t all = full_mask(spec);

        env_init_.assign(State(1) << nx_, 0);
        for (State x = 0; x < (State(1) << nx_); ++x) env_init_[x] = env_init.run(x, in_mask_, 0, 0) == Program::T;
        sys_init_.assign(size_, 0);
        for (State s = 0; s < size_; ++s) sys_init_[s] = sys_init.run(s, all, 0, 0) == Program::T;

        for (const auto* st : spec.in_slot(Slot::EnvGoal)) env_goals_.push_back(predicate(st->expr));
        for (const auto* st : spec.in_slot(Slot::SysGoal)) sys_goals_.push_back(predicate(st->expr));
        if (env_goals_.empty()) env_goals_.push_back(StateSet(size_, 1));
        if (sys_goals_.empty()) sys_goals_.push_back(StateSet(size_, 1));

        env_begin_.reserve(size_ + 1);
        succ_begin_.push_back(0);
        std::vector<State> moves;
        for (State s = 0; s < size_; ++s) {
            if (opt.budget && (s & 1023) == 0) opt.budget->check("arena construction");
            env_begin_.push_back(std::uint32_t(env_x_.size()));
            moves.clear();
            enumerate(env_trans, s, all, 0, 0, 0, nx_, moves);
            for (State x : moves) {
                env_x_.push_back(x);
                enumerate(sys_trans, s, all, x, in_mask_, nx_, n_, succ_);
                succ_begin_.push_back(std::uint32_t(succ_.size()));
            }
        }
        env_begin_.push_back(std::uint32_t(env_x_.size()));
    }

    const GR1Spec& spec() const { return *spec_; }
    State size() const { return size_; }
    int props() const { return n_; }
    State inputs_of(State s) const { return s & in_mask_; }

    std::uint32_t env_begin(State s) const { return env_begin_[s]; }
    std::uint32_t env_end(State s) const { return env_begin_[s + 1]; }
    State env_input(std::uint32_t e) const { return env_x_[e]; }
    std::uint32_t succ_begin(std::uint32_t e) const { return succ_begin_[e]; }
    std::uint32_t succ_end(std::uint32_t e) const { return succ_begin_[e + 1]; }
    State succ(std::uint32_t k) const { return succ_[k]; }

    bool env_init(State x) const { return env_init_[x & in_mask_]; }
    bool sys_init(State s) const { return sys_init_[s]; }
    const std::vector<StateSet>& env_goals() const { return env_goals_; }
    const std::vector<StateSet>& sys_goals() const { return sys_goals_; }

    // Controllable predecessor for the system: every env move has a
    // successor in T. States without env moves count as won.
    StateSet cox(const StateSet& t) const {
        StateSet out(size_, 0);
        for (State s = 0; s < size_; ++s) {
            bool ok = true;
            for (auto e = env_begin(s); ok && e < env_end(s); ++e) {
                bool some = false;
                for (auto k = succ_begin(e); !some && k < succ_end(e); ++k) some = t[succ_[k]];
                ok = some;
            }
            out[s] = ok;
        }
        return out;
    }

    // Whether env move e forces the play into T.
    bool forces(std::uint32_t e, const StateSet& t) const {
        for (auto k = succ_begin(e); k < succ_end(e); ++k)
            if (!t[succ_[k]]) return false;
        return true;
    }

    // Controllable predecessor for the environment, the dual of cox.
    StateSet epre(const StateSet& t) const {
        StateSet out(size_, 0);
        for (State s = 0; s < size_; ++s)
            for (auto e = env_begin(s); e < env_end(s); ++e)
                if (forces(e, t)) {
                    out[s] = 1;
                    break;
                }
        return out;
    }

private:
    StateSet predicate(const Expr& e) const {
        StateSet out(size_, 0);
        for (State s = 0; s < size_; ++s) out[s] = eval(e, s, 0);
        return out;
    }

    // Depth-first assignment of bits lo..hi-1 of the next state, pruning as
    // soon as the three-valued program is false. Once it is true every
    // completion is emitted without further checks.
    static void enumerate(const Program& p, State cur, State cur_known, State nxt, State nxt_known, int lo, int hi,
                          std::vector<State>& out) {
        auto v = p.run(cur, cur_known, nxt, nxt_known);
        if (v == Program::F) return;
        if (lo == hi) {
            out.push_back(nxt);
            return;
        }
        if (v == Program::T) {
            fill(nxt, lo, hi, out);
            return;
        }
        enumerate(p, cur, cur_known, nxt, nxt_known | (State(1) << lo), lo + 1, hi, out);
        enumerate(p, cur, cur_known, nxt | (State(1) << lo), nxt_known | (State(1) << lo), lo + 1, hi, out);
    }

    // Same order as the checked enumeration.
    static void fill(State nxt, int lo, int hi, std::vector<State>& out) {
        if (lo == hi) {
            out.push_back(nxt);
            return;
        }
        fill(nxt, lo + 1, hi, out);
        fill(nxt | (State(1) << lo), lo + 1, hi, out);
    }

    const GR1Spec* spec_;
    int n_ = 0, nx_ = 0;
    State size_ = 0, in_mask_ = 0;
    StateSet env_init_, sys_init_;
    std::vector<StateSet> env_goals_, sys_goals_;
    std::vector<std::uint32_t> env_begin_, succ_begin_;
    std::vector<State> env_x_, succ_;
};

} // namespace gr1core

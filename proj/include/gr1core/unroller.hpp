#pragma once

#include "gr1core/cnf.hpp"
#include "gr1core/spec.hpp"

#include <cstdint>
#include <vector>

namespace gr1core {

// A total assignment over X ∪ Y; bit i is proposition i (inputs first).
using State = std::uint32_t;

inline State input_mask(const GR1Spec& spec) { return (State(1) << spec.inputs.size()) - 1; }

inline State full_mask(const GR1Spec& spec) {
    return spec.prop_count() >= 32 ? ~State(0) : (State(1) << spec.prop_count()) - 1;
}

// Sys goal k (1-based, in statement order).
inline const Statement& sys_goal(const GR1Spec& spec, int k) {
    auto goals = spec.in_slot(Slot::SysGoal);
    if (k < 1 || k > int(goals.size())) throw UnknownGoal(k);
    return *goals[k - 1];
}

// Sys_trans conjuncts instantiated at steps first..last.
inline std::vector<Conjunct> unroll_trans(const GR1Spec& spec, int first, int last) {
    std::vector<Conjunct> out;
    for (int i = first; i <= last; ++i)
        for (const auto* st : spec.in_slot(Slot::SysTrans)) out.push_back({GroupKey::of(st->id, i), i, st->expr});
    return out;
}

inline std::vector<Conjunct> unroll_from_init(const GR1Spec& spec, int d) {
    std::vector<Conjunct> out;
    for (const auto* st : spec.in_slot(Slot::SysInit)) out.push_back({GroupKey::of(st->id, 0), 0, st->expr});
    auto trans = unroll_trans(spec, 0, d);
    out.insert(out.end(), trans.begin(), trans.end());
    return out;
}

inline Conjunct goal_clause(const GR1Spec& spec, int k, int d) {
    const auto& g = sys_goal(spec, k);
    return {GroupKey::of(g.id, d), d, g.expr};
}

// Literal-complete description of a state over every proposition.
inline Expr state_formula(const GR1Spec& spec, State s) {
    std::vector<Expr> lits;
    for (int p = 0; p < spec.prop_count(); ++p) lits.push_back(literal(p, (s >> p) & 1u));
    return conj(lits);
}

inline Expr inputs_formula(const GR1Spec& spec, State s) {
    std::vector<Expr> lits;
    for (int p = 0; p < int(spec.inputs.size()); ++p) lits.push_back(literal(p, (s >> p) & 1u));
    return conj(lits);
}

inline Expr outputs_formula(const GR1Spec& spec, State s) {
    std::vector<Expr> lits;
    for (int p = int(spec.inputs.size()); p < spec.prop_count(); ++p) lits.push_back(literal(p, (s >> p) & 1u));
    return conj(lits);
}

// One step from a known state with the environment's next inputs fixed.
// Unsatisfiable exactly when no system move exists.
inline std::vector<Conjunct> deadlock_formula(const GR1Spec& spec, State q, State next_inputs) {
    std::vector<Conjunct> out{{GroupKey::anchor(), 0, state_formula(spec, q)},
                              {GroupKey::input_pin(1), 1, inputs_formula(spec, next_inputs)}};
    auto trans = unroll_trans(spec, 0, 0);
    out.insert(out.end(), trans.begin(), trans.end());
    return out;
}

// The single-step instance behind a game move: current state, pending
// inputs and the proposed outputs, against every sys_trans conjunct.
inline std::vector<Conjunct> move_formula(const GR1Spec& spec, State q, State next_inputs, State proposed) {
    auto out = deadlock_formula(spec, q, next_inputs);
    out.push_back({GroupKey::output_pin(1), 1, outputs_formula(spec, proposed)});
    return out;
}

// Inputs of a cycle repeated over steps 0..d.
inline std::vector<State> env_unrolling(const std::vector<State>& cycle_inputs, int d) {
    std::vector<State> out;
    if (cycle_inputs.empty()) return out;
    for (int i = 0; i <= d; ++i) out.push_back(cycle_inputs[i % cycle_inputs.size()]);
    return out;
}

// Anchored at q0, inputs pinned through step d+1, safety to depth d and goal
// k required at step d. `cycle_inputs[0]` is the input label at step 0.
inline std::vector<Conjunct> livelock_formula(const GR1Spec& spec, int k, const std::vector<State>& cycle_inputs,
                                              State q0, int d) {
    std::vector<Conjunct> out{{GroupKey::anchor(), 0, state_formula(spec, q0)}};
    auto pins = env_unrolling(cycle_inputs, d + 1);
    for (int i = 1; i < int(pins.size()); ++i)
        out.push_back({GroupKey::input_pin(i), i, inputs_formula(spec, pins[i])});
    auto trans = unroll_trans(spec, 0, d);
    out.insert(out.end(), trans.begin(), trans.end());
    out.push_back(goal_clause(spec, k, d));
    return out;
}

} // namespace gr1core

#pragma once

#include "gr1core/spec.hpp"

#include <set>

namespace gr1core {

inline void validate_workspace(const Workspace& w, const GR1Spec& spec) {
    std::set<std::string> seen;
    for (const auto& r : w.regions) {
        int idx = spec.index_of(r);
        if (idx < int(spec.inputs.size())) throw UndeclaredRegion(r);
        if (!seen.insert(r).second) throw Error("region '" + r + "' declared twice");
    }
    for (const auto& [a, b] : w.adjacency) {
        if (!seen.count(a)) throw UndeclaredRegion(a);
        if (!seen.count(b)) throw UndeclaredRegion(b);
        if (a == b) throw Error("region '" + a + "' listed as adjacent to itself");
    }
}

// Exactly one region holds at the given step offset: one disjunction plus
// pairwise exclusions.
inline Expr exactly_one(const std::vector<int>& props, int offset) {
    std::vector<Expr> parts;
    std::vector<Expr> any;
    for (int p : props) any.push_back(atom(p, offset));
    parts.push_back(disj(any));
    for (std::size_t i = 0; i < props.size(); ++i)
        for (std::size_t j = i + 1; j < props.size(); ++j)
            parts.push_back(negate(conj({atom(props[i], offset), atom(props[j], offset)})));
    return conj(parts);
}

// Compiles the map into topology statements: one adjacency conjunct per
// region, exactly-one over current and next atoms, and an exactly-one
// initial condition. Ids are left at 0; the caller numbers them.
inline std::vector<Statement> compile_topology(const Workspace& w, const GR1Spec& spec, Span span = {}) {
    validate_workspace(w, spec);
    auto names = spec.names();
    std::vector<Statement> out;
    auto make = [&](Slot slot, Expr e) {
        Statement st;
        st.slot = slot;
        st.expr = std::move(e);
        st.text = to_string(st.expr, names);
        st.span = span;
        st.sentence = kTopologySentence;
        st.topology = true;
        out.push_back(std::move(st));
    };

    std::vector<int> props;
    for (const auto& r : w.regions) props.push_back(spec.index_of(r));

    for (const auto& r : w.regions) {
        std::vector<Expr> targets{atom(spec.index_of(r), 1)};
        for (const auto& n : w.neighbours(r)) targets.push_back(atom(spec.index_of(n), 1));
        make(Slot::SysTrans, implies(atom(spec.index_of(r), 0), disj(targets)));
    }
    make(Slot::SysTrans, exactly_one(props, 0));
    make(Slot::SysTrans, exactly_one(props, 1));
    make(Slot::SysInit, exactly_one(props, 0));
    return out;
}

} // namespace gr1core

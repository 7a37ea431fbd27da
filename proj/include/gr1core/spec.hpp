#pragma once

#include "gr1core/error.hpp"
#include "gr1core/expr.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gr1core {

enum class PropKind { Input, Output };

struct Proposition {
    std::string name;
    PropKind kind = PropKind::Input;
    bool operator==(const Proposition&) const = default;
};

enum class Slot { EnvInit, EnvTrans, EnvGoal, SysInit, SysTrans, SysGoal };

inline const char* slot_name(Slot s) {
    switch (s) {
    case Slot::EnvInit: return "ENV_INIT";
    case Slot::EnvTrans: return "ENV_TRANS";
    case Slot::EnvGoal: return "ENV_LIVENESS";
    case Slot::SysInit: return "SYS_INIT";
    case Slot::SysTrans: return "SYS_TRANS";
    case Slot::SysGoal: return "SYS_LIVENESS";
    }
    return "?";
}

inline bool is_sys(Slot s) { return s == Slot::SysInit || s == Slot::SysTrans || s == Slot::SysGoal; }

struct Span {
    int line = 0;
    int col_begin = 0;
    int col_end = 0;
    bool operator==(const Span&) const = default;
};

// Label used for statements compiled from the [TOPOLOGY] section.
inline const std::string kTopologySentence = "topology";

struct Statement {
    int id = 0;           // dense, 1-based, stable across every analysis
    std::string text;     // original source line (trimmed)
    Span span;
    Slot slot = Slot::SysTrans;
    Expr expr;
    std::string sentence; // statements sharing a sentence label are one source sentence
    bool topology = false;
};

// Region map. Staying in place is always allowed and is not listed.
struct Workspace {
    std::vector<std::string> regions;
    std::vector<std::pair<std::string, std::string>> adjacency;

    std::vector<std::string> neighbours(const std::string& r) const {
        std::vector<std::string> out;
        for (const auto& [a, b] : adjacency) {
            if (a == r) out.push_back(b);
            if (b == r) out.push_back(a);
        }
        return out;
    }
    bool operator==(const Workspace&) const = default;
};

struct GR1Spec {
    std::vector<Proposition> inputs;  // X
    std::vector<Proposition> outputs; // Y
    std::vector<Statement> statements;
    std::optional<Workspace> topology;
    std::map<std::string, std::string> sentences; // label -> human text
    std::vector<std::string> warnings;

    int prop_count() const { return int(inputs.size() + outputs.size()); }

    // Inputs first, then outputs; indices match Expr atom references.
    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& p : inputs) out.push_back(p.name);
        for (const auto& p : outputs) out.push_back(p.name);
        return out;
    }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < inputs.size(); ++i)
            if (inputs[i].name == name) return int(i);
        for (std::size_t i = 0; i < outputs.size(); ++i)
            if (outputs[i].name == name) return int(inputs.size() + i);
        return -1;
    }

    std::vector<const Statement*> in_slot(Slot s) const {
        std::vector<const Statement*> out;
        for (const auto& st : statements)
            if (st.slot == s) out.push_back(&st);
        return out;
    }

    std::vector<Expr> exprs(Slot s) const {
        std::vector<Expr> out;
        for (const auto& st : statements)
            if (st.slot == s) out.push_back(st.expr);
        return out;
    }

    const Statement& statement(int id) const {
        for (const auto& st : statements)
            if (st.id == id) return st;
        throw UnknownStatementId(id);
    }

    bool has_statement(int id) const {
        return std::any_of(statements.begin(), statements.end(), [&](const Statement& s) { return s.id == id; });
    }

    std::string sentence_text(const Statement& st) const {
        if (st.topology) return "environment topology";
        auto it = sentences.find(st.sentence);
        return it != sentences.end() ? it->second : st.text;
    }

    std::set<int> ids() const {
        std::set<int> out;
        for (const auto& s : statements) out.insert(s.id);
        return out;
    }
};

// Keeps only the statements whose ids are in `keep`; ids are unchanged.
inline GR1Spec statement_slice(const GR1Spec& spec, const std::set<int>& keep) {
    for (int id : keep)
        if (!spec.has_statement(id)) throw UnknownStatementId(id);
    GR1Spec out = spec;
    out.statements.clear();
    for (const auto& st : spec.statements)
        if (keep.count(st.id)) out.statements.push_back(st);
    return out;
}

inline bool same_statements(const GR1Spec& a, const GR1Spec& b) {
    if (a.statements.size() != b.statements.size()) return false;
    for (std::size_t i = 0; i < a.statements.size(); ++i) {
        const auto& x = a.statements[i];
        const auto& y = b.statements[i];
        if (x.id != y.id || x.slot != y.slot || x.sentence != y.sentence || x.topology != y.topology ||
            !structurally_equal(x.expr, y.expr))
            return false;
    }
    return a.inputs == b.inputs && a.outputs == b.outputs;
}

} // namespace gr1core

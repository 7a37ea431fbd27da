#pragma once

#include "gr1core/core_engine.hpp"

#include <json.hpp>

#include <sstream>
#include <string>

namespace gr1core {

using json = nlohmann::json;

namespace detail {

template <class E>
E enum_from(const std::string& s, std::initializer_list<E> all) {
    for (E e : all)
        if (s == to_string(e)) return e;
    throw Error("unknown value '" + s + "' in report");
}

inline Slot slot_from(const std::string& s) {
    for (Slot x : {Slot::EnvInit, Slot::EnvTrans, Slot::EnvGoal, Slot::SysInit, Slot::SysTrans, Slot::SysGoal})
        if (s == slot_name(x)) return x;
    throw Error("unknown slot '" + s + "' in report");
}

} // namespace detail

inline json to_json(const CoreStatement& c) {
    return {{"id", c.id},
            {"text", c.text},
            {"span", {{"line", c.span.line}, {"col_begin", c.span.col_begin}, {"col_end", c.span.col_end}}},
            {"slot", slot_name(c.slot)},
            {"sentence", c.sentence},
            {"sentence_text", c.sentence_text},
            {"goal", c.goal},
            {"topology", c.topology}};
}

inline CoreStatement core_statement_from_json(const json& j) {
    CoreStatement c;
    c.id = j.at("id").get<int>();
    c.text = j.at("text").get<std::string>();
    const auto& sp = j.at("span");
    c.span = {sp.at("line").get<int>(), sp.at("col_begin").get<int>(), sp.at("col_end").get<int>()};
    c.slot = detail::slot_from(j.at("slot").get<std::string>());
    c.sentence = j.at("sentence").get<std::string>();
    c.sentence_text = j.at("sentence_text").get<std::string>();
    c.goal = j.at("goal").get<bool>();
    c.topology = j.at("topology").get<bool>();
    return c;
}

inline json to_json(const Diagnosis& d) {
    json j;
    j["schema"] = 1;
    j["verdict"] = to_string(d.verdict);
    j["failure_mode"] = d.failure_mode ? json(to_string(*d.failure_mode)) : json(nullptr);
    j["livelocked_goal"] = d.livelocked_goal ? json(*d.livelocked_goal) : json(nullptr);
    j["bad_init"] = d.bad_init ? json(*d.bad_init) : json(nullptr);
    j["core"] = json::array();
    for (const auto& c : d.core) j["core"].push_back(to_json(c));
    j["method"] = d.method ? json(to_string(*d.method)) : json(nullptr);
    j["depth_used"] = d.depth_used ? json(*d.depth_used) : json(nullptr);
    j["notes"] = d.notes;
    return j;
}

inline Diagnosis diagnosis_from_json(const json& j) {
    if (j.at("schema").get<int>() != 1) throw Error("unsupported report schema");
    Diagnosis d;
    d.verdict = detail::enum_from(j.at("verdict").get<std::string>(),
                                  {Verdict::Synthesizable, Verdict::Unsatisfiable, Verdict::Unrealizable});
    if (!j.at("failure_mode").is_null())
        d.failure_mode = detail::enum_from(j["failure_mode"].get<std::string>(),
                                           {FailureMode::Deadlock, FailureMode::Livelock});
    if (!j.at("livelocked_goal").is_null()) d.livelocked_goal = j["livelocked_goal"].get<int>();
    if (!j.at("bad_init").is_null()) d.bad_init = j["bad_init"].get<std::map<std::string, bool>>();
    for (const auto& c : j.at("core")) d.core.push_back(core_statement_from_json(c));
    if (!j.at("method").is_null())
        d.method = detail::enum_from(j["method"].get<std::string>(),
                                     {Method::SatUnroll, Method::CounterstrategySat, Method::IteratedRealizability});
    if (!j.at("depth_used").is_null()) d.depth_used = j["depth_used"].get<int>();
    d.notes = j.at("notes").get<std::vector<std::string>>();
    return d;
}

inline std::string render_report(const Diagnosis& d) { return to_json(d).dump(2); }
inline Diagnosis parse_report(const std::string& s) { return diagnosis_from_json(json::parse(s)); }

// Human-readable rendering; `explain` adds the core listing.
inline std::string render_text(const GR1Spec& spec, const Diagnosis& d, bool explain) {
    std::ostringstream out;
    std::string v = to_string(d.verdict);
    for (auto& ch : v) ch = char(std::toupper(static_cast<unsigned char>(ch)));
    out << v;
    if (d.failure_mode) out << " (" << to_string(*d.failure_mode) << ")";
    if (d.livelocked_goal) out << ", goal: " << spec.sentence_text(spec.statement(*d.livelocked_goal));
    out << "\n";
    if (d.bad_init) {
        out << "losing initial state:";
        bool any = false;
        for (const auto& [name, val] : *d.bad_init)
            if (val) out << " " << name, any = true;
        out << (any ? "\n" : " (all propositions false)\n");
    }
    if (!explain) return out.str();
    if (d.method) out << "method: " << to_string(*d.method) << "\n";
    if (d.depth_used) out << "depth: " << *d.depth_used << "\n";
    if (!d.core.empty()) {
        out << "The statements that cause the problem are:\n";
        std::set<std::string> shown;
        for (const auto& c : d.core) {
            if (c.topology) {
                if (shown.insert(c.sentence).second) out << "  [topology] environment topology\n";
                continue;
            }
            if (!shown.insert(c.sentence).second) continue;
            out << "  [line " << c.span.line << "] " << c.sentence_text;
            if (c.goal) out << "  (goal)";
            out << "\n";
            for (const auto& o : d.core)
                if (o.sentence == c.sentence) out << "      " << slot_name(o.slot) << " #" << o.id << ": " << o.text << "\n";
        }
    }
    for (const auto& n : d.notes) out << "note: " << n << "\n";
    return out.str();
}

} // namespace gr1core

#pragma once

#include "gr1core/spec.hpp"
#include "gr1core/workspace.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace gr1core {

// Returns the text of a map file named by a `map <file>` topology line.
using MapResolver = std::function<std::string(const std::string&)>;

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class ExprParser {
public:
    ExprParser(const std::string& text, int line, const GR1Spec& spec) : s_(text), line_(line), spec_(spec) {}

    Expr parse() {
        Expr e = parse_iff();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, msg); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(const std::string& tok) {
        skip_ws();
        if (s_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    Expr parse_iff() {
        Expr lhs = parse_implies();
        while (accept("<->")) lhs = iff(lhs, parse_implies());
        return lhs;
    }

    Expr parse_implies() {
        Expr lhs = parse_or();
        skip_ws();
        if (s_.compare(pos_, 2, "->") == 0) {
            pos_ += 2;
            return implies(lhs, parse_implies());
        }
        return lhs;
    }

    Expr parse_or() {
        std::vector<Expr> kids{parse_and()};
        while (accept("|")) kids.push_back(parse_and());
        return disj(std::move(kids));
    }

    Expr parse_and() {
        std::vector<Expr> kids{parse_unary()};
        while (accept("&")) kids.push_back(parse_unary());
        return conj(std::move(kids));
    }

    Expr parse_unary() {
        if (accept("!")) return negate(parse_unary());
        return parse_primary();
    }

    Expr parse_primary() {
        skip_ws();
        if (accept("(")) {
            Expr e = parse_iff();
            if (!accept(")")) fail("expected ')'");
            return e;
        }
        if (pos_ >= s_.size() || !is_ident_start(s_[pos_])) fail("expected an expression");
        std::size_t b = pos_;
        while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
        std::string id = s_.substr(b, pos_ - b);
        if (id == "TRUE") return constant(true);
        if (id == "FALSE") return constant(false);
        if (id == "next") {
            if (!accept("(")) fail("expected '(' after next");
            Expr inner = parse_iff();
            if (!accept(")")) fail("expected ')' closing next(");
            if (max_offset(inner) > 0) fail("nested next() is not allowed");
            return shift(inner, 1);
        }
        int idx = spec_.index_of(id);
        if (idx < 0) throw UndeclaredProposition(id, line_);
        return atom(idx, 0);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_;
    const GR1Spec& spec_;
};

struct Line {
    int number;
    std::string raw;  // without comment
    std::string text; // trimmed
};

inline std::vector<Line> split_lines(const std::string& source) {
    std::vector<Line> out;
    std::istringstream in(source);
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        out.push_back({n, raw, trim(raw)});
    }
    return out;
}

inline std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

inline void parse_topology_line(const Line& l, Workspace& w, const MapResolver& resolver, int depth = 0) {
    auto ws = words(l.text);
    if (ws.empty()) return;
    if (ws[0] == "region" && ws.size() == 2) {
        w.regions.push_back(ws[1]);
    } else if (ws[0] == "adj" && ws.size() == 3) {
        w.adjacency.emplace_back(ws[1], ws[2]);
    } else if (ws[0] == "map" && ws.size() == 2) {
        if (!resolver) throw SyntaxError(l.number, "map files cannot be resolved here");
        if (depth > 4) throw SyntaxError(l.number, "map include depth exceeded");
        for (const auto& ml : split_lines(resolver(ws[1]))) parse_topology_line(ml, w, resolver, depth + 1);
    } else {
        throw SyntaxError(l.number, "expected 'region <name>', 'adj <a> <b>' or 'map <file>'");
    }
}

} // namespace detail

// Parses the sectioned text format. Statements keep source order and spans;
// topology statements follow the source statements.
inline GR1Spec parse_spec(const std::string& source, const MapResolver& resolver = {}) {
    using namespace detail;
    GR1Spec spec;
    auto lines = split_lines(source);

    static const std::map<std::string, std::string> known = {
        {"[INPUT]", "INPUT"},         {"[OUTPUT]", "OUTPUT"},         {"[SENTENCE]", "SENTENCE"},
        {"[ENV_INIT]", "ENV_INIT"},   {"[SYS_INIT]", "SYS_INIT"},     {"[ENV_TRANS]", "ENV_TRANS"},
        {"[SYS_TRANS]", "SYS_TRANS"}, {"[ENV_LIVENESS]", "ENV_LIVENESS"}, {"[SYS_LIVENESS]", "SYS_LIVENESS"},
        {"[TOPOLOGY]", "TOPOLOGY"}};
    static const std::map<std::string, Slot> slots = {
        {"ENV_INIT", Slot::EnvInit},   {"SYS_INIT", Slot::SysInit},         {"ENV_TRANS", Slot::EnvTrans},
        {"SYS_TRANS", Slot::SysTrans}, {"ENV_LIVENESS", Slot::EnvGoal}, {"SYS_LIVENESS", Slot::SysGoal}};

    // Pass 1: declarations, sentence labels and the section of each line.
    std::vector<std::string> section_of(lines.size());
    std::string section;
    std::set<std::string> declared;
    int topology_line = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& l = lines[i];
        if (l.text.empty()) continue;
        if (l.text.front() == '[') {
            auto it = known.find(l.text);
            if (it == known.end()) throw SyntaxError(l.number, "unknown section " + l.text);
            section = it->second;
            if (section == "TOPOLOGY") topology_line = l.number;
            continue;
        }
        if (section.empty()) throw SyntaxError(l.number, "content before the first section header");
        section_of[i] = section;
        if (section == "INPUT" || section == "OUTPUT") {
            auto ws = words(l.text);
            if (ws.size() != 1 || !is_ident_start(ws[0][0]) ||
                !std::all_of(ws[0].begin(), ws[0].end(), is_ident_char))
                throw SyntaxError(l.number, "expected a single identifier");
            if (ws[0] == "next" || ws[0] == "TRUE" || ws[0] == "FALSE")
                throw SyntaxError(l.number, "reserved word used as proposition");
            if (!declared.insert(ws[0]).second) throw SyntaxError(l.number, "duplicate proposition '" + ws[0] + "'");
            (section == "INPUT" ? spec.inputs : spec.outputs)
                .push_back({ws[0], section == "INPUT" ? PropKind::Input : PropKind::Output});
        } else if (section == "SENTENCE") {
            auto sp = l.text.find_first_of(" \t");
            std::string label = l.text.substr(0, sp);
            spec.sentences[label] = sp == std::string::npos ? label : trim(l.text.substr(sp));
        }
    }

    // Pass 2: statements and topology.
    int next_id = 1;
    int n_inputs = int(spec.inputs.size());
    Workspace w;
    bool has_topology = topology_line != 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const auto& sec = section_of[i];
        if (sec.empty() || sec == "INPUT" || sec == "OUTPUT" || sec == "SENTENCE") continue;
        if (sec == "TOPOLOGY") {
            parse_topology_line(l, w, resolver);
            continue;
        }
        Statement st;
        st.slot = slots.at(sec);
        st.text = l.text;
        std::string body = l.raw;
        std::size_t start = body.find_first_not_of(" \t");
        // optional "label:" prefix ties the statement to a [SENTENCE] entry
        std::size_t p = start;
        while (p < body.size() && is_ident_char(body[p])) ++p;
        std::size_t q = p;
        while (q < body.size() && (body[q] == ' ' || body[q] == '\t')) ++q;
        if (p > start && q < body.size() && body[q] == ':') {
            st.sentence = body.substr(start, p - start);
            start = body.find_first_not_of(" \t", q + 1);
            if (start == std::string::npos) throw SyntaxError(l.number, "empty statement after label");
        } else {
            st.sentence = "L" + std::to_string(l.number);
        }
        std::string expr_text = body.substr(start);
        st.span = {l.number, int(start) + 1, int(body.find_last_not_of(" \t\r")) + 1};
        st.expr = ExprParser(expr_text, l.number, spec).parse();

        bool has_next = max_offset(st.expr) > 0;
        bool uses_input = false, uses_output = false, next_output = false;
        for_each_atom(st.expr, [&](int prop, int off) {
            if (prop < n_inputs) uses_input = true;
            else {
                uses_output = true;
                if (off > 0) next_output = true;
            }
        });
        switch (st.slot) {
        case Slot::EnvInit:
        case Slot::SysInit:
        case Slot::EnvGoal:
        case Slot::SysGoal:
            if (has_next) throw NextInInitOrGoal(l.number);
            break;
        default: break;
        }
        if (st.slot == Slot::EnvInit && uses_output)
            throw SyntaxError(l.number, "environment initial condition may only mention inputs");
        if (st.slot == Slot::SysInit && uses_input)
            spec.warnings.push_back("line " + std::to_string(l.number) +
                                    ": system initial condition mentions inputs");
        if (st.slot == Slot::EnvTrans && next_output)
            throw SyntaxError(l.number, "environment transitions may not refer to next outputs");
        st.id = next_id++;
        spec.statements.push_back(std::move(st));
    }

    if (has_topology) {
        for (auto& st : compile_topology(w, spec, Span{topology_line, 1, 10})) {
            st.id = next_id++;
            spec.statements.push_back(std::move(st));
        }
        spec.topology = std::move(w);
    }
    return spec;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parses a spec file; `map <file>` lines resolve relative to its directory.
inline GR1Spec parse_spec_file(const std::filesystem::path& path) {
    auto dir = path.parent_path();
    return parse_spec(read_file(path), [dir](const std::string& f) { return read_file(dir / f); });
}

// Renders a spec back to the input format. Topology statements are emitted
// as the [TOPOLOGY] section they were compiled from.
inline std::string to_source(const GR1Spec& spec) {
    std::ostringstream out;
    auto names = spec.names();
    out << "[INPUT]\n";
    for (const auto& p : spec.inputs) out << p.name << "\n";
    out << "\n[OUTPUT]\n";
    for (const auto& p : spec.outputs) out << p.name << "\n";
    if (!spec.sentences.empty()) {
        out << "\n[SENTENCE]\n";
        for (const auto& [label, text] : spec.sentences) out << label << " " << text << "\n";
    }
    std::optional<Slot> current;
    for (const auto& st : spec.statements) {
        if (st.topology) continue;
        if (current != st.slot) {
            out << "\n[" << slot_name(st.slot) << "]\n";
            current = st.slot;
        }
        out << st.sentence << ": " << to_string(st.expr, names) << "\n";
    }
    if (spec.topology) {
        out << "\n[TOPOLOGY]\n";
        for (const auto& r : spec.topology->regions) out << "region " << r << "\n";
        for (const auto& [a, b] : spec.topology->adjacency) out << "adj " << a << " " << b << "\n";
    }
    return out.str();
}

} // namespace gr1core

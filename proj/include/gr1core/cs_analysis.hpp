#pragma once

#include "gr1core/game.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gr1core {

inline std::set<int> deadlocked_states(const Counterstrategy& cs) {
    std::set<int> out;
    for (std::size_t q = 0; q < cs.size(); ++q)
        if (cs.nodes[q].succ.empty()) out.insert(int(q));
    return out;
}

// Breadth-first level sets from the initial nodes; every level must agree
// on delta_e. Stops once a level set repeats.
inline bool is_countertrace(const Counterstrategy& cs) {
    std::set<std::vector<int>> seen;
    std::vector<int> level = cs.initial;
    std::sort(level.begin(), level.end());
    level.erase(std::unique(level.begin(), level.end()), level.end());
    std::size_t limit = cs.size() * cs.size() + 1;
    for (std::size_t step = 0; step <= limit && !level.empty(); ++step) {
        if (!seen.insert(level).second) return true;
        for (int q : level)
            if (cs.nodes[q].einput != cs.nodes[level.front()].einput) return false;
        std::set<int> next;
        for (int q : level) next.insert(cs.nodes[q].succ.begin(), cs.nodes[q].succ.end());
        level.assign(next.begin(), next.end());
    }
    return true;
}

// Input labels seen at steps 0..steps-1 of a countertrace.
inline std::vector<State> countertrace_inputs(const Counterstrategy& cs, int steps) {
    std::vector<State> out;
    std::set<int> level(cs.initial.begin(), cs.initial.end());
    for (int t = 0; t < steps && !level.empty(); ++t) {
        out.push_back(cs.gamma_x(*level.begin()));
        std::set<int> next;
        for (int q : level) next.insert(cs.nodes[q].succ.begin(), cs.nodes[q].succ.end());
        level = std::move(next);
    }
    return out;
}

using Cycle = std::vector<int>;

inline Cycle canonical_rotation(const Cycle& c) {
    Cycle best = c;
    for (std::size_t o = 1; o < c.size(); ++o) {
        Cycle r(c.begin() + o, c.end());
        r.insert(r.end(), c.begin(), c.begin() + o);
        if (r < best) best = r;
    }
    return best;
}

// a ≺ b: a is shorter and some rotation of a occurs contiguously in b read
// cyclically.
inline bool sub_cycle(const Cycle& a, const Cycle& b) {
    if (a.size() >= b.size() || a.empty()) return false;
    for (std::size_t ra = 0; ra < a.size(); ++ra)
        for (std::size_t ob = 0; ob < b.size(); ++ob) {
            bool match = true;
            for (std::size_t k = 0; k < a.size() && match; ++k)
                match = a[(ra + k) % a.size()] == b[(ob + k) % b.size()];
            if (match) return true;
        }
    return false;
}

class CycleLimit : public Error {
public:
    CycleLimit() : Error("preventing-cycle enumeration exceeded its search limit") {}
};

struct CycleOptions {
    std::size_t max_length = 0;     // 0: twice the number of states marked k
    std::size_t max_search = 200000; // depth-first search nodes before CycleLimit
};

// Closed walks inside the states marked k that use no directed edge twice
// and never stay in place (a lone self-loop is the one-state cycle), reduced
// to the maximal ones under ≺. Each is given by its least rotation.
inline std::vector<Cycle> preventing_cycles(const Counterstrategy& cs, int k, CycleOptions opt = {}) {
    std::vector<int> qk;
    for (std::size_t q = 0; q < cs.size(); ++q)
        if (cs.nodes[q].goal == k) qk.push_back(int(q));
    if (qk.empty()) throw GoalNotPrevented(k);
    std::size_t max_len = opt.max_length ? opt.max_length : 2 * qk.size();
    auto in_k = [&](int q) { return cs.nodes[q].goal == k; };

    std::set<Cycle> found;
    std::size_t visited = 0;
    for (int start : qk) {
        const auto& ss = cs.nodes[start].succ;
        if (std::find(ss.begin(), ss.end(), start) != ss.end()) found.insert(Cycle{start});
        Cycle walk{start};
        std::set<std::pair<int, int>> used;
        // Only walks whose least state is the start, to avoid re-finding
        // rotations. Walks may pass through the start again.
        auto dfs = [&](auto&& self, int q) -> void {
            if (++visited > opt.max_search) throw CycleLimit();
            for (int t : cs.nodes[q].succ) {
                if (t == q || !in_k(t) || t < start || used.count({q, t})) continue;
                if (t == start) found.insert(canonical_rotation(walk));
                if (walk.size() >= max_len) continue;
                used.insert({q, t});
                walk.push_back(t);
                self(self, t);
                walk.pop_back();
                used.erase({q, t});
            }
        };
        dfs(dfs, start);
    }

    std::vector<Cycle> all(found.begin(), found.end());
    std::vector<Cycle> out;
    for (const auto& c : all) {
        bool dominated = std::any_of(all.begin(), all.end(), [&](const Cycle& o) { return sub_cycle(c, o); });
        if (!dominated) out.push_back(c);
    }
    return out;
}

// Goal index used for livelock analysis: the lowest goal mark among states
// on a cycle of the counterstrategy graph.
inline int prevented_goal(const Counterstrategy& cs) {
    int best = 0;
    for (std::size_t q = 0; q < cs.size(); ++q) {
        // q lies on a cycle iff it reaches itself
        std::vector<char> seen(cs.size(), 0);
        std::vector<int> stack(cs.nodes[q].succ.begin(), cs.nodes[q].succ.end());
        bool cyc = false;
        while (!stack.empty() && !cyc) {
            int t = stack.back();
            stack.pop_back();
            if (t == int(q)) cyc = true;
            else if (!seen[t]) {
                seen[t] = 1;
                stack.insert(stack.end(), cs.nodes[t].succ.begin(), cs.nodes[t].succ.end());
            }
        }
        if (cyc && (best == 0 || cs.nodes[q].goal < best)) best = cs.nodes[q].goal;
    }
    return best;
}

namespace detail {

inline std::string bits(State s, int from, int count) {
    std::string out;
    for (int p = from; p < from + count; ++p) out += ((s >> p) & 1u) ? '1' : '0';
    return out;
}

inline State parse_bits(const std::string& b, int from) {
    State s = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == '1') s |= State(1) << (from + int(i));
        else if (b[i] != '0') throw Error("bad bit string '" + b + "'");
    }
    return s;
}

} // namespace detail

// Line format: `state <id> in=<bits> out=<bits> goal=<k>`, `einput <id> <bits>`,
// `edge <id> <id>`, and `init <id>` for the initial nodes. Bits follow
// declaration order.
inline void write_counterstrategy(std::ostream& out, const Counterstrategy& cs) {
    int ny = cs.num_props - cs.num_inputs;
    for (std::size_t q = 0; q < cs.size(); ++q) {
        const auto& n = cs.nodes[q];
        out << "state " << q << " in=" << detail::bits(n.state, 0, cs.num_inputs)
            << " out=" << detail::bits(n.state, cs.num_inputs, ny) << " goal=" << n.goal << "\n";
    }
    for (int q : cs.initial) out << "init " << q << "\n";
    for (std::size_t q = 0; q < cs.size(); ++q)
        out << "einput " << q << " " << detail::bits(cs.nodes[q].einput, 0, cs.num_inputs) << "\n";
    for (std::size_t q = 0; q < cs.size(); ++q)
        for (int t : cs.nodes[q].succ) out << "edge " << q << " " << t << "\n";
}

inline Counterstrategy read_counterstrategy(std::istream& in, int num_inputs, int num_outputs) {
    Counterstrategy cs;
    cs.num_inputs = num_inputs;
    cs.num_props = num_inputs + num_outputs;
    std::string line;
    auto node = [&](int q) -> Counterstrategy::Node& {
        if (q < 0) throw Error("negative state id");
        if (std::size_t(q) >= cs.nodes.size()) cs.nodes.resize(q + 1);
        return cs.nodes[q];
    };
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "state") {
            int q;
            std::string a, b, g;
            ls >> q >> a >> b >> g;
            if (a.rfind("in=", 0) != 0 || b.rfind("out=", 0) != 0 || g.rfind("goal=", 0) != 0)
                throw Error("malformed state line: " + line);
            auto& n = node(q);
            n.state = detail::parse_bits(a.substr(3), 0) | detail::parse_bits(b.substr(4), num_inputs);
            n.goal = std::stoi(g.substr(5));
        } else if (kw == "einput") {
            int q;
            std::string b;
            ls >> q >> b;
            node(q).einput = detail::parse_bits(b, 0);
        } else if (kw == "edge") {
            int q, t;
            ls >> q >> t;
            node(t);
            node(q).succ.push_back(t);
        } else if (kw == "init") {
            int q;
            ls >> q;
            node(q);
            cs.initial.push_back(q);
        } else {
            throw Error("unknown counterstrategy line: " + line);
        }
    }
    for (auto& n : cs.nodes) std::sort(n.succ.begin(), n.succ.end());
    return cs;
}

} // namespace gr1core

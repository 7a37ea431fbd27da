// gr1core command-line front end: check, explain, game.
#include "gr1core/game_http.hpp"
#include "gr1core/gr1core.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int exit_code(gr1core::Verdict v) {
    switch (v) {
    case gr1core::Verdict::Synthesizable: return 0;
    case gr1core::Verdict::Unsatisfiable: return 2;
    case gr1core::Verdict::Unrealizable: return 3;
    }
    return 1;
}

struct Options {
    std::string spec_path;
    int max_depth = 15;
    long budget_ms = 30000;
    std::uint64_t state_cap = std::uint64_t(1) << 20;
    std::string dump_cnf;
    std::string dump_counterstrategy;
    std::string format = "text";
    int port = 8080;
    std::uint64_t seed = 0;
};

gr1core::Config config_of(const Options& o) {
    gr1core::Config cfg;
    cfg.max_depth = o.max_depth;
    cfg.budget = std::chrono::milliseconds(o.budget_ms);
    cfg.state_cap = o.state_cap;
    return cfg;
}

// The CNF of the unrolling that produced the diagnosis, for external tools.
void dump_cnf(const std::string& path, const gr1core::GR1Spec& spec, const gr1core::Diagnosis& d) {
    using namespace gr1core;
    std::vector<Conjunct> conj;
    int depth = d.depth_used.value_or(0);
    conj = unroll_from_init(spec, depth);
    if (d.livelocked_goal) {
        auto goals = spec.in_slot(Slot::SysGoal);
        for (std::size_t k = 0; k < goals.size(); ++k)
            if (goals[k]->id == *d.livelocked_goal) conj.push_back(goal_clause(spec, int(k) + 1, depth));
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_dimacs(out, to_cnf(conj));
}

void dump_counterstrategy(const std::string& path, const gr1core::GR1Spec& spec, const gr1core::Config& cfg) {
    using namespace gr1core;
    Budget b = detail::call_budget(cfg);
    Arena a(spec, {cfg.state_cap, &b});
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    try {
        write_counterstrategy(out, extract_counterstrategy(a, std::nullopt, &b));
    } catch (const SpecRealizable&) {
        std::cerr << "warning: specification is realizable; no counterstrategy written\n";
    }
}

int run_analysis(const Options& o, bool explain) {
    auto spec = gr1core::parse_spec_file(o.spec_path);
    for (const auto& w : spec.warnings) std::cerr << "warning: " << w << "\n";
    auto cfg = config_of(o);
    auto d = gr1core::diagnose(spec, cfg);
    if (o.format == "report") std::cout << gr1core::render_report(d) << "\n";
    else std::cout << gr1core::render_text(spec, d, explain);
    if (!o.dump_cnf.empty()) dump_cnf(o.dump_cnf, spec, d);
    if (!o.dump_counterstrategy.empty()) dump_counterstrategy(o.dump_counterstrategy, spec, cfg);
    return exit_code(d.verdict);
}

int run_game(const Options& o) {
    auto spec = std::make_shared<const gr1core::GR1Spec>(gr1core::parse_spec_file(o.spec_path));
    gr1core::GameServer game(config_of(o), o.seed);
    auto id = game.create_session(spec);
    auto snap = game.snapshot(id);
    if (snap["mode"] == "sandbox") std::cerr << "warning: " << snap["banner"].get<std::string>() << "\n";
    httplib::Server http;
    gr1core::bind_http(http, game);
    std::cout << "session " << id << " (spec " << snap["spec_id"].get<std::string>() << ")\n"
              << "listening on http://127.0.0.1:" << o.port << "/api\n"
              << std::flush;
    if (!http.listen("127.0.0.1", o.port)) {
        std::cerr << "error: cannot bind port " << o.port << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diagnose unsynthesizable GR(1) specifications"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* c) {
        c->add_option("spec", o.spec_path, "specification file")->required()->check(CLI::ExistingFile);
        c->add_option("--max-depth", o.max_depth, "unrolling depth")->check(CLI::NonNegativeNumber);
        c->add_option("--budget-ms", o.budget_ms, "time budget per realizability or SAT call");
        c->add_option("--state-cap", o.state_cap, "largest explicit state space");
        c->add_option("--seed", o.seed, "seed for sandbox randomness");
    };
    auto* check = app.add_subcommand("check", "print the verdict");
    auto* explain = app.add_subcommand("explain", "print the verdict and the unsynthesizable core");
    auto* game = app.add_subcommand("game", "serve the interactive game");
    for (auto* c : {check, explain}) {
        add_common(c);
        c->add_option("--dump-cnf", o.dump_cnf, "write the analysed CNF in DIMACS form");
        c->add_option("--dump-counterstrategy", o.dump_counterstrategy, "write the counterstrategy");
        c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "report"}));
    }
    add_common(game);
    game->add_option("--port", o.port, "HTTP port")->check(CLI::Range(1024, 65535));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    try {
        if (*game) return run_game(o);
        return run_analysis(o, bool(*explain));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

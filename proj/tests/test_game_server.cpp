#include "gr1core/game_http.hpp"
#include "gr1core/gr1core.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace gr1core;

namespace {

std::string fixture(const std::string& name) { return std::string(GR1CORE_FIXTURES) + "/" + name; }

MapResolver fixture_maps() {
    return [](const std::string& f) { return read_file(fixture(f)); };
}

json outputs_at(const GR1Spec& spec, const std::string& region, bool camera = false) {
    json out = json::object();
    for (const auto& o : spec.outputs) out[o.name] = o.name == region || (camera && o.name == "camera");
    return out;
}

} // namespace

TEST(GameSession, Spec5RejectsTheKitchen) {
    auto spec = std::make_shared<const GR1Spec>(parse_spec_file(fixture("spec5.spec")));
    GameServer game;
    auto id = game.create_session(spec);
    auto snap = game.snapshot(id);
    EXPECT_EQ(snap["mode"], "counterstrategy");
    EXPECT_TRUE(snap["pending_inputs"]["t_kitchen"].get<bool>());
    EXPECT_TRUE(snap["state"]["hall_w"].get<bool>());

    auto r = game.move(id, {{"outputs", outputs_at(*spec, "kitchen")}}, false);
    EXPECT_FALSE(r["accepted"].get<bool>());
    ASSERT_EQ(r["core"].size(), 1u);
    EXPECT_EQ(r["core"][0]["sentence_text"], "Avoid the kitchen.");
    EXPECT_EQ(r["snapshot"]["history"].size(), 1u);
    // rejected moves leave the state alone
    EXPECT_TRUE(r["snapshot"]["state"]["hall_w"].get<bool>());
}

TEST(GameSession, DryRunLeavesNoTrace) {
    auto spec = std::make_shared<const GR1Spec>(parse_spec_file(fixture("spec5.spec")));
    GameServer game;
    auto id = game.create_session(spec);
    auto r = game.move(id, {{"outputs", outputs_at(*spec, "hall_w")}}, true);
    EXPECT_TRUE(r["accepted"].get<bool>());
    EXPECT_TRUE(r["dry"].get<bool>());
    EXPECT_TRUE(r["snapshot"]["history"].empty());
    auto real = game.move(id, {{"outputs", outputs_at(*spec, "hall_w")}}, false);
    EXPECT_TRUE(real["accepted"].get<bool>());
    EXPECT_EQ(real["snapshot"]["history"].size(), 1u);
}

TEST(GameSession, AcceptedMovesFollowTheCounterstrategy) {
    auto spec = std::make_shared<const GR1Spec>(parse_spec_file(fixture("spec5.spec")));
    GameServer game;
    auto id = game.create_session(spec);
    for (int i = 0; i < 5; ++i) {
        auto r = game.move(id, {{"outputs", outputs_at(*spec, "hall_w")}}, false);
        ASSERT_TRUE(r["accepted"].get<bool>());
        EXPECT_EQ(r["snapshot"]["mode"], "counterstrategy");
        EXPECT_FALSE(r["snapshot"]["counterstrategy_state"].is_null());
    }
}

TEST(GameSession, IllegalTopologyMoveNamesTheMap) {
    auto spec = std::make_shared<const GR1Spec>(parse_spec_file(fixture("spec5.spec")));
    GameServer game;
    auto id = game.create_session(spec);
    auto r = game.move(id, {{"outputs", outputs_at(*spec, "r3")}}, false);
    EXPECT_FALSE(r["accepted"].get<bool>());
    bool topology = false;
    for (const auto& c : r["core"]) topology = topology || c["sentence_text"] == "environment topology";
    EXPECT_TRUE(topology);
}

TEST(GameSession, MalformedMoves) {
    auto spec = std::make_shared<const GR1Spec>(parse_spec_file(fixture("spec5.spec")));
    GameServer game;
    auto id = game.create_session(spec);
    EXPECT_THROW(game.move(id, {{"outputs", {{"kitchen", true}}}}, false), MalformedMove);
    auto bad = outputs_at(*spec, "hall_w");
    bad["t_kitchen"] = true;
    EXPECT_THROW(game.move(id, {{"outputs", bad}}, false), MalformedMove);
    EXPECT_THROW(game.move(id, json::object(), false), MalformedMove);
    EXPECT_THROW(game.move("nope", {{"outputs", outputs_at(*spec, "hall_w")}}, false), SessionNotFound);
}

TEST(GameSession, RealizableSpecsUseTheSandbox) {
    GameServer game(Config{}, 5);
    auto id = game.create_session("[INPUT]\nx\n[OUTPUT]\ny\n[SYS_TRANS]\nnext(y) <-> next(x)\n");
    auto snap = game.snapshot(id);
    EXPECT_EQ(snap["mode"], "sandbox");
    EXPECT_FALSE(snap["banner"].get<std::string>().empty());
    EXPECT_TRUE(snap["counterstrategy_state"].is_null());
}

TEST(GameServer, Routes) {
    GameServer game(Config{}, 0, fixture_maps());
    auto spec_text = read_file(fixture("spec5.spec"));
    auto created = game.handle("POST", "/api/session", {}, json{{"spec", spec_text}}.dump());
    ASSERT_EQ(created.status, 200) << created.body;
    auto body = json::parse(created.body);
    std::string id = body["session_id"];
    EXPECT_EQ(id.size(), 32u);
    std::string spec_id = body["snapshot"]["spec_id"];

    auto got = game.handle("GET", "/api/session/" + id, {}, "");
    EXPECT_EQ(got.status, 200);
    EXPECT_EQ(json::parse(got.body)["session_id"], id);

    auto map = game.handle("GET", "/api/map/" + spec_id, {}, "");
    ASSERT_EQ(map.status, 200);
    EXPECT_EQ(json::parse(map.body)["regions"].size(), 10u);

    auto spec = parse_spec(spec_text, fixture_maps());
    json move{{"outputs", outputs_at(spec, "kitchen")}};
    auto dry = game.handle("POST", "/api/session/" + id + "/move", {{"dry", "true"}}, move.dump());
    ASSERT_EQ(dry.status, 200);
    EXPECT_TRUE(json::parse(dry.body)["dry"].get<bool>());
    EXPECT_TRUE(json::parse(dry.body)["snapshot"]["history"].empty());

    EXPECT_EQ(game.handle("GET", "/api/session/deadbeef", {}, "").status, 404);
    EXPECT_EQ(game.handle("GET", "/api/nothing", {}, "").status, 404);
    EXPECT_EQ(game.handle("POST", "/api/session", {}, "{not json").status, 400);
    EXPECT_EQ(game.handle("POST", "/api/session", {}, "{}").status, 400);
    EXPECT_EQ(game.handle("POST", "/api/session/" + id + "/move", {}, "{}").status, 400);
    EXPECT_EQ(game.handle("GET", "/api/map/spec-99", {}, "").status, 400);
}

TEST(GameServer, SessionIdsAreDistinct) {
    GameServer game;
    std::set<std::string> ids;
    for (int i = 0; i < 20; ++i) ids.insert(game.create_session("[OUTPUT]\ny\n"));
    EXPECT_EQ(ids.size(), 20u);
}

TEST(GameServer, ConcurrentMovesOnDistinctSessions) {
    auto spec = std::make_shared<const GR1Spec>(parse_spec_file(fixture("spec5.spec")));
    GameServer game;
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(game.create_session(spec));
    std::vector<std::thread> threads;
    for (const auto& id : ids)
        threads.emplace_back([&, id] {
            for (int k = 0; k < 10; ++k) game.move(id, {{"outputs", outputs_at(*spec, "hall_w")}}, false);
        });
    for (auto& t : threads) t.join();
    for (const auto& id : ids) EXPECT_EQ(game.snapshot(id)["history"].size(), 10u);
}

TEST(GameHttp, ServesTheApiOverHttp) {
    GameServer game(Config{}, 0, fixture_maps());
    httplib::Server http;
    bind_http(http, game);
    int port = http.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread server([&] { http.listen_after_bind(); });
    http.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto created = client.Post("/api/session", json{{"spec", read_file(fixture("spec5.spec"))}}.dump(),
                               "application/json");
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 200);
    std::string id = json::parse(created->body)["session_id"];
    auto spec = parse_spec_file(fixture("spec5.spec"));
    auto moved = client.Post("/api/session/" + id + "/move?dry=true",
                             json{{"outputs", outputs_at(spec, "kitchen")}}.dump(), "application/json");
    ASSERT_TRUE(moved);
    auto body = json::parse(moved->body);
    EXPECT_FALSE(body["accepted"].get<bool>());
    EXPECT_TRUE(body["dry"].get<bool>());
    auto missing = client.Get("/api/session/ffff");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);

    http.stop();
    server.join();
}

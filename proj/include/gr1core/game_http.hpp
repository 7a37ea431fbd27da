#pragma once

#include "gr1core/game_server.hpp"

#include <httplib.h>

namespace gr1core {

// Routes /api requests of an httplib server to a GameServer.
inline void bind_http(httplib::Server& http, GameServer& game) {
    auto forward = [&game](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query[k] = v;
        auto r = game.handle(req.method, req.path, query, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    http.Get(R"(/api/.*)", forward);
    http.Post(R"(/api/.*)", forward);
}

} // namespace gr1core

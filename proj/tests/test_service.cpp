#include <catch_amalgamated.hpp>

#include <json.hpp>

#include "cavcool/schedule.hpp"
#include "cavcool/service.hpp"
#include "common.hpp"

using namespace cavcool;
using json = nlohmann::json;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Client {
    ControlService svc;

    std::pair<int, json> call(const std::string& method, const std::string& path, const json& body = nullptr) {
        const auto r = svc.handle(method, path, body.is_null() ? "" : body.dump());
        REQUIRE(r.content_type == "application/json");
        return {r.status, json::parse(r.body)};
    }

    std::string create(const json& body = json::object()) {
        const auto [status, j] = call("POST", "/sessions", body);
        REQUIRE(status == 201);
        return j["id"].get<std::string>();
    }
};

std::vector<double> populations(const json& summary) {
    std::vector<double> p;
    for (const auto& e : summary["populations"]) p.push_back(e["population"].get<double>());
    return p;
}

}  // namespace

TEST_CASE("session lifecycle") {
    Client c;
    const auto id = c.create();
    REQUIRE(id == "s1");
    auto [st, j] = c.call("GET", "/sessions/" + id);
    REQUIRE(st == 200);
    REQUIRE(j["molecule"] == "OH");
    REQUIRE(j["populations"].size() == 9);
    REQUIRE(j["transitions"].size() == 7);
    REQUIRE_THAT(j["mean_J"].get<double>(), WithinAbs(2.44, 0.02));
    REQUIRE_THAT(j["kappa_Hz"].get<double>(), WithinRel(75e3, 1e-12));
    REQUIRE_THAT(j["default_duration_ms"].get<double>(), WithinRel(60.0, 1e-12));
    REQUIRE(j["undo_depth"] == 0);
    REQUIRE(j["history"].size() == 1);

    REQUIRE(c.create() == "s2");
    auto [ls, list] = c.call("GET", "/sessions");
    REQUIRE(ls == 200);
    REQUIRE(list["sessions"] == json({"s1", "s2"}));

    auto [ds, del] = c.call("DELETE", "/sessions/s1");
    REQUIRE(ds == 200);
    REQUIRE(del["deleted"] == "s1");
    REQUIRE(c.call("GET", "/sessions/s1").first == 404);
    REQUIRE(c.call("GET", "/nowhere").first == 404);
    REQUIRE(c.call("PUT", "/sessions").first == 405);
}

TEST_CASE("create with config name, text and overrides") {
    Client c;
    auto [st, j] = c.call("POST", "/sessions", {{"config", "defaults-no"}});
    REQUIRE(st == 201);
    REQUIRE(j["molecule"] == "NO");

    auto [st2, j2] = c.call("POST", "/sessions", {{"overrides", {{"J_max", 5}, {"step_duration_ms", 10.5}}}});
    REQUIRE(st2 == 201);
    REQUIRE(j2["populations"].size() == 6);
    REQUIRE_THAT(j2["default_duration_ms"].get<double>(), WithinRel(10.5, 1e-12));

    auto [st3, j3] = c.call("POST", "/sessions", {{"config_text", "molecule = oh.mol\npolarizability_file = oh_alpha_532.dat\nJ_max = 4\n"}});
    REQUIRE(st3 == 201);
    REQUIRE(j3["populations"].size() == 5);

    auto [e1, b1] = c.call("POST", "/sessions", {{"config", "no-such-config"}});
    REQUIRE(e1 == 400);
    REQUIRE(b1["field"] == "/config");
    auto [e2, b2] = c.call("POST", "/sessions", {{"overrides", {{"bogus_key", 1}}}});
    REQUIRE(e2 == 400);
    REQUIRE(b2["error"].get<std::string>().find("bogus_key") != std::string::npos);
    auto [e3, b3] = c.call("POST", "/sessions", {{"overrides", {{"J_max", json::array()}}}});
    REQUIRE(e3 == 400);
    REQUIRE(b3["field"] == "/overrides/J_max");
    REQUIRE(c.svc.handle("POST", "/sessions", "{not json").status == 400);
    REQUIRE(c.svc.handle("POST", "/sessions", "[1,2]").status == 400);
}

TEST_CASE("step validation") {
    Client c;
    const auto id = c.create();
    const auto path = "/sessions/" + id + "/step";
    auto expect = [&](const json& body, int status, const std::string& field) {
        auto [st, j] = c.call("POST", path, body);
        REQUIRE(st == status);
        if (!field.empty()) REQUIRE(j["field"] == field);
        REQUIRE(j.contains("error"));
    };
    expect({{"transition", "J3-1"}, {"duration_ms", 60}}, 400, "/transition");
    expect({{"transition", 3}, {"duration_ms", 60}}, 400, "/transition");
    expect({{"duration_ms", 60}}, 400, "/transition");
    expect({{"transition", "v0-0:J3-1"}}, 400, "/duration_ms");
    expect({{"transition", "v0-0:J3-1"}, {"duration_ms", -1}}, 400, "/duration_ms");
    expect({{"transition", "v0-0:J3-1"}, {"duration_ms", 60}, {"fsr_override_Hz", 0}}, 400, "/fsr_override_Hz");
    expect({{"offset_Hz", "x"}, {"duration_ms", 60}}, 400, "/offset_Hz");
    // forbidden: heating direction, odd dJ, out of basis
    expect({{"transition", "v0-0:J1-3"}, {"duration_ms", 60}}, 409, "/transition");
    expect({{"transition", "v0-0:J3-2"}, {"duration_ms", 60}}, 409, "/transition");
    expect({{"transition", "v0-0:J14-12"}, {"duration_ms", 60}}, 409, "/transition");
    // nothing changed
    auto [st, j] = c.call("GET", "/sessions/" + id);
    REQUIRE(j["steps"].empty());
    REQUIRE(j["undo_depth"] == 0);
}

TEST_CASE("step and undo") {
    Client c;
    const auto id = c.create();
    const auto base = "/sessions/" + id;
    auto [s0, j0] = c.call("GET", base);
    REQUIRE(c.call("POST", base + "/undo").first == 409);

    auto [s1, j1] = c.call("POST", base + "/step", {{"transition", "v0-0:J3-1"}, {"duration_ms", 60}});
    REQUIRE(s1 == 200);
    REQUIRE_THAT(j1["time_ms"].get<double>(), WithinRel(60.0, 1e-12));
    REQUIRE(j1["steps"].size() == 1);
    REQUIRE(j1["steps"][0]["target"] == "v0-0:J3-1");
    REQUIRE(j1["history"].size() == 2);
    REQUIRE(j1["history"][1]["step"] == "v0-0:J3-1");
    REQUIRE(j1["undo_depth"] == 1);
    const auto& pops = j1["populations"];
    REQUIRE(pops[3]["population"].get<double>() < j0["populations"][3]["population"].get<double>());
    REQUIRE(pops[1]["population"].get<double>() > j0["populations"][1]["population"].get<double>());
    REQUIRE_THAT(j1["odd_fraction"].get<double>(), WithinAbs(j0["odd_fraction"].get<double>(), 1e-12));

    auto [s2, j2] = c.call("POST", base + "/step", {{"offset_Hz", 12345.0}, {"duration_ms", 5}, {"fsr_override_Hz", 1.5e10}});
    REQUIRE(s2 == 200);
    REQUIRE_THAT(j2["laser_offset_Hz"].get<double>(), WithinRel(12345.0, 1e-12));
    REQUIRE_THAT(j2["fsr_Hz"].get<double>(), WithinRel(1.5e10, 1e-12));
    REQUIRE_THAT(j2["steps"][1]["fsr_override_Hz"].get<double>(), WithinRel(1.5e10, 1e-12));

    auto [u1, k1] = c.call("POST", base + "/undo");
    REQUIRE(u1 == 200);
    REQUIRE(populations(k1) == populations(j1));
    REQUIRE(k1["laser_offset_Hz"] == j1["laser_offset_Hz"]);
    REQUIRE(k1["fsr_Hz"] == j1["fsr_Hz"]);
    REQUIRE(k1["history"] == j1["history"]);
    auto [u2, k2] = c.call("POST", base + "/undo");
    REQUIRE(u2 == 200);
    REQUIRE(k2 == j0);
    REQUIRE(c.call("POST", base + "/undo").first == 409);
}

TEST_CASE("undo depth is bounded") {
    ServiceOptions opt;
    opt.undo_depth = 2;
    ControlService svc(opt);
    REQUIRE(svc.handle("POST", "/sessions", "{}").status == 201);
    const std::string step = R"({"transition":"v0-0:J2-0","duration_ms":1})";
    for (int k = 0; k < 4; ++k) REQUIRE(svc.handle("POST", "/sessions/s1/step", step).status == 200);
    REQUIRE(json::parse(svc.handle("GET", "/sessions/s1", "").body)["undo_depth"] == 2);
    REQUIRE(svc.handle("POST", "/sessions/s1/undo", "").status == 200);
    REQUIRE(svc.handle("POST", "/sessions/s1/undo", "").status == 200);
    REQUIRE(svc.handle("POST", "/sessions/s1/undo", "").status == 409);
    const auto j = json::parse(svc.handle("GET", "/sessions/s1", "").body);
    REQUIRE(j["steps"].size() == 2);
}

TEST_CASE("spectrum and rates") {
    Client c;
    const auto id = c.create();
    auto [s, sp] = c.call("GET", "/sessions/" + id + "/spectrum");
    REQUIRE(s == 200);
    int anti = 0, stokes = 0, ray = 0;
    for (const auto& l : sp["lines"]) {
        const auto kind = l["kind"].get<std::string>();
        REQUIRE(l["selectable"].get<bool>() == (kind == "anti-stokes"));
        anti += kind == "anti-stokes";
        stokes += kind == "stokes";
        ray += kind == "rayleigh";
        REQUIRE(std::abs(l["mode_detuning_Hz"].get<double>()) <= 0.5 * sp["fsr_Hz"].get<double>());
    }
    REQUIRE(anti == 7);
    REQUIRE(stokes == 7);
    REQUIRE(ray == 9);
    REQUIRE(sp["table"].get<std::string>().starts_with("#"));

    auto [r, rates] = c.call("GET", "/sessions/" + id + "/rates");
    REQUIRE(r == 200);
    REQUIRE(rates["states"].size() == 9);
    REQUIRE(rates["cavity_plus"].size() == 9);
    REQUIRE(rates["cavity_plus"][0].size() == 9);
    for (std::size_t i = 0; i < 9; ++i) REQUIRE(rates["spontaneous"][i][i] == 0.0);

    // tuning onto the line makes it resonant with a mode
    const auto j = c.call("POST", "/sessions/" + id + "/step", {{"transition", "v0-0:J4-2"}, {"duration_ms", 1}}).second;
    const auto sp2 = c.call("GET", "/sessions/" + id + "/spectrum").second;
    bool found = false;
    for (const auto& l : sp2["lines"])
        if (l["label"] == "v0-0:J4-2") {
            found = true;
            REQUIRE(std::abs(l["mode_detuning_Hz"].get<double>()) < 1e-3 * j["kappa_Hz"].get<double>());
        }
    REQUIRE(found);
}

TEST_CASE("exported schedule replays to the same populations in batch mode") {
    Client c;
    const auto id = c.create();
    const auto base = "/sessions/" + id;
    for (const char* t : {"v0-0:J8-6", "v0-0:J6-4", "v0-0:J5-3", "v0-0:J3-1", "v0-0:J2-0"})
        REQUIRE(c.call("POST", base + "/step", {{"transition", t}, {"duration_ms", 40}}).first == 200);
    REQUIRE(c.call("POST", base + "/step", {{"offset_Hz", -2.0e5}, {"duration_ms", 7.5}}).first == 200);
    REQUIRE(c.call("POST", base + "/step", {{"transition", "v0-0:J4-2"}, {"duration_ms", 30}, {"fsr_override_Hz", 14960848495.781202}}).first == 200);
    const auto final_state = c.call("GET", base).second;

    const auto ex = c.svc.handle("GET", base + "/export", "", {{"format", "schedule"}});
    REQUIRE(ex.status == 200);
    REQUIRE(ex.content_type == "text/plain");
    const auto sched = parse_schedule(ex.body, "export");
    REQUIRE(sched.steps.size() == 7);

    const auto cfg = testing::config("defaults-oh");
    const auto& m = testing::model_for("defaults-oh");
    const auto t = run(sched, m, initial_populations(cfg, m));
    const auto p = populations(final_state);
    REQUIRE(p.size() == t.back().p.size());
    for (std::size_t i = 0; i < p.size(); ++i) REQUIRE_THAT(t.back().p[i], WithinAbs(p[i], 1e-9));

    const auto tr = c.svc.handle("GET", base + "/export", "");
    REQUIRE(tr.status == 200);
    REQUIRE(tr.body.find("molecule = OH") != std::string::npos);
    REQUIRE(c.svc.handle("GET", base + "/export", "", {{"format", "xml"}}).status == 400);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <thread>

#include <httplib.h>

#include "moonlab/oracles.hpp"
#include "moonlab/service.hpp"

using namespace moonlab;
using namespace moonlab::service;

namespace {

ServiceConfig test_config() {
    ServiceConfig c;
    c.threads = 2;
    return c;
}

}  // namespace

TEST(Health, Ok) {
    const Response r = handle_health();
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body["status"], "ok");
    EXPECT_TRUE(r.body["version"].is_string());
}

TEST(Simulate, SeriesMean) {
    const Response r = handle_simulate(R"({"model":"linear","n":3,"m":3,"p":0,"samples":1000000,"seed":1})", test_config());
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_NEAR(r.body["stats"]["mean"].get<double>(), 1.0 / 3.0, 0.001);
    EXPECT_EQ(r.body["request"]["m"], 3);
    EXPECT_EQ(r.body["request"]["kde_grid"], 512);
    EXPECT_LE(r.body["reliability"]["t"].size(), kMaxCurvePoints);
    EXPECT_FALSE(r.body.contains("oracle"));
    EXPECT_TRUE(r.body.contains("compute_ms"));
}

TEST(Simulate, Defaults) {
    const Response r = handle_simulate(R"({"samples":20000})", test_config());
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["request"]["model"], "linear");
    EXPECT_EQ(r.body["request"]["n"], 3);
    EXPECT_EQ(r.body["request"]["m"], 2);
    EXPECT_EQ(r.body["request"]["seed"], 0);
}

TEST(Simulate, ValidationNamesField) {
    const Response r = handle_simulate(R"({"m":0})", test_config());
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(r.body["error"], "validation");
    bool named = false;
    for (const auto& d : r.body["details"]) named = named || d["field"] == "m";
    EXPECT_TRUE(named) << r.body.dump();
}

TEST(Simulate, TypeErrorsCollected) {
    const Response r = handle_simulate(R"({"n":"three","p":"x","model":"other"})", test_config());
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(r.body["details"].size(), 3u) << r.body.dump();
}

TEST(Simulate, BadBodies) {
    EXPECT_EQ(handle_simulate("{not json", test_config()).status, 400);
    EXPECT_EQ(handle_simulate("[1,2]", test_config()).status, 400);
    EXPECT_EQ(handle_simulate(R"({"kde_grid":8})", test_config()).status, 422);
    EXPECT_EQ(handle_simulate(R"({"p":1.5})", test_config()).status, 422);
}

TEST(Simulate, OverCap) {
    ServiceConfig c = test_config();
    c.sample_cap = 1000;
    const Response r = handle_simulate(R"({"samples":1001})", c);
    EXPECT_EQ(r.status, 413);
    EXPECT_EQ(r.body["error"], "too_large");
    EXPECT_EQ(r.body["max_samples"], 1000);
}

TEST(Simulate, IncludedOracleMatchesClosedForm) {
    const Response r = handle_simulate(
        R"({"model":"global-ccf","n":3,"m":1,"p":0.4,"samples":50000,"include_oracle":true})", test_config());
    ASSERT_EQ(r.status, 200);
    const auto& o = r.body["oracle"];
    ASSERT_EQ(o["t"].size(), o["reliability"].size());
    ASSERT_GT(o["t"].size(), 10u);
    const oracle::SurvivalFunction s{DistributionSpec{}};
    for (std::size_t i = 0; i < o["t"].size(); i += 37) {
        const double t = o["t"][i];
        EXPECT_NEAR(o["reliability"][i].get<double>(),
                    oracle::model_reliability(DependencyModel::GlobalCCF, t, 0.4, {3, 1}, s), 1e-9);
    }
}

TEST(Sweep, DefaultGrid) {
    const Response r = handle_sweep(R"({"model":"global-ccf","m":2,"samples":200000,"seed":5})", test_config());
    ASSERT_EQ(r.status, 200) << r.body.dump();
    ASSERT_EQ(r.body["points"].size(), 20u);
    EXPECT_EQ(r.body["relative"]["mean"][0], 1.0);
    EXPECT_EQ(r.body["request"]["p_grid"].size(), 20u);
    for (const auto& pt : r.body["points"]) {
        EXPECT_NEAR(pt["stats"]["median"].get<double>(), std::numbers::ln2, 0.02) << pt["p"];
    }
}

TEST(Sweep, GridForms) {
    EXPECT_EQ(handle_sweep(R"({"samples":5000,"p_grid":3})", test_config()).body["points"].size(), 3u);
    EXPECT_EQ(handle_sweep(R"({"samples":5000,"p_grid":[0.2,0.7]})", test_config()).body["points"].size(), 2u);
    EXPECT_EQ(handle_sweep(R"({"samples":5000,"p_grid":1})", test_config()).status, 422);
    EXPECT_EQ(handle_sweep(R"({"samples":5000,"p_grid":[]})", test_config()).status, 422);
    EXPECT_EQ(handle_sweep(R"({"samples":5000,"p_grid":[0.7,0.2]})", test_config()).status, 422);
}

TEST(Sweep, Idempotent) {
    const std::string body = R"({"model":"marginal-ccf","samples":20000,"seed":9,"p_grid":4})";
    Json a = handle_sweep(body, test_config()).body;
    Json b = handle_sweep(body, test_config()).body;
    a.erase("compute_ms");
    b.erase("compute_ms");
    EXPECT_EQ(a.dump(), b.dump());
}

TEST(Oracle, Endpoint) {
    const Response r = handle_oracle(R"({"model":"global-ccf","n":3,"m":3,"p":0.5,"t":1})", test_config());
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_NEAR(r.body["reliability"].get<double>(), 0.20883325476965314, 1e-14);
    EXPECT_EQ(r.body["method"], "closed-form");

    const Response u = handle_oracle(R"({"shape":2,"p":0.5,"mean":true})", test_config());
    EXPECT_EQ(u.status, 422);
    EXPECT_EQ(u.body["error"], "unsupported");
}

TEST(Server, LiveRoundTrip) {
    ServiceConfig c = test_config();
    c.port = 0;
    c.sample_cap = 100'000;
    Server server(c);
    const int port = server.bind();
    ASSERT_GT(port, 0);
    std::thread worker([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);
    auto health = client.Get("/api/v1/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(Json::parse(health->body)["status"], "ok");

    auto sim = client.Post("/api/v1/simulate", R"({"samples":10000})", "application/json");
    ASSERT_TRUE(sim);
    EXPECT_EQ(sim->status, 200);
    EXPECT_EQ(sim->get_header_value("Content-Type"), "application/json");

    auto big = client.Post("/api/v1/simulate", R"({"samples":100001})", "application/json");
    ASSERT_TRUE(big);
    EXPECT_EQ(big->status, 413);

    auto bad = client.Post("/api/v1/sweep", R"({"m":9})", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 422);

    server.stop();
    worker.join();
}

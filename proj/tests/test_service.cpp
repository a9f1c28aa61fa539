#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>

#include "cubealg/service/service.hpp"
#include "support/fixtures.hpp"

using namespace cubealg;
using namespace cubealg::service;

namespace {

std::string create_body() {
  json body = {{"cubeDef", json::parse(fixtures::read("running_example.json"))},
               {"facts", fixtures::read("running_sales.csv")}};
  return body.dump();
}

std::string new_session(Service& svc) {
  auto r = svc.create_session(create_body());
  EXPECT_EQ(r.status, 201) << r.body.dump();
  return r.body.at("sessionId").get<std::string>();
}

Response statement(Service& svc, const std::string& id, const std::string& text) {
  return svc.post_op(id, json{{"statement", text}}.dump());
}

}  // namespace

TEST(Service, CreateSession) {
  Service svc;
  auto r = svc.create_session(create_body());
  ASSERT_EQ(r.status, 201);
  const auto& summary = r.body["schemaSummary"];
  EXPECT_EQ(summary["cellCount"], 496);
  EXPECT_EQ(summary["measures"], json::array({"sales"}));
  EXPECT_EQ(summary["dimensions"][1]["name"], "Location");
  EXPECT_EQ(summary["dimensions"][1]["bottomLevel"], "City");
  EXPECT_EQ(svc.session_count(), 1u);
}

TEST(Service, CreateSessionErrors) {
  Service svc;
  EXPECT_EQ(svc.create_session("{").status, 400);
  EXPECT_EQ(svc.create_session("{}").status, 400);
  json unsound = {{"cubeDef", fixtures::read("unsound_time.json")}};
  auto r = svc.create_session(unsound.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_TRUE(r.body.contains("error"));
  EXPECT_EQ(svc.session_count(), 0u);
}

TEST(Service, DiceThenRollUp) {
  Service svc;
  auto id = new_session(svc);
  auto r = statement(svc, id, "DICE Location.Region = flanders OR Location.Region = south");
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["destroyedCellCount"], 248);
  EXPECT_EQ(r.body["opCount"], 1);
  EXPECT_FALSE(r.body["stepTrace"].empty());

  json op = {{"type", "ROLL-UP"}, {"dim", "Location"}, {"level", "Country"},
             {"aggs", {{{"measure", "sales"}, {"fn", "SUM"}}}}};
  r = svc.post_op(id, json{{"op", op}}.dump());
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["opCount"], 2);
  EXPECT_EQ(r.body["label"], "ROLL-UP(Location, Country, {(sales, SUM)})");
}

TEST(Service, RollUpViewFlagsRepresentatives) {
  Service svc;
  auto id = new_session(svc);
  ASSERT_EQ(statement(svc, id, "ROLLUP Location Country {sales: SUM}").status, 200);
  auto v = svc.get_view(id, {{"row", "Location"}, {"col", "Product"}, {"fixed", "Time=jan05"}});
  ASSERT_EQ(v.status, 200) << v.body.dump();
  EXPECT_EQ(v.body["measure"], "tau1");
  const auto& rows = v.body["rows"];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool rep = rows[i] == "antwerp" || rows[i] == "paris";
    for (const auto& cell : v.body["cells"][i]) {
      EXPECT_EQ(cell["status"], rep ? "active" : "inactive") << rows[i];
    }
  }
  EXPECT_EQ(svc.get_view(id, {{"row", "Location"}}).status, 400);
  EXPECT_EQ(svc.get_view(id, {{"row", "Location"}, {"col", "Product"}, {"approx", "0"}}).status,
            400);
  EXPECT_EQ(svc.get_view(id, {{"row", "Store"}, {"col", "Product"}}).status, 422);
}

TEST(Service, FailedOperationLeavesSessionUntouched) {
  Service svc;
  auto id = new_session(svc);
  ASSERT_EQ(statement(svc, id, "SLICE Product").status, 200);
  auto before = svc.get_log(id).body;
  EXPECT_EQ(statement(svc, id, "ROLLUP Location Planet {sales: SUM}").status, 422);
  EXPECT_EQ(statement(svc, id, "TRACE").status, 422);
  EXPECT_EQ(statement(svc, id, "DICE (").status, 422);
  EXPECT_EQ(svc.get_log(id).body, before);
}

TEST(Service, LogReplayAndSelfcheck) {
  Service svc;
  auto id = new_session(svc);
  statement(svc, id, "DICE sales > 10");
  statement(svc, id, "ROLLUP Time Week {sales: AVG}");
  auto log = svc.get_log(id);
  ASSERT_EQ(log.status, 200);
  ASSERT_EQ(log.body["entries"].size(), 2u);
  EXPECT_EQ(log.body["entries"][1]["op"]["type"], "ROLL-UP");

  auto check = svc.selfcheck(id);
  EXPECT_EQ(check.status, 200);
  EXPECT_TRUE(check.body["ok"].get<bool>()) << check.body.dump();

  auto fresh = svc.replay(id, json{{"prefixLength", 0}}.dump());
  ASSERT_EQ(fresh.status, 201);
  auto copy = fresh.body["sessionId"].get<std::string>();
  EXPECT_NE(copy, id);
  EXPECT_TRUE(svc.get_log(copy).body["entries"].empty());
  auto one = svc.replay(id, json{{"prefixLength", 1}}.dump());
  EXPECT_EQ(svc.get_log(one.body["sessionId"].get<std::string>()).body["entries"].size(), 1u);
  EXPECT_EQ(svc.replay(id, json{{"prefixLength", 3}}.dump()).status, 422);
}

TEST(Service, UnknownSessionAndDelete) {
  Service svc;
  EXPECT_EQ(svc.get_schema("nope").status, 404);
  EXPECT_EQ(svc.post_op("nope", "{}").status, 404);
  auto id = new_session(svc);
  EXPECT_EQ(svc.remove(id).status, 204);
  EXPECT_EQ(svc.remove(id).status, 404);
  EXPECT_EQ(svc.session_count(), 0u);
}

TEST(ServiceJson, OperationRoundTrip) {
  std::vector<algebra::OlapOp> ops = {
      algebra::ops::Dice{algebra::or_(
          algebra::not_(algebra::level_lt("Time", "Week", "w2", engine::Side::kConstLess)),
          algebra::and_(algebra::measure_eq("sales", exactnum::Rational(1, 3)),
                        algebra::measure_lt("sales", 4)))},
      algebra::ops::Slice{"Product"},
      algebra::ops::SliceDice{"Location", "paris"},
      algebra::ops::RollUp{"Time", "Week", {{"sales", algebra::AggFn::kCountDistinct}}},
      algebra::ops::DrillDown{"Time", "Day", {{"sales", algebra::AggFn::kMin}}}};
  for (const auto& op : ops) {
    EXPECT_EQ(op_from_json(op_to_json(op)), op) << op_to_json(op).dump();
  }
  auto parsed = condition_from_json("sales > 3 AND Location.City = paris");
  EXPECT_EQ(*parsed, *algebra::and_(
                         algebra::measure_lt("sales", 3, engine::Side::kConstLess),
                         algebra::level_eq("Location", "City", "paris")));
}

TEST(ServiceHttp, RoundTripOverLoopback) {
  Service svc;
  httplib::Server server;
  mount(svc, server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/sessions", create_body(), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  auto id = json::parse(created->body)["sessionId"].get<std::string>();

  auto op = client.Post("/sessions/" + id + "/ops",
                        json{{"statement", "SLICEDICE Location paris"}}.dump(),
                        "application/json");
  ASSERT_TRUE(op);
  EXPECT_EQ(op->status, 200);
  auto view = client.Get("/sessions/" + id +
                         "/view?row=Location&col=Time&fixed=Product%3Dbrio&measure=sales");
  ASSERT_TRUE(view);
  EXPECT_EQ(view->status, 200);
  EXPECT_EQ(json::parse(view->body)["cells"][2][0]["status"], "active");
  auto preflight = client.Options("/sessions");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  auto gone = client.Delete("/sessions/" + id);
  ASSERT_TRUE(gone);
  EXPECT_EQ(gone->status, 204);
  EXPECT_EQ(client.Get("/sessions/" + id + "/log")->status, 404);

  server.stop();
  worker.join();
}

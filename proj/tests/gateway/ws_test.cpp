#include <gtest/gtest.h>

#include "gateway_harness.hpp"

namespace qarena::gateway {
namespace {

using nlohmann::json;
using qarena::testing::FakeSink;
using qarena::testing::GatewayHarness;

struct Client {
  std::shared_ptr<FakeSink> sink = std::make_shared<FakeSink>();
  std::shared_ptr<WsConnection> conn;
};

class WsTest : public ::testing::Test {
 protected:
  GatewayHarness h;
  std::map<std::string, std::string> tokens;

  std::string room(const std::string& creator_token, json config = {{"name", "lab"}}) {
    auto r = h.call("POST", "/api/rooms", config, creator_token);
    if (r.status != 201) throw std::runtime_error(r.body.dump());
    return r.body["id"];
  }

  Client connect(const std::string& room_id, const std::string& token) {
    Client c;
    c.conn = h.service.ws_open("/ws/rooms/" + room_id + "?token=" + token, c.sink);
    return c;
  }

  void send(Client& c, const std::string& type, json payload = json::object()) {
    h.service.ws_message(c.conn, json{{"type", type}, {"payload", payload}}.dump());
  }

  static json last(const Client& c) { return c.sink->messages().back(); }
};

TEST_F(WsTest, BadTokenCloses4001) {
  const std::string id = room(h.admin_token);
  Client c = connect(id, "not-a-token");
  EXPECT_EQ(c.conn, nullptr);
  EXPECT_EQ(c.sink->close_code(), kCloseBadToken);
}

TEST_F(WsTest, UnknownRoomCloses4004) {
  Client c = connect("room-999", h.admin_token);
  EXPECT_EQ(c.conn, nullptr);
  EXPECT_EQ(c.sink->close_code(), kCloseUnknownRoom);
}

TEST_F(WsTest, UnknownTypeAnsweredWithError) {
  const std::string id = room(h.admin_token);
  Client c = connect(id, h.admin_token);
  send(c, "dance");
  ASSERT_EQ(c.sink->messages().size(), 1u);
  EXPECT_EQ(last(c)["type"], "error");
  EXPECT_EQ(last(c)["payload"]["code"], "UNKNOWN_TYPE");
  EXPECT_EQ(c.sink->close_code(), 0);
  send(c, "joined");
  EXPECT_EQ(last(c)["payload"]["code"], "UNKNOWN_TYPE");
}

TEST_F(WsTest, MalformedFrameIsProtocolViolation) {
  const std::string id = room(h.admin_token);
  Client c = connect(id, h.admin_token);
  h.service.ws_message(c.conn, "not json");
  EXPECT_EQ(c.sink->close_code(), kCloseProtocol);
  Client d = connect(id, h.admin_token);
  h.service.ws_message(d.conn, R"({"payload":{}})");
  EXPECT_EQ(d.sink->close_code(), kCloseProtocol);
}

TEST_F(WsTest, RateCapClosesConnection) {
  const std::string id = room(h.admin_token);
  Client c = connect(id, h.admin_token);
  send(c, "join");
  for (int i = 0; i < 9; ++i) send(c, "chat", {{"text", "hi"}});
  EXPECT_EQ(c.sink->close_code(), 0);
  h.clock.advance(kSecond);
  for (int i = 0; i < 10; ++i) send(c, "chat", {{"text", "again"}});
  EXPECT_EQ(c.sink->close_code(), 0);
  send(c, "chat", {{"text", "one too many"}});
  EXPECT_EQ(c.sink->close_code(), kCloseProtocol);
}

TEST_F(WsTest, NonCreatorStartGetsError) {
  const std::string a = h.student("alice"), b = h.student("bob");
  const std::string id = room(a);
  Client ca = connect(id, a), cb = connect(id, b);
  send(ca, "join");
  send(cb, "join");
  send(cb, "start");
  EXPECT_EQ(last(cb)["type"], "error");
  EXPECT_EQ(last(cb)["payload"]["code"], "NOT_CREATOR");
  for (const auto& m : ca.sink->messages()) EXPECT_NE(m["type"], "error");
}

TEST_F(WsTest, ChatReachesMembersOnly) {
  const std::string a = h.student("alice"), b = h.student("bob"), c = h.student("carl");
  const std::string id = room(a);
  Client ca = connect(id, a), cb = connect(id, b), cc = connect(id, c);
  send(ca, "join");
  send(cb, "join");
  send(ca, "chat", {{"text", "hello"}});
  EXPECT_EQ(cb.sink->of_type("chat_broadcast").size(), 1u);
  EXPECT_EQ(cb.sink->of_type("chat_broadcast")[0]["payload"]["text"], "hello");
  EXPECT_TRUE(cc.sink->messages().empty());
}

TEST_F(WsTest, SpectatorAnswerIsRejectedAndStaysOpen) {
  const std::string a = h.student("alice"), b = h.student("bob"), s = h.student("sam");
  const std::string id = room(a);
  Client ca = connect(id, a), cb = connect(id, b), cs = connect(id, s);
  send(ca, "join");
  send(cb, "join");
  send(cs, "join", {{"spectator", true}});
  send(ca, "start");
  ASSERT_EQ(cs.sink->of_type("round_begin").size(), 1u);
  send(cs, "answer", {{"text", "SELECT 1"}});
  EXPECT_EQ(last(cs)["type"], "error");
  EXPECT_EQ(last(cs)["payload"]["code"], "NOT_PARTICIPANT");
  EXPECT_EQ(cs.sink->close_code(), 0);
  send(cs, "chat", {{"text", "go alice"}});
  EXPECT_EQ(ca.sink->of_type("chat_broadcast").size(), 1u);
}

TEST_F(WsTest, SeqStrictlyIncreasesAndRoundBeginCarriesQuestion) {
  const std::string a = h.student("alice"), b = h.student("bob");
  const std::string id = room(a);
  Client ca = connect(id, a), cb = connect(id, b);
  send(ca, "join");
  send(cb, "join");
  send(ca, "start");
  auto rb = ca.sink->of_type("round_begin");
  ASSERT_EQ(rb.size(), 1u);
  for (const char* key : {"question_text", "guides", "deadline"}) EXPECT_TRUE(rb[0]["payload"].contains(key));
  EXPECT_FALSE(rb[0]["payload"].contains("stored_answers"));
  std::uint64_t prev = 0;
  for (const auto& m : ca.sink->messages()) {
    EXPECT_GT(m["seq"].get<std::uint64_t>(), prev);
    prev = m["seq"];
  }
}

TEST_F(WsTest, RaceHasOneWinnerAndLaterAnswerSeesRoundDecided) {
  const std::string a = h.student("alice"), b = h.student("bob");
  const std::string id = room(a);
  Client ca = connect(id, a), cb = connect(id, b);
  send(ca, "join");
  send(cb, "join");
  send(ca, "start");
  const json rb = ca.sink->of_type("round_begin").at(0)["payload"];
  const std::string answer = h.stored_answer(rb["question_id"]);
  send(cb, "answer", {{"text", answer}, {"round", rb["round"]}});
  send(ca, "answer", {{"text", answer}, {"round", rb["round"]}});
  auto results = ca.sink->of_type("answer_result");
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0]["payload"]["player"], "bob");
  EXPECT_EQ(results[0]["payload"]["correct"], true);
  EXPECT_EQ(last(ca)["payload"]["code"], "ROUND_DECIDED");
  auto end = cb.sink->of_type("game_end");
  ASSERT_EQ(end.size(), 1u);
  EXPECT_EQ(end[0]["payload"]["champion"], "bob");
  EXPECT_EQ(cb.sink->of_type("round_end").at(0)["payload"]["winner"], "bob");
  EXPECT_EQ(cb.sink->of_type("match_end").size(), 1u);
  EXPECT_EQ(h.registry.rating("bob", registry::GameMode::kMpCasual).points, 1016);
  EXPECT_EQ(h.registry.rating("alice", registry::GameMode::kMpCasual).points, 984);
  EXPECT_EQ(h.registry.profile("bob").records.at(0).outcome["place"], 1);
  EXPECT_EQ(h.registry.rating("bob", registry::GameMode::kMpCompetition).games_played, 0);

  // Replaying the room's journal reproduces the winner.
  auto slot = h.service.rooms().find(id);
  std::lock_guard lock(slot->mu);
  const arena::Room& live = slot->room;
  arena::Room again = arena::Room::replay(live.id(), live.creator(), false, live.config(), h.registry.questions(),
                                          0, live.journal());
  EXPECT_EQ(again.champion(), live.champion());
  EXPECT_EQ(again.bracket()->to_json(again.seeds()), live.bracket()->to_json(live.seeds()));
}

TEST_F(WsTest, CompetitionRoomFeedsCompetitionRating) {
  const std::string a = h.student("alice"), b = h.student("bob");
  const std::string id = room(h.admin_token, {{"name", "finals"}});
  Client cadmin = connect(id, h.admin_token), ca = connect(id, a), cb = connect(id, b);
  send(ca, "join");
  send(cb, "join");
  send(cadmin, "join", {{"spectator", true}});
  send(cadmin, "start");
  const json rb = ca.sink->of_type("round_begin").at(0)["payload"];
  send(ca, "answer", {{"text", h.stored_answer(rb["question_id"])}});
  EXPECT_EQ(cadmin.sink->of_type("game_end").at(0)["payload"]["champion"], "alice");
  EXPECT_EQ(h.registry.rating("alice", registry::GameMode::kMpCompetition).points, 1016);
  EXPECT_EQ(h.registry.rating("alice", registry::GameMode::kMpCasual).games_played, 0);
}

TEST_F(WsTest, TickerExpiresRounds) {
  const std::string a = h.student("alice"), b = h.student("bob");
  const std::string id = room(a, {{"name", "quick"}, {"round_time_limit", 10}});
  Client ca = connect(id, a), cb = connect(id, b);
  send(ca, "join");
  send(cb, "join");
  send(ca, "start");
  h.service.tick();
  EXPECT_EQ(ca.sink->of_type("round_begin").size(), 1u);
  h.clock.advance(10 * kSecond + 1);
  h.service.tick();
  auto begins = ca.sink->of_type("round_begin");
  ASSERT_EQ(begins.size(), 2u);
  EXPECT_NE(begins[1]["payload"]["question_id"], begins[0]["payload"]["question_id"]);
  for (int i = 0; i < 3; ++i) {
    h.clock.advance(10 * kSecond + 1);
    h.service.tick();
  }
  auto end = ca.sink->of_type("round_end");
  ASSERT_FALSE(end.empty());
  EXPECT_EQ(end.back()["payload"]["reason"], "TIEBREAK");
  EXPECT_EQ(ca.sink->of_type("game_end").size(), 1u);
}

TEST_F(WsTest, DisconnectedClientStopsReceiving) {
  const std::string a = h.student("alice"), b = h.student("bob");
  const std::string id = room(a);
  Client ca = connect(id, a), cb = connect(id, b);
  send(ca, "join");
  send(cb, "join");
  const auto before = cb.sink->messages().size();
  h.service.ws_close(cb.conn);
  send(ca, "chat", {{"text", "anyone?"}});
  EXPECT_EQ(cb.sink->messages().size(), before);
}

}  // namespace
}  // namespace qarena::gateway

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qarena/arena/directory.hpp"
#include "qarena/arena/room.hpp"

namespace qarena::arena {
namespace {

using Kind = RoomInput::Kind;

std::vector<QuestionPtr> pool() {
  std::vector<QuestionPtr> out;
  for (const auto& q : testing::load_fixture_bank()) out.push_back(std::make_shared<const guard::Question>(q));
  return out;
}

RoomInput input(Kind kind, std::string user, Timestamp at = 0) {
  RoomInput in;
  in.kind = kind;
  in.user = std::move(user);
  in.at = at;
  return in;
}

RoomInput join(std::string user, bool spectator = false, Timestamp at = 0) {
  RoomInput in = input(Kind::kJoin, std::move(user), at);
  in.spectator = spectator;
  return in;
}

RoomInput start(std::string user, std::uint64_t seed = 7, Timestamp at = 0) {
  RoomInput in = input(Kind::kStart, std::move(user), at);
  in.seed = seed;
  return in;
}

RoomInput answer(std::string user, std::string text, Timestamp at = 0) {
  RoomInput in = input(Kind::kAnswer, std::move(user), at);
  in.text = std::move(text);
  return in;
}

const RoomEvent* find(const std::vector<RoomEvent>& evs, const std::string& type) {
  for (const auto& e : evs) {
    if (e.type == type) return &e;
  }
  return nullptr;
}

std::string error_code(const std::vector<RoomEvent>& evs) {
  const RoomEvent* e = find(evs, "error");
  return e ? e->payload.at("code").get<std::string>() : "";
}

class RoomTest : public ::testing::Test {
 protected:
  RoomTest() : pool_(pool()) {}

  Room make(bool admin = false, RoomConfig cfg = {}) {
    if (cfg.name.empty()) cfg.name = "lab";
    return Room("r1", "alice", admin, cfg, pool_, 0);
  }

  // Correct answer for the question announced in a round_begin event.
  std::string correct_answer(const RoomEvent& round_begin) const {
    const int qid = round_begin.payload.at("question_id");
    for (const auto& q : pool_) {
      if (q->id == qid) return q->stored_answers.front();
    }
    return {};
  }

  std::vector<QuestionPtr> pool_;
};

TEST_F(RoomTest, TypeFollowsCreatorRole) {
  EXPECT_EQ(make(false).type(), RoomType::kCasual);
  EXPECT_EQ(make(true).type(), RoomType::kCompetition);
}

TEST_F(RoomTest, InvalidConfig) {
  RoomConfig cfg;
  cfg.name = "x";
  cfg.round_time_limit = 0;
  try {
    Room("r", "a", false, cfg, pool_, 0);
    FAIL();
  } catch (const ArenaError& e) {
    EXPECT_EQ(e.code(), "INVALID_CONFIG");
  }
  RoomDirectory dir;
  EXPECT_THROW(dir.create("a", false, cfg, pool_, 0), ArenaError);
}

TEST_F(RoomTest, JoinRules) {
  RoomConfig cfg;
  cfg.allow_spectators = false;
  Room room = make(false, cfg);
  EXPECT_EQ(error_code(room.apply(join("carl", true))), "SPECTATORS_DISABLED");
  room.apply(join("alice"));
  EXPECT_EQ(error_code(room.apply(join("alice"))), "ALREADY_JOINED");
  room.apply(join("bob"));
  EXPECT_EQ(error_code(room.apply(start("bob"))), "NOT_CREATOR");
  room.apply(start("alice"));
  EXPECT_EQ(room.state(), RoomState::kRunning);
  EXPECT_EQ(error_code(room.apply(join("dave"))), "ROOM_RUNNING");
}

TEST_F(RoomTest, NotEnoughPlayers) {
  Room room = make();
  room.apply(join("alice"));
  EXPECT_EQ(error_code(room.apply(start("alice"))), "NOT_ENOUGH_PLAYERS");
  EXPECT_EQ(room.state(), RoomState::kLobby);
}

TEST_F(RoomTest, SpectatorsAreNotSeededAndCannotAnswer) {
  Room room = make();
  room.apply(join("alice"));
  room.apply(join("bob"));
  room.apply(join("sam", true));
  room.apply(start("alice"));
  ASSERT_EQ(room.seeds().size(), 2u);
  EXPECT_EQ(std::count(room.seeds().begin(), room.seeds().end(), "sam"), 0);
  const auto evs = room.apply(answer("sam", "SELECT 1"));
  EXPECT_EQ(error_code(evs), "NOT_PARTICIPANT");
}

TEST_F(RoomTest, MidGameSpectatorGetsState) {
  Room room = make();
  room.apply(join("alice"));
  room.apply(join("bob"));
  room.apply(start("alice"));
  const auto evs = room.apply(join("sam", true));
  const RoomEvent* st = find(evs, "spectate_state");
  ASSERT_NE(st, nullptr);
  EXPECT_EQ(st->to, "sam");
  EXPECT_FALSE(st->payload.at("bracket").is_null());
  EXPECT_EQ(st->payload.at("rounds").size(), 1u);
}

TEST_F(RoomTest, ChatRules) {
  Room room = make();
  room.apply(join("alice"));
  room.apply(join("sam", true));
  const auto evs = room.apply([] {
    RoomInput in = input(Kind::kChat, "alice");
    in.text = "hi";
    return in;
  }());
  const RoomEvent* b = find(evs, "chat_broadcast");
  ASSERT_NE(b, nullptr);
  EXPECT_FALSE(b->to.has_value());
  RoomInput long_msg = input(Kind::kChat, "sam");
  long_msg.text = std::string(501, 'x');
  EXPECT_EQ(error_code(room.apply(long_msg)), "MESSAGE_TOO_LONG");
  long_msg.text = std::string(500, 'x');
  EXPECT_EQ(error_code(room.apply(long_msg)), "");
  RoomInput outsider = input(Kind::kChat, "eve");
  outsider.text = "hello";
  EXPECT_EQ(error_code(room.apply(outsider)), "NOT_MEMBER");
  EXPECT_EQ(room.chat_log().size(), 2u);
}

TEST_F(RoomTest, SeqIsStrictlyIncreasingForBroadcasts) {
  Room room = make();
  std::vector<RoomEvent> all;
  for (const auto& in : {join("alice"), join("bob"), join("carl"), start("alice")}) {
    const auto evs = room.apply(in);
    all.insert(all.end(), evs.begin(), evs.end());
  }
  std::uint64_t last = 0;
  for (const auto& e : all) {
    if (e.to) continue;
    EXPECT_GT(e.seq, last);
    last = e.seq;
  }
}

TEST_F(RoomTest, FirstCorrectAnswerWinsAndLaterGetsRoundDecided) {
  Room room = make();
  room.apply(join("alice"));
  room.apply(join("bob"));
  const auto started = room.apply(start("alice"));
  const RoomEvent* rb = find(started, "round_begin");
  ASSERT_NE(rb, nullptr);
  const std::string good = correct_answer(*rb);

  const auto wrong = room.apply(answer("bob", "SELECT 'nope'", 10));
  ASSERT_NE(find(wrong, "answer_result"), nullptr);
  EXPECT_FALSE(find(wrong, "answer_result")->payload.at("correct").get<bool>());

  const auto first = room.apply(answer("bob", good, 20));
  const auto second = room.apply(answer("alice", good, 21));
  ASSERT_NE(find(first, "round_end"), nullptr);
  EXPECT_EQ(find(first, "round_end")->payload.at("winner"), "bob");
  EXPECT_EQ(error_code(second), "ROUND_DECIDED");
  ASSERT_NE(find(first, "game_end"), nullptr);
  EXPECT_EQ(room.champion(), "bob");

  std::vector<RoomEvent> replayed;
  const Room again = Room::replay("r1", "alice", false, room.config(), pool_, 0, room.journal(), &replayed);
  EXPECT_EQ(again.champion(), "bob");
}

TEST_F(RoomTest, ReplayReproducesEveryEvent) {
  Room room = make();
  std::vector<RoomEvent> live;
  auto feed = [&](const RoomInput& in) {
    auto evs = room.apply(in);
    live.insert(live.end(), evs.begin(), evs.end());
    return evs;
  };
  for (const auto* u : {"alice", "bob", "carl", "dina", "eli"}) feed(join(u));
  auto evs = feed(start("alice", 99));
  Timestamp t = 100;
  while (room.state() == RoomState::kRunning) {
    // Everyone with an open round answers: wrong first, then right.
    const auto snap = room.snapshot();
    for (const auto& r : snap.at("rounds")) {
      const std::string p = r.at("players")[static_cast<int>(t / 100) % 2];
      feed(answer(p, "SELECT 0", t++));
      RoomEvent begin{0, "round_begin", r, std::nullopt};
      feed(answer(p, correct_answer(begin), t++));
    }
    t += 100;
  }
  std::vector<RoomEvent> replayed;
  const Room again = Room::replay("r1", "alice", false, room.config(), pool_, 0, room.journal(), &replayed);
  ASSERT_EQ(replayed.size(), live.size());
  for (std::size_t i = 0; i < live.size(); ++i) {
    EXPECT_EQ(replayed[i].wire(), live[i].wire()) << i;
  }
  EXPECT_EQ(again.champion(), room.champion());
}

TEST_F(RoomTest, TimeoutReplaysThenTiebreak) {
  RoomConfig cfg;
  cfg.round_time_limit = 10;
  Room room = make(false, cfg);
  room.apply(join("alice"));
  room.apply(join("bob"));
  room.apply(start("alice", 3, 0));
  const std::string first_seed = room.seeds()[0];
  const std::string second_seed = room.seeds()[1];
  room.apply(answer(first_seed, "SELECT 'x'", 1));
  room.apply(answer(first_seed, "SELECT 'y'", 2));
  room.apply(answer(second_seed, "SELECT 'z'", 3));

  // A deadline counts as passed only when now > deadline.
  EXPECT_TRUE(room.apply(input(Kind::kTick, "", 10 * kSecond)).empty());

  Timestamp t = 10 * kSecond;
  int timeouts = 0;
  std::set<int> questions;
  questions.insert(room.rounds().back().question->id);
  while (room.state() == RoomState::kRunning) {
    t = *room.next_deadline() + 1;
    const auto evs = room.apply(input(Kind::kTick, "", t));
    for (const auto& e : evs) {
      if (e.type == "round_end" && e.payload.at("reason") == "TIMEOUT") ++timeouts;
      if (e.type == "round_begin") {
        questions.insert(e.payload.at("question_id").get<int>());
        EXPECT_EQ(e.payload.at("deadline").get<Timestamp>(), t + 10 * kSecond);
      }
    }
  }
  EXPECT_LE(timeouts, kMaxReplays);
  EXPECT_EQ(questions.size(), static_cast<std::size_t>(timeouts + 1));
  // first_seed answered wrong twice, second_seed once.
  EXPECT_EQ(room.champion(), second_seed);

  // Past the deadline an explicit answer to the old round is refused.
  RoomInput late = answer(first_seed, "x", t + 1);
  late.round = 0;
  EXPECT_FALSE(error_code(room.apply(late)).empty());
}

TEST_F(RoomTest, TiebreakFallsToLowerSeed) {
  RoomConfig cfg;
  cfg.round_time_limit = 1;
  Room room = make(false, cfg);
  room.apply(join("alice"));
  room.apply(join("bob"));
  room.apply(start("alice", 11, 0));
  while (room.state() == RoomState::kRunning) room.apply(input(Kind::kTick, "", *room.next_deadline() + 1));
  EXPECT_EQ(room.champion(), room.seeds()[0]);
}

TEST_F(RoomTest, ReplacementQuestionKeepsDifficulty) {
  RoomConfig cfg;
  cfg.round_time_limit = 1;
  Room room = make(false, cfg);
  room.apply(join("alice"));
  room.apply(join("bob"));
  room.apply(start("alice", 5, 0));
  const int difficulty = room.rounds().front().question->difficulty;
  while (room.state() == RoomState::kRunning) room.apply(input(Kind::kTick, "", *room.next_deadline() + 1));
  for (const auto& r : room.rounds()) EXPECT_EQ(r.question->difficulty, difficulty);
}

TEST_F(RoomTest, LeavingForfeitsTheCurrentMatch) {
  Room room = make();
  for (const auto* u : {"alice", "bob", "carl", "dina"}) room.apply(join(u));
  room.apply(start("alice", 1));
  const std::string quitter = room.seeds()[0];
  const auto evs = room.apply(input(Kind::kLeave, quitter, 5));
  const RoomEvent* end = find(evs, "match_end");
  ASSERT_NE(end, nullptr);
  EXPECT_EQ(end->payload.at("reason"), "FORFEIT");
  EXPECT_EQ(end->payload.at("loser"), quitter);
}

TEST_F(RoomTest, DoubleEliminationRunsToChampion) {
  RoomConfig cfg;
  cfg.mode = EliminationMode::kDouble;
  Room room = make(false, cfg);
  for (const auto* u : {"alice", "bob", "carl"}) room.apply(join(u));
  room.apply(start("alice", 4));
  Timestamp t = 1;
  while (room.state() == RoomState::kRunning) {
    const auto r = room.snapshot().at("rounds").at(0);
    RoomEvent begin{0, "round_begin", r, std::nullopt};
    room.apply(answer(r.at("players")[1], correct_answer(begin), t++));
  }
  ASSERT_TRUE(room.champion());
  const int decided = room.bracket()->decided_count();
  EXPECT_TRUE(decided == 4 || decided == 5);
  EXPECT_EQ(room.take_results().size(), static_cast<std::size_t>(decided));
  EXPECT_TRUE(room.take_results().empty());
  const auto standings = room.standings();
  ASSERT_EQ(standings.size(), 3u);
  EXPECT_EQ(standings[0].place, 1);
  EXPECT_EQ(standings[2].place, 3);
}

}  // namespace
}  // namespace qarena::arena

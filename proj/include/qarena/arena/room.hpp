#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "qarena/arena/bracket.hpp"
#include "qarena/common/clock.hpp"
#include "qarena/common/rng.hpp"
#include "qarena/guard/grader.hpp"

namespace qarena::arena {

using QuestionPtr = std::shared_ptr<const guard::Question>;

inline constexpr int kMaxReplays = 3;
inline constexpr std::size_t kMaxChatChars = 500;

enum class RoomType { kCasual, kCompetition };
enum class RoomState { kLobby, kRunning, kFinished };

std::string_view to_string(RoomType type);
std::string_view to_string(RoomState state);

struct RoomConfig {
  std::string name;
  bool allow_spectators = true;
  EliminationMode mode = EliminationMode::kSingle;
  int round_time_limit = 120;  // seconds
  int difficulty = 0;          // 0 draws from every difficulty
  int max_players = 16;
};

// Throws ArenaError("INVALID_CONFIG").
void validate(const RoomConfig& config);

struct RoomInput {
  enum class Kind { kJoin, kLeave, kChat, kStart, kAnswer, kTick };
  Kind kind = Kind::kTick;
  std::string user;
  Timestamp at = 0;
  bool spectator = false;        // join
  std::string text;              // chat, answer
  std::uint64_t seed = 0;        // start
  std::optional<int> round;      // answer: the round being answered
};

// Broadcast events take the next room seq. Direct replies (`to` set) reuse
// the current seq so members never see gaps.
struct RoomEvent {
  std::uint64_t seq = 0;
  std::string type;
  nlohmann::json payload;
  std::optional<std::string> to;

  nlohmann::json wire() const { return {{"type", type}, {"seq", seq}, {"payload", payload}}; }
};

struct MatchResult {
  std::string winner;
  std::string loser;
};

struct Submission {
  std::string player;
  std::string text;
  std::uint64_t arrival_seq = 0;
  guard::Verdict verdict;
};

struct MatchRound {
  enum class Status { kOpen, kDecided, kExpired };
  int id = 0;
  int match = 0;
  QuestionPtr question;
  Timestamp deadline = 0;
  Status status = Status::kOpen;
  std::optional<std::string> winner;
  std::vector<Submission> submissions;
};

struct ChatLine {
  std::string user;
  std::string text;
  Timestamp at = 0;
};

struct Standing {
  std::string player;
  int place = 0;
  int wins = 0;
  int losses = 0;
};

// One multiplayer room. A pure state machine: every change comes from
// apply(), which also appends the input to the journal, so replaying the
// journal into a fresh room reproduces every event. Not thread-safe.
class Room {
 public:
  Room(std::string id, std::string creator, bool creator_is_admin, RoomConfig config,
       std::vector<QuestionPtr> pool, Timestamp created_at);

  std::vector<RoomEvent> apply(const RoomInput& in);

  static Room replay(std::string id, std::string creator, bool creator_is_admin, RoomConfig config,
                     std::vector<QuestionPtr> pool, Timestamp created_at,
                     const std::vector<RoomInput>& journal, std::vector<RoomEvent>* events = nullptr);

  const std::string& id() const { return id_; }
  const std::string& creator() const { return creator_; }
  const RoomConfig& config() const { return config_; }
  RoomType type() const { return type_; }
  RoomState state() const { return state_; }
  std::uint64_t seq() const { return seq_; }
  const std::vector<std::string>& players() const { return players_; }
  const std::set<std::string>& spectators() const { return spectators_; }
  const std::vector<std::string>& seeds() const { return seeds_; }
  const std::vector<ChatLine>& chat_log() const { return chat_; }
  const std::vector<MatchRound>& rounds() const { return rounds_; }
  const std::optional<Bracket>& bracket() const { return bracket_; }
  std::optional<std::string> champion() const;
  std::vector<Standing> standings() const;
  const std::vector<RoomInput>& journal() const { return journal_; }
  bool is_member(const std::string& user) const;
  bool is_player(const std::string& user) const;

  // Earliest open round deadline; the caller sends a tick once it passes.
  std::optional<Timestamp> next_deadline() const;

  // Decided matches not yet taken by the caller (for rating updates).
  std::vector<MatchResult> take_results();

  nlohmann::json summary() const;
  nlohmann::json snapshot() const;

 private:
  struct LiveMatch {
    int bracket_id = 0;
    std::array<std::string, 2> players;
    int current_round = -1;
    int replays = 0;
    std::set<int> used_questions;
    std::map<std::string, int> wrong;
    bool done = false;
  };

  void broadcast(std::vector<RoomEvent>& out, std::string type, nlohmann::json payload);
  void reply(std::vector<RoomEvent>& out, const std::string& to, std::string type, nlohmann::json payload);
  void error(std::vector<RoomEvent>& out, const std::string& to, const std::string& code,
             const std::string& message);

  void on_join(const RoomInput& in, std::vector<RoomEvent>& out);
  void on_leave(const RoomInput& in, std::vector<RoomEvent>& out);
  void on_chat(const RoomInput& in, std::vector<RoomEvent>& out);
  void on_start(const RoomInput& in, std::vector<RoomEvent>& out);
  void on_answer(const RoomInput& in, std::vector<RoomEvent>& out);
  void expire(Timestamp at, std::vector<RoomEvent>& out);

  void begin_ready(Timestamp at, std::vector<RoomEvent>& out);
  QuestionPtr pick_question(const LiveMatch& m, std::optional<int> difficulty);
  void start_round(LiveMatch& m, QuestionPtr q, Timestamp at, std::vector<RoomEvent>& out);
  void finish_match(LiveMatch& m, const std::string& winner, const std::string& reason, Timestamp at,
                    std::vector<RoomEvent>& out);
  LiveMatch* live_match_of(const std::string& player);
  int seed_index(const std::string& player) const;
  nlohmann::json roster() const;
  nlohmann::json round_json(const MatchRound& r) const;

  std::string id_;
  std::string creator_;
  RoomConfig config_;
  RoomType type_;
  std::vector<QuestionPtr> pool_;
  Timestamp created_at_;

  RoomState state_ = RoomState::kLobby;
  std::uint64_t seq_ = 0;
  std::uint64_t arrivals_ = 0;
  std::vector<std::string> players_;
  std::set<std::string> spectators_;
  std::set<std::string> departed_;
  std::vector<ChatLine> chat_;

  std::vector<std::string> seeds_;
  std::optional<Bracket> bracket_;
  std::optional<Rng> rng_;
  std::map<int, LiveMatch> live_;  // by bracket match id
  std::vector<MatchRound> rounds_;
  std::vector<int> eliminated_order_;
  std::vector<MatchResult> outbox_;
  std::vector<RoomInput> journal_;
};

}  // namespace qarena::arena

#include "qarena/arena/room.hpp"

#include <algorithm>

#include "qarena/guard/question_json.hpp"
#include "qarena/sql/value.hpp"

namespace qarena::arena {

using nlohmann::json;

std::string_view to_string(RoomType type) {
  return type == RoomType::kCasual ? "CASUAL" : "COMPETITION";
}

std::string_view to_string(RoomState state) {
  switch (state) {
    case RoomState::kLobby: return "LOBBY";
    case RoomState::kRunning: return "RUNNING";
    case RoomState::kFinished: return "FINISHED";
  }
  return "UNKNOWN";
}

void validate(const RoomConfig& c) {
  auto bad = [](const std::string& why) { throw ArenaError("INVALID_CONFIG", why); };
  if (c.name.empty() || sql::char_length(c.name) > 60) bad("room name must be 1..60 characters");
  if (c.round_time_limit < 1 || c.round_time_limit > 3600) bad("round_time_limit must be 1..3600 seconds");
  if (c.difficulty < 0 || c.difficulty > 3) bad("difficulty must be 0..3");
  if (c.max_players < 2 || c.max_players > 64) bad("max_players must be 2..64");
}

Room::Room(std::string id, std::string creator, bool creator_is_admin, RoomConfig config,
           std::vector<QuestionPtr> pool, Timestamp created_at)
    : id_(std::move(id)),
      creator_(std::move(creator)),
      config_(std::move(config)),
      type_(creator_is_admin ? RoomType::kCompetition : RoomType::kCasual),
      pool_(std::move(pool)),
      created_at_(created_at) {
  validate(config_);
  std::sort(pool_.begin(), pool_.end(), [](const QuestionPtr& a, const QuestionPtr& b) { return a->id < b->id; });
}

Room Room::replay(std::string id, std::string creator, bool creator_is_admin, RoomConfig config,
                  std::vector<QuestionPtr> pool, Timestamp created_at,
                  const std::vector<RoomInput>& journal, std::vector<RoomEvent>* events) {
  Room room(std::move(id), std::move(creator), creator_is_admin, std::move(config), std::move(pool), created_at);
  for (const auto& in : journal) {
    auto out = room.apply(in);
    if (events) events->insert(events->end(), out.begin(), out.end());
  }
  return room;
}

void Room::broadcast(std::vector<RoomEvent>& out, std::string type, json payload) {
  out.push_back({++seq_, std::move(type), std::move(payload), std::nullopt});
}

void Room::reply(std::vector<RoomEvent>& out, const std::string& to, std::string type, json payload) {
  out.push_back({seq_, std::move(type), std::move(payload), to});
}

void Room::error(std::vector<RoomEvent>& out, const std::string& to, const std::string& code,
                 const std::string& message) {
  reply(out, to, "error", {{"code", code}, {"message", message}});
}

bool Room::is_player(const std::string& user) const {
  return std::find(players_.begin(), players_.end(), user) != players_.end();
}

bool Room::is_member(const std::string& user) const {
  return (is_player(user) && !departed_.count(user)) || spectators_.count(user) > 0;
}

int Room::seed_index(const std::string& player) const {
  const auto it = std::find(seeds_.begin(), seeds_.end(), player);
  return it == seeds_.end() ? -1 : static_cast<int>(it - seeds_.begin());
}

std::vector<RoomEvent> Room::apply(const RoomInput& in) {
  journal_.push_back(in);
  std::vector<RoomEvent> out;
  if (state_ == RoomState::kRunning) expire(in.at, out);
  switch (in.kind) {
    case RoomInput::Kind::kJoin: on_join(in, out); break;
    case RoomInput::Kind::kLeave: on_leave(in, out); break;
    case RoomInput::Kind::kChat: on_chat(in, out); break;
    case RoomInput::Kind::kStart: on_start(in, out); break;
    case RoomInput::Kind::kAnswer: on_answer(in, out); break;
    case RoomInput::Kind::kTick: break;
  }
  return out;
}

json Room::roster() const {
  json players = json::array();
  for (const auto& p : players_) {
    if (!departed_.count(p)) players.push_back(p);
  }
  return {{"players", std::move(players)}, {"spectators", spectators_}};
}

void Room::on_join(const RoomInput& in, std::vector<RoomEvent>& out) {
  if (is_member(in.user)) return error(out, in.user, "ALREADY_JOINED", "already in this room");
  if (in.spectator) {
    if (!config_.allow_spectators && in.user != creator_) {
      return error(out, in.user, "SPECTATORS_DISABLED", "this room does not allow spectators");
    }
    spectators_.insert(in.user);
  } else {
    if (state_ == RoomState::kRunning) return error(out, in.user, "ROOM_RUNNING", "the game has already started");
    if (state_ == RoomState::kFinished) return error(out, in.user, "ROOM_FINISHED", "the game is over");
    if (static_cast<int>(players_.size()) >= config_.max_players) {
      return error(out, in.user, "ROOM_FULL", "the room is full");
    }
    players_.push_back(in.user);
  }
  json payload = roster();
  payload["user"] = in.user;
  payload["role"] = in.spectator ? "spectator" : "player";
  broadcast(out, "joined", std::move(payload));
  if (state_ != RoomState::kLobby) reply(out, in.user, "spectate_state", snapshot());
}

void Room::on_leave(const RoomInput& in, std::vector<RoomEvent>& out) {
  if (!is_member(in.user)) return error(out, in.user, "NOT_MEMBER", "not in this room");
  if (spectators_.erase(in.user) == 0) {
    if (state_ == RoomState::kLobby) {
      players_.erase(std::find(players_.begin(), players_.end(), in.user));
    } else {
      departed_.insert(in.user);
    }
  }
  json payload = roster();
  payload["user"] = in.user;
  broadcast(out, "leave", std::move(payload));

  // Leaving mid-game forfeits the current match; later matches are
  // forfeited as they come up.
  if (state_ == RoomState::kRunning && departed_.count(in.user)) {
    if (LiveMatch* m = live_match_of(in.user)) {
      const std::string& other = m->players[0] == in.user ? m->players[1] : m->players[0];
      MatchRound& r = rounds_[static_cast<std::size_t>(m->current_round)];
      r.status = MatchRound::Status::kDecided;
      r.winner = other;
      broadcast(out, "round_end", {{"match", m->bracket_id}, {"round", r.id}, {"winner", other}, {"reason", "FORFEIT"}});
      finish_match(*m, other, "FORFEIT", in.at, out);
    }
  }
}

void Room::on_chat(const RoomInput& in, std::vector<RoomEvent>& out) {
  if (!is_member(in.user)) return error(out, in.user, "NOT_MEMBER", "not in this room");
  if (sql::char_length(in.text) > kMaxChatChars) {
    return error(out, in.user, "MESSAGE_TOO_LONG", "chat messages are limited to 500 characters");
  }
  chat_.push_back({in.user, in.text, in.at});
  broadcast(out, "chat_broadcast", {{"user", in.user}, {"text", in.text}, {"at", in.at}});
}

void Room::on_start(const RoomInput& in, std::vector<RoomEvent>& out) {
  if (in.user != creator_) return error(out, in.user, "NOT_CREATOR", "only the room creator can start the game");
  if (state_ != RoomState::kLobby) return error(out, in.user, "ROOM_RUNNING", "the game has already started");
  if (players_.size() < 2) return error(out, in.user, "NOT_ENOUGH_PLAYERS", "at least two players are needed");
  const bool has_questions = std::any_of(pool_.begin(), pool_.end(), [&](const QuestionPtr& q) {
    return config_.difficulty == 0 || q->difficulty == config_.difficulty;
  });
  if (!has_questions) return error(out, in.user, "NO_QUESTIONS", "no questions match the room settings");

  rng_.emplace(in.seed);
  seeds_ = players_;
  rng_->shuffle(seeds_);
  bracket_.emplace(config_.mode, static_cast<int>(seeds_.size()));
  state_ = RoomState::kRunning;
  broadcast(out, "bracket", bracket_->to_json(seeds_));
  begin_ready(in.at, out);
}

Room::LiveMatch* Room::live_match_of(const std::string& player) {
  for (auto& [id, m] : live_) {
    if (!m.done && (m.players[0] == player || m.players[1] == player)) return &m;
  }
  return nullptr;
}

QuestionPtr Room::pick_question(const LiveMatch& m, std::optional<int> difficulty) {
  std::vector<QuestionPtr> eligible;
  for (const auto& q : pool_) {
    if (m.used_questions.count(q->id)) continue;
    if (difficulty ? q->difficulty != *difficulty : (config_.difficulty != 0 && q->difficulty != config_.difficulty)) {
      continue;
    }
    eligible.push_back(q);
  }
  if (eligible.empty()) return nullptr;
  return eligible[rng_->below(eligible.size())];
}

json Room::round_json(const MatchRound& r) const {
  const LiveMatch& m = live_.at(r.match);
  return {{"match", r.match},
          {"round", r.id},
          {"players", m.players},
          {"question_id", r.question->id},
          {"question_text", r.question->text},
          {"guides", guard::question_to_json(*r.question).at("guides")},
          {"difficulty", r.question->difficulty},
          {"deadline", r.deadline}};
}

void Room::start_round(LiveMatch& m, QuestionPtr q, Timestamp at, std::vector<RoomEvent>& out) {
  MatchRound r;
  r.id = static_cast<int>(rounds_.size());
  r.match = m.bracket_id;
  r.question = std::move(q);
  r.deadline = at + config_.round_time_limit * kSecond;
  m.used_questions.insert(r.question->id);
  m.current_round = r.id;
  rounds_.push_back(std::move(r));
  broadcast(out, "round_begin", round_json(rounds_.back()));
}

void Room::begin_ready(Timestamp at, std::vector<RoomEvent>& out) {
  bool changed = true;
  while (changed && !bracket_->finished()) {
    changed = false;
    for (int id : bracket_->ready_matches()) {
      if (live_.count(id)) continue;
      const BracketMatch& bm = bracket_->match(id);
      LiveMatch m;
      m.bracket_id = id;
      m.players = {seeds_[static_cast<std::size_t>(*bm.slot[0])], seeds_[static_cast<std::size_t>(*bm.slot[1])]};
      LiveMatch& live = live_.emplace(id, std::move(m)).first->second;

      const bool gone0 = departed_.count(live.players[0]) > 0;
      const bool gone1 = departed_.count(live.players[1]) > 0;
      if (gone0 || gone1) {
        // Both gone: the lower seed index advances.
        const std::string winner = gone0 && !gone1 ? live.players[1] : live.players[0];
        finish_match(live, winner, "FORFEIT", at, out);
        changed = true;
        break;  // finish_match already started whatever became ready
      }
      start_round(live, pick_question(live, std::nullopt), at, out);
    }
  }
  if (bracket_->finished() && state_ != RoomState::kFinished) {
    state_ = RoomState::kFinished;
    json standings = json::array();
    for (const auto& s : this->standings()) {
      standings.push_back({{"player", s.player}, {"place", s.place}, {"wins", s.wins}, {"losses", s.losses}});
    }
    broadcast(out, "game_end", {{"champion", *champion()}, {"standings", std::move(standings)}});
  }
}

void Room::finish_match(LiveMatch& m, const std::string& winner, const std::string& reason, Timestamp at,
                        std::vector<RoomEvent>& out) {
  const std::string& loser = m.players[0] == winner ? m.players[1] : m.players[0];
  m.done = true;
  bracket_->report(m.bracket_id, seed_index(winner));
  outbox_.push_back({winner, loser});
  if (bracket_->eliminated(seed_index(loser))) eliminated_order_.push_back(seed_index(loser));
  broadcast(out, "match_end", {{"match", m.bracket_id}, {"winner", winner}, {"loser", loser}, {"reason", reason}});
  broadcast(out, "bracket", bracket_->to_json(seeds_));
  begin_ready(at, out);
}

void Room::on_answer(const RoomInput& in, std::vector<RoomEvent>& out) {
  if (seed_index(in.user) < 0 || departed_.count(in.user)) {
    return error(out, in.user, "NOT_PARTICIPANT", "only players in the bracket can answer");
  }
  MatchRound* round = nullptr;
  if (in.round) {
    if (*in.round < 0 || *in.round >= static_cast<int>(rounds_.size())) {
      return error(out, in.user, "UNKNOWN_ROUND", "no such round");
    }
    round = &rounds_[static_cast<std::size_t>(*in.round)];
    const LiveMatch& m = live_.at(round->match);
    if (m.players[0] != in.user && m.players[1] != in.user) {
      return error(out, in.user, "NOT_PARTICIPANT", "not a player in that match");
    }
  } else if (LiveMatch* m = live_match_of(in.user)) {
    round = &rounds_[static_cast<std::size_t>(m->current_round)];
  } else {
    return error(out, in.user, "ROUND_DECIDED", "no open round for this player");
  }
  if (round->status == MatchRound::Status::kDecided) {
    return error(out, in.user, "ROUND_DECIDED", "the round has already been decided");
  }
  if (round->status == MatchRound::Status::kExpired) {
    return error(out, in.user, "PAST_DEADLINE", "the round's time limit has passed");
  }

  Submission s{in.user, in.text, ++arrivals_, guard::grade(*round->question, in.text)};
  const bool correct = s.verdict.correct;
  json result = {{"player", in.user},
                 {"correct", correct},
                 {"reason", guard::to_string(s.verdict.reason)},
                 {"match", round->match},
                 {"round", round->id},
                 {"arrival_seq", s.arrival_seq}};
  round->submissions.push_back(std::move(s));
  LiveMatch& m = live_.at(round->match);
  if (!correct) {
    ++m.wrong[in.user];
    broadcast(out, "answer_result", std::move(result));
    return;
  }
  round->status = MatchRound::Status::kDecided;
  round->winner = in.user;
  broadcast(out, "answer_result", std::move(result));
  broadcast(out, "round_end", {{"match", round->match}, {"round", round->id}, {"winner", in.user}, {"reason", "CORRECT"}});
  finish_match(m, in.user, "CORRECT", in.at, out);
}

void Room::expire(Timestamp at, std::vector<RoomEvent>& out) {
  std::vector<int> ids;
  for (const auto& [id, m] : live_) ids.push_back(id);
  for (int id : ids) {
    LiveMatch& m = live_.at(id);
    if (m.done) continue;
    MatchRound& r = rounds_[static_cast<std::size_t>(m.current_round)];
    if (r.status != MatchRound::Status::kOpen || at <= r.deadline) continue;
    r.status = MatchRound::Status::kExpired;

    QuestionPtr next = m.replays < kMaxReplays ? pick_question(m, r.question->difficulty) : nullptr;
    if (next) {
      ++m.replays;
      broadcast(out, "round_end", {{"match", id}, {"round", r.id}, {"winner", nullptr}, {"reason", "TIMEOUT"}});
      start_round(m, std::move(next), at, out);
      continue;
    }
    // Out of replays: fewer wrong answers wins, then the lower seed index.
    const int w0 = m.wrong[m.players[0]];
    const int w1 = m.wrong[m.players[1]];
    std::string winner;
    if (w0 != w1) {
      winner = w0 < w1 ? m.players[0] : m.players[1];
    } else {
      winner = seed_index(m.players[0]) < seed_index(m.players[1]) ? m.players[0] : m.players[1];
    }
    r.winner = winner;
    broadcast(out, "round_end", {{"match", id}, {"round", r.id}, {"winner", winner}, {"reason", "TIEBREAK"}});
    finish_match(m, winner, "TIMEOUT", at, out);
  }
}

std::optional<std::string> Room::champion() const {
  if (!bracket_ || !bracket_->champion()) return std::nullopt;
  return seeds_[static_cast<std::size_t>(*bracket_->champion())];
}

std::vector<Standing> Room::standings() const {
  std::vector<Standing> out;
  if (!bracket_) return out;
  const int n = static_cast<int>(seeds_.size());
  auto entry = [&](int p, int place) {
    return Standing{seeds_[static_cast<std::size_t>(p)], place, bracket_->wins(p), bracket_->losses(p)};
  };
  if (auto c = bracket_->champion()) out.push_back(entry(*c, 1));
  for (int i = static_cast<int>(eliminated_order_.size()) - 1; i >= 0; --i) {
    out.push_back(entry(eliminated_order_[static_cast<std::size_t>(i)], n - i));
  }
  return out;
}

std::optional<Timestamp> Room::next_deadline() const {
  std::optional<Timestamp> best;
  for (const auto& [id, m] : live_) {
    if (m.done) continue;
    const MatchRound& r = rounds_[static_cast<std::size_t>(m.current_round)];
    if (r.status == MatchRound::Status::kOpen && (!best || r.deadline < *best)) best = r.deadline;
  }
  return best;
}

std::vector<MatchResult> Room::take_results() {
  std::vector<MatchResult> out;
  out.swap(outbox_);
  return out;
}

json Room::summary() const {
  json players = json::array();
  for (const auto& p : players_) {
    if (!departed_.count(p)) players.push_back(p);
  }
  return {{"id", id_},
          {"name", config_.name},
          {"type", to_string(type_)},
          {"creator", creator_},
          {"state", to_string(state_)},
          {"elimination_mode", to_string(config_.mode)},
          {"allow_spectators", config_.allow_spectators},
          {"round_time_limit", config_.round_time_limit},
          {"difficulty", config_.difficulty},
          {"max_players", config_.max_players},
          {"players", std::move(players)},
          {"spectator_count", spectators_.size()},
          {"created_at", created_at_}};
}

json Room::snapshot() const {
  json s = {{"room", summary()}, {"seq", seq_}};
  s["bracket"] = bracket_ ? bracket_->to_json(seeds_) : json();
  json open = json::array();
  for (const auto& [id, m] : live_) {
    if (m.done) continue;
    const MatchRound& r = rounds_[static_cast<std::size_t>(m.current_round)];
    if (r.status == MatchRound::Status::kOpen) open.push_back(round_json(r));
  }
  s["rounds"] = std::move(open);
  json chat = json::array();
  const std::size_t from = chat_.size() > 50 ? chat_.size() - 50 : 0;
  for (std::size_t i = from; i < chat_.size(); ++i) {
    chat.push_back({{"user", chat_[i].user}, {"text", chat_[i].text}, {"at", chat_[i].at}});
  }
  s["chat"] = std::move(chat);
  s["champion"] = champion() ? json(*champion()) : json();
  return s;
}

}  // namespace qarena::arena

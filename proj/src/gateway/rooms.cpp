#include <spdlog/spdlog.h>

#include "qarena/gateway/service.hpp"

namespace qarena::gateway {

using nlohmann::json;

namespace {

std::string direct_error(std::uint64_t seq, const std::string& code, const std::string& message) {
  return json{{"type", "error"}, {"seq", seq}, {"payload", {{"code", code}, {"message", message}}}}.dump();
}

}  // namespace

std::shared_ptr<WsConnection> Service::ws_open(std::string_view target, std::shared_ptr<WsSink> sink) {
  Target t = parse_target(target);
  constexpr std::string_view prefix = "/ws/rooms/";
  auto token = t.query.find("token");
  std::optional<std::string> user;
  if (token != t.query.end()) user = tokens_.resolve(token->second);
  if (!user || !registry_.account(*user)) {
    sink->close(kCloseBadToken, "bad token");
    return nullptr;
  }
  const std::string room_id = t.path.rfind(prefix, 0) == 0 ? t.path.substr(prefix.size()) : std::string();
  if (room_id.empty() || !rooms_.find(room_id)) {
    sink->close(kCloseUnknownRoom, "unknown room");
    return nullptr;
  }
  auto conn = std::make_shared<WsConnection>();
  conn->user = *user;
  conn->room_id = room_id;
  conn->sink = std::move(sink);
  std::lock_guard lock(hub_mu_);
  hub_[room_id].insert(conn);
  return conn;
}

void Service::ws_close(const std::shared_ptr<WsConnection>& conn) {
  if (!conn) return;
  std::lock_guard lock(hub_mu_);
  conn->closed = true;
  auto it = hub_.find(conn->room_id);
  if (it == hub_.end()) return;
  it->second.erase(conn);
  if (it->second.empty()) hub_.erase(it);
}

void Service::ws_message(const std::shared_ptr<WsConnection>& conn, std::string_view text) {
  if (!conn || conn->closed) return;
  auto violation = [&](const std::string& why) {
    ws_close(conn);
    conn->sink->close(kCloseProtocol, why);
  };
  const Timestamp now = clock_.now();
  while (!conn->recent.empty() && conn->recent.front() <= now - kSecond) conn->recent.pop_front();
  if (static_cast<int>(conn->recent.size()) >= kMaxMessagesPerSecond) return violation("rate limit exceeded");
  conn->recent.push_back(now);

  json msg = json::parse(text, nullptr, false);
  if (msg.is_discarded() || !msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return violation("messages must be JSON objects with a string type");
  }
  auto slot = rooms_.find(conn->room_id);
  if (!slot) return violation("room is gone");
  const std::string type = msg["type"].get<std::string>();
  const json payload = msg.value("payload", json::object());

  auto reject = [&](const std::string& code, const std::string& message) {
    std::lock_guard lock(slot->mu);
    conn->sink->send(direct_error(slot->room.seq(), code, message));
  };
  if (!payload.is_object()) return reject("BAD_PAYLOAD", "payload must be an object");

  arena::RoomInput in;
  in.user = conn->user;
  in.at = now;
  if (type == "join") {
    in.kind = arena::RoomInput::Kind::kJoin;
    auto s = payload.find("spectator");
    if (s != payload.end() && !s->is_boolean()) return reject("BAD_PAYLOAD", "spectator must be a boolean");
    in.spectator = s != payload.end() && s->get<bool>();
  } else if (type == "leave") {
    in.kind = arena::RoomInput::Kind::kLeave;
  } else if (type == "chat" || type == "answer") {
    auto t = payload.find("text");
    if (t == payload.end() || !t->is_string()) return reject("BAD_PAYLOAD", type + " needs a text string");
    in.kind = type == "chat" ? arena::RoomInput::Kind::kChat : arena::RoomInput::Kind::kAnswer;
    in.text = t->get<std::string>();
    if (auto r = payload.find("round"); type == "answer" && r != payload.end() && !r->is_null()) {
      if (!r->is_number_integer()) return reject("BAD_PAYLOAD", "round must be an integer");
      in.round = r->get<int>();
    }
  } else if (type == "start") {
    in.kind = arena::RoomInput::Kind::kStart;
    in.seed = next_seed();
  } else {
    return reject("UNKNOWN_TYPE", "unknown message type: " + type);
  }
  room_apply(*slot, in);
}

void Service::tick() {
  const Timestamp now = clock_.now();
  for (const auto& slot : rooms_.all()) {
    bool due = false;
    {
      std::lock_guard lock(slot->mu);
      auto dl = slot->room.next_deadline();
      due = dl && now > *dl;
    }
    if (due) {
      arena::RoomInput in;
      in.kind = arena::RoomInput::Kind::kTick;
      in.at = now;
      room_apply(*slot, in);
    }
  }
}

void Service::room_apply(arena::RoomSlot& slot, const arena::RoomInput& in) {
  std::lock_guard lock(slot.mu);
  arena::Room& room = slot.room;
  std::set<std::string> audience;
  auto add_members = [&] {
    for (const auto& p : room.players()) {
      if (room.is_member(p)) audience.insert(p);
    }
    audience.insert(room.spectators().begin(), room.spectators().end());
  };
  add_members();
  std::vector<arena::RoomEvent> events = room.apply(in);
  add_members();
  deliver_locked(room, audience, events);
  settle_locked(room);
}

void Service::deliver_locked(const arena::Room& room, const std::set<std::string>& audience,
                             const std::vector<arena::RoomEvent>& events) {
  std::vector<std::shared_ptr<WsConnection>> conns;
  {
    std::lock_guard lock(hub_mu_);
    auto it = hub_.find(room.id());
    if (it == hub_.end()) return;
    conns.assign(it->second.begin(), it->second.end());
  }
  for (const arena::RoomEvent& e : events) {
    const std::string text = e.wire().dump();
    for (const auto& c : conns) {
      if (c->closed) continue;
      if (e.to ? c->user == *e.to : audience.count(c->user) > 0) c->sink->send(text);
    }
  }
}

void Service::settle_locked(arena::Room& room) {
  const registry::GameMode mode = room.type() == arena::RoomType::kCompetition ? registry::GameMode::kMpCompetition
                                                                               : registry::GameMode::kMpCasual;
  for (const arena::MatchResult& r : room.take_results()) {
    try {
      registry_.update_rating(mode, r.winner, r.loser);
    } catch (const registry::RegistryError& e) {
      spdlog::error("rating update for room {} failed: {}", room.id(), e.what());
    }
  }
  if (room.state() != arena::RoomState::kFinished) return;
  std::vector<int> pinned;
  {
    std::lock_guard lock(book_mu_);
    RoomBook& book = books_[room.id()];
    if (book.finished_recorded) return;
    book.finished_recorded = true;
    pinned = std::move(book.pinned);
  }
  const auto champion = room.champion();
  for (const arena::Standing& s : room.standings()) {
    json outcome = {{"room", room.id()},
                    {"room_name", room.config().name},
                    {"place", s.place},
                    {"wins", s.wins},
                    {"losses", s.losses},
                    {"players", room.seeds().size()},
                    {"champion", champion ? json(*champion) : json()}};
    try {
      registry_.add_record({s.player, mode, clock_.now(), std::move(outcome)});
    } catch (const registry::RegistryError& e) {
      spdlog::error("game record for {} failed: {}", s.player, e.what());
    }
  }
  registry_.unpin_questions(pinned);
}

}  // namespace qarena::gateway

#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "qarena/arena/directory.hpp"
#include "qarena/game/sandbox.hpp"
#include "qarena/game/solo.hpp"
#include "qarena/gateway/http.hpp"
#include "qarena/gateway/tokens.hpp"
#include "qarena/registry/registry.hpp"

namespace qarena::gateway {

// WebSocket close codes.
inline constexpr int kCloseBadToken = 4001;
inline constexpr int kCloseUnknownRoom = 4004;
inline constexpr int kCloseProtocol = 4009;

inline constexpr int kMaxMessagesPerSecond = 10;
inline constexpr std::size_t kIdempotencyCapacity = 4096;

// Outbound side of one WebSocket. Implementations must not block: send()
// is called while the room's lock is held, in seq order.
class WsSink {
 public:
  virtual ~WsSink() = default;
  virtual void send(std::string text) = 0;
  virtual void close(int code, std::string reason) = 0;
};

struct WsConnection {
  std::string user;
  std::string room_id;
  std::shared_ptr<WsSink> sink;
  std::deque<Timestamp> recent;  // arrival times inside the rate window
  bool closed = false;
};

struct ServiceOptions {
  Timestamp token_lifetime = kTokenLifetime;
  // Fixed seeds make draws and brackets reproducible in tests; 0 means
  // fresh randomness per session.
  std::uint64_t fixed_seed = 0;
};

// Everything the HTTP and WebSocket front ends do, without the transport.
// Thread-safe.
class Service {
 public:
  Service(registry::Registry& registry, const Clock& clock, ServiceOptions options = {});

  HttpResponse handle(const HttpRequest& request);

  // Validates "/ws/rooms/{id}?token=..."; on failure closes the sink with
  // 4001 or 4004 and returns null.
  std::shared_ptr<WsConnection> ws_open(std::string_view target, std::shared_ptr<WsSink> sink);
  void ws_message(const std::shared_ptr<WsConnection>& conn, std::string_view text);
  void ws_close(const std::shared_ptr<WsConnection>& conn);

  // Sends a tick to every room with a round past its deadline. A round is
  // still open at exactly its deadline.
  void tick();

  registry::Registry& registry() { return registry_; }
  arena::RoomDirectory& rooms() { return rooms_; }
  TokenStore& tokens() { return tokens_; }

 private:
  struct SoloSlot {
    std::mutex mu;
    std::unique_ptr<game::SoloSession> session;
  };
  struct SandboxSlot {
    explicit SandboxSlot(std::string user) : sandbox(std::move(user)) {}
    std::mutex mu;
    game::Sandbox sandbox;
  };
  struct RoomBook {
    bool finished_recorded = false;
    std::vector<int> pinned;
  };
  // One Idempotency-Key. The mutex is held while the first request runs,
  // so a concurrent retry waits for and then reuses its response.
  struct IdemEntry {
    std::mutex mu;
    bool done = false;
    std::string fingerprint;
    HttpResponse response;
  };
  struct Ctx;
  using Handler = std::function<HttpResponse(Ctx&)>;
  struct Route {
    std::string method;
    std::vector<std::string> parts;  // "{}" matches one segment
    bool auth = true;
    bool idempotent_cache = true;
    Handler handler;
  };

  HttpResponse dispatch(Ctx& c, const Route& route);
  HttpResponse with_idempotency(Ctx& c, const Route& route, const std::string& key);
  void add_route(std::string method, const std::string& pattern, Handler h, bool auth = true);

  HttpResponse register_student(Ctx& c);
  HttpResponse login(Ctx& c);
  HttpResponse list_lectures(Ctx& c);
  HttpResponse get_lecture(Ctx& c);
  HttpResponse put_lecture(Ctx& c);
  HttpResponse get_profile(Ctx& c);
  HttpResponse search_profiles(Ctx& c);
  HttpResponse rankings(Ctx& c);
  HttpResponse solo_start(Ctx& c);
  HttpResponse solo_get(Ctx& c);
  HttpResponse solo_answer(Ctx& c);
  HttpResponse solo_skip(Ctx& c);
  HttpResponse solo_submit(Ctx& c);
  HttpResponse practice_query(Ctx& c);
  HttpResponse practice_reset(Ctx& c);
  HttpResponse list_rooms(Ctx& c);
  HttpResponse create_room(Ctx& c);
  HttpResponse list_questions(Ctx& c);
  HttpResponse add_question(Ctx& c);
  HttpResponse update_question(Ctx& c);
  HttpResponse delete_question(Ctx& c);
  HttpResponse issue_code(Ctx& c);
  HttpResponse create_admin(Ctx& c);

  std::shared_ptr<SoloSlot> solo_slot(Ctx& c);
  std::shared_ptr<SandboxSlot> sandbox_for(const std::string& user);
  std::uint64_t next_seed();

  // Applies one input under the room lock and fans the events out.
  void room_apply(arena::RoomSlot& slot, const arena::RoomInput& in);
  void deliver_locked(const arena::Room& room, const std::set<std::string>& audience,
                      const std::vector<arena::RoomEvent>& events);
  void settle_locked(arena::Room& room);

  registry::Registry& registry_;
  const Clock& clock_;
  ServiceOptions options_;
  TokenStore tokens_;
  arena::RoomDirectory rooms_;
  std::vector<Route> routes_;

  std::mutex solo_mu_;
  std::map<std::string, std::shared_ptr<SoloSlot>> solos_;
  std::uint64_t next_solo_ = 1;

  std::mutex sandbox_mu_;
  std::map<std::string, std::shared_ptr<SandboxSlot>> sandboxes_;

  std::mutex book_mu_;
  std::map<std::string, RoomBook> books_;

  std::mutex hub_mu_;
  std::map<std::string, std::set<std::shared_ptr<WsConnection>>> hub_;

  std::mutex idem_mu_;
  std::map<std::string, std::shared_ptr<IdemEntry>> idem_;
  std::deque<std::string> idem_order_;

  std::mutex seed_mu_;
  std::uint64_t seed_counter_ = 0;
};

}  // namespace qarena::gateway

#include "qarena/gateway/service.hpp"

#include <sodium.h>
#include <spdlog/spdlog.h>

#include "qarena/common/text.hpp"
#include "qarena/gateway/views.hpp"
#include "qarena/guard/question_json.hpp"

namespace qarena::gateway {

using nlohmann::json;
using registry::RegistryError;
using registry::Role;

struct Service::Ctx {
  const HttpRequest& req;
  Target target;
  std::vector<std::string> params;
  std::optional<registry::Account> account;
  json body;

  const std::string& user() const { return account->username; }
  bool admin() const { return account && account->role == Role::kAdmin; }
  void require_admin() const {
    if (!admin()) throw ApiError(403, "NOT_ADMIN", "administrator role required");
  }
};

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    std::size_t next = path.find('/', pos);
    if (next == std::string::npos) next = path.size();
    if (next > pos) out.push_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

[[noreturn]] void invalid(const std::string& code, const std::string& message) { throw ApiError(422, code, message); }

std::string str_field(const json& body, const char* key, bool required = true) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) invalid("MISSING_FIELD", std::string("missing field: ") + key);
    return {};
  }
  if (!it->is_string()) invalid("INVALID_FIELD", std::string(key) + " must be a string");
  return it->get<std::string>();
}

template <typename T>
T num_field(const json& body, const char* key, T fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number_integer()) invalid("INVALID_FIELD", std::string(key) + " must be an integer");
  return it->get<T>();
}

bool bool_field(const json& body, const char* key, bool fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) invalid("INVALID_FIELD", std::string(key) + " must be a boolean");
  return it->get<bool>();
}

int int_param(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ApiError(404, "NOT_FOUND", std::string("bad ") + what + ": " + s);
}

int registry_status(const std::string& code) {
  if (code == "NOT_ADMIN") return 403;
  if (code.rfind("UNKNOWN_", 0) == 0) return 404;
  if (code == "CORRUPT_LOG" || code == "IO_ERROR" || code == "CORRUPT_SNAPSHOT") return 500;
  return 422;
}

registry::PersonalInfo info_from(const json& body) {
  return {str_field(body, "name", false), str_field(body, "program", false)};
}

}  // namespace

Service::Service(registry::Registry& registry, const Clock& clock, ServiceOptions options)
    : registry_(registry), clock_(clock), options_(options), tokens_(clock, options.token_lifetime) {
  auto bind = [this](HttpResponse (Service::*fn)(Ctx&)) { return [this, fn](Ctx& c) { return (this->*fn)(c); }; };
  add_route("POST", "/api/register", bind(&Service::register_student), false);
  add_route("POST", "/api/login", bind(&Service::login), false);
  add_route("GET", "/api/lectures", bind(&Service::list_lectures));
  add_route("GET", "/api/lectures/{}", bind(&Service::get_lecture));
  add_route("POST", "/api/lectures", bind(&Service::put_lecture));
  add_route("PUT", "/api/lectures/{}", bind(&Service::put_lecture));
  add_route("GET", "/api/profile/{}", bind(&Service::get_profile));
  add_route("GET", "/api/profiles", bind(&Service::search_profiles));
  add_route("GET", "/api/rankings/{}", bind(&Service::rankings));
  add_route("POST", "/api/solo", bind(&Service::solo_start));
  add_route("GET", "/api/solo/{}", bind(&Service::solo_get));
  add_route("POST", "/api/solo/{}/answer", bind(&Service::solo_answer));
  add_route("POST", "/api/solo/{}/skip", bind(&Service::solo_skip));
  add_route("POST", "/api/solo/{}/submit", bind(&Service::solo_submit));
  add_route("POST", "/api/practice/query", bind(&Service::practice_query));
  add_route("POST", "/api/practice/reset", bind(&Service::practice_reset));
  add_route("GET", "/api/rooms", bind(&Service::list_rooms));
  add_route("POST", "/api/rooms", bind(&Service::create_room));
  add_route("GET", "/api/questions", bind(&Service::list_questions));
  add_route("POST", "/api/questions", bind(&Service::add_question));
  add_route("PUT", "/api/questions/{}", bind(&Service::update_question));
  add_route("DELETE", "/api/questions/{}", bind(&Service::delete_question));
  add_route("POST", "/api/codes", bind(&Service::issue_code));
  add_route("POST", "/api/admins", bind(&Service::create_admin));
}

void Service::add_route(std::string method, const std::string& pattern, Handler h, bool auth) {
  routes_.push_back({std::move(method), split_path(pattern), auth, true, std::move(h)});
}

HttpResponse Service::handle(const HttpRequest& request) {
  try {
    Target target = parse_target(request.target);
    const std::vector<std::string> parts = split_path(target.path);
    const Route* route = nullptr;
    std::vector<std::string> params;
    bool path_known = false;
    for (const Route& r : routes_) {
      if (r.parts.size() != parts.size()) continue;
      std::vector<std::string> p;
      bool ok = true;
      for (std::size_t i = 0; ok && i < parts.size(); ++i) {
        if (r.parts[i] == "{}") {
          p.push_back(parts[i]);
        } else {
          ok = r.parts[i] == parts[i];
        }
      }
      if (!ok) continue;
      path_known = true;
      if (r.method == request.method) {
        route = &r;
        params = std::move(p);
        break;
      }
    }
    if (!route) {
      return path_known ? error_response(405, "METHOD_NOT_ALLOWED", "method not allowed")
                        : error_response(404, "NOT_FOUND", "no such route");
    }
    Ctx c{request, std::move(target), std::move(params), std::nullopt, json::object()};
    if (route->auth) {
      std::string token;
      if (auto h = request.header("authorization")) {
        std::string_view v = trim(*h);
        if (v.size() > 7 && iequals(v.substr(0, 7), "Bearer ")) token = std::string(trim(v.substr(7)));
      }
      auto user = token.empty() ? std::nullopt : tokens_.resolve(token);
      if (user) c.account = registry_.account(*user);
      if (!c.account) return error_response(401, "UNAUTHORIZED", "missing, invalid or expired token");
    }
    if (!trim(request.body).empty()) {
      c.body = json::parse(request.body, nullptr, false);
      if (c.body.is_discarded()) return error_response(400, "BAD_JSON", "request body is not valid JSON");
    }
    if (request.method != "GET" && !c.body.is_object()) {
      return error_response(400, "BAD_JSON", "request body must be a JSON object");
    }
    auto key = request.header("idempotency-key");
    if (key && request.method != "GET" && route->idempotent_cache) return with_idempotency(c, *route, *key);
    return dispatch(c, *route);
  } catch (const std::exception& e) {
    spdlog::error("unhandled error for {} {}: {}", request.method, request.target, e.what());
    return error_response(500, "INTERNAL", "internal error");
  }
}

HttpResponse Service::dispatch(Ctx& c, const Route& route) {
  try {
    return route.handler(c);
  } catch (const ApiError& e) {
    return error_response(e.status(), e.code(), e.what());
  } catch (const RegistryError& e) {
    return error_response(registry_status(e.code()), e.code(), e.what());
  } catch (const game::GameError& e) {
    return error_response(422, e.code(), e.what());
  } catch (const arena::ArenaError& e) {
    return error_response(422, e.code(), e.what());
  } catch (const guard::InvalidQuestion& e) {
    return error_response(422, "INVALID_QUESTION", e.what());
  } catch (const json::exception& e) {
    return error_response(422, "INVALID_FIELD", e.what());
  }
}

HttpResponse Service::with_idempotency(Ctx& c, const Route& route, const std::string& key) {
  const std::string scope = (c.account ? c.user() : std::string()) + '\n' + c.req.method + ' ' + c.target.path +
                            '\n' + key;
  std::shared_ptr<IdemEntry> entry;
  {
    std::lock_guard lock(idem_mu_);
    auto [it, fresh] = idem_.try_emplace(scope);
    if (fresh) {
      it->second = std::make_shared<IdemEntry>();
      idem_order_.push_back(scope);
      while (idem_order_.size() > kIdempotencyCapacity) {
        idem_.erase(idem_order_.front());
        idem_order_.pop_front();
      }
    }
    entry = it->second;
  }
  std::lock_guard lock(entry->mu);
  if (entry->done) {
    if (entry->fingerprint != c.req.body) {
      return error_response(422, "IDEMPOTENCY_KEY_REUSED", "key was used with a different request body");
    }
    return entry->response;
  }
  HttpResponse r = dispatch(c, route);
  if (r.status < 500) {
    entry->done = true;
    entry->fingerprint = c.req.body;
    entry->response = r;
  }
  return r;
}

std::uint64_t Service::next_seed() {
  if (options_.fixed_seed != 0) {
    std::lock_guard lock(seed_mu_);
    return options_.fixed_seed + seed_counter_++;
  }
  std::uint64_t s;
  randombytes_buf(&s, sizeof s);
  return s;
}

// ---- accounts ----------------------------------------------------------------

HttpResponse Service::register_student(Ctx& c) {
  registry::Account a = registry_.register_student(str_field(c.body, "username"), str_field(c.body, "password"),
                                                   str_field(c.body, "code"), info_from(c.body));
  auto sandbox = sandbox_for(a.username);
  json j = registry::to_json(a, false);
  j["sandbox_table"] = sandbox->sandbox.table_name();
  return {201, j};
}

HttpResponse Service::login(Ctx& c) {
  auto a = registry_.authenticate(str_field(c.body, "username"), str_field(c.body, "password"));
  if (!a) throw ApiError(401, "BAD_CREDENTIALS", "wrong username or password");
  SessionToken t = tokens_.issue(a->username);
  return {200, {{"token", t.token}, {"expires_at", t.expires_at}, {"account", registry::to_json(*a, false)}}};
}

HttpResponse Service::create_admin(Ctx& c) {
  c.require_admin();
  registry::Account a = registry_.create_admin(c.user(), str_field(c.body, "username"),
                                               str_field(c.body, "password"), info_from(c.body));
  return {201, registry::to_json(a, false)};
}

HttpResponse Service::issue_code(Ctx& c) {
  c.require_admin();
  registry::VerificationCode code = registry_.issue_code(c.user());
  return {201, {{"code", code.code}, {"expires_at", code.expires_at}}};
}

HttpResponse Service::get_profile(Ctx& c) { return {200, profile(registry_.profile(c.params[0]))}; }

HttpResponse Service::search_profiles(Ctx& c) {
  auto it = c.target.query.find("search");
  json results = json::array();
  for (const auto& p : registry_.search_profiles(it == c.target.query.end() ? "" : it->second)) {
    results.push_back(registry::to_json(p));
  }
  return {200, {{"results", std::move(results)}}};
}

HttpResponse Service::rankings(Ctx& c) {
  auto mode = registry::game_mode_from_string(c.params[0]);
  if (!mode) invalid("INVALID_MODE", "unknown game mode " + c.params[0]);
  int page = 1;
  if (auto it = c.target.query.find("page"); it != c.target.query.end()) {
    try {
      page = std::stoi(it->second);
    } catch (const std::exception&) {
      invalid("INVALID_PAGE", "page must be a positive integer");
    }
  }
  json entries = json::array();
  for (const auto& e : registry_.leaderboard(*mode, page)) entries.push_back(registry::to_json(e));
  return {200,
          {{"mode", registry::to_string(*mode)},
           {"page", page},
           {"page_size", registry::kLeaderboardPageSize},
           {"entries", std::move(entries)}}};
}

// ---- lectures ----------------------------------------------------------------

HttpResponse Service::list_lectures(Ctx&) {
  json out = json::array();
  for (const auto& e : registry_.lectures()) {
    out.push_back({{"id", e.id}, {"title", e.title}, {"mode", registry::to_string(e.mode)}});
  }
  return {200, {{"lectures", std::move(out)}}};
}

HttpResponse Service::get_lecture(Ctx& c) {
  auto e = registry_.lecture(int_param(c.params[0], "lecture id"));
  if (!e) throw ApiError(404, "UNKNOWN_LECTURE", "no such lecture");
  return {200, registry::to_json(*e)};
}

HttpResponse Service::put_lecture(Ctx& c) {
  c.require_admin();
  registry::LectureEntry e = registry::lecture_from_json(c.body);
  const bool create = c.params.empty();
  e.id = create ? 0 : int_param(c.params[0], "lecture id");
  return {create ? 201 : 200, registry::to_json(registry_.put_lecture(c.user(), std::move(e)))};
}

// ---- questions ---------------------------------------------------------------

HttpResponse Service::list_questions(Ctx& c) {
  c.require_admin();
  json out = json::array();
  for (const auto& q : registry_.questions()) out.push_back(guard::question_to_json(*q));
  return {200, {{"questions", std::move(out)}}};
}

HttpResponse Service::add_question(Ctx& c) {
  c.require_admin();
  json body = c.body;
  if (!body.contains("id")) body["id"] = 0;
  auto q = registry_.add_question(c.user(), guard::question_from_json(body));
  return {201, guard::question_to_json(*q)};
}

HttpResponse Service::update_question(Ctx& c) {
  c.require_admin();
  const int id = int_param(c.params[0], "question id");
  json body = c.body;
  if (body.contains("id") && body["id"] != id) invalid("INVALID_FIELD", "id in body does not match the path");
  body["id"] = id;
  auto q = registry_.update_question(c.user(), guard::question_from_json(body));
  return {200, guard::question_to_json(*q)};
}

HttpResponse Service::delete_question(Ctx& c) {
  c.require_admin();
  const int id = int_param(c.params[0], "question id");
  const bool now = registry_.delete_question(c.user(), id);
  return {200, {{"id", id}, {"deleted", true}, {"deferred", !now}}};
}

// ---- solo --------------------------------------------------------------------

HttpResponse Service::solo_start(Ctx& c) {
  const std::string kind = to_upper(str_field(c.body, "mode", false));
  game::SoloMode mode;
  if (kind.empty() || kind == "CASUAL") {
    mode = game::SoloMode::Casual();
  } else if (kind == "CUSTOM") {
    mode = game::SoloMode::Custom(num_field<int>(c.body, "count", 0), num_field<int>(c.body, "difficulty", 0));
  } else {
    invalid("INVALID_MODE", "mode must be CASUAL or CUSTOM");
  }
  const std::uint64_t seed = num_field<std::uint64_t>(c.body, "seed", next_seed());
  std::vector<game::QuestionPtr> drawn = game::draw_questions(registry_.questions(), mode, seed);
  std::vector<int> ids;
  for (const auto& q : drawn) ids.push_back(q->id);
  registry_.pin_questions(ids);

  auto slot = std::make_shared<SoloSlot>();
  std::string id;
  {
    std::lock_guard lock(solo_mu_);
    id = "solo-" + std::to_string(next_solo_++);
    solos_[id] = slot;
  }
  slot->session = std::make_unique<game::SoloSession>(id, c.user(), mode, std::move(drawn), clock_.now());
  std::lock_guard lock(slot->mu);
  return {201, solo_session(*slot->session)};
}

std::shared_ptr<Service::SoloSlot> Service::solo_slot(Ctx& c) {
  std::shared_ptr<SoloSlot> slot;
  {
    std::lock_guard lock(solo_mu_);
    auto it = solos_.find(c.params[0]);
    if (it == solos_.end()) throw ApiError(404, "UNKNOWN_SESSION", "no such solo session");
    slot = it->second;
  }
  if (slot->session->player() != c.user()) throw ApiError(403, "NOT_OWNER", "this session belongs to someone else");
  return slot;
}

HttpResponse Service::solo_get(Ctx& c) {
  auto slot = solo_slot(c);
  std::lock_guard lock(slot->mu);
  return {200, solo_session(*slot->session)};
}

HttpResponse Service::solo_answer(Ctx& c) {
  auto slot = solo_slot(c);
  const int index = num_field<int>(c.body, "index", -1);
  if (index < 0) invalid("INDEX_OUT_OF_RANGE", "index is required");
  std::lock_guard lock(slot->mu);
  slot->session->answer(static_cast<std::size_t>(index), str_field(c.body, "text"));
  return {200, solo_session(*slot->session)};
}

HttpResponse Service::solo_skip(Ctx& c) {
  auto slot = solo_slot(c);
  const int index = num_field<int>(c.body, "index", -1);
  if (index < 0) invalid("INDEX_OUT_OF_RANGE", "index is required");
  std::lock_guard lock(slot->mu);
  slot->session->skip(static_cast<std::size_t>(index));
  return {200, solo_session(*slot->session)};
}

HttpResponse Service::solo_submit(Ctx& c) {
  auto slot = solo_slot(c);
  std::lock_guard lock(slot->mu);
  game::SoloSession& s = *slot->session;
  const Timestamp now = clock_.now();
  const game::ScoreReport& report = s.submit_all(now);
  const registry::GameMode mode = s.mode().kind == game::SoloMode::Kind::kCasual ? registry::GameMode::kSoloCasual
                                                                                  : registry::GameMode::kSoloCustom;
  json outcome = score_report(report);
  outcome["session"] = s.id();
  registry_.record_solo(s.player(), mode, report.total_correct);
  registry_.add_record({s.player(), mode, now, outcome});
  std::vector<int> ids;
  for (const auto& q : s.questions()) ids.push_back(q->id);
  registry_.unpin_questions(ids);
  return {200, solo_session(s)};
}

// ---- practice ----------------------------------------------------------------

std::shared_ptr<Service::SandboxSlot> Service::sandbox_for(const std::string& user) {
  std::lock_guard lock(sandbox_mu_);
  auto& slot = sandboxes_[user];
  if (!slot) slot = std::make_shared<SandboxSlot>(user);
  return slot;
}

HttpResponse Service::practice_query(Ctx& c) {
  auto slot = sandbox_for(c.user());
  const std::string text = str_field(c.body, "text");
  std::lock_guard lock(slot->mu);
  game::PracticeResult r = slot->sandbox.run(text);
  if (r.rejection != guard::RejectReason::kNone) {
    return error_response(422, std::string(guard::to_string(r.rejection)), r.detail);
  }
  if (r.error) return error_response(422, std::string(sql::to_string(*r.error)), r.detail);
  json j = {{"ok", true}, {"table", slot->sandbox.table_name()}};
  if (r.rows) {
    j["result"] = result_set(*r.rows);
  } else {
    j["affected"] = r.affected;
  }
  return {200, j};
}

HttpResponse Service::practice_reset(Ctx& c) {
  auto slot = sandbox_for(c.user());
  std::lock_guard lock(slot->mu);
  slot->sandbox.reset();
  return {200, {{"ok", true}, {"table", slot->sandbox.table_name()}}};
}

// ---- rooms -------------------------------------------------------------------

HttpResponse Service::list_rooms(Ctx&) {
  json out = json::array();
  for (const auto& slot : rooms_.all()) {
    std::lock_guard lock(slot->mu);
    out.push_back(slot->room.summary());
  }
  return {200, {{"rooms", std::move(out)}}};
}

HttpResponse Service::create_room(Ctx& c) {
  arena::RoomConfig cfg;
  cfg.name = str_field(c.body, "name");
  cfg.allow_spectators = bool_field(c.body, "allow_spectators", cfg.allow_spectators);
  if (auto m = str_field(c.body, "mode", false); !m.empty()) {
    auto mode = arena::elimination_mode_from_string(to_upper(m));
    if (!mode) invalid("INVALID_CONFIG", "mode must be SINGLE or DOUBLE");
    cfg.mode = *mode;
  }
  cfg.round_time_limit = num_field<int>(c.body, "round_time_limit", cfg.round_time_limit);
  cfg.difficulty = num_field<int>(c.body, "difficulty", cfg.difficulty);
  cfg.max_players = num_field<int>(c.body, "max_players", cfg.max_players);
  arena::validate(cfg);
  std::vector<registry::QuestionPtr> pool = registry_.questions();
  std::vector<int> ids;
  for (const auto& q : pool) ids.push_back(q->id);
  registry_.pin_questions(ids);
  auto slot = rooms_.create(c.user(), c.admin(), cfg, std::move(pool), clock_.now());
  std::lock_guard lock(slot->mu);
  {
    std::lock_guard book(book_mu_);
    books_[slot->room.id()].pinned = std::move(ids);
  }
  return {201, slot->room.summary()};
}

}  // namespace qarena::gateway

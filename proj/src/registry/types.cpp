#include "qarena/registry/types.hpp"

#include <algorithm>
#include <cmath>

namespace qarena::registry {

using nlohmann::json;

namespace {

constexpr std::pair<GameMode, std::string_view> kModeNames[] = {
    {GameMode::kSoloCasual, "SOLO_CASUAL"},
    {GameMode::kSoloCustom, "SOLO_CUSTOM"},
    {GameMode::kMpCasual, "MP_CASUAL"},
    {GameMode::kMpCompetition, "MP_COMPETITION"},
};

constexpr std::pair<LectureBlock::Kind, std::string_view> kBlockNames[] = {
    {LectureBlock::Kind::kText, "TEXT"},
    {LectureBlock::Kind::kImage, "IMAGE"},
    {LectureBlock::Kind::kAudio, "AUDIO"},
    {LectureBlock::Kind::kVideoEmbed, "VIDEO_EMBED"},
};

[[noreturn]] void bad_lecture(const std::string& why) { throw RegistryError("INVALID_LECTURE", why); }

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(std::string("missing field ") + key);
  return it->get<T>();
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

}  // namespace

std::string_view to_string(Role role) { return role == Role::kAdmin ? "ADMIN" : "STUDENT"; }

std::optional<Role> role_from_string(std::string_view name) {
  if (name == "ADMIN") return Role::kAdmin;
  if (name == "STUDENT") return Role::kStudent;
  return std::nullopt;
}

std::string_view to_string(GameMode mode) {
  for (const auto& [m, n] : kModeNames) {
    if (m == mode) return n;
  }
  return "?";
}

std::optional<GameMode> game_mode_from_string(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(LectureBlock::Kind kind) {
  for (const auto& [k, n] : kBlockNames) {
    if (k == kind) return n;
  }
  return "?";
}

std::string_view to_string(LectureEntry::Mode mode) {
  return mode == LectureEntry::Mode::kTutorial ? "TUTORIAL" : "LECTURE";
}

std::pair<std::int64_t, std::int64_t> elo_update(std::int64_t winner, std::int64_t loser) {
  const double expected = 1.0 / (1.0 + std::pow(10.0, static_cast<double>(loser - winner) / 400.0));
  const std::int64_t delta = std::lround(kEloK * (1.0 - expected));
  return {winner + delta, std::max<std::int64_t>(0, loser - delta)};
}

json to_json(const Account& a, bool with_digest) {
  json j = {{"username", a.username},
            {"role", to_string(a.role)},
            {"name", a.info.name},
            {"program", a.info.program},
            {"created_at", a.created_at}};
  if (with_digest) j["password_digest"] = a.password_digest;
  return j;
}

Account account_from_json(const json& j) {
  Account a;
  a.username = field<std::string>(j, "username");
  a.password_digest = field<std::string>(j, "password_digest");
  auto role = role_from_string(field<std::string>(j, "role"));
  if (!role) throw std::invalid_argument("bad role");
  a.role = *role;
  a.info.name = field_or<std::string>(j, "name", "");
  a.info.program = field_or<std::string>(j, "program", "");
  a.created_at = field<Timestamp>(j, "created_at");
  return a;
}

json to_json(const ProfileSummary& p) {
  return {{"username", p.username}, {"name", p.name}, {"program", p.program}, {"role", to_string(p.role)}};
}

json to_json(const LeaderboardEntry& e) {
  return {{"rank", e.rank},   {"username", e.username}, {"name", e.name},
          {"rating", e.rating.points}, {"wins", e.rating.wins}, {"losses", e.rating.losses},
          {"games_played", e.rating.games_played}};
}

json to_json(const VerificationCode& c) {
  return {{"code", c.code},
          {"issued_by", c.issued_by},
          {"issued_at", c.issued_at},
          {"expires_at", c.expires_at},
          {"consumed_by", c.consumed_by ? json(*c.consumed_by) : json(nullptr)}};
}

VerificationCode code_from_json(const json& j) {
  VerificationCode c;
  c.code = field<std::string>(j, "code");
  c.issued_by = field<std::string>(j, "issued_by");
  c.issued_at = field<Timestamp>(j, "issued_at");
  c.expires_at = field<Timestamp>(j, "expires_at");
  if (auto it = j.find("consumed_by"); it != j.end() && !it->is_null()) c.consumed_by = it->get<std::string>();
  return c;
}

json to_json(const Rating& r) {
  return {{"points", r.points}, {"wins", r.wins}, {"losses", r.losses}, {"games_played", r.games_played}};
}

Rating rating_from_json(const json& j) {
  Rating r{field<std::int64_t>(j, "points"), field<int>(j, "wins"), field<int>(j, "losses"),
           field<int>(j, "games_played")};
  if (r.points < 0 || r.wins < 0 || r.losses < 0 || r.wins + r.losses > r.games_played) {
    throw std::invalid_argument("rating out of range");
  }
  return r;
}

json to_json(const GameRecord& r) {
  return {{"player", r.player}, {"mode", to_string(r.mode)}, {"at", r.at}, {"outcome", r.outcome}};
}

GameRecord record_from_json(const json& j) {
  GameRecord r;
  r.player = field<std::string>(j, "player");
  auto mode = game_mode_from_string(field<std::string>(j, "mode"));
  if (!mode) throw std::invalid_argument("bad mode");
  r.mode = *mode;
  r.at = field<Timestamp>(j, "at");
  r.outcome = j.value("outcome", json::object());
  return r;
}

json to_json(const LectureEntry& e) {
  json blocks = json::array();
  for (const LectureBlock& b : e.blocks) {
    json jb = {{"kind", to_string(b.kind)}};
    if (!b.text.empty()) jb["text"] = b.text;
    if (!b.url.empty()) jb["url"] = b.url;
    if (!b.demo_query.empty()) {
      jb["demo_query"] = b.demo_query;
      jb["transcript"] = b.transcript;
    }
    blocks.push_back(std::move(jb));
  }
  json j = {{"id", e.id}, {"title", e.title}, {"mode", to_string(e.mode)}, {"blocks", std::move(blocks)}};
  if (e.mode == LectureEntry::Mode::kTutorial) j["setup"] = e.setup;
  return j;
}

LectureEntry lecture_from_json(const json& j) {
  if (!j.is_object()) bad_lecture("lecture must be an object");
  LectureEntry e;
  try {
    e.id = field_or<int>(j, "id", 0);
    e.title = field<std::string>(j, "title");
    const std::string mode = field_or<std::string>(j, "mode", "LECTURE");
    if (mode == "TUTORIAL") {
      e.mode = LectureEntry::Mode::kTutorial;
    } else if (mode != "LECTURE") {
      bad_lecture("unknown mode " + mode);
    }
    e.setup = field_or<std::vector<std::string>>(j, "setup", {});
    for (const json& jb : field<json>(j, "blocks")) {
      LectureBlock b;
      const std::string kind = field<std::string>(jb, "kind");
      auto it = std::find_if(std::begin(kBlockNames), std::end(kBlockNames),
                             [&](const auto& p) { return p.second == kind; });
      if (it == std::end(kBlockNames)) bad_lecture("unknown block kind " + kind);
      b.kind = it->first;
      b.text = field_or<std::string>(jb, "text", "");
      b.url = field_or<std::string>(jb, "url", "");
      b.demo_query = field_or<std::string>(jb, "demo_query", "");
      b.transcript = field_or<std::string>(jb, "transcript", "");
      e.blocks.push_back(std::move(b));
    }
  } catch (const json::exception& ex) {
    bad_lecture(ex.what());
  } catch (const std::invalid_argument& ex) {
    bad_lecture(ex.what());
  }
  return e;
}

}  // namespace qarena::registry

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qarena/common/clock.hpp"

namespace qarena::registry {

enum class Role { kStudent, kAdmin };
enum class GameMode { kSoloCasual, kSoloCustom, kMpCasual, kMpCompetition };

inline constexpr GameMode kAllGameModes[] = {GameMode::kSoloCasual, GameMode::kSoloCustom,
                                             GameMode::kMpCasual, GameMode::kMpCompetition};

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view name);
std::string_view to_string(GameMode mode);
std::optional<GameMode> game_mode_from_string(std::string_view name);
inline bool is_solo(GameMode m) { return m == GameMode::kSoloCasual || m == GameMode::kSoloCustom; }

class RegistryError : public std::runtime_error {
 public:
  RegistryError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class CorruptLog : public RegistryError {
 public:
  CorruptLog(std::size_t line, const std::string& why)
      : RegistryError("CORRUPT_LOG", "log.ndjson line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct PersonalInfo {
  std::string name;
  std::string program;
  bool operator==(const PersonalInfo&) const = default;
};

struct Account {
  std::string username;
  std::string password_digest;
  Role role = Role::kStudent;
  PersonalInfo info;
  Timestamp created_at = 0;
  bool operator==(const Account&) const = default;
};

struct VerificationCode {
  std::string code;
  std::string issued_by;
  Timestamp issued_at = 0;
  Timestamp expires_at = 0;
  std::optional<std::string> consumed_by;
  bool operator==(const VerificationCode&) const = default;
};

// Multiplayer modes hold an Elo rating; solo modes hold cumulative points.
struct Rating {
  std::int64_t points = 0;
  int wins = 0;
  int losses = 0;
  int games_played = 0;
  bool operator==(const Rating&) const = default;
};

inline constexpr std::int64_t kBaseElo = 1000;
inline constexpr int kEloK = 32;

inline Rating default_rating(GameMode m) { return Rating{is_solo(m) ? 0 : kBaseElo, 0, 0, 0}; }

// Elo with K=32: the winner gains round(K * (1 - E)), the loser drops by the
// same amount, floored at 0.
std::pair<std::int64_t, std::int64_t> elo_update(std::int64_t winner, std::int64_t loser);

struct GameRecord {
  std::string player;
  GameMode mode = GameMode::kSoloCasual;
  Timestamp at = 0;
  nlohmann::json outcome;
  bool operator==(const GameRecord&) const = default;
};

struct LectureBlock {
  enum class Kind { kText, kImage, kAudio, kVideoEmbed };
  Kind kind = Kind::kText;
  std::string text;        // kText body, or caption for media
  std::string url;         // media blocks
  std::string demo_query;  // tutorial blocks only
  std::string transcript;  // engine output for demo_query, filled on save
  bool operator==(const LectureBlock&) const = default;
};

std::string_view to_string(LectureBlock::Kind kind);

struct LectureEntry {
  enum class Mode { kLecture, kTutorial };
  int id = 0;
  std::string title;
  Mode mode = Mode::kLecture;
  std::vector<std::string> setup;  // tutorial: statements run before the demos
  std::vector<LectureBlock> blocks;
  bool operator==(const LectureEntry&) const = default;
};

std::string_view to_string(LectureEntry::Mode mode);

struct ProfileSummary {
  std::string username;
  std::string name;
  std::string program;
  Role role = Role::kStudent;
};

struct LeaderboardEntry {
  int rank = 0;
  std::string username;
  std::string name;
  Rating rating;
};

// JSON forms shared by persistence and the HTTP layer.
nlohmann::json to_json(const Account& a, bool with_digest);
nlohmann::json to_json(const ProfileSummary& p);
nlohmann::json to_json(const LeaderboardEntry& e);
Account account_from_json(const nlohmann::json& j);
nlohmann::json to_json(const VerificationCode& c);
VerificationCode code_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Rating& r);
Rating rating_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GameRecord& r);
GameRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LectureEntry& e);
LectureEntry lecture_from_json(const nlohmann::json& j);  // throws RegistryError INVALID_LECTURE

}  // namespace qarena::registry

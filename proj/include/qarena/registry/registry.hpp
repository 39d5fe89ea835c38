#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "qarena/common/clock.hpp"
#include "qarena/guard/question.hpp"
#include "qarena/registry/log_store.hpp"
#include "qarena/registry/types.hpp"

namespace qarena::registry {

using QuestionPtr = std::shared_ptr<const guard::Question>;

inline constexpr std::size_t kLeaderboardPageSize = 25;
inline constexpr std::size_t kSearchLimit = 50;
inline constexpr std::size_t kMinPasswordLength = 8;
inline constexpr std::size_t kCodeLength = 8;
inline constexpr Timestamp kCodeLifetime = 7 * kDay;
inline constexpr std::string_view kCodeAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ23456789";

// argon2id work factors passed to libsodium.
struct HashCost {
  unsigned long long ops;
  std::size_t mem;
  static HashCost interactive();
  static HashCost minimum();  // tests only
};

struct RegistryOptions {
  std::filesystem::path data_dir;  // empty: memory only
  HashCost hash_cost = HashCost::interactive();
  std::size_t snapshot_every = 256;  // log records between snapshots
  bool sync_writes = true;
  // Copied to data_dir/questions.ndjson when that file does not exist yet.
  std::filesystem::path seed_bank;
};

struct Profile {
  Account account;
  std::map<GameMode, Rating> ratings;
  std::vector<GameRecord> records;
};

bool valid_username(std::string_view name);

// Thread-safe. Mutations take an exclusive lock and are journaled before
// the call returns; reads share the lock.
//
// Error codes: NOT_ADMIN, INVALID_USERNAME, WEAK_PASSWORD,
// USERNAME_TAKEN, BAD_CODE, UNKNOWN_USER, INVALID_MODE, INVALID_PAGE,
// INVALID_LECTURE, UNKNOWN_LECTURE, INVALID_QUESTION, DUPLICATE_QUESTION_ID,
// UNKNOWN_QUESTION_ID, CORRUPT_LOG.
class Registry {
 public:
  Registry(const Clock& clock, RegistryOptions options = {});

  // With no admin present an empty actor is accepted (bootstrap); after
  // that only an existing admin may create another.
  Account create_admin(const std::string& actor, const std::string& username, const std::string& password,
                       PersonalInfo info = {});
  VerificationCode issue_code(const std::string& admin);
  Account register_student(const std::string& username, const std::string& password, const std::string& code,
                           PersonalInfo info = {});
  std::optional<Account> authenticate(const std::string& username, const std::string& password) const;

  std::optional<Account> account(const std::string& username) const;
  bool has_admin() const;
  Profile profile(const std::string& username) const;
  std::vector<ProfileSummary> search_profiles(std::string_view query) const;
  std::vector<VerificationCode> codes() const;

  Rating rating(const std::string& username, GameMode mode) const;
  // Multiplayer modes only. Returns the new (winner, loser) ratings.
  std::pair<Rating, Rating> update_rating(GameMode mode, const std::string& winner, const std::string& loser);
  // Solo modes only: adds `points` and counts one game.
  Rating record_solo(const std::string& username, GameMode mode, int points);
  void add_record(GameRecord record);
  // 1-based page; players with no games in the mode are not listed.
  std::vector<LeaderboardEntry> leaderboard(GameMode mode, int page) const;

  // id 0 creates a new lecture; otherwise replaces an existing one.
  // Tutorial transcripts are regenerated on every save.
  LectureEntry put_lecture(const std::string& admin, LectureEntry entry);
  std::vector<LectureEntry> lectures() const;
  std::optional<LectureEntry> lecture(int id) const;

  // Questions open to new sessions, ordered by id.
  std::vector<QuestionPtr> questions() const;
  QuestionPtr question(int id) const;
  QuestionPtr add_question(const std::string& admin, guard::Question draft);
  QuestionPtr update_question(const std::string& admin, guard::Question draft);
  // Returns false when the question is pinned; it then leaves the drawable
  // set at once and is erased when the last pin is released.
  bool delete_question(const std::string& admin, int id);
  void pin_questions(const std::vector<int>& ids);
  void unpin_questions(const std::vector<int>& ids);

  // Every durable field, in a canonical order.
  nlohmann::json state_json() const;
  void snapshot();

 private:
  struct QuestionSlot {
    QuestionPtr question;
    int pins = 0;
    bool deleted = false;
  };

  void require_admin_locked(const std::string& actor) const;
  void require_user_locked(const std::string& username) const;
  std::string hash_password(const std::string& password) const;
  void check_credentials(const std::string& username, const std::string& password) const;
  Rating& rating_slot_locked(const std::string& username, GameMode mode);
  Rating rating_locked(const std::string& username, GameMode mode) const;

  // Journals the record, then applies it exactly as restore would.
  void commit_locked(nlohmann::json record);
  nlohmann::json state_locked(bool with_questions) const;
  void apply_record(const nlohmann::json& record);
  void load_state(const nlohmann::json& state);
  void restore();
  void load_questions();
  void save_questions_locked() const;

  const Clock& clock_;
  RegistryOptions options_;
  std::unique_ptr<LogStore> store_;

  mutable std::shared_mutex mutex_;
  std::map<std::string, Account> accounts_;
  std::map<std::string, VerificationCode> codes_;
  std::map<std::string, std::array<Rating, 4>> ratings_;
  std::vector<GameRecord> records_;
  std::map<int, LectureEntry> lectures_;
  std::map<int, QuestionSlot> questions_;
};

}  // namespace qarena::registry

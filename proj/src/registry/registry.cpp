#include "qarena/registry/registry.hpp"

#include <sodium.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>

#include "qarena/common/text.hpp"
#include "qarena/guard/question_json.hpp"
#include "qarena/sql/executor.hpp"
#include "qarena/sql/parser.hpp"

namespace qarena::registry {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::size_t mode_index(GameMode m) { return static_cast<std::size_t>(m); }

[[noreturn]] void fail(const char* code, const std::string& message) { throw RegistryError(code, message); }

std::array<Rating, 4> default_ratings() {
  std::array<Rating, 4> r;
  for (GameMode m : kAllGameModes) r[mode_index(m)] = default_rating(m);
  return r;
}

// Runs the setup statements and each demo query on a private database and
// records what the engine printed.
void fill_transcripts(LectureEntry& e) {
  sql::Database db;
  auto run = [&db](const std::string& text) -> std::string {
    try {
      sql::ExecOutcome r = sql::execute(db, sql::parse(text));
      if (r.has_rows()) return sql::serialize_result(r.rows());
      return std::to_string(r.affected()) + " row(s) affected";
    } catch (const sql::SqlError& ex) {
      return "ERROR " + std::string(sql::to_string(ex.kind())) + ": " + ex.what();
    }
  };
  for (const std::string& s : e.setup) {
    std::string out = run(s);
    if (out.rfind("ERROR ", 0) == 0) fail("INVALID_LECTURE", "setup statement failed: " + out);
  }
  for (LectureBlock& b : e.blocks) {
    if (!b.demo_query.empty()) b.transcript = run(b.demo_query);
  }
}

void validate_lecture(const LectureEntry& e) {
  if (trim(e.title).empty()) fail("INVALID_LECTURE", "title is required");
  if (e.blocks.empty()) fail("INVALID_LECTURE", "a lecture needs at least one block");
  if (e.mode == LectureEntry::Mode::kLecture && !e.setup.empty()) {
    fail("INVALID_LECTURE", "setup is only allowed in tutorials");
  }
  for (const LectureBlock& b : e.blocks) {
    using K = LectureBlock::Kind;
    if (!b.demo_query.empty() && e.mode != LectureEntry::Mode::kTutorial) {
      fail("INVALID_LECTURE", "demo queries are only allowed in tutorials");
    }
    switch (b.kind) {
      case K::kText:
        if (b.text.empty() || !b.url.empty()) fail("INVALID_LECTURE", "TEXT blocks carry text only");
        break;
      case K::kImage:
      case K::kAudio:
        if (b.url.empty()) fail("INVALID_LECTURE", std::string(to_string(b.kind)) + " blocks need a url");
        break;
      case K::kVideoEmbed:
        if (b.url.empty() || !b.text.empty() || !b.demo_query.empty()) {
          fail("INVALID_LECTURE", "VIDEO_EMBED blocks carry a url only");
        }
        break;
    }
  }
}

}  // namespace

HashCost HashCost::interactive() {
  return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

HashCost HashCost::minimum() { return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN}; }

bool valid_username(std::string_view name) {
  static const std::regex re("^[A-Za-z0-9_]{3,32}$");
  return std::regex_match(name.begin(), name.end(), re);
}

Registry::Registry(const Clock& clock, RegistryOptions options) : clock_(clock), options_(std::move(options)) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium failed to initialise");
  if (!options_.data_dir.empty()) {
    store_ = std::make_unique<LogStore>(options_.data_dir, options_.sync_writes);
    restore();
  }
  load_questions();
}

// ---- accounts --------------------------------------------------------------

std::string Registry::hash_password(const std::string& password) const {
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), options_.hash_cost.ops, options_.hash_cost.mem) !=
      0) {
    throw std::runtime_error("password hashing ran out of memory");
  }
  return out;
}

void Registry::check_credentials(const std::string& username, const std::string& password) const {
  if (!valid_username(username)) fail("INVALID_USERNAME", "usernames are 3-32 letters, digits or underscores");
  if (password.size() < kMinPasswordLength) fail("WEAK_PASSWORD", "passwords need at least 8 characters");
}

void Registry::require_admin_locked(const std::string& actor) const {
  auto it = accounts_.find(actor);
  if (it == accounts_.end() || it->second.role != Role::kAdmin) fail("NOT_ADMIN", "administrator role required");
}

void Registry::require_user_locked(const std::string& username) const {
  if (!accounts_.count(username)) fail("UNKNOWN_USER", "no such user: " + username);
}

Account Registry::create_admin(const std::string& actor, const std::string& username, const std::string& password,
                               PersonalInfo info) {
  check_credentials(username, password);
  Account a{username, hash_password(password), Role::kAdmin, std::move(info), clock_.now()};
  std::unique_lock lock(mutex_);
  const bool bootstrap = std::none_of(accounts_.begin(), accounts_.end(),
                                      [](const auto& p) { return p.second.role == Role::kAdmin; });
  if (!bootstrap) require_admin_locked(actor);
  if (accounts_.count(username)) fail("USERNAME_TAKEN", "username already in use");
  commit_locked({{"op", "account_put"}, {"account", to_json(a, true)}});
  return a;
}

VerificationCode Registry::issue_code(const std::string& admin) {
  std::unique_lock lock(mutex_);
  require_admin_locked(admin);
  VerificationCode c;
  do {
    c.code.clear();
    for (std::size_t i = 0; i < kCodeLength; ++i) {
      c.code.push_back(kCodeAlphabet[randombytes_uniform(static_cast<std::uint32_t>(kCodeAlphabet.size()))]);
    }
  } while (codes_.count(c.code));
  c.issued_by = admin;
  c.issued_at = clock_.now();
  c.expires_at = c.issued_at + kCodeLifetime;
  commit_locked({{"op", "code_put"}, {"code", to_json(c)}});
  return c;
}

Account Registry::register_student(const std::string& username, const std::string& password,
                                   const std::string& code, PersonalInfo info) {
  check_credentials(username, password);
  const std::string key = to_upper(trim(code));
  Account a{username, hash_password(password), Role::kStudent, std::move(info), 0};
  std::unique_lock lock(mutex_);
  const Timestamp now = clock_.now();
  auto it = codes_.find(key);
  if (it == codes_.end() || it->second.consumed_by || now >= it->second.expires_at) {
    fail("BAD_CODE", "verification code is invalid, used or expired");
  }
  if (accounts_.count(username)) fail("USERNAME_TAKEN", "username already in use");
  a.created_at = now;
  VerificationCode c = it->second;
  c.consumed_by = username;
  commit_locked({{"op", "student_register"}, {"account", to_json(a, true)}, {"code", to_json(c)}});
  return a;
}

std::optional<Account> Registry::authenticate(const std::string& username, const std::string& password) const {
  std::optional<Account> a = account(username);
  if (!a) return std::nullopt;
  if (crypto_pwhash_str_verify(a->password_digest.c_str(), password.data(), password.size()) != 0) {
    return std::nullopt;
  }
  return a;
}

std::optional<Account> Registry::account(const std::string& username) const {
  std::shared_lock lock(mutex_);
  auto it = accounts_.find(username);
  if (it == accounts_.end()) return std::nullopt;
  return it->second;
}

bool Registry::has_admin() const {
  std::shared_lock lock(mutex_);
  return std::any_of(accounts_.begin(), accounts_.end(), [](const auto& p) { return p.second.role == Role::kAdmin; });
}

Profile Registry::profile(const std::string& username) const {
  std::shared_lock lock(mutex_);
  require_user_locked(username);
  Profile p;
  p.account = accounts_.at(username);
  for (GameMode m : kAllGameModes) p.ratings[m] = rating_locked(username, m);
  for (const GameRecord& r : records_) {
    if (r.player == username) p.records.push_back(r);
  }
  return p;
}

std::vector<ProfileSummary> Registry::search_profiles(std::string_view query) const {
  const std::string needle = to_lower(trim(query));
  std::shared_lock lock(mutex_);
  std::vector<ProfileSummary> out;
  for (const auto& [name, a] : accounts_) {
    if (out.size() == kSearchLimit) break;
    if (to_lower(name).find(needle) != std::string::npos ||
        to_lower(a.info.name).find(needle) != std::string::npos) {
      out.push_back({a.username, a.info.name, a.info.program, a.role});
    }
  }
  return out;
}

std::vector<VerificationCode> Registry::codes() const {
  std::shared_lock lock(mutex_);
  std::vector<VerificationCode> out;
  for (const auto& [k, c] : codes_) out.push_back(c);
  return out;
}

// ---- ratings and records -----------------------------------------------------

Rating Registry::rating_locked(const std::string& username, GameMode mode) const {
  auto it = ratings_.find(username);
  return it == ratings_.end() ? default_rating(mode) : it->second[mode_index(mode)];
}

Rating& Registry::rating_slot_locked(const std::string& username, GameMode mode) {
  auto [it, fresh] = ratings_.try_emplace(username);
  if (fresh) it->second = default_ratings();
  return it->second[mode_index(mode)];
}

Rating Registry::rating(const std::string& username, GameMode mode) const {
  std::shared_lock lock(mutex_);
  require_user_locked(username);
  return rating_locked(username, mode);
}

std::pair<Rating, Rating> Registry::update_rating(GameMode mode, const std::string& winner,
                                                  const std::string& loser) {
  if (is_solo(mode)) fail("INVALID_MODE", "solo modes are not rated by matches");
  if (winner == loser) fail("INVALID_MODE", "a player cannot play themselves");
  std::unique_lock lock(mutex_);
  require_user_locked(winner);
  require_user_locked(loser);
  Rating w = rating_locked(winner, mode);
  Rating l = rating_locked(loser, mode);
  std::tie(w.points, l.points) = elo_update(w.points, l.points);
  ++w.wins;
  ++w.games_played;
  ++l.losses;
  ++l.games_played;
  json entries = json::array();
  entries.push_back({{"username", winner}, {"mode", to_string(mode)}, {"rating", to_json(w)}});
  entries.push_back({{"username", loser}, {"mode", to_string(mode)}, {"rating", to_json(l)}});
  commit_locked({{"op", "rating_put"}, {"entries", std::move(entries)}});
  return {w, l};
}

Rating Registry::record_solo(const std::string& username, GameMode mode, int points) {
  if (!is_solo(mode)) fail("INVALID_MODE", "not a solo mode");
  if (points < 0) fail("INVALID_MODE", "points must be non-negative");
  std::unique_lock lock(mutex_);
  require_user_locked(username);
  Rating r = rating_locked(username, mode);
  r.points += points;
  ++r.games_played;
  json entries = json::array();
  entries.push_back({{"username", username}, {"mode", to_string(mode)}, {"rating", to_json(r)}});
  commit_locked({{"op", "rating_put"}, {"entries", std::move(entries)}});
  return r;
}

void Registry::add_record(GameRecord record) {
  std::unique_lock lock(mutex_);
  require_user_locked(record.player);
  commit_locked({{"op", "record_add"}, {"record", to_json(record)}});
}

std::vector<LeaderboardEntry> Registry::leaderboard(GameMode mode, int page) const {
  if (page < 1) fail("INVALID_PAGE", "pages start at 1");
  std::shared_lock lock(mutex_);
  struct Row {
    const Account* account;
    Rating rating;
  };
  std::vector<Row> rows;
  for (const auto& [name, a] : accounts_) {
    Rating r = rating_locked(name, mode);
    if (r.games_played > 0) rows.push_back({&a, r});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (x.rating.points != y.rating.points) return x.rating.points > y.rating.points;
    if (x.account->created_at != y.account->created_at) return x.account->created_at < y.account->created_at;
    return x.account->username < y.account->username;
  });
  std::vector<LeaderboardEntry> out;
  const std::size_t begin = static_cast<std::size_t>(page - 1) * kLeaderboardPageSize;
  for (std::size_t i = begin; i < rows.size() && i < begin + kLeaderboardPageSize; ++i) {
    out.push_back({static_cast<int>(i + 1), rows[i].account->username, rows[i].account->info.name, rows[i].rating});
  }
  return out;
}

// ---- lectures ------------------------------------------------------------------

LectureEntry Registry::put_lecture(const std::string& admin, LectureEntry entry) {
  validate_lecture(entry);
  if (entry.mode == LectureEntry::Mode::kTutorial) fill_transcripts(entry);
  std::unique_lock lock(mutex_);
  require_admin_locked(admin);
  if (entry.id == 0) {
    entry.id = lectures_.empty() ? 1 : lectures_.rbegin()->first + 1;
  } else if (!lectures_.count(entry.id)) {
    fail("UNKNOWN_LECTURE", "no lecture " + std::to_string(entry.id));
  }
  commit_locked({{"op", "lecture_put"}, {"lecture", to_json(entry)}});
  return entry;
}

std::vector<LectureEntry> Registry::lectures() const {
  std::shared_lock lock(mutex_);
  std::vector<LectureEntry> out;
  for (const auto& [id, e] : lectures_) out.push_back(e);
  return out;
}

std::optional<LectureEntry> Registry::lecture(int id) const {
  std::shared_lock lock(mutex_);
  auto it = lectures_.find(id);
  if (it == lectures_.end()) return std::nullopt;
  return it->second;
}

// ---- question bank -------------------------------------------------------------

void Registry::load_questions() {
  fs::path path;
  if (!options_.data_dir.empty()) {
    path = options_.data_dir / "questions.ndjson";
    if (!fs::exists(path) && !options_.seed_bank.empty()) fs::copy_file(options_.seed_bank, path);
  } else {
    path = options_.seed_bank;
  }
  if (path.empty() || !fs::exists(path)) return;
  std::ifstream in(path);
  try {
    for (guard::Question& q : guard::load_question_bank(in)) {
      const int id = q.id;
      if (questions_.count(id)) fail("INVALID_QUESTION", "duplicate question id " + std::to_string(id));
      questions_[id].question = std::make_shared<const guard::Question>(std::move(q));
    }
  } catch (const guard::InvalidQuestion& e) {
    fail("INVALID_QUESTION", path.string() + ": " + e.what());
  }
}

void Registry::save_questions_locked() const {
  if (options_.data_dir.empty()) return;
  std::string out;
  for (const auto& [id, slot] : questions_) {
    if (slot.deleted) continue;
    out += guard::question_to_json(*slot.question).dump();
    out.push_back('\n');
  }
  write_file_atomic(options_.data_dir / "questions.ndjson", out, options_.sync_writes);
}

std::vector<QuestionPtr> Registry::questions() const {
  std::shared_lock lock(mutex_);
  std::vector<QuestionPtr> out;
  for (const auto& [id, slot] : questions_) {
    if (!slot.deleted) out.push_back(slot.question);
  }
  return out;
}

QuestionPtr Registry::question(int id) const {
  std::shared_lock lock(mutex_);
  auto it = questions_.find(id);
  if (it == questions_.end() || it->second.deleted) return nullptr;
  return it->second.question;
}

QuestionPtr Registry::add_question(const std::string& admin, guard::Question draft) {
  {
    std::shared_lock lock(mutex_);
    require_admin_locked(admin);
  }
  const bool assign = draft.id == 0;
  if (assign) draft.id = 1;  // placeholder so ingest sees a valid id
  guard::Question q;
  try {
    q = guard::ingest_question(std::move(draft));
  } catch (const guard::InvalidQuestion& e) {
    fail("INVALID_QUESTION", e.what());
  }
  std::unique_lock lock(mutex_);
  require_admin_locked(admin);
  if (assign) {
    q.id = questions_.empty() ? 1 : questions_.rbegin()->first + 1;
  } else if (questions_.count(q.id)) {
    fail("DUPLICATE_QUESTION_ID", "question " + std::to_string(q.id) + " already exists");
  }
  auto ptr = std::make_shared<const guard::Question>(std::move(q));
  questions_[ptr->id].question = ptr;
  save_questions_locked();
  return ptr;
}

QuestionPtr Registry::update_question(const std::string& admin, guard::Question draft) {
  {
    std::shared_lock lock(mutex_);
    require_admin_locked(admin);
  }
  guard::Question q;
  try {
    q = guard::ingest_question(std::move(draft));
  } catch (const guard::InvalidQuestion& e) {
    fail("INVALID_QUESTION", e.what());
  }
  std::unique_lock lock(mutex_);
  require_admin_locked(admin);
  auto it = questions_.find(q.id);
  if (it == questions_.end() || it->second.deleted) {
    fail("UNKNOWN_QUESTION_ID", "no question " + std::to_string(q.id));
  }
  it->second.question = std::make_shared<const guard::Question>(std::move(q));
  save_questions_locked();
  return it->second.question;
}

bool Registry::delete_question(const std::string& admin, int id) {
  std::unique_lock lock(mutex_);
  require_admin_locked(admin);
  auto it = questions_.find(id);
  if (it == questions_.end() || it->second.deleted) {
    fail("UNKNOWN_QUESTION_ID", "no question " + std::to_string(id));
  }
  const bool now = it->second.pins == 0;
  if (now) {
    questions_.erase(it);
  } else {
    it->second.deleted = true;
  }
  save_questions_locked();
  return now;
}

void Registry::pin_questions(const std::vector<int>& ids) {
  std::unique_lock lock(mutex_);
  for (int id : ids) {
    if (auto it = questions_.find(id); it != questions_.end()) ++it->second.pins;
  }
}

void Registry::unpin_questions(const std::vector<int>& ids) {
  std::unique_lock lock(mutex_);
  for (int id : ids) {
    auto it = questions_.find(id);
    if (it == questions_.end() || it->second.pins == 0) continue;
    if (--it->second.pins == 0 && it->second.deleted) questions_.erase(it);
  }
}

// ---- persistence ---------------------------------------------------------------

json Registry::state_json() const {
  std::shared_lock lock(mutex_);
  return state_locked(true);
}

json Registry::state_locked(bool with_questions) const {
  json accounts = json::array();
  for (const auto& [k, a] : accounts_) accounts.push_back(to_json(a, true));
  json codes = json::array();
  for (const auto& [k, c] : codes_) codes.push_back(to_json(c));
  json ratings = json::array();
  for (const auto& [user, modes] : ratings_) {
    for (GameMode m : kAllGameModes) {
      ratings.push_back({{"username", user}, {"mode", to_string(m)}, {"rating", to_json(modes[mode_index(m)])}});
    }
  }
  json records = json::array();
  for (const GameRecord& r : records_) records.push_back(to_json(r));
  json lectures = json::array();
  for (const auto& [id, e] : lectures_) lectures.push_back(to_json(e));
  json out = {{"accounts", accounts}, {"codes", codes},       {"ratings", ratings},
              {"records", records},   {"lectures", lectures}};
  if (with_questions) {
    json questions = json::array();
    for (const auto& [id, slot] : questions_) {
      if (!slot.deleted) questions.push_back(guard::question_to_json(*slot.question));
    }
    out["questions"] = std::move(questions);
  }
  return out;
}

void Registry::snapshot() {
  std::unique_lock lock(mutex_);
  if (store_) store_->snapshot(state_locked(false));
}

void Registry::commit_locked(json record) {
  if (store_) store_->append(record);
  apply_record(record);
  if (store_ && options_.snapshot_every > 0 && store_->records_since_snapshot() >= options_.snapshot_every) {
    store_->snapshot(state_locked(false));
  }
}

void Registry::apply_record(const json& rec) {
  const std::string op = rec.at("op").get<std::string>();
  if (op == "account_put") {
    Account a = account_from_json(rec.at("account"));
    accounts_[a.username] = a;
  } else if (op == "code_put") {
    VerificationCode c = code_from_json(rec.at("code"));
    codes_[c.code] = c;
  } else if (op == "student_register") {
    Account a = account_from_json(rec.at("account"));
    VerificationCode c = code_from_json(rec.at("code"));
    accounts_[a.username] = a;
    codes_[c.code] = c;
  } else if (op == "rating_put") {
    for (const json& e : rec.at("entries")) {
      auto mode = game_mode_from_string(e.at("mode").get<std::string>());
      if (!mode) throw std::invalid_argument("bad mode");
      rating_slot_locked(e.at("username").get<std::string>(), *mode) = rating_from_json(e.at("rating"));
    }
  } else if (op == "record_add") {
    records_.push_back(record_from_json(rec.at("record")));
  } else if (op == "lecture_put") {
    LectureEntry e = lecture_from_json(rec.at("lecture"));
    lectures_[e.id] = e;
  } else {
    throw std::invalid_argument("unknown op " + op);
  }
}

void Registry::load_state(const json& state) {
  for (const json& a : state.at("accounts")) apply_record({{"op", "account_put"}, {"account", a}});
  for (const json& c : state.at("codes")) apply_record({{"op", "code_put"}, {"code", c}});
  for (const json& r : state.at("ratings")) apply_record({{"op", "rating_put"}, {"entries", json::array({r})}});
  for (const json& r : state.at("records")) apply_record({{"op", "record_add"}, {"record", r}});
  for (const json& e : state.at("lectures")) apply_record({{"op", "lecture_put"}, {"lecture", e}});
}

void Registry::restore() {
  LoadedLog loaded = store_->load();
  if (loaded.snapshot) {
    try {
      load_state(*loaded.snapshot);
    } catch (const std::exception& e) {
      fail("CORRUPT_SNAPSHOT", std::string("snapshot.json: ") + e.what());
    }
  }
  for (const auto& [line, rec] : loaded.tail) {
    try {
      apply_record(rec);
    } catch (const std::exception& e) {
      throw CorruptLog(line, e.what());
    }
  }
}

}  // namespace qarena::registry

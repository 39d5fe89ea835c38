#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "qarena/registry/registry.hpp"
#include "temp_dir.hpp"

namespace qarena::registry {
namespace {

namespace fs = std::filesystem;
using qarena::testing::TempDir;

RegistryOptions disk_options(const fs::path& dir, std::size_t snapshot_every = 256) {
  RegistryOptions o;
  o.data_dir = dir;
  o.hash_cost = HashCost::minimum();
  o.sync_writes = false;
  o.snapshot_every = snapshot_every;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void append_raw(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::app);
  out << bytes;
}

TEST(Persistence, ThreeAccountsSurviveRestart) {
  TempDir dir;
  ManualClock clock;
  {
    Registry reg(clock, disk_options(dir.path()));
    reg.create_admin("", "admin", "admin-pass");
    reg.register_student("alice", "password1", reg.issue_code("admin").code);
    reg.register_student("bob", "password2", reg.issue_code("admin").code);
  }
  Registry back(clock, disk_options(dir.path()));
  EXPECT_TRUE(back.account("admin"));
  EXPECT_TRUE(back.authenticate("alice", "password1"));
  EXPECT_TRUE(back.authenticate("bob", "password2"));
  EXPECT_EQ(back.state_json()["accounts"].size(), 3u);
}

TEST(Persistence, TornFinalLineIsDropped) {
  TempDir dir;
  ManualClock clock;
  nlohmann::json before;
  {
    Registry reg(clock, disk_options(dir.path()));
    reg.create_admin("", "admin", "admin-pass");
    reg.issue_code("admin");
    before = reg.state_json();
  }
  // Codes are upper case, so this marker cannot occur in a real record.
  append_raw(dir.path() / "log.ndjson", R"({"op":"code_put","code":{"code":"torn-marker)");
  Registry back(clock, disk_options(dir.path()));
  EXPECT_EQ(back.state_json(), before);
  const std::string log = slurp(dir.path() / "log.ndjson");
  EXPECT_EQ(log.back(), '\n');
  EXPECT_EQ(log.find("torn-marker"), std::string::npos);
  back.issue_code("admin");
  Registry again(clock, disk_options(dir.path()));
  EXPECT_EQ(again.codes().size(), 2u);
}

TEST(Persistence, CompleteFinalLineWithoutNewlineIsKept) {
  TempDir dir;
  ManualClock clock;
  {
    Registry reg(clock, disk_options(dir.path()));
    reg.create_admin("", "admin", "admin-pass");
  }
  std::string log = slurp(dir.path() / "log.ndjson");
  ASSERT_EQ(log.back(), '\n');
  log.pop_back();
  std::ofstream(dir.path() / "log.ndjson", std::ios::binary | std::ios::trunc) << log;
  {
    Registry back(clock, disk_options(dir.path()));
    EXPECT_TRUE(back.account("admin"));
    back.issue_code("admin");
  }
  Registry again(clock, disk_options(dir.path()));
  EXPECT_EQ(again.codes().size(), 1u);
}

TEST(Persistence, CorruptMiddleLineFailsWithLineNumber) {
  TempDir dir;
  ManualClock clock;
  {
    Registry reg(clock, disk_options(dir.path()));
    reg.create_admin("", "admin", "admin-pass");
    reg.issue_code("admin");
    reg.issue_code("admin");
  }
  std::string log = slurp(dir.path() / "log.ndjson");
  const std::size_t second = log.find('\n') + 1;
  log.insert(second, "garbage\n");
  std::ofstream(dir.path() / "log.ndjson", std::ios::binary | std::ios::trunc) << log;
  try {
    Registry back(clock, disk_options(dir.path()));
    FAIL() << "expected CorruptLog";
  } catch (const CorruptLog& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.code(), "CORRUPT_LOG");
  }
}

TEST(Persistence, UnterminatedUnknownOpIsCorruption) {
  TempDir dir;
  ManualClock clock;
  {
    Registry reg(clock, disk_options(dir.path()));
    reg.create_admin("", "admin", "admin-pass");
  }
  append_raw(dir.path() / "log.ndjson", "{\"seq\":2,\"op\":\"wipe\"}\n");
  EXPECT_THROW(Registry(clock, disk_options(dir.path())), CorruptLog);
}

TEST(Persistence, SnapshotPlusTail) {
  TempDir dir;
  ManualClock clock;
  nlohmann::json before;
  {
    Registry reg(clock, disk_options(dir.path(), 4));
    reg.create_admin("", "admin", "admin-pass");
    for (int i = 0; i < 10; ++i) reg.issue_code("admin");
    before = reg.state_json();
  }
  EXPECT_TRUE(fs::exists(dir.path() / "snapshot.json"));
  const std::string log = slurp(dir.path() / "log.ndjson");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 3);
  Registry back(clock, disk_options(dir.path(), 4));
  EXPECT_EQ(back.state_json(), before);
}

// Independent model of the durable state, maintained by the test.
struct Model {
  std::map<std::string, Role> accounts;
  std::map<std::string, std::optional<std::string>> codes;
  std::map<std::pair<std::string, GameMode>, Rating> ratings;
  std::map<std::string, int> records;
  std::map<int, std::string> lectures;

  Rating rating(const std::string& u, GameMode m) const {
    auto it = ratings.find({u, m});
    if (it != ratings.end()) return it->second;
    return {is_solo(m) ? 0 : 1000, 0, 0, 0};
  }
};

void expect_matches(const Registry& reg, const Model& m) {
  ASSERT_EQ(reg.state_json()["accounts"].size(), m.accounts.size());
  for (const auto& [name, role] : m.accounts) {
    auto a = reg.account(name);
    ASSERT_TRUE(a) << name;
    EXPECT_EQ(a->role, role);
    Profile p = reg.profile(name);
    for (GameMode mode : kAllGameModes) {
      const Rating want = m.rating(name, mode);
      EXPECT_EQ(p.ratings[mode], want) << name << " " << to_string(mode);
    }
    auto it = m.records.find(name);
    EXPECT_EQ(static_cast<int>(p.records.size()), it == m.records.end() ? 0 : it->second);
  }
  auto codes = reg.codes();
  ASSERT_EQ(codes.size(), m.codes.size());
  for (const auto& c : codes) {
    ASSERT_TRUE(m.codes.count(c.code));
    EXPECT_EQ(c.consumed_by, m.codes.at(c.code));
  }
  auto lectures = reg.lectures();
  ASSERT_EQ(lectures.size(), m.lectures.size());
  for (const auto& l : lectures) EXPECT_EQ(m.lectures.at(l.id), l.title);
}

TEST(Persistence, RandomizedCrashRestoreMatchesModel) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    TempDir dir;
    ManualClock clock;
    std::mt19937_64 rng(seed);
    const std::size_t snap_every = 3 + seed * 5;
    Model model;
    auto reg = std::make_unique<Registry>(clock, disk_options(dir.path(), snap_every));
    reg->create_admin("", "admin", "admin-pass");
    model.accounts["admin"] = Role::kAdmin;
    std::vector<std::string> students;
    std::vector<std::string> open_codes;
    int user_counter = 0;
    nlohmann::json before_last = reg->state_json();

    for (int step = 0; step < 160; ++step) {
      const nlohmann::json before = reg->state_json();
      bool mutated = true;
      switch (rng() % 7) {
        case 0: {
          auto c = reg->issue_code("admin");
          model.codes[c.code] = std::nullopt;
          open_codes.push_back(c.code);
          break;
        }
        case 1: {
          if (open_codes.empty()) {
            mutated = false;
            break;
          }
          const std::string code = open_codes.back();
          open_codes.pop_back();
          const std::string name = "stu" + std::to_string(user_counter++);
          reg->register_student(name, "password1", code);
          model.accounts[name] = Role::kStudent;
          model.codes[code] = name;
          students.push_back(name);
          break;
        }
        case 2: {
          if (students.size() < 2) {
            mutated = false;
            break;
          }
          const std::string& w = students[rng() % students.size()];
          const std::string& l = students[rng() % students.size()];
          if (w == l) {
            mutated = false;
            break;
          }
          const GameMode mode = rng() % 2 ? GameMode::kMpCasual : GameMode::kMpCompetition;
          Rating rw = model.rating(w, mode), rl = model.rating(l, mode);
          const double e = 1.0 / (1.0 + std::pow(10.0, static_cast<double>(rl.points - rw.points) / 400.0));
          const std::int64_t d = static_cast<std::int64_t>(std::floor(32.0 * (1.0 - e) + 0.5));
          rw.points += d;
          rl.points = std::max<std::int64_t>(0, rl.points - d);
          ++rw.wins, ++rw.games_played, ++rl.losses, ++rl.games_played;
          model.ratings[{w, mode}] = rw;
          model.ratings[{l, mode}] = rl;
          reg->update_rating(mode, w, l);
          break;
        }
        case 3: {
          if (students.empty()) {
            mutated = false;
            break;
          }
          const std::string& s = students[rng() % students.size()];
          const int pts = static_cast<int>(rng() % 11);
          Rating r = model.rating(s, GameMode::kSoloCasual);
          r.points += pts;
          ++r.games_played;
          model.ratings[{s, GameMode::kSoloCasual}] = r;
          reg->record_solo(s, GameMode::kSoloCasual, pts);
          break;
        }
        case 4: {
          if (students.empty()) {
            mutated = false;
            break;
          }
          const std::string& s = students[rng() % students.size()];
          reg->add_record({s, GameMode::kSoloCustom, clock.now(), {{"total_correct", static_cast<int>(rng() % 10)}}});
          ++model.records[s];
          break;
        }
        case 5: {
          LectureEntry e;
          e.title = "Lecture " + std::to_string(step);
          e.blocks.push_back({LectureBlock::Kind::kText, "body " + std::to_string(rng()), "", "", ""});
          model.lectures[reg->put_lecture("admin", e).id] = e.title;
          break;
        }
        default:
          clock.advance(static_cast<Timestamp>(rng() % kHour));
          mutated = false;
          break;
      }
      if (mutated) before_last = before;

      if (rng() % 9 == 0) {
        const nlohmann::json live = reg->state_json();
        reg.reset();
        const fs::path log = dir.path() / "log.ndjson";
        const std::string text = slurp(log);
        if (rng() % 3 == 0 && mutated && !text.empty()) {
          // Crash mid-write of the last record: restore loses exactly that op.
          const std::size_t start = text.rfind('\n', text.size() - 2);
          const std::size_t line_start = start == std::string::npos ? 0 : start + 1;
          const std::size_t cut = line_start + (text.size() - 1 - line_start) / 2;
          std::ofstream(log, std::ios::binary | std::ios::trunc) << text.substr(0, cut);
          reg = std::make_unique<Registry>(clock, disk_options(dir.path(), snap_every));
          ASSERT_EQ(reg->state_json(), before_last) << "seed " << seed << " step " << step;
          // The lost op has to come out of the model as well.
          model = Model{};
          for (const auto& a : before_last["accounts"]) {
            model.accounts[a["username"]] = *role_from_string(a["role"].get<std::string>());
          }
          for (const auto& c : before_last["codes"]) {
            model.codes[c["code"]] =
                c["consumed_by"].is_null() ? std::nullopt : std::optional<std::string>(c["consumed_by"]);
          }
          for (const auto& r : before_last["ratings"]) {
            model.ratings[{r["username"], *game_mode_from_string(r["mode"].get<std::string>())}] =
                rating_from_json(r["rating"]);
          }
          for (const auto& r : before_last["records"]) ++model.records[r["player"]];
          for (const auto& l : before_last["lectures"]) model.lectures[l["id"]] = l["title"];
          students.clear();
          open_codes.clear();
          for (const auto& [name, role] : model.accounts) {
            if (role == Role::kStudent) students.push_back(name);
          }
          for (const auto& [code, by] : model.codes) {
            if (!by) open_codes.push_back(code);
          }
        } else {
          append_raw(log, R"({"seq":999999,"op":"record_add","rec)");
          reg = std::make_unique<Registry>(clock, disk_options(dir.path(), snap_every));
          ASSERT_EQ(reg->state_json(), live) << "seed " << seed << " step " << step;
        }
        expect_matches(*reg, model);
      }
    }
    expect_matches(*reg, model);
    const nlohmann::json live = reg->state_json();
    reg.reset();
    Registry back(clock, disk_options(dir.path(), snap_every));
    EXPECT_EQ(back.state_json(), live);
  }
}

}  // namespace
}  // namespace qarena::registry

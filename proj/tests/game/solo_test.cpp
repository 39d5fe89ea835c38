#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "qarena/game/sandbox.hpp"
#include "qarena/game/solo.hpp"

namespace qarena::game {
namespace {

// Synthetic EXACT bank: question i has answer "DROP TABLE t<i>" and
// difficulty 1 + i % 3, categories cycling through a few classes.
std::vector<QuestionPtr> synthetic_bank(int n) {
  const sql::StatementClass cats[] = {sql::StatementClass::kSelect, sql::StatementClass::kDrop,
                                      sql::StatementClass::kDelete};
  std::vector<QuestionPtr> bank;
  for (int i = 1; i <= n; ++i) {
    guard::Question q;
    q.id = 100 + i;
    q.text = "question " + std::to_string(i);
    q.difficulty = 1 + i % 3;
    q.category = cats[i % 3];
    q.stored_answers = {"DROP TABLE t" + std::to_string(i)};
    bank.push_back(std::make_shared<const guard::Question>(guard::ingest_question(q)));
  }
  return bank;
}

std::string answer_for(const guard::Question& q) { return q.stored_answers.front(); }

TEST(Draw, CasualDrawsTenDistinct) {
  const auto bank = synthetic_bank(30);
  const auto drawn = draw_questions(bank, SoloMode::Casual(), 5);
  ASSERT_EQ(drawn.size(), 10u);
  std::set<int> ids;
  for (const auto& q : drawn) ids.insert(q->id);
  EXPECT_EQ(ids.size(), 10u);
}

TEST(Draw, CustomFiltersByDifficulty) {
  const auto bank = synthetic_bank(30);
  const auto drawn = draw_questions(bank, SoloMode::Custom(5, 2), 11);
  ASSERT_EQ(drawn.size(), 5u);
  std::set<int> ids;
  for (const auto& q : drawn) {
    EXPECT_EQ(q->difficulty, 2);
    ids.insert(q->id);
  }
  EXPECT_EQ(ids.size(), 5u);
}

TEST(Draw, Errors) {
  try {
    draw_questions(synthetic_bank(7), SoloMode::Casual(), 1);
    FAIL();
  } catch (const GameError& e) {
    EXPECT_EQ(e.code(), "INSUFFICIENT_BANK");
  }
  const auto bank = synthetic_bank(30);
  EXPECT_THROW(draw_questions(bank, SoloMode::Custom(11, 2), 1), GameError);
  EXPECT_THROW(draw_questions(bank, SoloMode::Custom(0, 2), 1), GameError);
  EXPECT_THROW(draw_questions(bank, SoloMode::Custom(51, 2), 1), GameError);
  EXPECT_THROW(draw_questions(bank, SoloMode::Custom(3, 4), 1), GameError);
}

TEST(Draw, ReproducibleAndOrderIndependent) {
  auto bank = synthetic_bank(40);
  const auto a = draw_questions(bank, SoloMode::Casual(), 77);
  std::reverse(bank.begin(), bank.end());
  const auto b = draw_questions(bank, SoloMode::Casual(), 77);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i]->id, b[i]->id);
  const auto c = draw_questions(bank, SoloMode::Casual(), 78);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i]->id != c[i]->id;
  EXPECT_TRUE(differs);
}

// Each of the 30 ids should be drawn about a third of the time over many seeds.
TEST(Draw, RoughlyUniform) {
  const auto bank = synthetic_bank(30);
  std::map<int, int> hits;
  const int trials = 3000;
  for (int s = 0; s < trials; ++s) {
    for (const auto& q : draw_questions(bank, SoloMode::Casual(), s)) ++hits[q->id];
  }
  ASSERT_EQ(hits.size(), 30u);
  for (const auto& [id, n] : hits) {
    EXPECT_NEAR(n, trials / 3.0, trials / 3.0 * 0.15) << id;
  }
}

class SessionTest : public ::testing::Test {
 protected:
  SessionTest() : session_("s1", "alice", SoloMode::Casual(), draw_questions(synthetic_bank(30), SoloMode::Casual(), 3), 1000) {}
  SoloSession session_;
};

TEST_F(SessionTest, SkipThenAnswer) {
  session_.skip(2);
  EXPECT_EQ(session_.answers()[2].kind, AnswerState::Kind::kSkipped);
  session_.answer(2, "x");
  EXPECT_EQ(session_.answers()[2].kind, AnswerState::Kind::kAnswered);
}

TEST_F(SessionTest, LastWriteWins) {
  session_.answer(1, "a");
  session_.answer(1, "b");
  EXPECT_EQ(session_.answers()[1].text, "b");
}

TEST_F(SessionTest, FrozenAfterSubmit) {
  session_.submit_all(2000);
  EXPECT_THROW(session_.answer(0, "x"), GameError);
  EXPECT_THROW(session_.skip(0), GameError);
  EXPECT_THROW(session_.submit_all(3000), GameError);
  EXPECT_EQ(session_.submitted_at(), 2000);
}

TEST_F(SessionTest, IndexOutOfRange) {
  try {
    session_.answer(10, "x");
    FAIL();
  } catch (const GameError& e) {
    EXPECT_EQ(e.code(), "INDEX_OUT_OF_RANGE");
  }
}

TEST_F(SessionTest, SevenCorrectOutOfTen) {
  const auto& qs = session_.questions();
  for (std::size_t i = 0; i < 7; ++i) session_.answer(i, answer_for(*qs[i]));
  session_.answer(7, "DROP TABLE nothing");
  session_.skip(8);
  const ScoreReport& r = session_.submit_all(5000);
  EXPECT_EQ(r.total_correct, 7);
  int sum_correct = 0;
  int sum_attempted = 0;
  for (const auto& [cls, stat] : r.category_stats) {
    sum_correct += stat.correct;
    sum_attempted += stat.attempted;
  }
  EXPECT_EQ(sum_correct, 7);
  EXPECT_EQ(sum_attempted, 10);
}

TEST_F(SessionTest, AllSkipped) {
  for (std::size_t i = 0; i < 10; ++i) session_.skip(i);
  const ScoreReport& r = session_.submit_all(5000);
  EXPECT_EQ(r.total_correct, 0);
  for (const auto& [cls, stat] : r.category_stats) {
    EXPECT_GT(stat.attempted, 0);
    EXPECT_EQ(stat.correct, 0);
  }
}

TEST(SessionCategories, ThreeSelectsOneCorrect) {
  const auto fixtures = testing::load_fixture_bank();
  const auto q15 = std::make_shared<const guard::Question>(testing::question_by_id(fixtures, 15));
  SoloSession s("s", "p", SoloMode::Custom(3, 2), {q15, q15, q15}, 0);
  s.answer(0, "SELECT * FROM tbl_students WHERE last_name = 'Aguila'");
  s.answer(1, "SELECT * FROM tbl_students LIMIT 1");
  const ScoreReport& r = s.submit_all(1);
  EXPECT_EQ(r.category_stats.at(sql::StatementClass::kSelect), (CategoryStat{3, 1}));
}

// submit_all and direct grading agree on every question of the fixture bank.
TEST(SessionCategories, NoDriftFromDirectGrading) {
  const auto fixtures = testing::load_fixture_bank();
  std::vector<QuestionPtr> qs;
  for (const auto& q : fixtures) qs.push_back(std::make_shared<const guard::Question>(q));
  const std::vector<std::string> candidates = {
      "SELECT * FROM tbl_students WHERE last_name='Aguila'", "drop table tbl_jobs",
      "DESC tbl_phones", "SELECT 1", "DELETE FROM tbl_exam WHERE exam_status = 'failed'"};
  for (std::size_t shift = 0; shift < candidates.size(); ++shift) {
    SoloSession s("s", "p", SoloMode::Casual(), qs, 0);
    for (std::size_t i = 0; i < qs.size(); ++i) s.answer(i, candidates[(i + shift) % candidates.size()]);
    const ScoreReport& r = s.submit_all(1);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const auto direct = guard::grade(*qs[i], candidates[(i + shift) % candidates.size()]);
      EXPECT_EQ(r.verdicts[i].correct, direct.correct);
      EXPECT_EQ(r.verdicts[i].reason, direct.reason);
    }
  }
}

TEST(SandboxTest, NamedAfterUser) {
  Sandbox box("201910001");
  EXPECT_EQ(box.table_name(), "201910001_table");
  const PracticeResult r = box.run("SELECT * FROM 201910001_table");
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.rows->rows.size(), 3u);
}

TEST(SandboxTest, ResetRestoresDefaultSchema) {
  Sandbox box("u1");
  ASSERT_TRUE(box.run("ALTER TABLE u1_table ADD COLUMN email VARCHAR(40)").ok);
  ASSERT_TRUE(box.run("TRUNCATE TABLE u1_table").ok);
  box.reset();
  EXPECT_EQ(*box.database().find("u1_table"), default_sandbox("u1"));
  box.reset();
  EXPECT_EQ(*box.database().find("u1_table"), default_sandbox("u1"));
}

TEST(SandboxTest, PolicyAndErrors) {
  Sandbox box("u1");
  const PracticeResult del = box.run("DELETE FROM u1_table WHERE id >= 2");
  ASSERT_TRUE(del.ok);
  EXPECT_EQ(del.affected, 2u);
  EXPECT_EQ(box.run("DROP TABLE u1_table").rejection, guard::RejectReason::kForbiddenClass);
  EXPECT_EQ(box.run("SELECT * FROM u2_table").rejection, guard::RejectReason::kForeignTable);
  const PracticeResult bad = box.run("SELECT nope FROM u1_table");
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.error, sql::SqlErrorKind::kUnknownColumn);
}

}  // namespace
}  // namespace qarena::game

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "perturb.hpp"
#include "qarena/guard/grader.hpp"
#include "qarena/sql/executor.hpp"
#include "qarena/sql/parser.hpp"

namespace qarena::guard {
namespace {

using testing::load_fixture_bank;
using testing::question_by_id;

class GraderTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { bank_ = new std::vector<Question>(load_fixture_bank()); }
  static void TearDownTestSuite() { delete bank_; }
  static const Question& q(int id) { return question_by_id(*bank_, id); }

  static std::vector<Question>* bank_;
};
std::vector<Question>* GraderTest::bank_ = nullptr;

TEST_F(GraderTest, BankHoldsTheNinePanelQuestions) {
  ASSERT_EQ(bank_->size(), 9u);
  for (int id = 15; id <= 23; ++id) {
    EXPECT_EQ(q(id).grading_mode, id == 15 ? GradingMode::kShadow : GradingMode::kExact) << id;
  }
  EXPECT_EQ(q(15).cached_reference_strings.size(), 1u);
  EXPECT_NE(q(15).shadow_fixture->table.name, q(15).shadow_fixture->visible_name);
}

TEST_F(GraderTest, ExactExamples) {
  EXPECT_TRUE(grade_exact(q(22), "drop table  tbl_jobs;").correct);
  EXPECT_EQ(grade_exact(q(22), "drop table  tbl_jobs;").reason, VerdictReason::kMatched);
  EXPECT_FALSE(grade_exact(q(22), "DROP TABLE tbl_phones").correct);
  // Second stored combination.
  EXPECT_TRUE(grade_exact(q(23), "desc TBL_PHONES").correct);
  EXPECT_TRUE(grade_exact(q(20), "delete from employee_info where job_status=\"unemployed\"").correct);
  // Literal case is significant.
  EXPECT_FALSE(grade_exact(q(20), "DELETE FROM employee_info WHERE job_status = 'Unemployed'").correct);
}

TEST_F(GraderTest, ShadowExamples) {
  const Question& q15 = q(15);
  const Verdict ok = grade_shadow(q15, "SELECT * FROM tbl_students WHERE last_name='Aguila'");
  EXPECT_TRUE(ok.correct);
  EXPECT_EQ(ok.reason, VerdictReason::kResultMatch);
  EXPECT_FALSE(grade_shadow(q15, "SELECT * FROM tbl_students LIMIT 1").correct);
  EXPECT_FALSE(grade_shadow(q15, "SELECT 1,'Kenneth','Aguila'").correct);
}

TEST_F(GraderTest, ShadowFailureReasons) {
  const Question& q15 = q(15);
  EXPECT_EQ(grade_shadow(q15, "SELECT * FROM").reason, VerdictReason::kParseFailed);
  EXPECT_EQ(grade_shadow(q15, "SELECT 1; SELECT 2").reason, VerdictReason::kParseFailed);
  EXPECT_EQ(grade_shadow(q15, "DELETE FROM tbl_students").reason, VerdictReason::kPolicyRejected);
  EXPECT_EQ(grade_shadow(q15, "SELECT * FROM tbl_teachers").reason, VerdictReason::kExecFailed);
  // The physical name of the shadow table is not reachable.
  EXPECT_EQ(grade_shadow(q15, "SELECT * FROM " + q15.shadow_fixture->table.name).reason,
            VerdictReason::kExecFailed);
  EXPECT_EQ(grade_shadow(q15, "SELECT * FROM tbl_students WHERE first_name = 1").reason,
            VerdictReason::kExecFailed);
}

TEST_F(GraderTest, GradeDispatchesOnMode) {
  EXPECT_TRUE(grade(q(22), "DROP TABLE tbl_jobs").correct);
  EXPECT_TRUE(grade(q(15), "SELECT * FROM tbl_students WHERE last_name = 'Aguila'").correct);
}

// Shadow grading mutates only its private copy.
TEST_F(GraderTest, ShadowGradingNeverTouchesTheFixture) {
  const Question before = q(15);
  for (const char* c : {"SELECT * FROM tbl_students", "SELECT * FROM tbl_students WHERE last_name='Aguila'",
                        "DELETE FROM tbl_students", "SELECT * FROM tbl_students; DELETE FROM tbl_students"}) {
    grade_shadow(q(15), c);
  }
  EXPECT_EQ(q(15), before);
}

TEST_F(GraderTest, ExactGradingIgnoresWhitespaceCaseAndSemicolon) {
  std::mt19937_64 rng(1234);
  for (int id = 16; id <= 23; ++id) {
    for (const auto& answer : q(id).stored_answers) {
      for (int i = 0; i < 100; ++i) {
        const std::string p = testing::perturb(answer, rng);
        ASSERT_TRUE(grade_exact(q(id), p).correct) << p;
      }
    }
  }
}

TEST(Ingest, EquivalentReferencesCacheOneString) {
  const auto bank = load_fixture_bank();
  Question draft = question_by_id(bank, 15);
  draft.stored_answers = {"SELECT * FROM tbl_students WHERE last_name = 'Aguila'",
                          "SELECT * FROM tbl_students WHERE first_name = 'Kenneth' AND last_name = 'Aguila'"};
  const Question q = ingest_question(draft);
  EXPECT_EQ(q.cached_reference_strings.size(), 1u);
  EXPECT_FALSE(q.reference_ordered);
}

TEST(Ingest, RejectsInvalidDrafts) {
  const auto bank = load_fixture_bank();
  Question disagree = question_by_id(bank, 15);
  disagree.stored_answers.push_back("SELECT * FROM tbl_students WHERE first_name = 'Kenneth'");
  EXPECT_THROW(ingest_question(disagree), InvalidQuestion);

  Question empty = question_by_id(bank, 22);
  empty.stored_answers.clear();
  EXPECT_THROW(ingest_question(empty), InvalidQuestion);

  Question broken = question_by_id(bank, 22);
  broken.stored_answers = {"DROP TABEL tbl_jobs"};
  EXPECT_THROW(ingest_question(broken), InvalidQuestion);

  Question not_select = question_by_id(bank, 15);
  not_select.stored_answers = {"DELETE FROM tbl_students"};
  EXPECT_THROW(ingest_question(not_select), InvalidQuestion);

  Question mixed_order = question_by_id(bank, 15);
  mixed_order.stored_answers.push_back(
      "SELECT * FROM tbl_students WHERE last_name = 'Aguila' ORDER BY student_id");
  EXPECT_THROW(ingest_question(mixed_order), InvalidQuestion);

  Question no_fixture = question_by_id(bank, 15);
  no_fixture.shadow_fixture.reset();
  EXPECT_THROW(ingest_question(no_fixture), InvalidQuestion);

  Question hard = question_by_id(bank, 22);
  hard.difficulty = 4;
  EXPECT_THROW(ingest_question(hard), InvalidQuestion);
}

TEST(QuestionJson, RoundTripsTheBank) {
  for (const auto& q : load_fixture_bank()) {
    const Question back = ingest_question(question_from_json(question_to_json(q)));
    EXPECT_EQ(back, q) << q.id;
  }
}

TEST(QuestionJson, LoadReportsLineNumbers) {
  std::istringstream in("\n{\"id\": 1}\n");
  try {
    load_question_bank(in);
    FAIL();
  } catch (const InvalidQuestion& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

// Sorted rows of the result, as an independent multiset view.
std::pair<std::vector<std::string>, std::vector<sql::Row>> multiset_of(sql::Database db,
                                                                        const std::string& q) {
  const auto rs = sql::execute(db, sql::parse(q)).rows();
  auto rows = rs.rows;
  std::sort(rows.begin(), rows.end());
  return {rs.columns, rows};
}

TEST(BlindTestSoundness, VerdictTracksRowMultisetEquality) {
  const auto bank = load_fixture_bank();
  const Question& q15 = question_by_id(bank, 15);
  const auto reference = multiset_of(bind_fixture(*q15.shadow_fixture), q15.stored_answers.front());
  const char* const cols[] = {"student_id", "first_name", "last_name", "program"};
  const char* const firsts[] = {"'Kenneth'", "'Joy'", "'Mark'", "'Andrea'"};
  const char* const lasts[] = {"'Aguila'", "'Lopez'", "'Ramos'", "'Reyes'"};
  std::mt19937_64 rng(77);
  int correct = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string q = "SELECT ";
    q += rng() % 4 == 0 ? std::string(cols[rng() % 4]) + ", " + cols[rng() % 4] : "*";
    q += " FROM tbl_students WHERE ";
    q += std::string("first_name = ") + firsts[rng() % 4];
    q += rng() % 2 ? " AND " : " OR ";
    q += std::string("last_name = ") + lasts[rng() % 4];
    if (rng() % 3 == 0) q += " ORDER BY student_id DESC";
    if (rng() % 4 == 0) q += " LIMIT " + std::to_string(rng() % 3);
    const bool same = multiset_of(bind_fixture(*q15.shadow_fixture), q) == reference;
    const Verdict v = grade_shadow(q15, q);
    ASSERT_EQ(v.correct, same) << q;
    correct += v.correct;
  }
  EXPECT_GT(correct, 20);
}

}  // namespace
}  // namespace qarena::guard

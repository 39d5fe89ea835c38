#include <gtest/gtest.h>

#include <random>

#include "qarena/guard/policy.hpp"
#include "qarena/sql/parser.hpp"

namespace qarena::guard {
namespace {

RejectReason verdict(std::string_view q, PolicyMode mode = PolicyMode::kPractice,
                     std::string_view sandbox = "u1_table") {
  return sanitize(q, mode, sandbox).reason;
}

TEST(Sanitize, PracticeExamples) {
  EXPECT_EQ(verdict("DROP TABLE x"), RejectReason::kForbiddenClass);
  EXPECT_EQ(verdict("TRUNCATE TABLE u1_table"), RejectReason::kNone);
  EXPECT_EQ(verdict("SELECT created_at FROM u1_table"), RejectReason::kNone);
}

TEST(Sanitize, KeywordsInsideLiteralsAndIdentifiersAreHarmless) {
  EXPECT_EQ(verdict("SELECT * FROM u1_table WHERE name = 'DROP TABLE u1_table'"), RejectReason::kNone);
  EXPECT_EQ(verdict("UPDATE u1_table SET name = 'grant all' WHERE dropped_at IS NULL"),
            RejectReason::kNone);
  EXPECT_EQ(verdict("ALTER TABLE u1_table ADD COLUMN created_by VARCHAR(10)"), RejectReason::kNone);
}

TEST(Sanitize, PracticeAllowSet) {
  EXPECT_EQ(verdict("INSERT INTO u1_table VALUES (4, 'x', NULL)"), RejectReason::kNone);
  EXPECT_EQ(verdict("DELETE FROM U1_TABLE"), RejectReason::kNone);
  EXPECT_EQ(verdict("DESCRIBE u1_table"), RejectReason::kNone);
  EXPECT_EQ(verdict("CREATE TABLE u1_table (a INT)"), RejectReason::kForbiddenClass);
  EXPECT_EQ(verdict("GRANT ALL ON u1_table TO bob"), RejectReason::kForbiddenClass);
  EXPECT_EQ(verdict("REVOKE SELECT ON u1_table FROM bob"), RejectReason::kForbiddenClass);
}

TEST(Sanitize, ForeignTablesAndInjection) {
  EXPECT_EQ(verdict("SELECT * FROM u2_table"), RejectReason::kForeignTable);
  EXPECT_EQ(verdict("DELETE FROM accounts"), RejectReason::kForeignTable);
  EXPECT_EQ(verdict("SELECT * FROM u1_table; DROP TABLE u1_table"), RejectReason::kMultiStatement);
  EXPECT_EQ(verdict("SELECT * FROM u1_table WHERE"), RejectReason::kParse);
  EXPECT_EQ(verdict("SHOW TABLES"), RejectReason::kParse);
}

TEST(Sanitize, ShadowGradeAllowsOnlySelect) {
  EXPECT_EQ(verdict("SELECT * FROM anything", PolicyMode::kShadowGrade), RejectReason::kNone);
  EXPECT_EQ(verdict("SELECT 1, 'a'", PolicyMode::kShadowGrade), RejectReason::kNone);
  EXPECT_EQ(verdict("DELETE FROM t", PolicyMode::kShadowGrade), RejectReason::kForbiddenClass);
  EXPECT_EQ(verdict("DESCRIBE t", PolicyMode::kShadowGrade), RejectReason::kForbiddenClass);
}

TEST(Sanitize, ExactGradeExecutesNothing) {
  for (auto cls : sql::kAllStatementClasses) EXPECT_FALSE(allows(PolicyMode::kExactGrade, cls));
}

// Generates statements of the forbidden families in assorted spellings and
// checks that none slips through PRACTICE, even when aimed at the sandbox.
TEST(PolicySoundness, DdlAndDclAreAlwaysRejectedInPractice) {
  std::mt19937_64 rng(42);
  auto pick = [&](std::initializer_list<const char*> xs) {
    return std::string(*(xs.begin() + rng() % xs.size()));
  };
  auto casing = [&](std::string s) {
    for (char& c : s) {
      if (rng() % 2) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      else c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
  };
  int generated = 0;
  for (int i = 0; i < 3000; ++i) {
    const std::string table = pick({"u1_table", "U1_TABLE", "`u1_table`", "other", "tbl_jobs"});
    const std::string pad = pick({" ", "  ", "\n", " /* c */ ", "\t"});
    std::string q;
    switch (rng() % 6) {
      case 0: q = casing("drop") + pad + casing("table") + pad + table; break;
      case 1:
        q = casing("create table") + pad + table + " (" + pick({"a INT", "b VARCHAR(9)", "c DATE"}) +
            pick({"", ", z INT NOT NULL"}) + ")";
        break;
      case 2: q = casing("grant") + pad + pick({"ALL", "SELECT", "INSERT, UPDATE"}) + " ON " + table +
                  pick({"", " TO bob", " TO 'x'@'localhost'"});
        break;
      case 3: q = casing("revoke") + pad + pick({"ALL", "DELETE"}) + " ON " + table + " FROM bob"; break;
      case 4: q = casing("drop table") + pad + table + pick({";", "; ", ";\n-- bye"}); break;
      default: q = "DROP TABLE IF EXISTS " + table; break;
    }
    try {
      const auto cls = sql::classify(sql::parse(q));
      ASSERT_TRUE(cls == sql::StatementClass::kDrop || cls == sql::StatementClass::kCreate ||
                  cls == sql::StatementClass::kDclOther)
          << q;
      ++generated;
    } catch (const sql::SqlError&) {
    }
    EXPECT_FALSE(sanitize(q, PolicyMode::kPractice, "u1_table").allowed()) << q;
    EXPECT_FALSE(sanitize(q, PolicyMode::kShadowGrade).allowed()) << q;
  }
  EXPECT_GT(generated, 2000);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize("  drop   TABLE tbl_jobs ;"), "drop table tbl_jobs");
  EXPECT_EQ(normalize("SELECT 'Ab'"), "select 'Ab'");
  EXPECT_EQ(normalize("SELECT \"A  B\" ;;"), "select \"A  B\"");
  EXPECT_EQ(normalize("select 'it''s  X', 'a\\'B'"), "select 'it''s  X', 'a\\'B'");
  EXPECT_EQ(normalize(""), "");
  EXPECT_EQ(normalize(" ; "), "");
}

TEST(Normalize, IdempotentOnRandomText) {
  std::mt19937_64 rng(9);
  const std::string alphabet = "aB;' \"\\\t\nxZ;(),=";
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    const int n = static_cast<int>(rng() % 24);
    for (int k = 0; k < n; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
    const std::string once = normalize(s);
    ASSERT_EQ(normalize(once), once) << "input: [" << s << "]";
  }
}

}  // namespace
}  // namespace qarena::guard

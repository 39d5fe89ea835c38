#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qarena/guard/policy.hpp"
#include "qarena/sql/executor.hpp"

namespace qarena::game {

std::string sandbox_table_name(std::string_view username);

// Default practice table: (id INT, name VARCHAR(50), created DATE), 3 rows.
sql::TableState default_sandbox(std::string_view username);

struct PracticeResult {
  bool ok = false;
  guard::RejectReason rejection = guard::RejectReason::kNone;  // policy failures
  std::optional<sql::SqlErrorKind> error;                      // execution failures
  std::string detail;
  std::optional<sql::ResultSet> rows;
  std::uint64_t affected = 0;
};

// A player's private practice database. Not thread-safe; callers serialize
// access per player.
class Sandbox {
 public:
  explicit Sandbox(std::string username);

  const std::string& table_name() const { return table_; }
  const sql::Database& database() const { return db_; }

  // Restores the default schema and rows.
  void reset();
  // sanitize(PRACTICE) then execute.
  PracticeResult run(std::string_view text);

 private:
  std::string username_;
  std::string table_;
  sql::Database db_;
};

}  // namespace qarena::game

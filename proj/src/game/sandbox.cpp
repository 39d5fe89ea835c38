#include "qarena/game/sandbox.hpp"

#include "qarena/sql/errors.hpp"

namespace qarena::game {

std::string sandbox_table_name(std::string_view username) {
  return std::string(username) + "_table";
}

sql::TableState default_sandbox(std::string_view username) {
  using sql::Value;
  sql::TableState t;
  t.name = sandbox_table_name(username);
  t.columns = {
      {"id", sql::ColumnType::Int(), true},
      {"name", sql::ColumnType::Varchar(50), true},
      {"created", sql::ColumnType::Date(), true},
  };
  t.rows = {
      {Value{std::int64_t{1}}, Value{std::string("Ada")}, Value{std::string("2024-01-15")}},
      {Value{std::int64_t{2}}, Value{std::string("Ben")}, Value{std::string("2024-02-20")}},
      {Value{std::int64_t{3}}, Value{std::string("Cruz")}, Value{std::string("2024-03-05")}},
  };
  return t;
}

Sandbox::Sandbox(std::string username)
    : username_(std::move(username)), table_(sandbox_table_name(username_)) {
  reset();
}

void Sandbox::reset() {
  db_ = sql::Database{};
  db_.put(default_sandbox(username_));
}

PracticeResult Sandbox::run(std::string_view text) {
  PracticeResult out;
  guard::SanitizeResult s = guard::sanitize(text, guard::PolicyMode::kPractice, table_);
  if (!s.allowed()) {
    out.rejection = s.reason;
    out.detail = std::move(s.detail);
    return out;
  }
  try {
    sql::ExecOutcome r = sql::execute(db_, *s.statement);
    if (r.has_rows()) {
      out.rows = r.rows();
    } else {
      out.affected = r.affected();
    }
    out.ok = true;
  } catch (const sql::SqlError& e) {
    out.error = e.kind();
    out.detail = e.what();
  }
  return out;
}

}  // namespace qarena::game

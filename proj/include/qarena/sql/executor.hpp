#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qarena/sql/database.hpp"
#include "qarena/sql/errors.hpp"
#include "qarena/sql/statement.hpp"

namespace qarena::sql {

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<Row> rows;
  bool ordered = false;  // producing query carried ORDER BY

  bool operator==(const ResultSet&) const = default;
};

struct AffectedCount {
  std::uint64_t count = 0;
  bool operator==(const AffectedCount&) const = default;
};

struct ExecOutcome {
  std::variant<ResultSet, AffectedCount> value;

  bool has_rows() const { return std::holds_alternative<ResultSet>(value); }
  const ResultSet& rows() const { return std::get<ResultSet>(value); }
  std::uint64_t affected() const { return std::get<AffectedCount>(value).count; }
};

struct ExecLimits {
  std::size_t max_rows_per_table = 5000;
  std::chrono::milliseconds time_budget{1000};
};

// Runs one statement. On any SqlError the database is left unchanged.
ExecOutcome execute(Database& db, const Statement& stmt, const ExecLimits& limits = {});

// Header line of column names joined by "|", then one line per row. Rows are
// sorted bytewise unless the result is ordered.
std::string serialize_result(const ResultSet& rs);
std::string serialize_result(const ResultSet& rs, bool ordered);

// SQL LIKE with % and _ wildcards, case-sensitive.
bool like_match(std::string_view text, std::string_view pattern);

}  // namespace qarena::sql

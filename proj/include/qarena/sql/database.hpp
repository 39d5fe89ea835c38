#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qarena/sql/statement.hpp"
#include "qarena/sql/value.hpp"

namespace qarena::sql {

using Row = std::vector<Value>;

struct TableState {
  std::string name;
  std::vector<ColumnDef> columns;
  std::vector<Row> rows;

  // Case-insensitive column lookup.
  std::optional<std::size_t> column_index(std::string_view column) const;

  // Throws SqlError (kInvalidSchema / kArityMismatch / kTypeMismatch) when a
  // row or the column list breaks the table invariants.
  void validate() const;

  bool operator==(const TableState&) const = default;
};

// Throws kTypeMismatch when `v` cannot be stored in `column`.
void check_conforms(const Value& v, const ColumnDef& column);

// Tables keyed by case-insensitive name. Engine state only; nothing here is
// shared between databases.
class Database {
 public:
  const TableState* find(std::string_view name) const;
  TableState* find(std::string_view name);

  // Throws kDuplicateTable.
  TableState& create(TableState table);
  // Replaces or inserts without a duplicate check.
  void put(TableState table);
  bool drop(std::string_view name);

  std::vector<std::string> table_names() const;
  std::size_t size() const { return tables_.size(); }

  bool operator==(const Database&) const = default;

 private:
  std::map<std::string, TableState> tables_;
};

}  // namespace qarena::sql

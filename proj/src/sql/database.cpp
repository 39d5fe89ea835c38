#include "qarena/sql/database.hpp"

#include <set>

#include "qarena/common/text.hpp"
#include "qarena/sql/errors.hpp"

namespace qarena::sql {

std::optional<std::size_t> TableState::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (iequals(columns[i].name, column)) return i;
  }
  return std::nullopt;
}

void TableState::validate() const {
  if (name.empty()) throw SqlError(SqlErrorKind::kInvalidSchema, "table name is empty");
  if (columns.empty()) {
    throw SqlError(SqlErrorKind::kInvalidSchema, "table '" + name + "' has no columns");
  }
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (c.name.empty()) throw SqlError(SqlErrorKind::kInvalidSchema, "column name is empty");
    if (!seen.insert(to_lower(c.name)).second) {
      throw SqlError(SqlErrorKind::kInvalidSchema, "duplicate column name '" + c.name + "'");
    }
    if (c.type.kind == TypeKind::kVarchar && (c.type.length < 1 || c.type.length > 65535)) {
      throw SqlError(SqlErrorKind::kInvalidSchema, "invalid VARCHAR length for '" + c.name + "'");
    }
  }
  for (const auto& row : rows) {
    if (row.size() != columns.size()) {
      throw SqlError(SqlErrorKind::kArityMismatch,
                     "row has " + std::to_string(row.size()) + " values, table '" + name +
                         "' has " + std::to_string(columns.size()) + " columns");
    }
    for (std::size_t i = 0; i < row.size(); ++i) check_conforms(row[i], columns[i]);
  }
}

void check_conforms(const Value& v, const ColumnDef& column) {
  auto mismatch = [&](const std::string& why) {
    throw SqlError(SqlErrorKind::kTypeMismatch, "column '" + column.name + "': " + why);
  };
  if (is_null(v)) {
    if (!column.nullable) mismatch("cannot be NULL");
    return;
  }
  switch (column.type.kind) {
    case TypeKind::kInt:
      if (!std::holds_alternative<std::int64_t>(v)) mismatch("expected an integer");
      return;
    case TypeKind::kVarchar: {
      const auto* s = std::get_if<std::string>(&v);
      if (s == nullptr) mismatch("expected a string");
      if (char_length(*s) > column.type.length) {
        mismatch("value longer than " + std::to_string(column.type.length) + " characters");
      }
      return;
    }
    case TypeKind::kDate: {
      const auto* s = std::get_if<std::string>(&v);
      if (s == nullptr || !is_valid_date(*s)) mismatch("expected a date 'YYYY-MM-DD'");
      return;
    }
  }
}

const TableState* Database::find(std::string_view name) const {
  const auto it = tables_.find(to_lower(name));
  return it == tables_.end() ? nullptr : &it->second;
}

TableState* Database::find(std::string_view name) {
  const auto it = tables_.find(to_lower(name));
  return it == tables_.end() ? nullptr : &it->second;
}

TableState& Database::create(TableState table) {
  const std::string key = to_lower(table.name);
  if (tables_.contains(key)) {
    throw SqlError(SqlErrorKind::kDuplicateTable, "table '" + table.name + "' already exists");
  }
  return tables_.emplace(key, std::move(table)).first->second;
}

void Database::put(TableState table) {
  const std::string key = to_lower(table.name);
  tables_.insert_or_assign(key, std::move(table));
}

bool Database::drop(std::string_view name) { return tables_.erase(to_lower(name)) > 0; }

std::vector<std::string> Database::table_names() const {
  std::vector<std::string> names;
  names.reserve(tables_.size());
  for (const auto& [key, table] : tables_) names.push_back(table.name);
  return names;
}

}  // namespace qarena::sql

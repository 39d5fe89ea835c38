#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace qarena::sql {

enum class TypeKind { kInt, kVarchar, kDate };

struct ColumnType {
  TypeKind kind = TypeKind::kInt;
  std::uint32_t length = 0;  // VARCHAR only

  static ColumnType Int() { return {TypeKind::kInt, 0}; }
  static ColumnType Varchar(std::uint32_t n) { return {TypeKind::kVarchar, n}; }
  static ColumnType Date() { return {TypeKind::kDate, 0}; }

  bool is_text() const { return kind != TypeKind::kInt; }

  // "INT", "VARCHAR(50)", "DATE"
  std::string to_sql() const;
  // "int", "varchar(50)", "date" as shown by DESCRIBE
  std::string to_describe() const;

  bool operator==(const ColumnType&) const = default;
};

// NULL, INT, or text (VARCHAR and DATE values are both stored as text).
using Value = std::variant<std::monostate, std::int64_t, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Canonical rendering used in result serialization: NULL, decimal, raw text.
std::string render_value(const Value& v);

// SQL literal form: NULL, decimal, or a quoted string with escapes.
std::string render_literal(const Value& v);

// Strict YYYY-MM-DD with calendar validation (leap years included).
bool is_valid_date(std::string_view text);

// Number of UTF-8 code points; VARCHAR(n) limits are measured in characters.
std::size_t char_length(std::string_view text);

}  // namespace qarena::sql

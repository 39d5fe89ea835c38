#include "qarena/sql/value.hpp"

#include <cctype>

namespace qarena::sql {

std::string ColumnType::to_sql() const {
  switch (kind) {
    case TypeKind::kInt: return "INT";
    case TypeKind::kVarchar: return "VARCHAR(" + std::to_string(length) + ")";
    case TypeKind::kDate: return "DATE";
  }
  return "INT";
}

std::string ColumnType::to_describe() const {
  switch (kind) {
    case TypeKind::kInt: return "int";
    case TypeKind::kVarchar: return "varchar(" + std::to_string(length) + ")";
    case TypeKind::kDate: return "date";
  }
  return "int";
}

std::string render_value(const Value& v) {
  if (is_null(v)) return "NULL";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

std::string render_literal(const Value& v) {
  const auto* s = std::get_if<std::string>(&v);
  if (s == nullptr) return render_value(v);
  std::string out;
  out.reserve(s->size() + 2);
  out.push_back('\'');
  for (char c : *s) {
    switch (c) {
      case '\'': out += "''"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

bool is_valid_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  auto digits = [&](std::size_t from, std::size_t n, int& out) {
    out = 0;
    for (std::size_t i = from; i < from + n; ++i) {
      if (std::isdigit(static_cast<unsigned char>(text[i])) == 0) return false;
      out = out * 10 + (text[i] - '0');
    }
    return true;
  };
  int year = 0, month = 0, day = 0;
  if (!digits(0, 4, year) || !digits(5, 2, month) || !digits(8, 2, day)) return false;
  if (year < 1 || month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  const int max_day = kDays[month - 1] + (month == 2 && leap ? 1 : 0);
  return day <= max_day;
}

std::size_t char_length(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace qarena::sql

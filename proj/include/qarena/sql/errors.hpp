#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qarena::sql {

enum class SqlErrorKind {
  kParse,
  kMultiStatement,
  kUnsupported,
  kUnknownTable,
  kUnknownColumn,
  kTypeMismatch,
  kDuplicateTable,
  kArityMismatch,
  kResourceLimit,
  kInvalidSchema,
};

std::string_view to_string(SqlErrorKind kind);

inline bool is_parse_stage(SqlErrorKind kind) {
  return kind == SqlErrorKind::kParse || kind == SqlErrorKind::kMultiStatement ||
         kind == SqlErrorKind::kUnsupported;
}

class SqlError : public std::runtime_error {
 public:
  SqlError(SqlErrorKind kind, std::string message, std::size_t offset = 0, std::string token = {})
      : std::runtime_error(std::move(message)), kind_(kind), offset_(offset), token_(std::move(token)) {}

  SqlErrorKind kind() const { return kind_; }
  // Byte offset into the source text (parse-stage errors only).
  std::size_t offset() const { return offset_; }
  const std::string& token() const { return token_; }

 private:
  SqlErrorKind kind_;
  std::size_t offset_;
  std::string token_;
};

}  // namespace qarena::sql

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qarena/sql/statement.hpp"

namespace qarena::guard {

enum class PolicyMode { kPractice, kShadowGrade, kExactGrade };

enum class RejectReason { kNone, kParse, kMultiStatement, kForbiddenClass, kForeignTable };

std::string_view to_string(PolicyMode mode);
std::string_view to_string(RejectReason reason);

bool allows(PolicyMode mode, sql::StatementClass cls);

struct SanitizeResult {
  std::optional<sql::Statement> statement;  // set iff allowed
  RejectReason reason = RejectReason::kNone;
  std::string detail;

  bool allowed() const { return statement.has_value(); }
};

// Parses `text` and applies the mode's allow-set. In PRACTICE mode every
// statement that names a table must name `sandbox_table`.
SanitizeResult sanitize(std::string_view text, PolicyMode mode,
                        std::optional<std::string_view> sandbox_table = std::nullopt);

// Normal form for exact-match grading: trimmed, trailing semicolons removed,
// whitespace runs collapsed, and everything outside quoted literals lowercased.
std::string normalize(std::string_view text);

}  // namespace qarena::guard

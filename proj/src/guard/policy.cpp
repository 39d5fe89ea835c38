#include "qarena/guard/policy.hpp"

#include "qarena/common/text.hpp"
#include "qarena/sql/parser.hpp"

namespace qarena::guard {

using sql::StatementClass;

std::string_view to_string(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::kPractice: return "PRACTICE";
    case PolicyMode::kShadowGrade: return "SHADOW_GRADE";
    case PolicyMode::kExactGrade: return "EXACT_GRADE";
  }
  return "UNKNOWN";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNone: return "NONE";
    case RejectReason::kParse: return "PARSE";
    case RejectReason::kMultiStatement: return "MULTI_STATEMENT";
    case RejectReason::kForbiddenClass: return "FORBIDDEN_CLASS";
    case RejectReason::kForeignTable: return "FOREIGN_TABLE";
  }
  return "UNKNOWN";
}

bool allows(PolicyMode mode, StatementClass cls) {
  switch (mode) {
    case PolicyMode::kPractice:
      switch (cls) {
        case StatementClass::kSelect:
        case StatementClass::kInsert:
        case StatementClass::kUpdate:
        case StatementClass::kDelete:
        case StatementClass::kAlter:
        case StatementClass::kTruncate:
        case StatementClass::kDescribe:
          return true;
        default:
          return false;
      }
    case PolicyMode::kShadowGrade:
      return cls == StatementClass::kSelect;
    case PolicyMode::kExactGrade:
      return false;  // exact grading never executes anything
  }
  return false;
}

SanitizeResult sanitize(std::string_view text, PolicyMode mode,
                        std::optional<std::string_view> sandbox_table) {
  SanitizeResult out;
  sql::Statement stmt;
  try {
    stmt = sql::parse(text);
  } catch (const sql::SqlError& e) {
    out.reason = e.kind() == sql::SqlErrorKind::kMultiStatement ? RejectReason::kMultiStatement
                                                                 : RejectReason::kParse;
    out.detail = e.what();
    if (!e.token().empty()) out.detail += " near '" + e.token() + "'";
    return out;
  }

  const StatementClass cls = stmt.statement_class();
  if (!allows(mode, cls)) {
    out.reason = RejectReason::kForbiddenClass;
    out.detail = std::string(to_string(cls)) + " is not allowed in " + std::string(to_string(mode));
    return out;
  }

  if (mode == PolicyMode::kPractice) {
    const auto target = stmt.target_table();
    if (!sandbox_table || (target && !iequals(*target, *sandbox_table))) {
      out.reason = RejectReason::kForeignTable;
      out.detail = "only " + std::string(sandbox_table.value_or("<none>")) + " may be used";
      return out;
    }
  }
  out.statement = std::move(stmt);
  return out;
}

std::string normalize(std::string_view text) {
  std::string_view s = trim(text);
  while (!s.empty() && (s.back() == ';' || is_space(s.back()))) s.remove_suffix(1);

  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\'' || c == '"') {
      // Copy the literal verbatim, following the lexer's escape rules.
      out.push_back(c);
      ++i;
      while (i < s.size()) {
        const char d = s[i];
        if (d == '\\' && i + 1 < s.size()) {
          out.append(s.substr(i, 2));
          i += 2;
        } else if (d == c && i + 1 < s.size() && s[i + 1] == c) {
          out.append(2, c);
          i += 2;
        } else {
          out.push_back(d);
          ++i;
          if (d == c) break;
        }
      }
    } else if (is_space(c)) {
      out.push_back(' ');
      while (i < s.size() && is_space(s[i])) ++i;
    } else {
      out.push_back(ascii_lower(c));
      ++i;
    }
  }
  return out;
}

}  // namespace qarena::guard

#include "qarena/guard/grader.hpp"

#include <algorithm>

#include "qarena/guard/policy.hpp"
#include "qarena/sql/errors.hpp"
#include "qarena/sql/executor.hpp"

namespace qarena::guard {

std::string_view to_string(VerdictReason reason) {
  switch (reason) {
    case VerdictReason::kMatched: return "MATCHED";
    case VerdictReason::kResultMatch: return "RESULT_MATCH";
    case VerdictReason::kResultMismatch: return "RESULT_MISMATCH";
    case VerdictReason::kPolicyRejected: return "POLICY_REJECTED";
    case VerdictReason::kParseFailed: return "PARSE_FAILED";
    case VerdictReason::kExecFailed: return "EXEC_FAILED";
  }
  return "UNKNOWN";
}

Verdict grade_exact(const Question& q, std::string_view candidate) {
  const std::string norm = normalize(candidate);
  for (const auto& answer : q.stored_answers) {
    if (normalize(answer) == norm) return {true, VerdictReason::kMatched, {}};
  }
  return {false, VerdictReason::kResultMismatch, "does not match any stored answer"};
}

Verdict grade_shadow(const Question& q, std::string_view candidate) {
  if (!q.shadow_fixture || q.cached_reference_strings.empty()) {
    return {false, VerdictReason::kExecFailed, "question has no shadow data"};
  }
  const SanitizeResult s = sanitize(candidate, PolicyMode::kShadowGrade);
  if (!s.allowed()) {
    const bool parse = s.reason == RejectReason::kParse || s.reason == RejectReason::kMultiStatement;
    return {false, parse ? VerdictReason::kParseFailed : VerdictReason::kPolicyRejected, s.detail};
  }

  sql::Database db = bind_fixture(*q.shadow_fixture);
  std::string result;
  try {
    const sql::ExecOutcome out = sql::execute(db, *s.statement);
    result = sql::serialize_result(out.rows(), q.reference_ordered);
  } catch (const sql::SqlError& e) {
    return {false, VerdictReason::kExecFailed, e.what()};
  }
  const auto& refs = q.cached_reference_strings;
  if (std::find(refs.begin(), refs.end(), result) != refs.end()) {
    return {true, VerdictReason::kResultMatch, {}};
  }
  return {false, VerdictReason::kResultMismatch, "result differs from the expected result"};
}

Verdict grade(const Question& q, std::string_view candidate) {
  return q.grading_mode == GradingMode::kExact ? grade_exact(q, candidate)
                                                : grade_shadow(q, candidate);
}

}  // namespace qarena::guard

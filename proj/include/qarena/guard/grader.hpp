#pragma once

#include <string>
#include <string_view>

#include "qarena/guard/question.hpp"

namespace qarena::guard {

enum class VerdictReason {
  kMatched,
  kResultMatch,
  kResultMismatch,
  kPolicyRejected,
  kParseFailed,
  kExecFailed,
};

std::string_view to_string(VerdictReason reason);

struct Verdict {
  bool correct = false;
  VerdictReason reason = VerdictReason::kResultMismatch;
  std::string detail;
};

Verdict grade_exact(const Question& q, std::string_view candidate);
Verdict grade_shadow(const Question& q, std::string_view candidate);

// Dispatches on q.grading_mode.
Verdict grade(const Question& q, std::string_view candidate);

}  // namespace qarena::guard

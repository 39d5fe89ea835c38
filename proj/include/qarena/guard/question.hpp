#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qarena/sql/database.hpp"
#include "qarena/sql/statement.hpp"

namespace qarena::guard {

enum class GradingMode { kExact, kShadow };

std::string_view to_string(GradingMode mode);
std::optional<GradingMode> grading_mode_from_string(std::string_view name);

struct Guide {
  enum class Kind { kImage, kTable };
  Kind kind = Kind::kImage;
  std::string caption;
  std::string url;                        // kImage
  std::optional<sql::TableState> table;   // kTable

  bool operator==(const Guide&) const = default;
};

// Grading data for SHADOW questions. `table.name` is the physical name; the
// candidate sees and queries `visible_name`.
struct ShadowFixture {
  std::string visible_name;
  sql::TableState table;

  bool operator==(const ShadowFixture&) const = default;
};

struct Question {
  int id = 0;
  std::string text;
  int difficulty = 1;
  sql::StatementClass category = sql::StatementClass::kSelect;
  GradingMode grading_mode = GradingMode::kExact;
  std::vector<Guide> guides;
  std::vector<std::string> stored_answers;
  std::optional<ShadowFixture> shadow_fixture;

  // Filled by ingest_question for SHADOW questions.
  std::vector<std::string> cached_reference_strings;
  bool reference_ordered = false;

  bool operator==(const Question&) const = default;
};

class InvalidQuestion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Validates a draft and, for SHADOW questions, runs every reference query on
// the fixture and caches the canonical result. Throws InvalidQuestion.
Question ingest_question(Question draft);

// Fresh database holding the fixture under its visible name.
sql::Database bind_fixture(const ShadowFixture& fixture);

}  // namespace qarena::guard

#include "qarena/guard/question.hpp"

#include <algorithm>

#include "qarena/common/text.hpp"
#include "qarena/guard/policy.hpp"
#include "qarena/sql/executor.hpp"
#include "qarena/sql/parser.hpp"

namespace qarena::guard {

std::string_view to_string(GradingMode mode) {
  return mode == GradingMode::kExact ? "EXACT" : "SHADOW";
}

std::optional<GradingMode> grading_mode_from_string(std::string_view name) {
  if (iequals(name, "EXACT")) return GradingMode::kExact;
  if (iequals(name, "SHADOW")) return GradingMode::kShadow;
  return std::nullopt;
}

sql::Database bind_fixture(const ShadowFixture& fixture) {
  sql::TableState bound = fixture.table;
  bound.name = fixture.visible_name;
  sql::Database db;
  db.put(std::move(bound));
  return db;
}

namespace {

[[noreturn]] void reject(const Question& q, const std::string& why) {
  throw InvalidQuestion("question " + std::to_string(q.id) + ": " + why);
}

void ingest_exact(const Question& q) {
  for (const auto& answer : q.stored_answers) {
    if (normalize(answer).empty()) reject(q, "blank stored answer");
    try {
      sql::parse(answer);
    } catch (const sql::SqlError& e) {
      reject(q, "stored answer does not parse: " + std::string(e.what()) + " in \"" + answer + "\"");
    }
  }
}

void ingest_shadow(Question& q) {
  if (!q.shadow_fixture) reject(q, "SHADOW question without a shadow fixture");
  const ShadowFixture& fx = *q.shadow_fixture;
  if (fx.visible_name.empty()) reject(q, "shadow fixture has no visible name");
  if (fx.table.name.empty() || iequals(fx.table.name, fx.visible_name)) {
    reject(q, "shadow fixture needs a physical name distinct from the visible one");
  }
  try {
    fx.table.validate();
  } catch (const sql::SqlError& e) {
    reject(q, "shadow fixture is invalid: " + std::string(e.what()));
  }

  std::optional<bool> ordered;
  std::vector<std::string> strings;
  for (const auto& ref : q.stored_answers) {
    const SanitizeResult s = sanitize(ref, PolicyMode::kShadowGrade);
    if (!s.allowed()) reject(q, "reference is not a single SELECT: " + s.detail);
    const bool has_order = s.statement->has_order_by();
    if (ordered && *ordered != has_order) reject(q, "references disagree on ORDER BY");
    ordered = has_order;

    sql::Database db = bind_fixture(fx);
    try {
      const sql::ExecOutcome out = sql::execute(db, *s.statement);
      strings.push_back(sql::serialize_result(out.rows(), has_order));
    } catch (const sql::SqlError& e) {
      reject(q, "reference fails on the fixture: " + std::string(e.what()));
    }
  }
  if (std::adjacent_find(strings.begin(), strings.end(), std::not_equal_to<>()) != strings.end()) {
    reject(q, "reference queries produce different results on the fixture");
  }
  q.cached_reference_strings = {strings.front()};
  q.reference_ordered = *ordered;
}

}  // namespace

Question ingest_question(Question draft) {
  if (draft.text.empty()) reject(draft, "empty question text");
  if (draft.difficulty < 1 || draft.difficulty > 3) reject(draft, "difficulty must be 1..3");
  if (draft.stored_answers.empty()) reject(draft, "no stored answers");
  for (const auto& g : draft.guides) {
    if (g.kind == Guide::Kind::kImage && g.url.empty()) reject(draft, "image guide without url");
    if (g.kind == Guide::Kind::kTable && !g.table) reject(draft, "table guide without table");
  }
  draft.cached_reference_strings.clear();
  draft.reference_ordered = false;
  if (draft.grading_mode == GradingMode::kExact) {
    ingest_exact(draft);
  } else {
    ingest_shadow(draft);
  }
  return draft;
}

}  // namespace qarena::guard

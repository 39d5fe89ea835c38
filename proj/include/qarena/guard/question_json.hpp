#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qarena/guard/question.hpp"

namespace qarena::guard {

// One question object as stored in questions.ndjson. Cached reference
// strings are not stored; they are rebuilt by ingest_question on load.
nlohmann::json question_to_json(const Question& q);
// Throws InvalidQuestion on schema errors. Does not run ingest.
Question question_from_json(const nlohmann::json& j);

nlohmann::json table_to_json(const sql::TableState& t);
sql::TableState table_from_json(const nlohmann::json& j);

nlohmann::json value_to_json(const sql::Value& v);
sql::Value value_from_json(const nlohmann::json& j);

// "INT", "VARCHAR(30)", "DATE" (case-insensitive). Throws InvalidQuestion.
sql::ColumnType column_type_from_string(std::string_view text);

// Reads and ingests every non-blank line. Throws InvalidQuestion with the
// line number prefixed to the message.
std::vector<Question> load_question_bank(std::istream& in);

}  // namespace qarena::guard

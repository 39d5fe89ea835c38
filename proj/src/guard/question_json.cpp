#include "qarena/guard/question_json.hpp"

#include <charconv>
#include <istream>

#include "qarena/common/text.hpp"
#include "qarena/sql/errors.hpp"

namespace qarena::guard {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& why) { throw InvalidQuestion(why); }

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) bad(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::string string_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_string()) bad(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

sql::ColumnType column_type_from_string(std::string_view text) {
  const std::string up = to_upper(trim(text));
  if (up == "INT" || up == "INTEGER") return sql::ColumnType::Int();
  if (up == "DATE") return sql::ColumnType::Date();
  if (up.rfind("VARCHAR(", 0) == 0 && up.back() == ')') {
    const std::string_view digits = std::string_view(up).substr(8, up.size() - 9);
    std::uint32_t n = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && end == digits.data() + digits.size() && n >= 1 && n <= 65535) {
      return sql::ColumnType::Varchar(n);
    }
  }
  bad("bad column type '" + std::string(text) + "'");
}

json value_to_json(const sql::Value& v) {
  if (sql::is_null(v)) return nullptr;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

sql::Value value_from_json(const json& j) {
  if (j.is_null()) return sql::Value{};
  if (j.is_number_integer()) return sql::Value{j.get<std::int64_t>()};
  if (j.is_string()) return sql::Value{j.get<std::string>()};
  bad("cell values must be null, integers or strings");
}

json table_to_json(const sql::TableState& t) {
  json cols = json::array();
  for (const auto& c : t.columns) {
    cols.push_back({{"name", c.name}, {"type", c.type.to_sql()}, {"nullable", c.nullable}});
  }
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (const auto& v : r) row.push_back(value_to_json(v));
    rows.push_back(std::move(row));
  }
  return {{"name", t.name}, {"columns", std::move(cols)}, {"rows", std::move(rows)}};
}

sql::TableState table_from_json(const json& j) {
  sql::TableState t;
  if (j.contains("name")) t.name = string_field(j, "name");
  for (const auto& c : field(j, "columns")) {
    sql::ColumnDef def;
    def.name = string_field(c, "name");
    def.type = column_type_from_string(string_field(c, "type"));
    def.nullable = c.value("nullable", true);
    t.columns.push_back(std::move(def));
  }
  if (j.contains("rows")) {
    for (const auto& r : j.at("rows")) {
      if (!r.is_array()) bad("table rows must be arrays");
      sql::Row row;
      for (const auto& v : r) row.push_back(value_from_json(v));
      t.rows.push_back(std::move(row));
    }
  }
  try {
    t.validate();
  } catch (const sql::SqlError& e) {
    bad("table '" + t.name + "': " + e.what());
  }
  return t;
}

json question_to_json(const Question& q) {
  json j = {
      {"id", q.id},
      {"text", q.text},
      {"difficulty", q.difficulty},
      {"category", std::string(sql::to_string(q.category))},
      {"grading_mode", std::string(to_string(q.grading_mode))},
      {"stored_answers", q.stored_answers},
  };
  json guides = json::array();
  for (const auto& g : q.guides) {
    if (g.kind == Guide::Kind::kImage) {
      guides.push_back({{"kind", "image"}, {"url", g.url}, {"caption", g.caption}});
    } else {
      guides.push_back({{"kind", "table"}, {"caption", g.caption}, {"table", table_to_json(*g.table)}});
    }
  }
  j["guides"] = std::move(guides);
  if (q.shadow_fixture) {
    json fx = table_to_json(q.shadow_fixture->table);
    fx["physical_name"] = fx["name"];
    fx.erase("name");
    fx["visible_name"] = q.shadow_fixture->visible_name;
    j["shadow_fixture"] = std::move(fx);
  } else {
    j["shadow_fixture"] = nullptr;
  }
  return j;
}

Question question_from_json(const json& j) {
  Question q;
  const json& id = field(j, "id");
  if (!id.is_number_integer()) bad("field 'id' must be an integer");
  q.id = id.get<int>();
  q.text = string_field(j, "text");
  const json& diff = field(j, "difficulty");
  if (!diff.is_number_integer()) bad("field 'difficulty' must be an integer");
  q.difficulty = diff.get<int>();

  const auto cat = sql::statement_class_from_string(string_field(j, "category"));
  if (!cat) bad("unknown category");
  q.category = *cat;
  const auto mode = grading_mode_from_string(string_field(j, "grading_mode"));
  if (!mode) bad("unknown grading_mode");
  q.grading_mode = *mode;

  for (const auto& a : field(j, "stored_answers")) {
    if (!a.is_string()) bad("stored_answers must be strings");
    q.stored_answers.push_back(a.get<std::string>());
  }
  if (j.contains("guides")) {
    for (const auto& g : j.at("guides")) {
      Guide guide;
      const std::string kind = string_field(g, "kind");
      guide.caption = g.value("caption", "");
      if (kind == "image") {
        guide.kind = Guide::Kind::kImage;
        guide.url = string_field(g, "url");
      } else if (kind == "table") {
        guide.kind = Guide::Kind::kTable;
        guide.table = table_from_json(field(g, "table"));
      } else {
        bad("unknown guide kind '" + kind + "'");
      }
      q.guides.push_back(std::move(guide));
    }
  }
  if (j.contains("shadow_fixture") && !j.at("shadow_fixture").is_null()) {
    const json& fx = j.at("shadow_fixture");
    ShadowFixture shadow;
    shadow.visible_name = string_field(fx, "visible_name");
    json table = fx;
    table["name"] = fx.value("physical_name", "shadow_q" + std::to_string(q.id));
    shadow.table = table_from_json(table);
    q.shadow_fixture = std::move(shadow);
  }
  return q;
}

std::vector<Question> load_question_bank(std::istream& in) {
  std::vector<Question> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      out.push_back(ingest_question(question_from_json(json::parse(line))));
    } catch (const json::exception& e) {
      throw InvalidQuestion("line " + std::to_string(number) + ": " + e.what());
    } catch (const InvalidQuestion& e) {
      throw InvalidQuestion("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace qarena::guard

#include "qarena/gateway/views.hpp"

#include "qarena/guard/question_json.hpp"

namespace qarena::gateway {

using nlohmann::json;

json public_question(const guard::Question& q) {
  json full = guard::question_to_json(q);
  return {{"id", q.id},
          {"text", q.text},
          {"difficulty", q.difficulty},
          {"category", sql::to_string(q.category)},
          {"grading_mode", guard::to_string(q.grading_mode)},
          {"guides", full.at("guides")}};
}

json result_set(const sql::ResultSet& rs) {
  json rows = json::array();
  for (const sql::Row& row : rs.rows) {
    json r = json::array();
    for (const sql::Value& v : row) r.push_back(guard::value_to_json(v));
    rows.push_back(std::move(r));
  }
  return {{"columns", rs.columns}, {"rows", std::move(rows)}, {"ordered", rs.ordered}};
}

json score_report(const game::ScoreReport& r) {
  json results = json::array();
  for (std::size_t i = 0; i < r.question_ids.size(); ++i) {
    results.push_back({{"question_id", r.question_ids[i]},
                       {"correct", r.verdicts[i].correct},
                       {"reason", guard::to_string(r.verdicts[i].reason)}});
  }
  json categories = json::object();
  for (const auto& [cls, stat] : r.category_stats) {
    categories[std::string(sql::to_string(cls))] = {{"attempted", stat.attempted}, {"correct", stat.correct}};
  }
  return {{"total_correct", r.total_correct},
          {"total", r.question_ids.size()},
          {"results", std::move(results)},
          {"categories", std::move(categories)}};
}

json solo_session(const game::SoloSession& s) {
  json questions = json::array();
  for (std::size_t i = 0; i < s.questions().size(); ++i) {
    json q = public_question(*s.questions()[i]);
    q["index"] = i;
    const game::AnswerState& a = s.answers()[i];
    using K = game::AnswerState::Kind;
    q["state"] = a.kind == K::kAnswered ? "ANSWERED" : a.kind == K::kSkipped ? "SKIPPED" : "UNANSWERED";
    if (a.kind == K::kAnswered) q["answer"] = a.text;
    questions.push_back(std::move(q));
  }
  json j = {{"id", s.id()},
            {"player", s.player()},
            {"mode", s.mode().kind == game::SoloMode::Kind::kCasual ? "CASUAL" : "CUSTOM"},
            {"started_at", s.started_at()},
            {"submitted", s.submitted()},
            {"questions", std::move(questions)}};
  if (s.submitted()) j["report"] = score_report(s.report());
  return j;
}

json profile(const registry::Profile& p) {
  json j = registry::to_json(p.account, false);
  json ratings = json::object();
  for (const auto& [mode, r] : p.ratings) ratings[std::string(registry::to_string(mode))] = registry::to_json(r);
  j["ratings"] = std::move(ratings);
  json records = json::array();
  for (const auto& r : p.records) records.push_back(registry::to_json(r));
  j["records"] = std::move(records);
  return j;
}

}  // namespace qarena::gateway

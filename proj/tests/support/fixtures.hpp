#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qarena/guard/question_json.hpp"

namespace qarena::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(QARENA_FIXTURE_DIR) + "/" + name;
}

inline std::vector<guard::Question> load_fixture_bank() {
  std::ifstream in(fixture_path("questions.ndjson"));
  if (!in) throw std::runtime_error("cannot open questions.ndjson fixture");
  return guard::load_question_bank(in);
}

inline const guard::Question& question_by_id(const std::vector<guard::Question>& bank, int id) {
  for (const auto& q : bank) {
    if (q.id == id) return q;
  }
  throw std::runtime_error("no fixture question " + std::to_string(id));
}

inline nlohmann::json load_json_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("cannot open fixture " + name);
  return nlohmann::json::parse(in);
}

// Shadow fixture entries resolved to ingested questions.
struct BlindCase {
  std::string name;
  guard::Question question;
  std::vector<std::string> correct;
  std::vector<std::string> fabricated;
  std::vector<std::string> wrong;
};

inline std::vector<BlindCase> load_blind_cases() {
  const auto bank = load_fixture_bank();
  const auto doc = load_json_fixture("shadow_fixtures.json");
  std::vector<BlindCase> out;
  for (const auto& f : doc.at("fixtures")) {
    BlindCase c;
    c.name = f.at("name").get<std::string>();
    c.question = f.contains("question_id")
                     ? question_by_id(bank, f.at("question_id").get<int>())
                     : guard::ingest_question(guard::question_from_json(f.at("question")));
    c.correct = f.at("correct").get<std::vector<std::string>>();
    c.fabricated = f.at("fabricated").get<std::vector<std::string>>();
    c.wrong = f.value("wrong", std::vector<std::string>{});
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace qarena::testing

#include "qarena/game/solo.hpp"

#include <algorithm>

#include "qarena/common/rng.hpp"

namespace qarena::game {

std::vector<QuestionPtr> draw_questions(const std::vector<QuestionPtr>& bank, const SoloMode& mode,
                                        std::uint64_t seed) {
  std::vector<QuestionPtr> pool;
  std::size_t count = kCasualCount;
  if (mode.kind == SoloMode::Kind::kCustom) {
    if (mode.count < 1 || mode.count > kMaxCustomCount) {
      throw GameError("INVALID_MODE", "question count must be 1.." + std::to_string(kMaxCustomCount));
    }
    if (mode.difficulty < 1 || mode.difficulty > 3) {
      throw GameError("INVALID_MODE", "difficulty must be 1..3");
    }
    count = static_cast<std::size_t>(mode.count);
    std::copy_if(bank.begin(), bank.end(), std::back_inserter(pool),
                 [&](const QuestionPtr& q) { return q->difficulty == mode.difficulty; });
  } else {
    pool = bank;
  }
  if (pool.size() < count) {
    throw GameError("INSUFFICIENT_BANK", "the bank has only " + std::to_string(pool.size()) +
                                             " eligible questions, " + std::to_string(count) +
                                             " needed");
  }
  std::sort(pool.begin(), pool.end(), [](const QuestionPtr& a, const QuestionPtr& b) { return a->id < b->id; });
  return Rng(seed).sample(std::move(pool), count);
}

SoloSession::SoloSession(std::string id, std::string player, SoloMode mode,
                         std::vector<QuestionPtr> questions, Timestamp started_at)
    : id_(std::move(id)),
      player_(std::move(player)),
      mode_(mode),
      questions_(std::move(questions)),
      answers_(questions_.size()),
      started_at_(started_at) {}

void SoloSession::check_open(std::size_t index) const {
  if (submitted_) throw GameError("ALREADY_SUBMITTED", "session already submitted");
  if (index >= questions_.size()) {
    throw GameError("INDEX_OUT_OF_RANGE", "no question at index " + std::to_string(index));
  }
}

void SoloSession::answer(std::size_t index, std::string text) {
  check_open(index);
  answers_[index] = {AnswerState::Kind::kAnswered, std::move(text)};
}

void SoloSession::skip(std::size_t index) {
  check_open(index);
  answers_[index] = {AnswerState::Kind::kSkipped, {}};
}

const ScoreReport& SoloSession::report() const {
  if (!submitted_) throw GameError("NOT_SUBMITTED", "session not submitted yet");
  return report_;
}

const ScoreReport& SoloSession::submit_all(Timestamp now) {
  if (submitted_) throw GameError("ALREADY_SUBMITTED", "session already submitted");
  ScoreReport r;
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    const guard::Question& q = *questions_[i];
    guard::Verdict v;
    if (answers_[i].kind == AnswerState::Kind::kAnswered) {
      v = guard::grade(q, answers_[i].text);
    } else {
      v = {false, guard::VerdictReason::kResultMismatch,
           answers_[i].kind == AnswerState::Kind::kSkipped ? "skipped" : "unanswered"};
    }
    CategoryStat& stat = r.category_stats[q.category];
    ++stat.attempted;
    if (v.correct) {
      ++stat.correct;
      ++r.total_correct;
    }
    r.question_ids.push_back(q.id);
    r.verdicts.push_back(std::move(v));
  }
  report_ = std::move(r);
  submitted_ = true;
  submitted_at_ = now;
  return report_;
}

}  // namespace qarena::game

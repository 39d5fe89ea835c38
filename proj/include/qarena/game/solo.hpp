#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qarena/common/clock.hpp"
#include "qarena/guard/grader.hpp"

namespace qarena::game {

using QuestionPtr = std::shared_ptr<const guard::Question>;

inline constexpr int kCasualCount = 10;
inline constexpr int kMaxCustomCount = 50;

struct SoloMode {
  enum class Kind { kCasual, kCustom };
  Kind kind = Kind::kCasual;
  int count = kCasualCount;
  int difficulty = 0;  // CUSTOM only

  static SoloMode Casual() { return {}; }
  static SoloMode Custom(int count, int difficulty) { return {Kind::kCustom, count, difficulty}; }
};

class GameError : public std::runtime_error {
 public:
  GameError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  // INSUFFICIENT_BANK, INVALID_MODE, ALREADY_SUBMITTED, INDEX_OUT_OF_RANGE
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Seeded uniform draw without replacement. The pool is ordered by id first,
// so the result depends only on the bank's contents, the mode and the seed.
std::vector<QuestionPtr> draw_questions(const std::vector<QuestionPtr>& bank, const SoloMode& mode,
                                        std::uint64_t seed);

struct AnswerState {
  enum class Kind { kUnanswered, kSkipped, kAnswered };
  Kind kind = Kind::kUnanswered;
  std::string text;
};

struct CategoryStat {
  int attempted = 0;
  int correct = 0;
  bool operator==(const CategoryStat&) const = default;
};

struct ScoreReport {
  int total_correct = 0;
  std::vector<int> question_ids;
  std::vector<guard::Verdict> verdicts;
  std::map<sql::StatementClass, CategoryStat> category_stats;
};

class SoloSession {
 public:
  SoloSession(std::string id, std::string player, SoloMode mode, std::vector<QuestionPtr> questions,
              Timestamp started_at);

  const std::string& id() const { return id_; }
  const std::string& player() const { return player_; }
  const SoloMode& mode() const { return mode_; }
  const std::vector<QuestionPtr>& questions() const { return questions_; }
  const std::vector<AnswerState>& answers() const { return answers_; }
  bool submitted() const { return submitted_; }
  Timestamp started_at() const { return started_at_; }
  Timestamp submitted_at() const { return submitted_at_; }
  const ScoreReport& report() const;

  void answer(std::size_t index, std::string text);
  void skip(std::size_t index);
  const ScoreReport& submit_all(Timestamp now);

 private:
  void check_open(std::size_t index) const;

  std::string id_;
  std::string player_;
  SoloMode mode_;
  std::vector<QuestionPtr> questions_;
  std::vector<AnswerState> answers_;
  bool submitted_ = false;
  Timestamp started_at_;
  Timestamp submitted_at_ = 0;
  ScoreReport report_;
};

}  // namespace qarena::game

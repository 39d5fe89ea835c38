#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qarena::arena {

enum class EliminationMode { kSingle, kDouble };

std::string_view to_string(EliminationMode mode);
std::optional<EliminationMode> elimination_mode_from_string(std::string_view name);

class ArenaError : public std::runtime_error {
 public:
  ArenaError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Marks a bye or the missing side of a walkover.
inline constexpr int kEmpty = -1;

enum class MatchSide { kWinners, kLosers, kGrandFinal, kReset };
enum class MatchState { kPending, kReady, kDone, kWalkover, kVoid };

std::string_view to_string(MatchSide side);
std::string_view to_string(MatchState state);

struct Source {
  enum class Kind { kSeed, kWinnerOf, kLoserOf, kFixed };
  Kind kind = Kind::kSeed;
  int ref = 0;  // seed index, match id, or player
};

struct BracketMatch {
  int id = 0;
  MatchSide side = MatchSide::kWinners;
  int round = 1;
  int index = 0;
  Source source[2];
  std::optional<int> slot[2];  // resolved entrants: player index or kEmpty
  MatchState state = MatchState::kPending;
  int winner = kEmpty;
  int loser = kEmpty;

  bool resolved() const {
    return state == MatchState::kDone || state == MatchState::kWalkover || state == MatchState::kVoid;
  }
  bool has(int player) const { return slot[0] == player || slot[1] == player; }
};

// Elimination bracket over players 0..n-1 in seeded order. Seeds are padded
// with byes to the next power of two; first-round match i pairs seed i with
// seed P/2 + i, so a bye never meets another bye. Matches whose entrants are
// not known yet stay pending and resolve as results come in. Walkovers and
// empty matches resolve on their own and are not counted as decided.
class Bracket {
 public:
  Bracket(EliminationMode mode, int players);

  EliminationMode mode() const { return mode_; }
  int players() const { return players_; }
  const std::vector<BracketMatch>& matches() const { return matches_; }
  const BracketMatch& match(int id) const;

  // Ready matches (both entrants real, no result yet) in id order.
  std::vector<int> ready_matches() const;

  // Throws ArenaError: UNKNOWN_MATCH, MATCH_ALREADY_RESOLVED, MATCH_NOT_READY,
  // NOT_IN_MATCH.
  void report(int match_id, int winner);

  bool finished() const { return champion_.has_value(); }
  std::optional<int> champion() const { return champion_; }
  int decided_count() const { return decided_; }
  int losses(int player) const { return losses_.at(static_cast<std::size_t>(player)); }
  int wins(int player) const { return wins_.at(static_cast<std::size_t>(player)); }
  bool eliminated(int player) const;

  nlohmann::json to_json(const std::vector<std::string>& names) const;

 private:
  int add(MatchSide side, int round, int index, Source a, Source b);
  std::optional<int> entrant(const Source& s) const;
  void resolve();

  EliminationMode mode_;
  int players_;
  std::vector<BracketMatch> matches_;
  int final_id_ = -1;  // WB final (SINGLE) or grand final (DOUBLE)
  int reset_id_ = -1;
  std::optional<int> champion_;
  int decided_ = 0;
  std::vector<int> losses_;
  std::vector<int> wins_;
};

}  // namespace qarena::arena

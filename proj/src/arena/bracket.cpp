#include "qarena/arena/bracket.hpp"

#include "qarena/common/text.hpp"

namespace qarena::arena {

std::string_view to_string(EliminationMode mode) {
  return mode == EliminationMode::kSingle ? "SINGLE" : "DOUBLE";
}

std::optional<EliminationMode> elimination_mode_from_string(std::string_view name) {
  if (iequals(name, "SINGLE")) return EliminationMode::kSingle;
  if (iequals(name, "DOUBLE")) return EliminationMode::kDouble;
  return std::nullopt;
}

std::string_view to_string(MatchSide side) {
  switch (side) {
    case MatchSide::kWinners: return "WINNERS";
    case MatchSide::kLosers: return "LOSERS";
    case MatchSide::kGrandFinal: return "GRAND_FINAL";
    case MatchSide::kReset: return "RESET";
  }
  return "UNKNOWN";
}

std::string_view to_string(MatchState state) {
  switch (state) {
    case MatchState::kPending: return "PENDING";
    case MatchState::kReady: return "READY";
    case MatchState::kDone: return "DONE";
    case MatchState::kWalkover: return "WALKOVER";
    case MatchState::kVoid: return "VOID";
  }
  return "UNKNOWN";
}

namespace {

Source seed(int i) { return {Source::Kind::kSeed, i}; }
Source winner_of(int m) { return {Source::Kind::kWinnerOf, m}; }
Source loser_of(int m) { return {Source::Kind::kLoserOf, m}; }

}  // namespace

Bracket::Bracket(EliminationMode mode, int players)
    : mode_(mode), players_(players), losses_(players, 0), wins_(players, 0) {
  if (players < 2) throw ArenaError("NOT_ENOUGH_PLAYERS", "a bracket needs at least two players");
  int size = 1;
  int rounds = 0;
  while (size < players) {
    size *= 2;
    ++rounds;
  }

  std::vector<std::vector<int>> wb(rounds + 1);
  for (int i = 0; i < size / 2; ++i) wb[1].push_back(add(MatchSide::kWinners, 1, i, seed(i), seed(size / 2 + i)));
  for (int r = 2; r <= rounds; ++r) {
    for (std::size_t j = 0; j < wb[r - 1].size() / 2; ++j) {
      wb[r].push_back(add(MatchSide::kWinners, r, static_cast<int>(j), winner_of(wb[r - 1][2 * j]),
                          winner_of(wb[r - 1][2 * j + 1])));
    }
  }
  const int wb_final = wb[rounds].front();
  if (mode == EliminationMode::kSingle) {
    final_id_ = wb_final;
    resolve();
    return;
  }

  // Losers bracket: WB round 1 losers pair off, then each later WB round's
  // losers drop in against the survivors, with a consolidation round between
  // drop-ins.
  Source lb_champion = loser_of(wb_final);
  if (rounds >= 2) {
    std::vector<int> prev;
    int lb_round = 1;
    for (std::size_t j = 0; j < wb[1].size() / 2; ++j) {
      prev.push_back(add(MatchSide::kLosers, lb_round, static_cast<int>(j), loser_of(wb[1][2 * j]),
                         loser_of(wb[1][2 * j + 1])));
    }
    for (int r = 2; r <= rounds; ++r) {
      ++lb_round;
      const std::size_t m = wb[r].size();
      std::vector<int> drop;
      for (std::size_t j = 0; j < m; ++j) {
        drop.push_back(add(MatchSide::kLosers, lb_round, static_cast<int>(j), winner_of(prev[j]),
                           loser_of(wb[r][m - 1 - j])));
      }
      prev = std::move(drop);
      if (r < rounds) {
        ++lb_round;
        std::vector<int> merged;
        for (std::size_t j = 0; j < prev.size() / 2; ++j) {
          merged.push_back(add(MatchSide::kLosers, lb_round, static_cast<int>(j), winner_of(prev[2 * j]),
                               winner_of(prev[2 * j + 1])));
        }
        prev = std::move(merged);
      }
    }
    lb_champion = winner_of(prev.front());
  }
  final_id_ = add(MatchSide::kGrandFinal, 1, 0, winner_of(wb_final), lb_champion);
  resolve();
}

int Bracket::add(MatchSide side, int round, int index, Source a, Source b) {
  BracketMatch m;
  m.id = static_cast<int>(matches_.size());
  m.side = side;
  m.round = round;
  m.index = index;
  m.source[0] = a;
  m.source[1] = b;
  matches_.push_back(m);
  return m.id;
}

const BracketMatch& Bracket::match(int id) const {
  if (id < 0 || id >= static_cast<int>(matches_.size())) {
    throw ArenaError("UNKNOWN_MATCH", "no match " + std::to_string(id));
  }
  return matches_[static_cast<std::size_t>(id)];
}

std::optional<int> Bracket::entrant(const Source& s) const {
  switch (s.kind) {
    case Source::Kind::kSeed: return s.ref < players_ ? s.ref : kEmpty;
    case Source::Kind::kFixed: return s.ref;
    case Source::Kind::kWinnerOf:
    case Source::Kind::kLoserOf: {
      const BracketMatch& m = matches_[static_cast<std::size_t>(s.ref)];
      if (!m.resolved()) return std::nullopt;
      return s.kind == Source::Kind::kWinnerOf ? m.winner : m.loser;
    }
  }
  return std::nullopt;
}

// Sources always point at lower ids, so one pass in id order settles
// everything that can be settled.
void Bracket::resolve() {
  for (auto& m : matches_) {
    if (m.state != MatchState::kPending) continue;
    for (int k = 0; k < 2; ++k) {
      if (!m.slot[k]) m.slot[k] = entrant(m.source[k]);
    }
    if (!m.slot[0] || !m.slot[1]) continue;
    const int a = *m.slot[0];
    const int b = *m.slot[1];
    if (a != kEmpty && b != kEmpty) {
      m.state = MatchState::kReady;
    } else if (a == kEmpty && b == kEmpty) {
      m.state = MatchState::kVoid;
    } else {
      m.state = MatchState::kWalkover;
      m.winner = a == kEmpty ? b : a;
    }
  }
  const BracketMatch& last = matches_[static_cast<std::size_t>(reset_id_ >= 0 ? reset_id_ : final_id_)];
  if (last.resolved() && !(mode_ == EliminationMode::kDouble && reset_id_ < 0 &&
                           last.winner == last.slot[1])) {
    champion_ = last.winner;
  }
}

std::vector<int> Bracket::ready_matches() const {
  std::vector<int> out;
  for (const auto& m : matches_) {
    if (m.state == MatchState::kReady) out.push_back(m.id);
  }
  return out;
}

void Bracket::report(int match_id, int winner) {
  match(match_id);
  BracketMatch& m = matches_[static_cast<std::size_t>(match_id)];
  if (m.resolved()) throw ArenaError("MATCH_ALREADY_RESOLVED", "match already has a result");
  if (m.state != MatchState::kReady) throw ArenaError("MATCH_NOT_READY", "match entrants not known yet");
  if (!m.has(winner)) throw ArenaError("NOT_IN_MATCH", "winner is not an entrant of the match");

  m.state = MatchState::kDone;
  m.winner = winner;
  m.loser = *m.slot[0] == winner ? *m.slot[1] : *m.slot[0];
  ++decided_;
  ++wins_[static_cast<std::size_t>(winner)];
  ++losses_[static_cast<std::size_t>(m.loser)];

  // The losers-bracket champion took the grand final: both now have one
  // loss, so one more match decides it.
  if (match_id == final_id_ && mode_ == EliminationMode::kDouble && winner == *m.slot[1]) {
    reset_id_ = add(MatchSide::kReset, 1, 0, {Source::Kind::kFixed, *m.slot[0]},
                    {Source::Kind::kFixed, *m.slot[1]});
  }
  resolve();
}

bool Bracket::eliminated(int player) const {
  const int limit = mode_ == EliminationMode::kSingle ? 1 : 2;
  return losses(player) >= limit;
}

nlohmann::json Bracket::to_json(const std::vector<std::string>& names) const {
  auto name = [&](std::optional<int> p) -> nlohmann::json {
    if (!p) return nullptr;
    if (*p == kEmpty) return "BYE";
    return names.at(static_cast<std::size_t>(*p));
  };
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : matches_) {
    ms.push_back({{"id", m.id},
                  {"side", to_string(m.side)},
                  {"round", m.round},
                  {"index", m.index},
                  {"players", {name(m.slot[0]), name(m.slot[1])}},
                  {"state", to_string(m.state)},
                  {"winner", m.resolved() && m.winner != kEmpty ? name(m.winner) : nlohmann::json()}});
  }
  return {{"mode", to_string(mode_)},
          {"seeds", names},
          {"matches", std::move(ms)},
          {"champion", champion_ ? name(*champion_) : nlohmann::json()}};
}

}  // namespace qarena::arena

#pragma once

#include "json.hpp"
#include "qarena/game/sandbox.hpp"
#include "qarena/game/solo.hpp"
#include "qarena/registry/registry.hpp"

namespace qarena::gateway {

// Client view of a question: no stored answers, no shadow fixture.
nlohmann::json public_question(const guard::Question& q);
nlohmann::json result_set(const sql::ResultSet& rs);
nlohmann::json score_report(const game::ScoreReport& r);
nlohmann::json solo_session(const game::SoloSession& s);
nlohmann::json profile(const registry::Profile& p);

}  // namespace qarena::gateway

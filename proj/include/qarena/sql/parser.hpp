#pragma once

#include <string>
#include <string_view>

#include "qarena/sql/errors.hpp"
#include "qarena/sql/statement.hpp"

namespace qarena::sql {

// Parses exactly one statement of the supported subset. A single trailing
// ";" is accepted; anything after it raises kMultiStatement.
// Throws SqlError with kind kParse, kMultiStatement or kUnsupported.
Statement parse(std::string_view text);

StatementClass classify(const Statement& stmt);

// Canonical SQL text. parse(render(s)) == s for every parsed statement.
std::string render(const Statement& stmt);
std::string render(const Expr& expr);

// Backtick-quotes identifiers that would not re-lex as a bare identifier.
std::string render_identifier(std::string_view name);

}  // namespace qarena::sql

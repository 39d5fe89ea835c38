#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qarena::sql::detail {

enum class TokenKind { kWord, kQuotedIdent, kInteger, kString, kSymbol, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;   // word as written, identifier name, decoded string, digits, or symbol
  std::string upper;  // upper-cased text for words
  std::size_t offset = 0;
};

// Splits SQL text into tokens, dropping whitespace and comments.
// The returned vector always ends with a kEnd token.
std::vector<Token> tokenize(std::string_view text);

// Source-like spelling of a token, used for error messages and for the
// canonical token list of access-control statements.
std::string spell(const Token& t);

}  // namespace qarena::sql::detail

#include "lexer.hpp"

#include <cctype>

#include "qarena/common/text.hpp"
#include "qarena/sql/errors.hpp"
#include "qarena/sql/parser.hpp"
#include "qarena/sql/value.hpp"

namespace qarena::sql::detail {
namespace {

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '_' || c == '$' || u >= 0x80;
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blank();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    Token end;
    end.kind = TokenKind::kEnd;
    end.offset = src_.size();
    out.push_back(std::move(end));
    return out;
  }

 private:
  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (is_space(c)) {
        ++pos_;
      } else if (c == '#' || (c == '-' && peek(1) == '-')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        const std::size_t start = pos_;
        const auto close = src_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          throw SqlError(SqlErrorKind::kParse, "unterminated comment", start, "/*");
        }
        pos_ = close + 2;
      } else {
        break;
      }
    }
  }

  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  Token next() {
    Token t;
    t.offset = pos_;
    const char c = src_[pos_];
    if (c == '\'' || c == '"') {
      t.kind = TokenKind::kString;
      t.text = read_string(c);
      return t;
    }
    if (c == '`') {
      t.kind = TokenKind::kQuotedIdent;
      t.text = read_backtick();
      return t;
    }
    if (is_word_char(c)) {
      const std::size_t start = pos_;
      bool all_digits = true;
      while (pos_ < src_.size() && is_word_char(src_[pos_])) {
        all_digits = all_digits && is_digit(src_[pos_]);
        ++pos_;
      }
      t.text = std::string(src_.substr(start, pos_ - start));
      if (all_digits) {
        if (pos_ < src_.size() && src_[pos_] == '.' && is_digit(peek(1))) {
          throw SqlError(SqlErrorKind::kUnsupported, "decimal literals are not supported", start,
                         t.text);
        }
        t.kind = TokenKind::kInteger;
      } else {
        t.kind = TokenKind::kWord;
        t.upper = to_upper(t.text);
      }
      return t;
    }
    t.kind = TokenKind::kSymbol;
    const char n = peek(1);
    if ((c == '<' && (n == '=' || n == '>')) || (c == '>' && n == '=') || (c == '!' && n == '=')) {
      t.text = std::string{c, n};
      pos_ += 2;
      return t;
    }
    static constexpr std::string_view kSingles = "(),;*=<>.+-/%@";
    if (kSingles.find(c) == std::string_view::npos) {
      throw SqlError(SqlErrorKind::kParse, "unexpected character", pos_, std::string(1, c));
    }
    t.text = std::string(1, c);
    ++pos_;
    return t;
  }

  std::string read_string(char quote) {
    const std::size_t start = pos_;
    ++pos_;
    std::string value;
    while (true) {
      if (pos_ >= src_.size()) {
        throw SqlError(SqlErrorKind::kParse, "unterminated string literal", start,
                       std::string(src_.substr(start, 16)));
      }
      const char c = src_[pos_];
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) {
          throw SqlError(SqlErrorKind::kParse, "unterminated string literal", start,
                         std::string(src_.substr(start, 16)));
        }
        const char e = src_[pos_ + 1];
        switch (e) {
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case 'r': value.push_back('\r'); break;
          case '0': value.push_back('\0'); break;
          default: value.push_back(e); break;
        }
        pos_ += 2;
      } else if (c == quote) {
        if (peek(1) == quote) {
          value.push_back(quote);
          pos_ += 2;
        } else {
          ++pos_;
          return value;
        }
      } else {
        value.push_back(c);
        ++pos_;
      }
    }
  }

  std::string read_backtick() {
    const std::size_t start = pos_;
    ++pos_;
    std::string name;
    while (true) {
      if (pos_ >= src_.size()) {
        throw SqlError(SqlErrorKind::kParse, "unterminated quoted identifier", start, "`");
      }
      const char c = src_[pos_];
      if (c == '`') {
        if (peek(1) == '`') {
          name.push_back('`');
          pos_ += 2;
          continue;
        }
        ++pos_;
        break;
      }
      name.push_back(c);
      ++pos_;
    }
    if (name.empty()) {
      throw SqlError(SqlErrorKind::kParse, "empty quoted identifier", start, "``");
    }
    return name;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

std::string spell(const Token& t) {
  switch (t.kind) {
    case TokenKind::kString: return render_literal(Value{t.text});
    case TokenKind::kQuotedIdent: return render_identifier(t.text);
    case TokenKind::kEnd: return "<end of input>";
    default: return t.text;
  }
}

}  // namespace qarena::sql::detail

#include "qarena/sql/parser.hpp"

#include <charconv>
#include <limits>
#include <set>

#include "lexer.hpp"
#include "qarena/common/text.hpp"

namespace qarena::sql {
namespace {

using detail::Token;
using detail::TokenKind;

constexpr int kMaxExprDepth = 64;

const std::set<std::string, std::less<>>& reserved_words() {
  static const std::set<std::string, std::less<>> words = {
      "ADD",      "ALTER",   "AND",     "AS",       "ASC",      "BETWEEN", "BY",      "CASE",
      "COLUMN",   "CREATE",  "CROSS",   "DEFAULT",  "DELETE",   "DESC",    "DESCRIBE", "DISTINCT",
      "DROP",     "ELSE",    "EXISTS",  "FROM",     "FULL",     "GRANT",   "GROUP",   "HAVING",
      "IN",       "INNER",   "INSERT",  "INTO",     "IS",       "JOIN",    "KEY",     "LEFT",
      "LIKE",     "LIMIT",   "MODIFY",  "NATURAL",  "NOT",      "NULL",    "OFFSET",  "ON",
      "OR",       "ORDER",   "OUTER",   "PRIMARY",  "REVOKE",   "RIGHT",   "SELECT",  "SET",
      "TABLE",    "THEN",    "TRUNCATE", "UNION",   "UPDATE",   "VALUES",  "WHEN",    "WHERE",
  };
  return words;
}

const std::set<std::string, std::less<>>& unsupported_starters() {
  static const std::set<std::string, std::less<>> words = {
      "ANALYZE", "BEGIN",   "CALL",   "CHECK",    "COMMIT",  "DEALLOCATE", "DO",
      "EXECUTE", "EXPLAIN", "FLUSH",  "HANDLER",  "INSTALL", "KILL",       "LOAD",
      "LOCK",    "MERGE",   "OPTIMIZE", "PREPARE", "RENAME", "REPAIR",     "REPLACE",
      "ROLLBACK", "SAVEPOINT", "SHOW", "START",   "UNLOCK",  "USE",        "WITH",
  };
  return words;
}

const std::set<std::string, std::less<>>& unsupported_types() {
  static const std::set<std::string, std::less<>> words = {
      "BIGINT", "BINARY", "BIT",    "BLOB",    "BOOL",     "BOOLEAN",  "CHAR",     "DATETIME",
      "DEC",    "DECIMAL", "DOUBLE", "ENUM",   "FLOAT",    "JSON",     "LONGTEXT", "MEDIUMINT",
      "MEDIUMTEXT", "NUMERIC", "REAL", "SMALLINT", "TEXT", "TIME",     "TIMESTAMP", "TINYINT",
      "TINYTEXT", "VARBINARY", "YEAR",
  };
  return words;
}

bool is_reserved(std::string_view upper) { return reserved_words().contains(upper); }

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(detail::tokenize(text)) {}

  Statement parse_single() {
    if (peek().kind == TokenKind::kEnd) {
      throw SqlError(SqlErrorKind::kParse, "empty query", 0, "");
    }
    Statement stmt = parse_statement();
    if (peek_symbol(";")) {
      advance();
      if (peek().kind != TokenKind::kEnd) {
        throw SqlError(SqlErrorKind::kMultiStatement,
                       "only one statement may be submitted", peek().offset, spell(peek()));
      }
    } else if (peek().kind != TokenKind::kEnd) {
      fail("unexpected token after end of statement");
    }
    return stmt;
  }

 private:
  // --- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  bool peek_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kWord && t.upper == kw;
  }

  bool peek_symbol(std::string_view sym, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kSymbol && t.text == sym;
  }

  bool accept_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    advance();
    return true;
  }

  bool accept_symbol(std::string_view sym) {
    if (!peek_symbol(sym)) return false;
    advance();
    return true;
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail("expected " + std::string(kw));
  }

  void expect_symbol(std::string_view sym) {
    if (!accept_symbol(sym)) fail("expected '" + std::string(sym) + "'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw SqlError(SqlErrorKind::kParse, message, peek().offset, spell(peek()));
  }

  [[noreturn]] void unsupported(const std::string& message) const {
    throw SqlError(SqlErrorKind::kUnsupported, message, peek().offset, spell(peek()));
  }

  std::string identifier(std::string_view what) {
    const Token& t = peek();
    if (t.kind == TokenKind::kQuotedIdent) return advance().text;
    if (t.kind == TokenKind::kWord && !is_reserved(t.upper)) return advance().text;
    fail("expected " + std::string(what));
  }

  std::string table_name() {
    std::string name = identifier("table name");
    if (peek_symbol(".")) unsupported("database-qualified table names are not supported");
    return name;
  }

  // --- statements ----------------------------------------------------------

  Statement parse_statement() {
    const Token& t = peek();
    if (t.kind != TokenKind::kWord) fail("expected a statement keyword");
    const std::string kw = t.upper;
    if (kw == "SELECT") return Statement{parse_select()};
    if (kw == "INSERT") return Statement{parse_insert()};
    if (kw == "UPDATE") return Statement{parse_update()};
    if (kw == "DELETE") return Statement{parse_delete()};
    if (kw == "CREATE") return Statement{parse_create()};
    if (kw == "DROP") return Statement{parse_drop()};
    if (kw == "ALTER") return Statement{parse_alter()};
    if (kw == "TRUNCATE") return Statement{parse_truncate()};
    if (kw == "DESCRIBE" || kw == "DESC") return Statement{parse_describe()};
    if (kw == "GRANT" || kw == "REVOKE") return Statement{parse_access_control()};
    if (unsupported_starters().contains(kw)) unsupported(kw + " statements are not supported");
    fail("unknown statement");
  }

  Select parse_select() {
    expect_keyword("SELECT");
    Select s;
    if (accept_keyword("DISTINCT")) s.distinct = true;
    else accept_keyword("ALL");
    do {
      s.items.push_back(parse_select_item());
    } while (accept_symbol(","));

    if (!accept_keyword("FROM")) {
      for (const auto& item : s.items) {
        if (item.kind == SelectItem::Kind::kStar) fail("SELECT * requires a FROM clause");
      }
      reject_unsupported_tail();
      return s;
    }
    if (peek_symbol("(")) unsupported("subqueries are not supported");
    s.from = table_name();
    if (accept_keyword("AS")) {
      s.from_alias = identifier("table alias");
    } else if (peek().kind == TokenKind::kQuotedIdent ||
               (peek().kind == TokenKind::kWord && !is_reserved(peek().upper))) {
      s.from_alias = advance().text;
    }
    if (peek_symbol(",")) unsupported("joins are not supported");
    if (peek_keyword("JOIN") || peek_keyword("INNER") || peek_keyword("LEFT") ||
        peek_keyword("RIGHT") || peek_keyword("CROSS") || peek_keyword("NATURAL") ||
        peek_keyword("FULL")) {
      unsupported("joins are not supported");
    }
    if (accept_keyword("WHERE")) s.where = parse_expr(0);
    if (peek_keyword("GROUP") || peek_keyword("HAVING")) unsupported("grouping is not supported");
    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      do {
        OrderItem item;
        item.column = parse_column_ref();
        if (accept_keyword("DESC")) item.descending = true;
        else accept_keyword("ASC");
        s.order_by.push_back(std::move(item));
      } while (accept_symbol(","));
    }
    if (accept_keyword("LIMIT")) {
      LimitClause limit;
      const std::int64_t first = non_negative_integer();
      if (accept_symbol(",")) {
        limit.offset = first;
        limit.count = non_negative_integer();
      } else {
        limit.count = first;
        if (accept_keyword("OFFSET")) limit.offset = non_negative_integer();
      }
      s.limit = limit;
    }
    reject_unsupported_tail();
    return s;
  }

  void reject_unsupported_tail() {
    if (peek_keyword("UNION")) unsupported("UNION is not supported");
    if (peek_keyword("GROUP") || peek_keyword("HAVING")) unsupported("grouping is not supported");
  }

  SelectItem parse_select_item() {
    SelectItem item;
    if (accept_symbol("*")) {
      item.kind = SelectItem::Kind::kStar;
      return item;
    }
    if (peek_symbol("(")) unsupported("subqueries and parenthesised expressions are not supported");
    if (is_literal_start()) {
      item.kind = SelectItem::Kind::kLiteral;
      item.literal = parse_literal();
    } else {
      if (peek().kind == TokenKind::kWord && peek_symbol("(", 1)) {
        unsupported("functions and aggregates are not supported");
      }
      item.kind = SelectItem::Kind::kColumn;
      item.column = parse_column_ref();
    }
    reject_arithmetic();
    if (accept_keyword("AS")) {
      item.alias = alias_name();
    } else if (peek().kind == TokenKind::kQuotedIdent ||
               (peek().kind == TokenKind::kWord && !is_reserved(peek().upper))) {
      item.alias = advance().text;
    }
    return item;
  }

  std::string alias_name() {
    if (peek().kind == TokenKind::kString) return advance().text;
    return identifier("alias");
  }

  void reject_arithmetic() {
    const Token& t = peek();
    if (t.kind == TokenKind::kSymbol &&
        (t.text == "+" || t.text == "-" || t.text == "*" || t.text == "/" || t.text == "%")) {
      unsupported("arithmetic expressions are not supported");
    }
  }

  Insert parse_insert() {
    expect_keyword("INSERT");
    expect_keyword("INTO");
    Insert ins;
    ins.table = table_name();
    if (accept_symbol("(")) {
      do {
        ins.columns.push_back(identifier("column name"));
      } while (accept_symbol(","));
      expect_symbol(")");
    }
    if (peek_keyword("SELECT")) unsupported("INSERT ... SELECT is not supported");
    if (!accept_keyword("VALUES") && !accept_keyword("VALUE")) fail("expected VALUES");
    do {
      expect_symbol("(");
      std::vector<Value> row;
      do {
        if (!is_literal_start()) fail("expected a literal value");
        row.push_back(parse_literal());
        reject_arithmetic();
      } while (accept_symbol(","));
      expect_symbol(")");
      ins.rows.push_back(std::move(row));
    } while (accept_symbol(","));
    return ins;
  }

  Update parse_update() {
    expect_keyword("UPDATE");
    Update up;
    up.table = table_name();
    expect_keyword("SET");
    do {
      Assignment a;
      ColumnRef ref = parse_column_ref();
      a.column = ref.column;
      expect_symbol("=");
      a.value = parse_operand();
      reject_arithmetic();
      up.assignments.push_back(std::move(a));
    } while (accept_symbol(","));
    if (accept_keyword("WHERE")) up.where = parse_expr(0);
    if (peek_keyword("ORDER") || peek_keyword("LIMIT")) {
      unsupported("ORDER BY / LIMIT on UPDATE is not supported");
    }
    return up;
  }

  Delete parse_delete() {
    expect_keyword("DELETE");
    expect_keyword("FROM");
    Delete del;
    del.table = table_name();
    if (accept_keyword("WHERE")) del.where = parse_expr(0);
    if (peek_keyword("ORDER") || peek_keyword("LIMIT")) {
      unsupported("ORDER BY / LIMIT on DELETE is not supported");
    }
    return del;
  }

  CreateTable parse_create() {
    expect_keyword("CREATE");
    if (!peek_keyword("TABLE")) unsupported("only CREATE TABLE is supported");
    advance();
    if (peek_keyword("IF")) unsupported("IF NOT EXISTS is not supported");
    CreateTable ct;
    ct.table = table_name();
    if (peek_keyword("AS") || peek_keyword("LIKE") || peek_keyword("SELECT")) {
      unsupported("CREATE TABLE from another table is not supported");
    }
    expect_symbol("(");
    do {
      ct.columns.push_back(parse_column_def());
    } while (accept_symbol(","));
    expect_symbol(")");
    return ct;
  }

  DropTable parse_drop() {
    expect_keyword("DROP");
    if (!peek_keyword("TABLE")) unsupported("only DROP TABLE is supported");
    advance();
    if (peek_keyword("IF")) unsupported("IF EXISTS is not supported");
    DropTable d;
    d.table = table_name();
    if (peek_symbol(",")) unsupported("dropping several tables at once is not supported");
    return d;
  }

  AlterTable parse_alter() {
    expect_keyword("ALTER");
    expect_keyword("TABLE");
    AlterTable alt;
    alt.table = table_name();
    if (accept_keyword("ADD")) {
      alt.action = AlterTable::Action::kAdd;
      accept_keyword("COLUMN");
      alt.column = parse_column_def();
    } else if (accept_keyword("DROP")) {
      alt.action = AlterTable::Action::kDrop;
      accept_keyword("COLUMN");
      alt.column.name = identifier("column name");
    } else if (accept_keyword("MODIFY")) {
      alt.action = AlterTable::Action::kModify;
      accept_keyword("COLUMN");
      alt.column = parse_column_def();
    } else if (peek_keyword("RENAME") || peek_keyword("CHANGE")) {
      unsupported("only ADD, DROP and MODIFY are supported in ALTER TABLE");
    } else {
      fail("expected ADD, DROP or MODIFY");
    }
    if (peek_symbol(",")) unsupported("multiple ALTER actions are not supported");
    return alt;
  }

  TruncateTable parse_truncate() {
    expect_keyword("TRUNCATE");
    accept_keyword("TABLE");
    return TruncateTable{table_name()};
  }

  Describe parse_describe() {
    advance();  // DESCRIBE / DESC
    return Describe{table_name()};
  }

  AccessControl parse_access_control() {
    AccessControl ac;
    ac.verb = advance().upper;
    while (peek().kind != TokenKind::kEnd && !peek_symbol(";")) {
      const Token& t = advance();
      if (t.kind == TokenKind::kWord && t.upper == "ON" && !ac.table) {
        const Token& obj = peek();
        if (obj.kind == TokenKind::kWord || obj.kind == TokenKind::kQuotedIdent) {
          ac.tokens.push_back(spell(t));
          if (obj.kind == TokenKind::kWord && obj.upper == "TABLE") {
            ac.tokens.push_back(spell(advance()));
          }
          if (peek().kind == TokenKind::kWord || peek().kind == TokenKind::kQuotedIdent) {
            ac.table = peek().text;
          }
          continue;
        }
      }
      ac.tokens.push_back(spell(t));
    }
    if (ac.tokens.empty()) fail("incomplete " + ac.verb + " statement");
    return ac;
  }

  ColumnDef parse_column_def() {
    ColumnDef def;
    def.name = identifier("column name");
    const Token& t = peek();
    if (t.kind != TokenKind::kWord) fail("expected a column type");
    const std::string type = t.upper;
    if (type == "INT" || type == "INTEGER") {
      advance();
      def.type = ColumnType::Int();
      if (accept_symbol("(")) {
        non_negative_integer();  // display width, ignored
        expect_symbol(")");
      }
    } else if (type == "VARCHAR") {
      advance();
      expect_symbol("(");
      const std::int64_t n = non_negative_integer();
      if (n < 1 || n > 65535) fail("VARCHAR length must be between 1 and 65535");
      expect_symbol(")");
      def.type = ColumnType::Varchar(static_cast<std::uint32_t>(n));
    } else if (type == "DATE") {
      advance();
      def.type = ColumnType::Date();
    } else if (unsupported_types().contains(type)) {
      unsupported("column type " + type + " is not supported");
    } else {
      fail("unknown column type");
    }
    if (accept_keyword("NOT")) {
      expect_keyword("NULL");
      def.nullable = false;
    } else {
      accept_keyword("NULL");
    }
    if (peek_keyword("PRIMARY") || peek_keyword("DEFAULT") || peek_keyword("UNIQUE") ||
        peek_keyword("AUTO_INCREMENT") || peek_keyword("REFERENCES") || peek_keyword("KEY")) {
      unsupported("column constraints are not supported");
    }
    return def;
  }

  // --- expressions ---------------------------------------------------------

  Expr parse_expr(int depth) {
    guard_depth(depth);
    Expr left = parse_and(depth + 1);
    while (accept_keyword("OR")) {
      left = Expr::disjunction(std::move(left), parse_and(depth + 1));
    }
    return left;
  }

  Expr parse_and(int depth) {
    guard_depth(depth);
    Expr left = parse_not(depth + 1);
    while (accept_keyword("AND")) {
      left = Expr::conjunction(std::move(left), parse_not(depth + 1));
    }
    return left;
  }

  Expr parse_not(int depth) {
    guard_depth(depth);
    if (accept_keyword("NOT")) return Expr::negation(parse_not(depth + 1));
    if (peek_keyword("EXISTS")) unsupported("subqueries are not supported");
    return parse_predicate(depth + 1);
  }

  Expr parse_predicate(int depth) {
    guard_depth(depth);
    if (accept_symbol("(")) {
      if (peek_keyword("SELECT")) unsupported("subqueries are not supported");
      Expr inner = parse_expr(depth + 1);
      expect_symbol(")");
      return inner;
    }
    if (peek().kind == TokenKind::kWord && peek_symbol("(", 1) && !is_reserved(peek().upper)) {
      unsupported("functions are not supported");
    }
    Operand lhs = parse_operand();
    reject_arithmetic();
    if (accept_keyword("IS")) {
      const bool negated = accept_keyword("NOT");
      expect_keyword("NULL");
      return Expr::is_null(std::move(lhs), negated);
    }
    bool negated = false;
    if (peek_keyword("NOT") &&
        (peek_keyword("LIKE", 1) || peek_keyword("IN", 1) || peek_keyword("BETWEEN", 1))) {
      advance();
      negated = true;
    }
    if (accept_keyword("LIKE")) {
      Operand pattern = parse_operand();
      if (peek_keyword("ESCAPE")) unsupported("LIKE ... ESCAPE is not supported");
      return Expr::like(std::move(lhs), std::move(pattern), negated);
    }
    if (peek_keyword("IN") || peek_keyword("BETWEEN") || peek_keyword("REGEXP") ||
        peek_keyword("RLIKE")) {
      unsupported(peek().upper + " predicates are not supported");
    }
    const Token& t = peek();
    if (t.kind != TokenKind::kSymbol) fail("expected a comparison operator");
    CompareOp op;
    if (t.text == "=") op = CompareOp::kEq;
    else if (t.text == "<>" || t.text == "!=") op = CompareOp::kNe;
    else if (t.text == "<") op = CompareOp::kLt;
    else if (t.text == "<=") op = CompareOp::kLe;
    else if (t.text == ">") op = CompareOp::kGt;
    else if (t.text == ">=") op = CompareOp::kGe;
    else fail("expected a comparison operator");
    advance();
    if (peek_symbol("(")) unsupported("subqueries are not supported");
    Operand rhs = parse_operand();
    reject_arithmetic();
    return Expr::compare(std::move(lhs), op, std::move(rhs));
  }

  void guard_depth(int depth) const {
    if (depth > kMaxExprDepth * 4) fail("expression nested too deeply");
  }

  Operand parse_operand() {
    if (is_literal_start()) return Operand{parse_literal()};
    if (peek().kind == TokenKind::kWord && peek_symbol("(", 1)) {
      unsupported("functions are not supported");
    }
    return Operand{parse_column_ref()};
  }

  ColumnRef parse_column_ref() {
    ColumnRef ref;
    std::string first = identifier("column name");
    if (accept_symbol(".")) {
      ref.table = std::move(first);
      if (peek_symbol("*")) unsupported("qualified * is not supported");
      ref.column = identifier("column name");
    } else {
      ref.column = std::move(first);
    }
    return ref;
  }

  bool is_literal_start() const {
    const Token& t = peek();
    if (t.kind == TokenKind::kInteger || t.kind == TokenKind::kString) return true;
    if (t.kind == TokenKind::kWord && t.upper == "NULL") return true;
    if (t.kind == TokenKind::kSymbol && t.text == "-" && peek(1).kind == TokenKind::kInteger) {
      return true;
    }
    return false;
  }

  Value parse_literal() {
    const Token& t = peek();
    if (t.kind == TokenKind::kString) return Value{advance().text};
    if (t.kind == TokenKind::kWord && t.upper == "NULL") {
      advance();
      return Value{};
    }
    bool negative = false;
    if (t.kind == TokenKind::kSymbol && t.text == "-") {
      advance();
      negative = true;
    }
    const Token& num = peek();
    if (num.kind != TokenKind::kInteger) fail("expected a literal value");
    const std::string digits = (negative ? "-" : "") + num.text;
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
      fail("integer literal out of range");
    }
    advance();
    return Value{value};
  }

  std::int64_t non_negative_integer() {
    const Token& t = peek();
    if (t.kind != TokenKind::kInteger) fail("expected a non-negative integer");
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc{}) fail("integer literal out of range");
    advance();
    return value;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Statement parse(std::string_view text) { return Parser(text).parse_single(); }

StatementClass classify(const Statement& stmt) { return stmt.statement_class(); }

}  // namespace qarena::sql

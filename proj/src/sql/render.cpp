#include <set>

#include "qarena/common/text.hpp"
#include "qarena/sql/parser.hpp"

namespace qarena::sql {
namespace {

// Words that would be read as keywords (or rejected) in an identifier position.
bool needs_quoting_as_word(std::string_view upper) {
  static const std::set<std::string, std::less<>> words = {
      "ADD",     "ALL",      "ALTER",    "AND",      "AS",       "ASC",     "AUTO_INCREMENT",
      "BETWEEN", "BY",       "CASE",     "COLUMN",   "CREATE",   "CROSS",   "DEFAULT",
      "DELETE",  "DESC",     "DESCRIBE", "DISTINCT", "DROP",     "ELSE",    "ESCAPE",
      "EXISTS",  "FROM",     "FULL",     "GRANT",    "GROUP",    "HAVING",  "IF",
      "IN",      "INNER",    "INSERT",   "INTO",     "IS",       "JOIN",    "KEY",
      "LEFT",    "LIKE",     "LIMIT",    "MODIFY",   "NATURAL",  "NOT",     "NULL",
      "OFFSET",  "ON",       "OR",       "ORDER",    "OUTER",    "PRIMARY", "REFERENCES",
      "REGEXP",  "REVOKE",   "RIGHT",    "RLIKE",    "SELECT",   "SET",     "TABLE",
      "THEN",    "TRUNCATE", "UNION",    "UNIQUE",   "UPDATE",   "VALUE",   "VALUES",
      "WHEN",    "WHERE",
  };
  return words.contains(upper);
}

std::string operand(const Operand& o) {
  if (!o.is_column()) return render_literal(o.literal());
  const ColumnRef& ref = o.column();
  if (ref.table.empty()) return render_identifier(ref.column);
  return render_identifier(ref.table) + "." + render_identifier(ref.column);
}

std::string column_ref(const ColumnRef& ref) { return operand(Operand{ref}); }

bool is_connective(const Expr& e) {
  return e.kind == Expr::Kind::kAnd || e.kind == Expr::Kind::kOr;
}

std::string expr(const Expr& e);

std::string child(const Expr& parent, const Expr& c, bool left) {
  if (!is_connective(c)) return expr(c);
  if (left && c.kind == parent.kind) return expr(c);
  return "(" + expr(c) + ")";
}

std::string expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kCompare:
      return operand(e.lhs) + " " + std::string(to_sql(e.op)) + " " + operand(e.rhs);
    case Expr::Kind::kLike:
      return operand(e.lhs) + (e.negated ? " NOT LIKE " : " LIKE ") + operand(e.rhs);
    case Expr::Kind::kIsNull:
      return operand(e.lhs) + (e.negated ? " IS NOT NULL" : " IS NULL");
    case Expr::Kind::kAnd:
      return child(e, e.children[0], true) + " AND " + child(e, e.children[1], false);
    case Expr::Kind::kOr:
      return child(e, e.children[0], true) + " OR " + child(e, e.children[1], false);
    case Expr::Kind::kNot: {
      const Expr& inner = e.children[0];
      if (is_connective(inner)) return "NOT (" + expr(inner) + ")";
      return "NOT " + expr(inner);
    }
  }
  return {};
}

std::string column_def(const ColumnDef& def) {
  return render_identifier(def.name) + " " + def.type.to_sql() + (def.nullable ? "" : " NOT NULL");
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& f, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += f(items[i]);
  }
  return out;
}

struct Renderer {
  std::string operator()(const CreateTable& s) const {
    return "CREATE TABLE " + render_identifier(s.table) + " (" + join(s.columns, column_def) + ")";
  }
  std::string operator()(const DropTable& s) const {
    return "DROP TABLE " + render_identifier(s.table);
  }
  std::string operator()(const AlterTable& s) const {
    std::string out = "ALTER TABLE " + render_identifier(s.table);
    switch (s.action) {
      case AlterTable::Action::kAdd: return out + " ADD COLUMN " + column_def(s.column);
      case AlterTable::Action::kDrop: return out + " DROP COLUMN " + render_identifier(s.column.name);
      case AlterTable::Action::kModify: return out + " MODIFY COLUMN " + column_def(s.column);
    }
    return out;
  }
  std::string operator()(const TruncateTable& s) const {
    return "TRUNCATE TABLE " + render_identifier(s.table);
  }
  std::string operator()(const Describe& s) const {
    return "DESCRIBE " + render_identifier(s.table);
  }
  std::string operator()(const Select& s) const {
    std::string out = s.distinct ? "SELECT DISTINCT " : "SELECT ";
    out += join(s.items, [](const SelectItem& item) {
      std::string text;
      switch (item.kind) {
        case SelectItem::Kind::kStar: text = "*"; break;
        case SelectItem::Kind::kColumn: text = column_ref(item.column); break;
        case SelectItem::Kind::kLiteral: text = render_literal(item.literal); break;
      }
      if (!item.alias.empty()) text += " AS " + render_identifier(item.alias);
      return text;
    });
    if (s.from) {
      out += " FROM " + render_identifier(*s.from);
      if (!s.from_alias.empty()) out += " AS " + render_identifier(s.from_alias);
    }
    if (s.where) out += " WHERE " + expr(*s.where);
    if (!s.order_by.empty()) {
      out += " ORDER BY " + join(s.order_by, [](const OrderItem& o) {
        return column_ref(o.column) + (o.descending ? " DESC" : " ASC");
      });
    }
    if (s.limit) {
      out += " LIMIT " + std::to_string(s.limit->count);
      if (s.limit->offset != 0) out += " OFFSET " + std::to_string(s.limit->offset);
    }
    return out;
  }
  std::string operator()(const Insert& s) const {
    std::string out = "INSERT INTO " + render_identifier(s.table);
    if (!s.columns.empty()) {
      out += " (" + join(s.columns, [](const std::string& c) { return render_identifier(c); }) + ")";
    }
    out += " VALUES ";
    out += join(s.rows, [](const std::vector<Value>& row) {
      return "(" + join(row, [](const Value& v) { return render_literal(v); }) + ")";
    });
    return out;
  }
  std::string operator()(const Update& s) const {
    std::string out = "UPDATE " + render_identifier(s.table) + " SET ";
    out += join(s.assignments, [](const Assignment& a) {
      return render_identifier(a.column) + " = " + operand(a.value);
    });
    if (s.where) out += " WHERE " + expr(*s.where);
    return out;
  }
  std::string operator()(const Delete& s) const {
    std::string out = "DELETE FROM " + render_identifier(s.table);
    if (s.where) out += " WHERE " + expr(*s.where);
    return out;
  }
  std::string operator()(const AccessControl& s) const {
    return s.verb + " " + join(s.tokens, [](const std::string& t) { return t; }, " ");
  }
};

}  // namespace

std::string render_identifier(std::string_view name) {
  bool bare = !name.empty();
  bool all_digits = true;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    const bool word = std::isalnum(u) != 0 || c == '_' || c == '$' || u >= 0x80;
    bare = bare && word;
    all_digits = all_digits && std::isdigit(u) != 0;
  }
  if (bare && !all_digits && !needs_quoting_as_word(to_upper(name))) return std::string(name);
  std::string out = "`";
  for (char c : name) {
    if (c == '`') out.push_back('`');
    out.push_back(c);
  }
  out.push_back('`');
  return out;
}

std::string render(const Statement& stmt) { return std::visit(Renderer{}, stmt.body()); }

std::string render(const Expr& e) { return expr(e); }

}  // namespace qarena::sql

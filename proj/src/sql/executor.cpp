#include "qarena/sql/executor.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "qarena/common/text.hpp"
#include "qarena/sql/errors.hpp"
#include "qarena/sql/parser.hpp"

namespace qarena::sql {
namespace {

enum class Tri { kFalse, kTrue, kUnknown };

Tri tri_not(Tri t) {
  if (t == Tri::kUnknown) return t;
  return t == Tri::kTrue ? Tri::kFalse : Tri::kTrue;
}

class Budget {
 public:
  explicit Budget(std::chrono::milliseconds budget)
      : deadline_(std::chrono::steady_clock::now() + budget) {}

  void tick() const {
    if (std::chrono::steady_clock::now() >= deadline_) {
      throw SqlError(SqlErrorKind::kResourceLimit, "statement exceeded its evaluation budget");
    }
  }

 private:
  std::chrono::steady_clock::time_point deadline_;
};

[[noreturn]] void unknown_table(std::string_view name) {
  throw SqlError(SqlErrorKind::kUnknownTable, "table '" + std::string(name) + "' doesn't exist");
}

[[noreturn]] void unknown_column(const ColumnRef& ref) {
  const std::string shown = ref.table.empty() ? ref.column : ref.table + "." + ref.column;
  throw SqlError(SqlErrorKind::kUnknownColumn, "unknown column '" + shown + "'");
}

TableState& lookup(Database& db, std::string_view name) {
  TableState* t = db.find(name);
  if (t == nullptr) unknown_table(name);
  return *t;
}

// Name scope for column references inside one statement.
struct Scope {
  const TableState* table = nullptr;
  std::string_view alias;

  std::size_t resolve(const ColumnRef& ref) const {
    if (table == nullptr) unknown_column(ref);
    if (!ref.table.empty() && !iequals(ref.table, table->name) &&
        !(!alias.empty() && iequals(ref.table, alias))) {
      unknown_column(ref);
    }
    const auto idx = table->column_index(ref.column);
    if (!idx) unknown_column(ref);
    return *idx;
  }
};

enum class Family { kNull, kInt, kText };

struct BoundOperand {
  bool is_column = false;
  std::size_t index = 0;
  Value literal;
  Family family = Family::kNull;

  const Value& get(const Row& row) const { return is_column ? row[index] : literal; }
};

Family family_of(const Value& v) {
  if (is_null(v)) return Family::kNull;
  return std::holds_alternative<std::int64_t>(v) ? Family::kInt : Family::kText;
}

BoundOperand bind(const Operand& op, const Scope& scope) {
  BoundOperand b;
  if (op.is_column()) {
    b.is_column = true;
    b.index = scope.resolve(op.column());
    b.family = scope.table->columns[b.index].type.kind == TypeKind::kInt ? Family::kInt
                                                                         : Family::kText;
  } else {
    b.literal = op.literal();
    b.family = family_of(b.literal);
  }
  return b;
}

struct BoundExpr {
  Expr::Kind kind = Expr::Kind::kCompare;
  CompareOp op = CompareOp::kEq;
  bool negated = false;
  BoundOperand lhs, rhs;
  std::vector<BoundExpr> children;
};

BoundExpr bind(const Expr& e, const Scope& scope) {
  BoundExpr b;
  b.kind = e.kind;
  b.op = e.op;
  b.negated = e.negated;
  switch (e.kind) {
    case Expr::Kind::kCompare:
      b.lhs = bind(e.lhs, scope);
      b.rhs = bind(e.rhs, scope);
      if (b.lhs.family != Family::kNull && b.rhs.family != Family::kNull &&
          b.lhs.family != b.rhs.family) {
        throw SqlError(SqlErrorKind::kTypeMismatch,
                       "cannot compare integer with text in '" + render(e) + "'");
      }
      break;
    case Expr::Kind::kLike:
      b.lhs = bind(e.lhs, scope);
      b.rhs = bind(e.rhs, scope);
      break;
    case Expr::Kind::kIsNull:
      b.lhs = bind(e.lhs, scope);
      break;
    default:
      for (const auto& c : e.children) b.children.push_back(bind(c, scope));
  }
  return b;
}

Tri compare_values(const Value& a, const Value& b, CompareOp op) {
  if (is_null(a) || is_null(b)) return Tri::kUnknown;
  int cmp = 0;
  if (const auto* ia = std::get_if<std::int64_t>(&a)) {
    const auto ib = std::get<std::int64_t>(b);
    cmp = *ia < ib ? -1 : (*ia > ib ? 1 : 0);
  } else {
    const int c = std::get<std::string>(a).compare(std::get<std::string>(b));
    cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  bool r = false;
  switch (op) {
    case CompareOp::kEq: r = cmp == 0; break;
    case CompareOp::kNe: r = cmp != 0; break;
    case CompareOp::kLt: r = cmp < 0; break;
    case CompareOp::kLe: r = cmp <= 0; break;
    case CompareOp::kGt: r = cmp > 0; break;
    case CompareOp::kGe: r = cmp >= 0; break;
  }
  return r ? Tri::kTrue : Tri::kFalse;
}

Tri eval(const BoundExpr& e, const Row& row) {
  switch (e.kind) {
    case Expr::Kind::kCompare:
      return compare_values(e.lhs.get(row), e.rhs.get(row), e.op);
    case Expr::Kind::kLike: {
      const Value& text = e.lhs.get(row);
      const Value& pattern = e.rhs.get(row);
      if (is_null(text) || is_null(pattern)) return Tri::kUnknown;
      const bool m = like_match(render_value(text), render_value(pattern));
      return (m != e.negated) ? Tri::kTrue : Tri::kFalse;
    }
    case Expr::Kind::kIsNull:
      return (is_null(e.lhs.get(row)) != e.negated) ? Tri::kTrue : Tri::kFalse;
    case Expr::Kind::kAnd: {
      const Tri l = eval(e.children[0], row);
      if (l == Tri::kFalse) return Tri::kFalse;
      const Tri r = eval(e.children[1], row);
      if (r == Tri::kFalse) return Tri::kFalse;
      return (l == Tri::kTrue && r == Tri::kTrue) ? Tri::kTrue : Tri::kUnknown;
    }
    case Expr::Kind::kOr: {
      const Tri l = eval(e.children[0], row);
      if (l == Tri::kTrue) return Tri::kTrue;
      const Tri r = eval(e.children[1], row);
      if (r == Tri::kTrue) return Tri::kTrue;
      return (l == Tri::kFalse && r == Tri::kFalse) ? Tri::kFalse : Tri::kUnknown;
    }
    case Expr::Kind::kNot:
      return tri_not(eval(e.children[0], row));
  }
  return Tri::kUnknown;
}

// Indices of rows satisfying the optional WHERE clause, in storage order.
std::vector<std::size_t> filter_rows(const TableState& table, const std::optional<Expr>& where,
                                     const Scope& scope, const Budget& budget) {
  std::optional<BoundExpr> bound;
  if (where) bound = bind(*where, scope);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    budget.tick();
    if (!bound || eval(*bound, table.rows[i]) == Tri::kTrue) out.push_back(i);
  }
  return out;
}

// NULL sorts first, then integers, then text.
int order_compare(const Value& a, const Value& b) {
  if (a == b) return 0;
  return a < b ? -1 : 1;
}

ExecOutcome run_select(Database& db, const Select& s, const Budget& budget) {
  ResultSet rs;
  rs.ordered = !s.order_by.empty();
  if (!s.from) {
    Row row;
    for (const auto& item : s.items) {
      if (item.kind != SelectItem::Kind::kLiteral) unknown_column(item.column);
      rs.columns.push_back(item.alias.empty() ? render_value(item.literal) : item.alias);
      row.push_back(item.literal);
    }
    rs.rows.push_back(std::move(row));
    return ExecOutcome{std::move(rs)};
  }

  const TableState& table = lookup(db, *s.from);
  const Scope scope{&table, s.from_alias};

  struct Projection {
    bool is_column;
    std::size_t index;
    Value literal;
  };
  std::vector<Projection> proj;
  for (const auto& item : s.items) {
    switch (item.kind) {
      case SelectItem::Kind::kStar:
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
          proj.push_back({true, i, {}});
          rs.columns.push_back(table.columns[i].name);
        }
        break;
      case SelectItem::Kind::kColumn: {
        const std::size_t idx = scope.resolve(item.column);
        proj.push_back({true, idx, {}});
        rs.columns.push_back(item.alias.empty() ? table.columns[idx].name : item.alias);
        break;
      }
      case SelectItem::Kind::kLiteral:
        proj.push_back({false, 0, item.literal});
        rs.columns.push_back(item.alias.empty() ? render_value(item.literal) : item.alias);
        break;
    }
  }

  std::vector<std::pair<std::size_t, bool>> keys;
  for (const auto& o : s.order_by) keys.emplace_back(scope.resolve(o.column), o.descending);

  std::vector<std::size_t> picked = filter_rows(table, s.where, scope, budget);
  if (!keys.empty()) {
    std::stable_sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
      for (const auto& [col, desc] : keys) {
        const int c = order_compare(table.rows[a][col], table.rows[b][col]);
        if (c != 0) return desc ? c > 0 : c < 0;
      }
      return false;
    });
  }

  std::set<Row> seen;
  const std::int64_t offset = s.limit ? s.limit->offset : 0;
  std::int64_t skipped = 0;
  for (std::size_t idx : picked) {
    budget.tick();
    if (s.limit && static_cast<std::int64_t>(rs.rows.size()) >= s.limit->count) break;
    Row out;
    out.reserve(proj.size());
    for (const auto& p : proj) out.push_back(p.is_column ? table.rows[idx][p.index] : p.literal);
    if (s.distinct && !seen.insert(out).second) continue;
    if (skipped < offset) {
      ++skipped;
      continue;
    }
    rs.rows.push_back(std::move(out));
  }
  return ExecOutcome{std::move(rs)};
}

ExecOutcome run_insert(Database& db, const Insert& ins, const ExecLimits& limits) {
  TableState& table = lookup(db, ins.table);
  std::vector<std::size_t> targets;
  if (ins.columns.empty()) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) targets.push_back(i);
  } else {
    std::set<std::size_t> seen;
    for (const auto& name : ins.columns) {
      const auto idx = table.column_index(name);
      if (!idx) unknown_column(ColumnRef{"", name});
      if (!seen.insert(*idx).second) {
        throw SqlError(SqlErrorKind::kInvalidSchema, "column '" + name + "' specified twice");
      }
      targets.push_back(*idx);
    }
  }
  std::vector<Row> fresh;
  fresh.reserve(ins.rows.size());
  for (std::size_t r = 0; r < ins.rows.size(); ++r) {
    const auto& values = ins.rows[r];
    if (values.size() != targets.size()) {
      throw SqlError(SqlErrorKind::kArityMismatch,
                     "row " + std::to_string(r + 1) + " has " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(targets.size()));
    }
    Row row(table.columns.size());
    for (std::size_t i = 0; i < targets.size(); ++i) row[targets[i]] = values[i];
    for (std::size_t c = 0; c < row.size(); ++c) check_conforms(row[c], table.columns[c]);
    fresh.push_back(std::move(row));
  }
  if (table.rows.size() + fresh.size() > limits.max_rows_per_table) {
    throw SqlError(SqlErrorKind::kResourceLimit,
                   "table '" + table.name + "' would exceed " +
                       std::to_string(limits.max_rows_per_table) + " rows");
  }
  for (auto& row : fresh) table.rows.push_back(std::move(row));
  return ExecOutcome{AffectedCount{fresh.size()}};
}

ExecOutcome run_update(Database& db, const Update& up, const Budget& budget) {
  TableState& table = lookup(db, up.table);
  const Scope scope{&table, {}};
  struct BoundAssignment {
    std::size_t target;
    BoundOperand source;
  };
  std::vector<BoundAssignment> sets;
  for (const auto& a : up.assignments) {
    const std::size_t target = scope.resolve(ColumnRef{"", a.column});
    BoundOperand source = bind(a.value, scope);
    if (!source.is_column) check_conforms(source.literal, table.columns[target]);
    sets.push_back({target, std::move(source)});
  }
  const std::vector<std::size_t> picked = filter_rows(table, up.where, scope, budget);
  std::vector<Row> rows = table.rows;
  for (std::size_t idx : picked) {
    budget.tick();
    const Row& before = table.rows[idx];
    for (const auto& s : sets) {
      const Value& v = s.source.get(before);
      check_conforms(v, table.columns[s.target]);
      rows[idx][s.target] = v;
    }
  }
  table.rows = std::move(rows);
  return ExecOutcome{AffectedCount{picked.size()}};
}

ExecOutcome run_delete(Database& db, const Delete& del, const Budget& budget) {
  TableState& table = lookup(db, del.table);
  const Scope scope{&table, {}};
  const std::vector<std::size_t> picked = filter_rows(table, del.where, scope, budget);
  std::vector<Row> kept;
  kept.reserve(table.rows.size() - picked.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (next < picked.size() && picked[next] == i) {
      ++next;
      continue;
    }
    kept.push_back(table.rows[i]);
  }
  table.rows = std::move(kept);
  return ExecOutcome{AffectedCount{picked.size()}};
}

std::optional<Value> convert(const Value& v, const ColumnDef& to) {
  if (is_null(v)) return v;
  switch (to.type.kind) {
    case TypeKind::kInt: {
      if (std::holds_alternative<std::int64_t>(v)) return v;
      const std::string& s = std::get<std::string>(v);
      std::int64_t n = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
      if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
      return Value{n};
    }
    case TypeKind::kVarchar:
      return Value{render_value(v)};
    case TypeKind::kDate:
      if (std::holds_alternative<std::int64_t>(v)) return std::nullopt;
      return v;
  }
  return std::nullopt;
}

ExecOutcome run_alter(Database& db, const AlterTable& alt) {
  TableState table = lookup(db, alt.table);
  switch (alt.action) {
    case AlterTable::Action::kAdd:
      if (table.column_index(alt.column.name)) {
        throw SqlError(SqlErrorKind::kInvalidSchema,
                       "column '" + alt.column.name + "' already exists");
      }
      if (!alt.column.nullable && !table.rows.empty()) {
        throw SqlError(SqlErrorKind::kTypeMismatch,
                       "cannot add NOT NULL column '" + alt.column.name + "' to a non-empty table");
      }
      table.columns.push_back(alt.column);
      for (auto& row : table.rows) row.emplace_back();
      break;
    case AlterTable::Action::kDrop: {
      const auto idx = table.column_index(alt.column.name);
      if (!idx) unknown_column(ColumnRef{"", alt.column.name});
      if (table.columns.size() == 1) {
        throw SqlError(SqlErrorKind::kInvalidSchema, "cannot drop the only column of a table");
      }
      table.columns.erase(table.columns.begin() + static_cast<std::ptrdiff_t>(*idx));
      for (auto& row : table.rows) row.erase(row.begin() + static_cast<std::ptrdiff_t>(*idx));
      break;
    }
    case AlterTable::Action::kModify: {
      const auto idx = table.column_index(alt.column.name);
      if (!idx) unknown_column(ColumnRef{"", alt.column.name});
      for (auto& row : table.rows) {
        auto converted = convert(row[*idx], alt.column);
        if (!converted) {
          throw SqlError(SqlErrorKind::kTypeMismatch,
                         "value '" + render_value(row[*idx]) + "' cannot be converted to " +
                             alt.column.type.to_sql());
        }
        check_conforms(*converted, alt.column);
        row[*idx] = std::move(*converted);
      }
      table.columns[*idx] = alt.column;
      break;
    }
  }
  table.validate();
  db.put(std::move(table));
  return ExecOutcome{AffectedCount{0}};
}

ExecOutcome run_describe(Database& db, const Describe& d) {
  const TableState& table = lookup(db, d.table);
  ResultSet rs;
  rs.columns = {"Field", "Type", "Null"};
  rs.ordered = true;
  for (const auto& c : table.columns) {
    rs.rows.push_back({Value{c.name}, Value{c.type.to_describe()}, Value{std::string(c.nullable ? "YES" : "NO")}});
  }
  return ExecOutcome{std::move(rs)};
}

struct Runner {
  Database& db;
  const ExecLimits& limits;
  const Budget& budget;

  ExecOutcome operator()(const CreateTable& ct) const {
    TableState t{ct.table, ct.columns, {}};
    t.validate();
    db.create(std::move(t));
    return ExecOutcome{AffectedCount{0}};
  }
  ExecOutcome operator()(const DropTable& d) const {
    if (!db.drop(d.table)) unknown_table(d.table);
    return ExecOutcome{AffectedCount{0}};
  }
  ExecOutcome operator()(const AlterTable& a) const { return run_alter(db, a); }
  ExecOutcome operator()(const TruncateTable& t) const {
    lookup(db, t.table).rows.clear();
    return ExecOutcome{AffectedCount{0}};
  }
  ExecOutcome operator()(const Describe& d) const { return run_describe(db, d); }
  ExecOutcome operator()(const Select& s) const { return run_select(db, s, budget); }
  ExecOutcome operator()(const Insert& i) const { return run_insert(db, i, limits); }
  ExecOutcome operator()(const Update& u) const { return run_update(db, u, budget); }
  ExecOutcome operator()(const Delete& d) const { return run_delete(db, d, budget); }
  ExecOutcome operator()(const AccessControl& a) const {
    throw SqlError(SqlErrorKind::kUnsupported, a.verb + " statements are never executed");
  }
};

}  // namespace

ExecOutcome execute(Database& db, const Statement& stmt, const ExecLimits& limits) {
  const Budget budget(limits.time_budget);
  return std::visit(Runner{db, limits, budget}, stmt.body());
}

std::string serialize_result(const ResultSet& rs) { return serialize_result(rs, rs.ordered); }

std::string serialize_result(const ResultSet& rs, bool ordered) {
  std::vector<std::string> lines;
  lines.reserve(rs.rows.size());
  for (const auto& row : rs.rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line.push_back('|');
      line += render_value(row[i]);
    }
    lines.push_back(std::move(line));
  }
  if (!ordered) std::sort(lines.begin(), lines.end());
  std::string out;
  for (std::size_t i = 0; i < rs.columns.size(); ++i) {
    if (i > 0) out.push_back('|');
    out += rs.columns[i];
  }
  for (const auto& line : lines) {
    out.push_back('\n');
    out += line;
  }
  return out;
}

bool like_match(std::string_view text, std::string_view pattern) {
  // Split into UTF-8 characters so '_' consumes one character.
  auto chars = [](std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t j = i + 1;
      while (j < s.size() && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80) ++j;
      out.push_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  };
  const auto t = chars(text);
  const auto p = chars(pattern);
  std::size_t ti = 0, pi = 0;
  std::size_t star = std::string_view::npos, mark = 0;
  while (ti < t.size()) {
    if (pi < p.size() && (p[pi] == "_" || p[pi] == t[ti])) {
      ++ti;
      ++pi;
    } else if (pi < p.size() && p[pi] == "%") {
      star = pi++;
      mark = ti;
    } else if (star != std::string_view::npos) {
      pi = star + 1;
      ti = ++mark;
    } else {
      return false;
    }
  }
  while (pi < p.size() && p[pi] == "%") ++pi;
  return pi == p.size();
}

}  // namespace qarena::sql

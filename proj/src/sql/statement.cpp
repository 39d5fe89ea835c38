#include "qarena/sql/statement.hpp"

#include "qarena/common/text.hpp"
#include "qarena/sql/errors.hpp"

namespace qarena::sql {

std::string_view to_string(StatementClass c) {
  switch (c) {
    case StatementClass::kCreate: return "CREATE";
    case StatementClass::kDrop: return "DROP";
    case StatementClass::kAlter: return "ALTER";
    case StatementClass::kTruncate: return "TRUNCATE";
    case StatementClass::kDescribe: return "DESCRIBE";
    case StatementClass::kSelect: return "SELECT";
    case StatementClass::kInsert: return "INSERT";
    case StatementClass::kUpdate: return "UPDATE";
    case StatementClass::kDelete: return "DELETE";
    case StatementClass::kDclOther: return "DCL_OTHER";
  }
  return "UNKNOWN";
}

std::optional<StatementClass> statement_class_from_string(std::string_view name) {
  for (StatementClass c : kAllStatementClasses) {
    if (iequals(to_string(c), name)) return c;
  }
  return std::nullopt;
}

std::string_view to_string(SqlErrorKind kind) {
  switch (kind) {
    case SqlErrorKind::kParse: return "PARSE_ERROR";
    case SqlErrorKind::kMultiStatement: return "MULTI_STATEMENT";
    case SqlErrorKind::kUnsupported: return "UNSUPPORTED";
    case SqlErrorKind::kUnknownTable: return "UNKNOWN_TABLE";
    case SqlErrorKind::kUnknownColumn: return "UNKNOWN_COLUMN";
    case SqlErrorKind::kTypeMismatch: return "TYPE_MISMATCH";
    case SqlErrorKind::kDuplicateTable: return "DUPLICATE_TABLE";
    case SqlErrorKind::kArityMismatch: return "ARITY_MISMATCH";
    case SqlErrorKind::kResourceLimit: return "RESOURCE_LIMIT";
    case SqlErrorKind::kInvalidSchema: return "INVALID_SCHEMA";
  }
  return "UNKNOWN";
}

std::string_view to_sql(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "<>";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
  }
  return "=";
}

Expr Expr::compare(Operand l, CompareOp op, Operand r) {
  Expr e;
  e.kind = Kind::kCompare;
  e.op = op;
  e.lhs = std::move(l);
  e.rhs = std::move(r);
  return e;
}

Expr Expr::like(Operand l, Operand pattern, bool negated) {
  Expr e;
  e.kind = Kind::kLike;
  e.negated = negated;
  e.lhs = std::move(l);
  e.rhs = std::move(pattern);
  return e;
}

Expr Expr::is_null(Operand l, bool negated) {
  Expr e;
  e.kind = Kind::kIsNull;
  e.negated = negated;
  e.lhs = std::move(l);
  return e;
}

Expr Expr::conjunction(Expr l, Expr r) {
  Expr e;
  e.kind = Kind::kAnd;
  e.children.push_back(std::move(l));
  e.children.push_back(std::move(r));
  return e;
}

Expr Expr::disjunction(Expr l, Expr r) {
  Expr e;
  e.kind = Kind::kOr;
  e.children.push_back(std::move(l));
  e.children.push_back(std::move(r));
  return e;
}

Expr Expr::negation(Expr inner) {
  Expr e;
  e.kind = Kind::kNot;
  e.children.push_back(std::move(inner));
  return e;
}

StatementClass Statement::statement_class() const {
  struct Visitor {
    StatementClass operator()(const CreateTable&) const { return StatementClass::kCreate; }
    StatementClass operator()(const DropTable&) const { return StatementClass::kDrop; }
    StatementClass operator()(const AlterTable&) const { return StatementClass::kAlter; }
    StatementClass operator()(const TruncateTable&) const { return StatementClass::kTruncate; }
    StatementClass operator()(const Describe&) const { return StatementClass::kDescribe; }
    StatementClass operator()(const Select&) const { return StatementClass::kSelect; }
    StatementClass operator()(const Insert&) const { return StatementClass::kInsert; }
    StatementClass operator()(const Update&) const { return StatementClass::kUpdate; }
    StatementClass operator()(const Delete&) const { return StatementClass::kDelete; }
    StatementClass operator()(const AccessControl&) const { return StatementClass::kDclOther; }
  };
  return std::visit(Visitor{}, body_);
}

std::optional<std::string> Statement::target_table() const {
  return std::visit(
      [](const auto& s) -> std::optional<std::string> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Select>) {
          return s.from;
        } else {
          return s.table;
        }
      },
      body_);
}

bool Statement::has_order_by() const {
  const auto* s = as<Select>();
  return s != nullptr && !s->order_by.empty();
}

}  // namespace qarena::sql

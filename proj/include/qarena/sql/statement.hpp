#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qarena/sql/value.hpp"

namespace qarena::sql {

enum class StatementClass {
  kCreate,
  kDrop,
  kAlter,
  kTruncate,
  kDescribe,
  kSelect,
  kInsert,
  kUpdate,
  kDelete,
  kDclOther,
};

inline constexpr StatementClass kAllStatementClasses[] = {
    StatementClass::kCreate, StatementClass::kDrop,     StatementClass::kAlter,
    StatementClass::kTruncate, StatementClass::kDescribe, StatementClass::kSelect,
    StatementClass::kInsert, StatementClass::kUpdate,   StatementClass::kDelete,
    StatementClass::kDclOther,
};

// "CREATE", ..., "DCL_OTHER"
std::string_view to_string(StatementClass c);
std::optional<StatementClass> statement_class_from_string(std::string_view name);

struct ColumnDef {
  std::string name;
  ColumnType type;
  bool nullable = true;

  bool operator==(const ColumnDef&) const = default;
};

struct ColumnRef {
  std::string table;  // optional qualifier, empty when absent
  std::string column;

  bool operator==(const ColumnRef&) const = default;
};

struct Operand {
  std::variant<ColumnRef, Value> term;

  bool is_column() const { return std::holds_alternative<ColumnRef>(term); }
  const ColumnRef& column() const { return std::get<ColumnRef>(term); }
  const Value& literal() const { return std::get<Value>(term); }

  bool operator==(const Operand&) const = default;
};

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };

std::string_view to_sql(CompareOp op);

struct Expr {
  enum class Kind { kCompare, kLike, kIsNull, kAnd, kOr, kNot };

  Kind kind = Kind::kCompare;
  CompareOp op = CompareOp::kEq;  // kCompare
  bool negated = false;           // NOT LIKE, IS NOT NULL
  Operand lhs;                    // kCompare, kLike, kIsNull
  Operand rhs;                    // kCompare, kLike
  std::vector<Expr> children;     // kAnd, kOr (two), kNot (one)

  static Expr compare(Operand l, CompareOp op, Operand r);
  static Expr like(Operand l, Operand pattern, bool negated);
  static Expr is_null(Operand l, bool negated);
  static Expr conjunction(Expr l, Expr r);
  static Expr disjunction(Expr l, Expr r);
  static Expr negation(Expr e);

  bool operator==(const Expr&) const = default;
};

struct SelectItem {
  enum class Kind { kStar, kColumn, kLiteral };

  Kind kind = Kind::kStar;
  ColumnRef column;
  Value literal;
  std::string alias;

  bool operator==(const SelectItem&) const = default;
};

struct OrderItem {
  ColumnRef column;
  bool descending = false;

  bool operator==(const OrderItem&) const = default;
};

struct LimitClause {
  std::int64_t count = 0;
  std::int64_t offset = 0;

  bool operator==(const LimitClause&) const = default;
};

struct CreateTable {
  std::string table;
  std::vector<ColumnDef> columns;
  bool operator==(const CreateTable&) const = default;
};

struct DropTable {
  std::string table;
  bool operator==(const DropTable&) const = default;
};

struct AlterTable {
  enum class Action { kAdd, kDrop, kModify };
  std::string table;
  Action action = Action::kAdd;
  ColumnDef column;  // kDrop uses only the name
  bool operator==(const AlterTable&) const = default;
};

struct TruncateTable {
  std::string table;
  bool operator==(const TruncateTable&) const = default;
};

struct Describe {
  std::string table;
  bool operator==(const Describe&) const = default;
};

struct Select {
  bool distinct = false;
  std::vector<SelectItem> items;
  std::optional<std::string> from;
  std::string from_alias;
  std::optional<Expr> where;
  std::vector<OrderItem> order_by;
  std::optional<LimitClause> limit;
  bool operator==(const Select&) const = default;
};

struct Insert {
  std::string table;
  std::vector<std::string> columns;  // empty = all columns in table order
  std::vector<std::vector<Value>> rows;
  bool operator==(const Insert&) const = default;
};

struct Assignment {
  std::string column;
  Operand value;
  bool operator==(const Assignment&) const = default;
};

struct Update {
  std::string table;
  std::vector<Assignment> assignments;
  std::optional<Expr> where;
  bool operator==(const Update&) const = default;
};

struct Delete {
  std::string table;
  std::optional<Expr> where;
  bool operator==(const Delete&) const = default;
};

// GRANT / REVOKE are only recognised, never executed.
struct AccessControl {
  std::string verb;                 // "GRANT" or "REVOKE"
  std::vector<std::string> tokens;  // canonical token texts after the verb
  std::optional<std::string> table; // object after ON, when present
  bool operator==(const AccessControl&) const = default;
};

using StatementBody = std::variant<CreateTable, DropTable, AlterTable, TruncateTable, Describe,
                                   Select, Insert, Update, Delete, AccessControl>;

class Statement {
 public:
  Statement() = default;
  explicit Statement(StatementBody body) : body_(std::move(body)) {}

  const StatementBody& body() const { return body_; }

  template <typename T>
  const T* as() const { return std::get_if<T>(&body_); }

  StatementClass statement_class() const;
  // Absent for FROM-less SELECT and for access-control statements without ON.
  std::optional<std::string> target_table() const;
  bool has_order_by() const;

  bool operator==(const Statement&) const = default;

 private:
  StatementBody body_;
};

}  // namespace qarena::sql

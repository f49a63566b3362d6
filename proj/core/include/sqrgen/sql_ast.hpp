#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sqrgen::sql {

struct SelectStmt;
using SelectPtr = std::unique_ptr<SelectStmt>;

enum class LiteralKind { Integer, Real, String, Null };

/// Expression node. One tagged struct instead of a class hierarchy; the kind
/// dictates which fields are live.
struct Expr {
  enum class Kind {
    Column,      // [qualifier.]name ; name == "*" is a star
    Literal,     // text holds the raw token, strings keep their quotes
    Unary,       // op children[0]
    Binary,      // children[0] op children[1]
    Function,    // name(args) , name(*) , name(distinct arg)
    Subquery,    // scalar (select ...)
    InList,      // children[0] [not] in (children[1..])
    InSubquery,  // children[0] [not] in (select ...)
    Between,     // children[0] [not] between children[1] and children[2]
    Like,        // children[0] [not] like children[1]
    IsNull,      // children[0] is [not] null
    Exists,      // [not] exists (select ...)
    Case,        // case [children[0]] when/then pairs ... [else] end
  };

  Kind kind = Kind::Literal;
  std::string qualifier;  // Column
  std::string name;       // column/function name, or operator text
  LiteralKind literal_kind = LiteralKind::Null;
  std::string text;  // Literal raw token
  std::vector<std::unique_ptr<Expr>> children;
  SelectPtr select;
  bool negated = false;       // not in / not like / is not null / not exists
  bool distinct = false;      // aggregate distinct
  bool star = false;          // count(*)
  bool has_else = false;      // Case
  bool has_operand = false;   // Case with leading operand

  std::unique_ptr<Expr> clone() const;
};

using ExprPtr = std::unique_ptr<Expr>;

ExprPtr make_column(std::string qualifier, std::string name);
ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs);

struct ResultColumn {
  ExprPtr expr;
  std::string alias;
};

/// One FROM source: a table or a subquery, with how it joins to the one
/// before it.
struct FromItem {
  std::string table;  // empty when subquery
  SelectPtr subquery;
  std::string alias;
  std::string join_op;  // "" for the first item; "join", "left join", ",", ...
  ExprPtr on;
  std::vector<std::string> using_cols;

  bool is_subquery() const { return subquery != nullptr; }
};

struct OrderTerm {
  ExprPtr expr;
  bool desc = false;
};

struct CompoundPart;

struct SelectStmt {
  bool distinct = false;
  std::vector<ResultColumn> projections;
  std::vector<FromItem> from;
  ExprPtr where;
  std::vector<ExprPtr> group_by;
  ExprPtr having;
  std::vector<CompoundPart> compounds;  // union/intersect/except chain
  std::vector<OrderTerm> order_by;      // applies after any compounds
  ExprPtr limit;
  ExprPtr offset;

  SelectPtr clone() const;
};

struct CompoundPart {
  std::string op;  // "union", "union all", "intersect", "except"
  SelectPtr select;
};

/// Parses one SELECT statement (optionally ';'-terminated). Comments are
/// discarded. Throws SqlParseError with a byte position.
SelectPtr parse_sql(const std::string& text);

/// Canonical single-line rendering: lowercase keywords, single spaces, fixed
/// clause order. Identifiers and literals keep their stored spelling.
std::string render(const SelectStmt& stmt);
std::string render(const Expr& expr);

/// Structural equality, checked through the canonical rendering.
inline bool equal(const SelectStmt& a, const SelectStmt& b) { return render(a) == render(b); }

}  // namespace sqrgen::sql

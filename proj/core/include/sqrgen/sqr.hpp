#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqrgen/ring.hpp"
#include "sqrgen/value.hpp"

namespace sqrgen {

// ---------------------------------------------------------------------------
// Slots
// ---------------------------------------------------------------------------

/// What a slot may be filled with: a typed attribute, an entity, or a sort
/// direction.
enum class SlotKind {
  Arithmetic,
  Datetime,
  Identifier,
  Categorical,
  Boolean,
  Entity,
  SortDirection,
};

const char* to_string(SlotKind k);
std::optional<SlotKind> slot_kind_from_string(const std::string& s);
std::optional<SemanticType> slot_kind_semantic_type(SlotKind k);

enum class SlotSuffix { None, Value, Expression };

/// A typed placeholder such as {Datetime[0]}, {Identifier[0].Value[1]} or
/// {Arithmetic[0].Expression}. (kind, index) identifies the base slot; a Value
/// suffix with distinct value_index asks for distinct sampled literals.
struct Slot {
  SlotKind kind = SlotKind::Categorical;
  int index = 0;
  SlotSuffix suffix = SlotSuffix::None;
  int value_index = 0;  // meaningful only when suffix == Value

  /// The slot without any suffix; the unit the filler binds.
  Slot base() const { return Slot{kind, index, SlotSuffix::None, 0}; }
  std::string render() const;

  bool operator==(const Slot&) const = default;
  auto operator<=>(const Slot&) const = default;
};

/// Parses the text between braces, e.g. "Datetime[0].Value[1]".
std::optional<Slot> parse_slot_body(const std::string& body);

// ---------------------------------------------------------------------------
// Terms: concrete values or slots awaiting a bind
// ---------------------------------------------------------------------------

using NameTerm = std::variant<std::string, Slot>;  // entity or attribute name
using ValueTerm = std::variant<Value, Slot>;       // literal

enum class SortDirection { Asc, Desc };
using DirTerm = std::variant<SortDirection, Slot>;

/// Reference to an attribute of an entity, either of which may be a slot.
struct AttrTerm {
  NameTerm entity;
  NameTerm attribute;

  bool concrete() const {
    return std::holds_alternative<std::string>(entity) &&
           std::holds_alternative<std::string>(attribute);
  }
  const std::string& entity_name() const { return std::get<std::string>(entity); }
  const std::string& attribute_name() const { return std::get<std::string>(attribute); }

  bool operator==(const AttrTerm&) const = default;
};

// ---------------------------------------------------------------------------
// Filters
// ---------------------------------------------------------------------------

enum class FilterOp { Eq, Neq, Gt, Lt, Gte, Lte, Between, Contains, IsOneOf };
const char* to_string(FilterOp op);
std::optional<FilterOp> filter_op_from_string(const std::string& s);
/// Required literal count; -1 means one-or-more.
int filter_op_arity(FilterOp op);
/// Legal operations for a semantic type.
std::vector<FilterOp> legal_filter_ops(SemanticType t);

enum class Connective { And, Or };

/// Comparison joining a column to a templated subquery fragment.
enum class FragmentCompare { Gt, Lt, Gte, Lte, Eq, Neq, In, Exists };
const char* to_string(FragmentCompare c);

struct SqrStep;

/// One predicate: a simple (attribute, op, literals) test, an and/or
/// composite, or a filled filter-template fragment rendered as a subquery.
struct FilterNode {
  enum class Kind { Simple, Composite, Templated };
  Kind kind = Kind::Simple;

  // Simple
  AttrTerm attr;
  FilterOp op = FilterOp::Eq;
  std::vector<ValueTerm> values;

  // Composite
  Connective connective = Connective::And;
  std::vector<FilterNode> children;

  // Templated
  std::string template_id;
  FragmentCompare fragment_compare = FragmentCompare::Gt;
  std::vector<SqrStep> fragment_steps;  // a self-contained subplan
  int fragment_result = 0;
  /// For Exists fragments: correlate the fragment's entity with the host
  /// entity through this relationship's join pairs.
  std::string correlate_relationship;

  std::string nl_phrase;

  bool operator==(const FilterNode& other) const;

  static FilterNode simple(AttrTerm a, FilterOp o, std::vector<ValueTerm> vs,
                           std::string phrase);
  static FilterNode composite(Connective c, std::vector<FilterNode> kids);
};

// ---------------------------------------------------------------------------
// Plan steps
// ---------------------------------------------------------------------------

enum class AggregateOp { Count, Sum, Avg, Min, Max };
const char* to_string(AggregateOp op);
std::optional<AggregateOp> aggregate_op_from_string(const std::string& s);

enum class CompareOp { Eq, Neq, Gt, Lt, Gte, Lte, Before, After };
const char* to_string(CompareOp op);
std::optional<CompareOp> compare_op_from_string(const std::string& s);

struct RetrieveStep {
  AttrTerm source;
  bool operator==(const RetrieveStep&) const = default;
};

struct FilterApplyStep {
  int input = 0;
  FilterNode predicate;
  bool operator==(const FilterApplyStep&) const = default;
};

struct AggregateStep {
  int input = 0;
  AggregateOp op = AggregateOp::Count;
  std::optional<AttrTerm> group_by;
  bool operator==(const AggregateStep&) const = default;
};

struct CompareStep {
  int left = 0;
  int right = 0;
  CompareOp op = CompareOp::Eq;
  bool operator==(const CompareStep&) const = default;
};

/// Sort key: an attribute, or the input step's own output column.
struct SortKeyResult {
  bool operator==(const SortKeyResult&) const = default;
};
using SortKey = std::variant<AttrTerm, SortKeyResult>;

struct SortStep {
  int input = 0;
  SortKey key;
  DirTerm direction = SortDirection::Asc;
  bool operator==(const SortStep&) const = default;
};

struct LimitStep {
  int input = 0;
  long n = 1;
  bool operator==(const LimitStep&) const = default;
};

struct CollectStep {
  std::vector<int> inputs;
  bool operator==(const CollectStep&) const = default;
};

using StepOp = std::variant<RetrieveStep, FilterApplyStep, AggregateStep, CompareStep,
                            SortStep, LimitStep, CollectStep>;

struct SqrStep {
  int id = 0;
  StepOp op;
  bool operator==(const SqrStep&) const = default;
};

/// An ordered analytic plan. Exists in templated (slots present), filled
/// (slot-free) and compiled (duplicate-free) forms.
struct SqrPlan {
  std::vector<SqrStep> steps;
  int result_step = 0;

  const SqrStep* find_step(int id) const;
  bool operator==(const SqrPlan&) const = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Structural and type checks against a Ring. Empty result means valid.
std::vector<std::string> validate_plan(const SqrPlan& plan, const Ring& ring);

/// Removes structurally duplicate steps, rewiring references to the surviving
/// copy, iterated to a fixpoint. Surviving steps are renumbered 0..n-1.
/// Throws InvalidPlan when the input has dangling or forward references.
SqrPlan compile_plan(const SqrPlan& plan);

/// All slots mentioned anywhere in the plan (deduplicated, in first-appearance
/// order). Suffixes are preserved.
std::vector<Slot> collect_slots(const SqrPlan& plan);

/// True when the plan contains no Slot anywhere.
bool plan_is_concrete(const SqrPlan& plan);

/// Step ids reachable from the result step (the steps SQL generation uses).
std::vector<int> reachable_steps(const SqrPlan& plan);

// Text form: one step per line, `id: OpName(args)`, final line `result: id`.
std::string render_plan(const SqrPlan& plan);
SqrPlan parse_plan(const std::string& text);

std::string render_filter(const FilterNode& f);
/// Parses a single predicate in the text form, e.g. `eq(song.name, 'x')`.
FilterNode parse_filter_text(const std::string& text);

}  // namespace sqrgen

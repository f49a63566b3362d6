#include "sqrgen/sqr.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sqrgen/error.hpp"

namespace sqrgen {

const char* to_string(SlotKind k) {
  switch (k) {
    case SlotKind::Arithmetic: return "Arithmetic";
    case SlotKind::Datetime: return "Datetime";
    case SlotKind::Identifier: return "Identifier";
    case SlotKind::Categorical: return "Categorical";
    case SlotKind::Boolean: return "Boolean";
    case SlotKind::Entity: return "Entity";
    case SlotKind::SortDirection: return "SortDirection";
  }
  return "Categorical";
}

std::optional<SlotKind> slot_kind_from_string(const std::string& s) {
  if (s == "Arithmetic") return SlotKind::Arithmetic;
  if (s == "Datetime") return SlotKind::Datetime;
  if (s == "Identifier") return SlotKind::Identifier;
  if (s == "Categorical") return SlotKind::Categorical;
  if (s == "Boolean") return SlotKind::Boolean;
  if (s == "Entity") return SlotKind::Entity;
  if (s == "SortDirection") return SlotKind::SortDirection;
  return std::nullopt;
}

std::optional<SemanticType> slot_kind_semantic_type(SlotKind k) {
  switch (k) {
    case SlotKind::Arithmetic: return SemanticType::Arithmetic;
    case SlotKind::Datetime: return SemanticType::Datetime;
    case SlotKind::Identifier: return SemanticType::Identifier;
    case SlotKind::Categorical: return SemanticType::Categorical;
    case SlotKind::Boolean: return SemanticType::Boolean;
    default: return std::nullopt;
  }
}

std::string Slot::render() const {
  std::string out = "{";
  out += to_string(kind);
  out += "[" + std::to_string(index) + "]";
  if (suffix == SlotSuffix::Value) out += ".Value[" + std::to_string(value_index) + "]";
  if (suffix == SlotSuffix::Expression) out += ".Expression";
  out += "}";
  return out;
}

std::optional<Slot> parse_slot_body(const std::string& body) {
  size_t lb = body.find('[');
  if (lb == std::string::npos) return std::nullopt;
  auto kind = slot_kind_from_string(body.substr(0, lb));
  if (!kind) return std::nullopt;
  size_t rb = body.find(']', lb);
  if (rb == std::string::npos) return std::nullopt;
  int index = 0;
  try {
    index = std::stoi(body.substr(lb + 1, rb - lb - 1));
  } catch (...) {
    return std::nullopt;
  }
  if (index < 0) return std::nullopt;

  Slot slot{*kind, index, SlotSuffix::None, 0};
  std::string rest = body.substr(rb + 1);
  if (rest.empty()) return slot;
  if (rest == ".Expression") {
    slot.suffix = SlotSuffix::Expression;
    return slot;
  }
  if (rest == ".Value") {
    slot.suffix = SlotSuffix::Value;
    return slot;
  }
  if (rest.rfind(".Value[", 0) == 0 && rest.back() == ']') {
    try {
      slot.value_index = std::stoi(rest.substr(7, rest.size() - 8));
    } catch (...) {
      return std::nullopt;
    }
    if (slot.value_index < 0) return std::nullopt;
    slot.suffix = SlotSuffix::Value;
    return slot;
  }
  return std::nullopt;
}

const char* to_string(FilterOp op) {
  switch (op) {
    case FilterOp::Eq: return "eq";
    case FilterOp::Neq: return "neq";
    case FilterOp::Gt: return "gt";
    case FilterOp::Lt: return "lt";
    case FilterOp::Gte: return "gte";
    case FilterOp::Lte: return "lte";
    case FilterOp::Between: return "between";
    case FilterOp::Contains: return "contains";
    case FilterOp::IsOneOf: return "is_one_of";
  }
  return "eq";
}

std::optional<FilterOp> filter_op_from_string(const std::string& s) {
  for (FilterOp op : {FilterOp::Eq, FilterOp::Neq, FilterOp::Gt, FilterOp::Lt, FilterOp::Gte,
                      FilterOp::Lte, FilterOp::Between, FilterOp::Contains, FilterOp::IsOneOf})
    if (s == to_string(op)) return op;
  return std::nullopt;
}

int filter_op_arity(FilterOp op) {
  if (op == FilterOp::Between) return 2;
  if (op == FilterOp::IsOneOf) return -1;
  return 1;
}

std::vector<FilterOp> legal_filter_ops(SemanticType t) {
  switch (t) {
    case SemanticType::Arithmetic:
    case SemanticType::Datetime:
      return {FilterOp::Eq, FilterOp::Neq, FilterOp::Gt, FilterOp::Lt,
              FilterOp::Gte, FilterOp::Lte, FilterOp::Between};
    case SemanticType::Categorical:
    case SemanticType::Identifier:
      return {FilterOp::Eq, FilterOp::Neq, FilterOp::Contains};
    case SemanticType::Boolean:
      return {FilterOp::Eq};
  }
  return {FilterOp::Eq};
}

const char* to_string(FragmentCompare c) {
  switch (c) {
    case FragmentCompare::Gt: return "gt";
    case FragmentCompare::Lt: return "lt";
    case FragmentCompare::Gte: return "gte";
    case FragmentCompare::Lte: return "lte";
    case FragmentCompare::Eq: return "eq";
    case FragmentCompare::Neq: return "neq";
    case FragmentCompare::In: return "in";
    case FragmentCompare::Exists: return "exists";
  }
  return "gt";
}

const char* to_string(AggregateOp op) {
  switch (op) {
    case AggregateOp::Count: return "count";
    case AggregateOp::Sum: return "sum";
    case AggregateOp::Avg: return "avg";
    case AggregateOp::Min: return "min";
    case AggregateOp::Max: return "max";
  }
  return "count";
}

std::optional<AggregateOp> aggregate_op_from_string(const std::string& s) {
  for (AggregateOp op : {AggregateOp::Count, AggregateOp::Sum, AggregateOp::Avg,
                         AggregateOp::Min, AggregateOp::Max})
    if (s == to_string(op)) return op;
  return std::nullopt;
}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "eq";
    case CompareOp::Neq: return "neq";
    case CompareOp::Gt: return "gt";
    case CompareOp::Lt: return "lt";
    case CompareOp::Gte: return "gte";
    case CompareOp::Lte: return "lte";
    case CompareOp::Before: return "before";
    case CompareOp::After: return "after";
  }
  return "eq";
}

std::optional<CompareOp> compare_op_from_string(const std::string& s) {
  for (CompareOp op : {CompareOp::Eq, CompareOp::Neq, CompareOp::Gt, CompareOp::Lt,
                       CompareOp::Gte, CompareOp::Lte, CompareOp::Before, CompareOp::After})
    if (s == to_string(op)) return op;
  return std::nullopt;
}

// nl_phrase is presentation metadata and does not participate in structural
// identity.
bool FilterNode::operator==(const FilterNode& other) const {
  return kind == other.kind && attr == other.attr && op == other.op && values == other.values &&
         connective == other.connective && children == other.children &&
         template_id == other.template_id && fragment_compare == other.fragment_compare &&
         fragment_steps == other.fragment_steps && fragment_result == other.fragment_result &&
         correlate_relationship == other.correlate_relationship;
}

FilterNode FilterNode::simple(AttrTerm a, FilterOp o, std::vector<ValueTerm> vs,
                              std::string phrase) {
  FilterNode f;
  f.kind = Kind::Simple;
  f.attr = std::move(a);
  f.op = o;
  f.values = std::move(vs);
  f.nl_phrase = std::move(phrase);
  return f;
}

FilterNode FilterNode::composite(Connective c, std::vector<FilterNode> kids) {
  FilterNode f;
  f.kind = Kind::Composite;
  f.connective = c;
  f.children = std::move(kids);
  std::string joiner = c == Connective::And ? " and " : " or ";
  for (size_t i = 0; i < f.children.size(); ++i) {
    if (i) f.nl_phrase += joiner;
    f.nl_phrase += f.children[i].nl_phrase;
  }
  return f;
}

const SqrStep* SqrPlan::find_step(int id) const {
  for (const auto& s : steps)
    if (s.id == id) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Slot collection
// ---------------------------------------------------------------------------

namespace {

void add_slot(std::vector<Slot>& out, const Slot& s) {
  if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
}

void collect_from_name(std::vector<Slot>& out, const NameTerm& t) {
  if (const Slot* s = std::get_if<Slot>(&t)) add_slot(out, *s);
}

void collect_from_attr(std::vector<Slot>& out, const AttrTerm& a) {
  collect_from_name(out, a.entity);
  collect_from_name(out, a.attribute);
}

void collect_from_steps(std::vector<Slot>& out, const std::vector<SqrStep>& steps);

void collect_from_filter(std::vector<Slot>& out, const FilterNode& f) {
  switch (f.kind) {
    case FilterNode::Kind::Simple:
      collect_from_attr(out, f.attr);
      for (const auto& v : f.values)
        if (const Slot* s = std::get_if<Slot>(&v)) add_slot(out, *s);
      break;
    case FilterNode::Kind::Composite:
      for (const auto& c : f.children) collect_from_filter(out, c);
      break;
    case FilterNode::Kind::Templated:
      if (f.attr.entity.index() == 1 || f.attr.attribute.index() == 1 || f.attr.concrete())
        collect_from_attr(out, f.attr);
      collect_from_steps(out, f.fragment_steps);
      break;
  }
}

void collect_from_steps(std::vector<Slot>& out, const std::vector<SqrStep>& steps) {
  for (const auto& step : steps) {
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, RetrieveStep>) {
            collect_from_attr(out, op.source);
          } else if constexpr (std::is_same_v<T, FilterApplyStep>) {
            collect_from_filter(out, op.predicate);
          } else if constexpr (std::is_same_v<T, AggregateStep>) {
            if (op.group_by) collect_from_attr(out, *op.group_by);
          } else if constexpr (std::is_same_v<T, SortStep>) {
            if (const AttrTerm* a = std::get_if<AttrTerm>(&op.key)) collect_from_attr(out, *a);
            if (const Slot* s = std::get_if<Slot>(&op.direction)) add_slot(out, *s);
          }
        },
        step.op);
  }
}

}  // namespace

std::vector<Slot> collect_slots(const SqrPlan& plan) {
  std::vector<Slot> out;
  collect_from_steps(out, plan.steps);
  return out;
}

bool plan_is_concrete(const SqrPlan& plan) { return collect_slots(plan).empty(); }

std::vector<int> reachable_steps(const SqrPlan& plan) {
  std::set<int> seen;
  std::vector<int> stack{plan.result_step};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    const SqrStep* step = plan.find_step(id);
    if (!step) continue;
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, FilterApplyStep>) stack.push_back(op.input);
          else if constexpr (std::is_same_v<T, AggregateStep>) stack.push_back(op.input);
          else if constexpr (std::is_same_v<T, CompareStep>) {
            stack.push_back(op.left);
            stack.push_back(op.right);
          } else if constexpr (std::is_same_v<T, SortStep>) stack.push_back(op.input);
          else if constexpr (std::is_same_v<T, LimitStep>) stack.push_back(op.input);
          else if constexpr (std::is_same_v<T, CollectStep>)
            for (int i : op.inputs) stack.push_back(i);
        },
        step->op);
  }
  return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::optional<SemanticType> attr_term_type(const AttrTerm& a, const Ring& ring) {
  if (const Slot* s = std::get_if<Slot>(&a.attribute)) return slot_kind_semantic_type(s->kind);
  if (a.concrete()) {
    const Entity* e = ring.find_entity(a.entity_name());
    if (!e) return std::nullopt;
    const Attribute* attr = e->find_attribute(a.attribute_name());
    if (!attr) return std::nullopt;
    return attr->semantic_type;
  }
  return std::nullopt;
}

struct Validator {
  const Ring& ring;
  std::vector<std::string> diags;

  void report(const std::string& msg) { diags.push_back(msg); }

  void check_attr(const AttrTerm& a, const std::string& where) {
    if (const Slot* s = std::get_if<Slot>(&a.entity)) {
      if (s->kind != SlotKind::Entity)
        report(where + ": entity position holds non-entity slot " + s->render());
    } else if (!ring.find_entity(std::get<std::string>(a.entity))) {
      report(where + ": unknown entity '" + std::get<std::string>(a.entity) + "'");
      return;
    }
    if (const Slot* s = std::get_if<Slot>(&a.attribute)) {
      if (!slot_kind_semantic_type(s->kind))
        report(where + ": attribute position holds non-attribute slot " + s->render());
    } else if (a.concrete()) {
      const Entity* e = ring.find_entity(a.entity_name());
      if (e && !e->find_attribute(a.attribute_name()))
        report(where + ": entity '" + e->name + "' has no attribute '" + a.attribute_name() + "'");
    }
  }

  void check_filter(const FilterNode& f, const std::string& where) {
    switch (f.kind) {
      case FilterNode::Kind::Simple: {
        check_attr(f.attr, where);
        int arity = filter_op_arity(f.op);
        if (arity >= 0 && static_cast<int>(f.values.size()) != arity)
          report(where + ": filter op " + to_string(f.op) + " expects " + std::to_string(arity) +
                 " value(s), got " + std::to_string(f.values.size()));
        if (arity < 0 && f.values.empty())
          report(where + ": filter op " + to_string(f.op) + " expects at least one value");
        if (auto type = attr_term_type(f.attr, ring)) {
          auto legal = legal_filter_ops(*type);
          if (std::find(legal.begin(), legal.end(), f.op) == legal.end())
            report(where + ": op " + to_string(f.op) + " not legal for " + to_string(*type) +
                   " attribute");
        }
        for (const auto& v : f.values) {
          if (const Slot* s = std::get_if<Slot>(&v)) {
            if (s->suffix != SlotSuffix::Value)
              report(where + ": literal position holds non-Value slot " + s->render());
          }
        }
        break;
      }
      case FilterNode::Kind::Composite:
        if (f.children.size() < 2) report(where + ": composite filter needs at least 2 children");
        for (const auto& c : f.children) check_filter(c, where);
        break;
      case FilterNode::Kind::Templated: {
        SqrPlan fragment{f.fragment_steps, f.fragment_result};
        for (auto& d : validate_plan(fragment, ring))
          report(where + " [fragment " + f.template_id + "]: " + d);
        break;
      }
    }
  }
};

}  // namespace

std::vector<std::string> validate_plan(const SqrPlan& plan, const Ring& ring) {
  Validator v{ring, {}};
  std::set<int> defined;
  std::map<int, std::optional<SemanticType>> step_type;

  if (plan.steps.empty()) {
    v.report("plan has no steps");
    return v.diags;
  }

  auto check_ref = [&](int ref, int at, const char* what) -> bool {
    if (!defined.count(ref)) {
      v.report("step " + std::to_string(at) + ": " + what + " references step " +
               std::to_string(ref) + " which is not an earlier step");
      return false;
    }
    return true;
  };

  for (const auto& step : plan.steps) {
    std::string where = "step " + std::to_string(step.id);
    if (defined.count(step.id)) v.report(where + ": duplicate step id");

    std::optional<SemanticType> out_type;
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, RetrieveStep>) {
            v.check_attr(op.source, where);
            out_type = attr_term_type(op.source, ring);
          } else if constexpr (std::is_same_v<T, FilterApplyStep>) {
            if (check_ref(op.input, step.id, "input")) out_type = step_type[op.input];
            v.check_filter(op.predicate, where);
          } else if constexpr (std::is_same_v<T, AggregateStep>) {
            if (check_ref(op.input, step.id, "input")) {
              auto in_type = step_type[op.input];
              if ((op.op == AggregateOp::Sum || op.op == AggregateOp::Avg) && in_type &&
                  *in_type != SemanticType::Arithmetic)
                v.report(where + ": " + to_string(op.op) + " requires an Arithmetic input, got " +
                         to_string(*in_type));
              out_type = (op.op == AggregateOp::Min || op.op == AggregateOp::Max)
                             ? in_type
                             : std::optional<SemanticType>(SemanticType::Arithmetic);
            }
            if (op.group_by) v.check_attr(*op.group_by, where);
          } else if constexpr (std::is_same_v<T, CompareStep>) {
            bool ok_l = check_ref(op.left, step.id, "left");
            bool ok_r = check_ref(op.right, step.id, "right");
            if (ok_l && ok_r) {
              auto lt = step_type[op.left];
              auto rt = step_type[op.right];
              if (op.op == CompareOp::Before || op.op == CompareOp::After) {
                if (lt && *lt != SemanticType::Datetime)
                  v.report(where + ": " + to_string(op.op) + " requires Datetime operands");
                if (rt && *rt != SemanticType::Datetime)
                  v.report(where + ": " + to_string(op.op) + " requires Datetime operands");
              } else if (op.op == CompareOp::Gt || op.op == CompareOp::Lt ||
                         op.op == CompareOp::Gte || op.op == CompareOp::Lte) {
                for (auto t : {lt, rt})
                  if (t && *t != SemanticType::Arithmetic && *t != SemanticType::Datetime)
                    v.report(where + ": ordered comparison over non-orderable type " +
                             to_string(*t));
              }
              if (lt && rt && *lt != *rt)
                v.report(where + ": comparing incompatible types " + to_string(*lt) + " and " +
                         to_string(*rt));
            }
            out_type = SemanticType::Boolean;
          } else if constexpr (std::is_same_v<T, SortStep>) {
            if (check_ref(op.input, step.id, "input")) out_type = step_type[op.input];
            if (const AttrTerm* a = std::get_if<AttrTerm>(&op.key)) v.check_attr(*a, where);
            if (const Slot* s = std::get_if<Slot>(&op.direction)) {
              if (s->kind != SlotKind::SortDirection)
                v.report(where + ": direction position holds non-direction slot " + s->render());
            }
          } else if constexpr (std::is_same_v<T, LimitStep>) {
            if (check_ref(op.input, step.id, "input")) out_type = step_type[op.input];
            if (op.n < 1) v.report(where + ": limit must be at least 1");
          } else if constexpr (std::is_same_v<T, CollectStep>) {
            if (op.inputs.empty()) v.report(where + ": collect needs at least one input");
            for (int i : op.inputs) check_ref(i, step.id, "input");
          }
        },
        step.op);

    defined.insert(step.id);
    step_type[step.id] = out_type;
  }

  if (!defined.count(plan.result_step))
    v.report("result step " + std::to_string(plan.result_step) + " does not exist");
  return v.diags;
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

namespace {

std::vector<int> direct_refs(const StepOp& op) {
  std::vector<int> refs;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, FilterApplyStep>) refs.push_back(o.input);
        else if constexpr (std::is_same_v<T, AggregateStep>) refs.push_back(o.input);
        else if constexpr (std::is_same_v<T, CompareStep>) {
          refs.push_back(o.left);
          refs.push_back(o.right);
        } else if constexpr (std::is_same_v<T, SortStep>) refs.push_back(o.input);
        else if constexpr (std::is_same_v<T, LimitStep>) refs.push_back(o.input);
        else if constexpr (std::is_same_v<T, CollectStep>) refs = o.inputs;
      },
      op);
  return refs;
}

StepOp remap_refs(const StepOp& op, const std::map<int, int>& canon) {
  auto m = [&](int id) {
    auto it = canon.find(id);
    return it == canon.end() ? id : it->second;
  };
  StepOp out = op;
  std::visit(
      [&](auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, FilterApplyStep>) o.input = m(o.input);
        else if constexpr (std::is_same_v<T, AggregateStep>) o.input = m(o.input);
        else if constexpr (std::is_same_v<T, CompareStep>) {
          o.left = m(o.left);
          o.right = m(o.right);
        } else if constexpr (std::is_same_v<T, SortStep>) o.input = m(o.input);
        else if constexpr (std::is_same_v<T, LimitStep>) o.input = m(o.input);
        else if constexpr (std::is_same_v<T, CollectStep>)
          for (int& i : o.inputs) i = m(i);
      },
      out);
  return out;
}

}  // namespace

SqrPlan compile_plan(const SqrPlan& plan) {
  // Structural preconditions; Ring-level checks belong to validate_plan.
  {
    std::set<int> defined;
    for (const auto& step : plan.steps) {
      if (defined.count(step.id)) throw InvalidPlan("duplicate step id " + std::to_string(step.id));
      for (int ref : direct_refs(step.op))
        if (!defined.count(ref))
          throw InvalidPlan("step " + std::to_string(step.id) + " references step " +
                            std::to_string(ref) + " which is not an earlier step");
      defined.insert(step.id);
    }
    if (!defined.count(plan.result_step)) throw InvalidPlan("result step does not exist");
  }

  std::map<int, int> canon;
  for (const auto& s : plan.steps) canon[s.id] = s.id;

  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::string, int> seen;  // structural key -> surviving id
    for (const auto& step : plan.steps) {
      if (canon[step.id] != step.id) continue;  // already merged away
      StepOp normalized = remap_refs(step.op, canon);
      std::string key = render_plan(SqrPlan{{SqrStep{0, normalized}}, 0});
      auto [it, inserted] = seen.emplace(key, step.id);
      if (!inserted && it->second != step.id) {
        canon[step.id] = it->second;
        changed = true;
      }
    }
    if (changed) {
      // Collapse chains so later passes see final targets.
      for (auto& [id, target] : canon) {
        int t = target;
        while (canon[t] != t) t = canon[t];
        target = t;
      }
    }
  }

  SqrPlan out;
  std::map<int, int> new_id;
  for (const auto& step : plan.steps) {
    if (canon[step.id] != step.id) continue;
    int id = static_cast<int>(out.steps.size());
    new_id[step.id] = id;
    out.steps.push_back(SqrStep{id, remap_refs(step.op, canon)});
  }
  for (auto& step : out.steps) step.op = remap_refs(step.op, new_id);
  out.result_step = new_id[canon[plan.result_step]];
  return out;
}

}  // namespace sqrgen

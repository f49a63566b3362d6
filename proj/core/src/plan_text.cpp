#include <cctype>
#include <sstream>

#include "sqrgen/error.hpp"
#include "sqrgen/sqr.hpp"

// Plan text form: one step per line `id: OpName(args)`, closed by `result: id`.
// `#` starts a comment. Parsing is token-based, so whitespace is free.

namespace sqrgen {

namespace {

std::string render_name(const NameTerm& t) {
  if (const Slot* s = std::get_if<Slot>(&t)) return s->render();
  return std::get<std::string>(t);
}

std::string render_attr(const AttrTerm& a) {
  return render_name(a.entity) + "." + render_name(a.attribute);
}

std::string render_value(const ValueTerm& v) {
  if (const Slot* s = std::get_if<Slot>(&v)) return s->render();
  return value_to_sql(std::get<Value>(v));
}

std::string render_dir(const DirTerm& d) {
  if (const Slot* s = std::get_if<Slot>(&d)) return s->render();
  return std::get<SortDirection>(d) == SortDirection::Asc ? "asc" : "desc";
}

}  // namespace

std::string render_filter(const FilterNode& f) {
  switch (f.kind) {
    case FilterNode::Kind::Simple: {
      std::string out = to_string(f.op);
      out += "(" + render_attr(f.attr);
      for (const auto& v : f.values) out += ", " + render_value(v);
      out += ")";
      return out;
    }
    case FilterNode::Kind::Composite: {
      std::string out = f.connective == Connective::And ? "and(" : "or(";
      for (size_t i = 0; i < f.children.size(); ++i) {
        if (i) out += ", ";
        out += render_filter(f.children[i]);
      }
      out += ")";
      return out;
    }
    case FilterNode::Kind::Templated: {
      // Not re-parseable; templated nodes are built from filter-template
      // documents. The rendering is injective so compilation can hash it.
      std::string out = "@tmpl(" + f.template_id + ", ";
      out += to_string(f.fragment_compare);
      out += ", " + render_attr(f.attr);
      out += ", " + (f.correlate_relationship.empty() ? std::string("-") : f.correlate_relationship);
      out += ", plan{";
      out += render_plan(SqrPlan{f.fragment_steps, f.fragment_result});
      out += "})";
      return out;
    }
  }
  return "";
}

std::string render_plan(const SqrPlan& plan) {
  std::ostringstream out;
  for (const auto& step : plan.steps) {
    out << step.id << ": ";
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, RetrieveStep>) {
            out << "Retrieve(" << render_attr(op.source) << ")";
          } else if constexpr (std::is_same_v<T, FilterApplyStep>) {
            out << "FilterApply(" << op.input << ", " << render_filter(op.predicate) << ")";
          } else if constexpr (std::is_same_v<T, AggregateStep>) {
            out << "Aggregate(" << op.input << ", " << to_string(op.op);
            if (op.group_by) out << ", by " << render_attr(*op.group_by);
            out << ")";
          } else if constexpr (std::is_same_v<T, CompareStep>) {
            out << "Compare(" << op.left << ", " << op.right << ", " << to_string(op.op) << ")";
          } else if constexpr (std::is_same_v<T, SortStep>) {
            out << "Sort(" << op.input << ", ";
            if (std::holds_alternative<SortKeyResult>(op.key)) out << "result";
            else out << render_attr(std::get<AttrTerm>(op.key));
            out << ", " << render_dir(op.direction) << ")";
          } else if constexpr (std::is_same_v<T, LimitStep>) {
            out << "Limit(" << op.input << ", " << op.n << ")";
          } else if constexpr (std::is_same_v<T, CollectStep>) {
            out << "Collect(";
            for (size_t i = 0; i < op.inputs.size(); ++i) {
              if (i) out << ", ";
              out << op.inputs[i];
            }
            out << ")";
          }
        },
        step.op);
    out << "\n";
  }
  out << "result: " << plan.result_step << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum class Kind { Ident, Number, String, Slot, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    current_ = Token{Token::Kind::End, "", line_};
    if (pos_ >= src_.size()) return;

    char c = src_[pos_];
    current_.line = line_;
    if (c == '{') {
      size_t close = src_.find('}', pos_);
      if (close == std::string::npos) throw ParseError("unterminated slot", line_);
      current_.kind = Token::Kind::Slot;
      current_.text = src_.substr(pos_ + 1, close - pos_ - 1);
      pos_ = close + 1;
    } else if (c == '\'') {
      std::string text;
      ++pos_;
      while (pos_ < src_.size()) {
        if (src_[pos_] == '\'') {
          if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
            text += '\'';
            pos_ += 2;
          } else {
            ++pos_;
            current_.kind = Token::Kind::String;
            current_.text = std::move(text);
            return;
          }
        } else {
          text += src_[pos_++];
        }
      }
      throw ParseError("unterminated string literal", line_);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && pos_ + 1 < src_.size() &&
                std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      size_t start = pos_;
      if (c == '-') ++pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
              src_[pos_] == 'e' || src_[pos_] == 'E' ||
              ((src_[pos_] == '+' || src_[pos_] == '-') &&
               (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))))
        ++pos_;
      current_.kind = Token::Kind::Number;
      current_.text = src_.substr(start, pos_ - start);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_'))
        ++pos_;
      current_.kind = Token::Kind::Ident;
      current_.text = src_.substr(start, pos_ - start);
    } else {
      current_.kind = Token::Kind::Punct;
      current_.text = std::string(1, c);
      ++pos_;
    }
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  Token current_;
};

class PlanParser {
 public:
  explicit PlanParser(const std::string& src) : lex_(src) {}

  SqrPlan parse() {
    SqrPlan plan;
    bool saw_result = false;
    while (lex_.peek().kind != Token::Kind::End) {
      Token head = lex_.take();
      if (head.kind == Token::Kind::Ident && head.text == "result") {
        expect_punct(":");
        plan.result_step = expect_int();
        saw_result = true;
        break;
      }
      if (head.kind != Token::Kind::Number)
        throw ParseError("expected step id or 'result', got '" + head.text + "'", head.line);
      SqrStep step;
      step.id = to_int(head);
      expect_punct(":");
      step.op = parse_op();
      plan.steps.push_back(std::move(step));
    }
    if (!saw_result) throw ParseError("plan is missing its 'result:' line", lex_.peek().line);
    if (lex_.peek().kind != Token::Kind::End)
      throw ParseError("unexpected trailing content after result line", lex_.peek().line);
    return plan;
  }

  FilterNode parse_filter_only() {
    FilterNode f = parse_filter();
    if (lex_.peek().kind != Token::Kind::End)
      throw ParseError("unexpected trailing content after filter", lex_.peek().line);
    return f;
  }

 private:
  StepOp parse_op() {
    Token name = lex_.take();
    if (name.kind != Token::Kind::Ident)
      throw ParseError("expected operation name, got '" + name.text + "'", name.line);
    expect_punct("(");
    StepOp op = [&]() -> StepOp {
      if (name.text == "Retrieve") return RetrieveStep{parse_attr()};
      if (name.text == "FilterApply") {
        int input = expect_int();
        expect_punct(",");
        return FilterApplyStep{input, parse_filter()};
      }
      if (name.text == "Aggregate") {
        AggregateStep s;
        s.input = expect_int();
        expect_punct(",");
        Token agg = lex_.take();
        auto a = aggregate_op_from_string(agg.text);
        if (agg.kind != Token::Kind::Ident || !a)
          throw ParseError("unknown aggregate op '" + agg.text + "'", agg.line);
        s.op = *a;
        if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ",") {
          lex_.take();
          Token by = lex_.take();
          if (by.kind != Token::Kind::Ident || by.text != "by")
            throw ParseError("expected 'by' before group attribute", by.line);
          s.group_by = parse_attr();
        }
        return s;
      }
      if (name.text == "Compare") {
        CompareStep s;
        s.left = expect_int();
        expect_punct(",");
        s.right = expect_int();
        expect_punct(",");
        Token cmp = lex_.take();
        auto c = compare_op_from_string(cmp.text);
        if (cmp.kind != Token::Kind::Ident || !c)
          throw ParseError("unknown compare op '" + cmp.text + "'", cmp.line);
        s.op = *c;
        return s;
      }
      if (name.text == "Sort") {
        SortStep s;
        s.input = expect_int();
        expect_punct(",");
        if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "result") {
          lex_.take();
          s.key = SortKeyResult{};
        } else {
          s.key = parse_attr();
        }
        expect_punct(",");
        Token dir = lex_.take();
        if (dir.kind == Token::Kind::Slot) {
          s.direction = parse_slot_token(dir);
        } else if (dir.kind == Token::Kind::Ident && (dir.text == "asc" || dir.text == "desc")) {
          s.direction = dir.text == "asc" ? SortDirection::Asc : SortDirection::Desc;
        } else {
          throw ParseError("expected sort direction, got '" + dir.text + "'", dir.line);
        }
        return s;
      }
      if (name.text == "Limit") {
        LimitStep s;
        s.input = expect_int();
        expect_punct(",");
        s.n = expect_int();
        return s;
      }
      if (name.text == "Collect") {
        CollectStep s;
        s.inputs.push_back(expect_int());
        while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ",") {
          lex_.take();
          s.inputs.push_back(expect_int());
        }
        return s;
      }
      throw ParseError("unknown operation '" + name.text + "'", name.line);
    }();
    expect_punct(")");
    return op;
  }

  FilterNode parse_filter() {
    Token name = lex_.take();
    if (name.kind != Token::Kind::Ident)
      throw ParseError("expected filter op, got '" + name.text + "'", name.line);
    if (name.text == "and" || name.text == "or") {
      expect_punct("(");
      std::vector<FilterNode> kids;
      kids.push_back(parse_filter());
      while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ",") {
        lex_.take();
        kids.push_back(parse_filter());
      }
      expect_punct(")");
      if (kids.size() < 2)
        throw ParseError("composite filter needs at least two children", name.line);
      return FilterNode::composite(name.text == "and" ? Connective::And : Connective::Or,
                                   std::move(kids));
    }
    auto op = filter_op_from_string(name.text);
    if (!op) throw ParseError("unknown filter op '" + name.text + "'", name.line);
    expect_punct("(");
    AttrTerm attr = parse_attr();
    std::vector<ValueTerm> values;
    while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ",") {
      lex_.take();
      values.push_back(parse_value());
    }
    expect_punct(")");
    return FilterNode::simple(std::move(attr), *op, std::move(values), "");
  }

  AttrTerm parse_attr() {
    AttrTerm a;
    a.entity = parse_name();
    expect_punct(".");
    a.attribute = parse_name();
    return a;
  }

  NameTerm parse_name() {
    Token t = lex_.take();
    if (t.kind == Token::Kind::Slot) return parse_slot_token(t);
    if (t.kind == Token::Kind::Ident) return t.text;
    throw ParseError("expected name or slot, got '" + t.text + "'", t.line);
  }

  ValueTerm parse_value() {
    Token t = lex_.take();
    if (t.kind == Token::Kind::Slot) return parse_slot_token(t);
    if (t.kind == Token::Kind::String) return Value(t.text);
    if (t.kind == Token::Kind::Ident && t.text == "null") return Value(std::monostate{});
    if (t.kind == Token::Kind::Number) {
      if (t.text.find_first_of(".eE") == std::string::npos)
        return Value(static_cast<int64_t>(std::stoll(t.text)));
      return Value(std::stod(t.text));
    }
    throw ParseError("expected literal or slot, got '" + t.text + "'", t.line);
  }

  Slot parse_slot_token(const Token& t) {
    auto slot = parse_slot_body(t.text);
    if (!slot) throw ParseError("malformed slot {" + t.text + "}", t.line);
    return *slot;
  }

  void expect_punct(const char* p) {
    Token t = lex_.take();
    if (t.kind != Token::Kind::Punct || t.text != p)
      throw ParseError("expected '" + std::string(p) + "', got '" + t.text + "'", t.line);
  }

  int expect_int() {
    Token t = lex_.take();
    if (t.kind != Token::Kind::Number) throw ParseError("expected integer", t.line);
    return to_int(t);
  }

  int to_int(const Token& t) {
    try {
      return std::stoi(t.text);
    } catch (...) {
      throw ParseError("bad integer '" + t.text + "'", t.line);
    }
  }

  Lexer lex_;
};

}  // namespace

SqrPlan parse_plan(const std::string& text) { return PlanParser(text).parse(); }

FilterNode parse_filter_text(const std::string& text) {
  return PlanParser(text).parse_filter_only();
}

}  // namespace sqrgen

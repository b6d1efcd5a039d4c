#include "kdiff/prop.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <set>
#include <unordered_map>

namespace kdiff::prop {

Formula Formula::make(Kind kind, std::string name, std::vector<Formula> children) {
  return Formula(std::make_shared<const Node>(Node{kind, std::move(name), std::move(children)}));
}

Formula Formula::var(std::string name) {
  if (name.empty()) throw std::invalid_argument("variable name must be nonempty");
  return make(Kind::kVar, std::move(name), {});
}

Formula Formula::constant(bool value) {
  static const Formula t = make(Kind::kTrue, {}, {});
  static const Formula f = make(Kind::kFalse, {}, {});
  return value ? t : f;
}

Formula Formula::negation(Formula f) { return make(Kind::kNot, {}, {std::move(f)}); }
Formula Formula::conjunction(std::vector<Formula> children) { return make(Kind::kAnd, {}, std::move(children)); }
Formula Formula::disjunction(std::vector<Formula> children) { return make(Kind::kOr, {}, std::move(children)); }
Formula Formula::implication(Formula lhs, Formula rhs) {
  return make(Kind::kImplies, {}, {std::move(lhs), std::move(rhs)});
}
Formula Formula::equivalence(Formula lhs, Formula rhs) {
  return make(Kind::kIff, {}, {std::move(lhs), std::move(rhs)});
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  return a.kind() == b.kind() && a.name() == b.name() && a.children() == b.children();
}

// ---------------------------------------------------------------------------
// Folding builders
// ---------------------------------------------------------------------------

Formula make_not(Formula f) {
  switch (f.kind()) {
    case Kind::kTrue:
      return Formula::constant(false);
    case Kind::kFalse:
      return Formula::constant(true);
    case Kind::kNot:
      return f.children()[0];
    default:
      return Formula::negation(std::move(f));
  }
}

namespace {

bool complementary(const Formula& a, const Formula& b) {
  return (a.kind() == Kind::kNot && a.children()[0] == b) || (b.kind() == Kind::kNot && b.children()[0] == a);
}

// Shared by And (neutral = true) and Or (neutral = false).
Formula make_nary(Kind kind, std::vector<Formula> children) {
  const bool is_and = kind == Kind::kAnd;
  const Kind neutral = is_and ? Kind::kTrue : Kind::kFalse;
  const Kind dominant = is_and ? Kind::kFalse : Kind::kTrue;
  std::vector<Formula> flat;
  flat.reserve(children.size());
  for (Formula& c : children) {
    if (c.kind() == neutral) continue;
    if (c.kind() == dominant) return c;
    if (c.kind() == kind) {
      for (const Formula& g : c.children()) flat.push_back(g);
    } else {
      flat.push_back(std::move(c));
    }
  }
  std::vector<Formula> unique;
  unique.reserve(flat.size());
  for (Formula& c : flat) {
    bool dup = false;
    for (const Formula& u : unique) {
      if (u == c) {
        dup = true;
        break;
      }
      if (complementary(u, c)) return Formula::constant(!is_and);
    }
    if (!dup) unique.push_back(std::move(c));
  }
  if (unique.empty()) return Formula::constant(is_and);
  if (unique.size() == 1) return unique.front();
  return is_and ? Formula::conjunction(std::move(unique)) : Formula::disjunction(std::move(unique));
}

}  // namespace

Formula make_and(std::vector<Formula> children) { return make_nary(Kind::kAnd, std::move(children)); }
Formula make_or(std::vector<Formula> children) { return make_nary(Kind::kOr, std::move(children)); }
Formula make_and(Formula a, Formula b) { return make_and(std::vector<Formula>{std::move(a), std::move(b)}); }
Formula make_or(Formula a, Formula b) { return make_or(std::vector<Formula>{std::move(a), std::move(b)}); }

Formula make_implies(Formula a, Formula b) {
  if (a.is_true()) return b;
  if (a.is_false() || b.is_true()) return Formula::constant(true);
  if (b.is_false()) return make_not(std::move(a));
  if (a == b) return Formula::constant(true);
  return Formula::implication(std::move(a), std::move(b));
}

Formula make_iff(Formula a, Formula b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  if (a.is_false()) return make_not(std::move(b));
  if (b.is_false()) return make_not(std::move(a));
  if (a == b) return Formula::constant(true);
  if (complementary(a, b)) return Formula::constant(false);
  return Formula::equivalence(std::move(a), std::move(b));
}

Formula fold_constants(const Formula& f) {
  std::vector<Formula> kids;
  kids.reserve(f.children().size());
  for (const Formula& c : f.children()) kids.push_back(fold_constants(c));
  switch (f.kind()) {
    case Kind::kVar:
    case Kind::kTrue:
    case Kind::kFalse:
      return f;
    case Kind::kNot:
      return make_not(kids[0]);
    case Kind::kAnd:
      return make_and(std::move(kids));
    case Kind::kOr:
      return make_or(std::move(kids));
    case Kind::kImplies:
      return make_implies(kids[0], kids[1]);
    case Kind::kIff:
      return make_iff(kids[0], kids[1]);
  }
  return f;
}

namespace {

void collect_vars(const Formula& f, std::vector<std::string>& out, std::set<std::string, std::less<>>& seen) {
  if (f.kind() == Kind::kVar) {
    if (seen.insert(f.name()).second) out.push_back(f.name());
    return;
  }
  for (const Formula& c : f.children()) collect_vars(c, out, seen);
}

}  // namespace

std::vector<std::string> variables(const Formula& f) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  collect_vars(f, out, seen);
  return out;
}

std::size_t node_count(const Formula& f) {
  std::size_t n = 1;
  for (const Formula& c : f.children()) n += node_count(c);
  return n;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

bool evaluate(const Formula& f, const Assignment& assignment) {
  switch (f.kind()) {
    case Kind::kVar: {
      auto it = assignment.find(f.name());
      if (it == assignment.end()) throw MissingVariable(f.name());
      return it->second;
    }
    case Kind::kTrue:
      return true;
    case Kind::kFalse:
      return false;
    case Kind::kNot:
      return !evaluate(f.children()[0], assignment);
    case Kind::kAnd: {
      // Evaluate every child so a missing variable is always reported.
      bool all = true;
      for (const Formula& c : f.children()) all = evaluate(c, assignment) && all;
      return all;
    }
    case Kind::kOr: {
      bool any = false;
      for (const Formula& c : f.children()) any = evaluate(c, assignment) || any;
      return any;
    }
    case Kind::kImplies: {
      bool a = evaluate(f.children()[0], assignment);
      bool b = evaluate(f.children()[1], assignment);
      return !a || b;
    }
    case Kind::kIff:
      return evaluate(f.children()[0], assignment) == evaluate(f.children()[1], assignment);
  }
  return false;
}

CompiledFormula::CompiledFormula(const Formula& f, const std::vector<std::string>& order) {
  std::map<std::string, std::uint32_t, std::less<>> index;
  for (std::uint32_t i = 0; i < order.size(); ++i) index.emplace(order[i], i);
  emit(f, index);
  stack_.reserve(code_.size());
}

void CompiledFormula::emit(const Formula& f, const std::map<std::string, std::uint32_t, std::less<>>& index) {
  switch (f.kind()) {
    case Kind::kVar: {
      auto it = index.find(f.name());
      if (it == index.end()) throw MissingVariable(f.name());
      code_.push_back({Op::kVar, it->second});
      return;
    }
    case Kind::kTrue:
      code_.push_back({Op::kTrue, 0});
      return;
    case Kind::kFalse:
      code_.push_back({Op::kFalse, 0});
      return;
    default:
      break;
  }
  for (const Formula& c : f.children()) emit(c, index);
  auto n = static_cast<std::uint32_t>(f.children().size());
  switch (f.kind()) {
    case Kind::kNot:
      code_.push_back({Op::kNot, 1});
      break;
    case Kind::kAnd:
      code_.push_back({Op::kAnd, n});
      break;
    case Kind::kOr:
      code_.push_back({Op::kOr, n});
      break;
    case Kind::kImplies:
      code_.push_back({Op::kImplies, 2});
      break;
    case Kind::kIff:
      code_.push_back({Op::kIff, 2});
      break;
    default:
      break;
  }
}

bool CompiledFormula::evaluate(const std::vector<std::uint8_t>& values) const {
  stack_.clear();
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::kVar:
        stack_.push_back(values[in.arg]);
        break;
      case Op::kTrue:
        stack_.push_back(1);
        break;
      case Op::kFalse:
        stack_.push_back(0);
        break;
      case Op::kNot:
        stack_.back() = !stack_.back();
        break;
      case Op::kAnd:
      case Op::kOr: {
        std::uint8_t acc = in.op == Op::kAnd;
        for (std::uint32_t k = 0; k < in.arg; ++k) {
          std::uint8_t v = stack_.back();
          stack_.pop_back();
          acc = in.op == Op::kAnd ? (acc & v) : (acc | v);
        }
        stack_.push_back(acc);
        break;
      }
      case Op::kImplies: {
        std::uint8_t b = stack_.back();
        stack_.pop_back();
        stack_.back() = !stack_.back() || b;
        break;
      }
      case Op::kIff: {
        std::uint8_t b = stack_.back();
        stack_.pop_back();
        stack_.back() = stack_.back() == b;
        break;
      }
    }
  }
  return stack_.back() != 0;
}

bool equivalent(const Formula& f, const Formula& g) { return equivalent(f, g, nullptr); }

bool equivalent(const Formula& f, const Formula& g, Assignment* counterexample) {
  std::vector<std::string> vars = variables(f);
  std::set<std::string, std::less<>> seen(vars.begin(), vars.end());
  for (const std::string& v : variables(g)) {
    if (seen.insert(v).second) vars.push_back(v);
  }
  if (vars.size() > kEquivalenceBound) throw TooManyVariables(vars.size(), kEquivalenceBound);
  CompiledFormula cf(f, vars);
  CompiledFormula cg(g, vars);
  std::vector<std::uint8_t> values(vars.size(), 0);
  const std::uint64_t total = std::uint64_t{1} << vars.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (std::size_t i = 0; i < vars.size(); ++i) values[i] = (bits >> i) & 1U;
    if (cf.evaluate(values) != cg.evaluate(values)) {
      if (counterexample) {
        counterexample->clear();
        for (std::size_t i = 0; i < vars.size(); ++i) (*counterexample)[vars[i]] = values[i] != 0;
      }
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Constraint sets
// ---------------------------------------------------------------------------

Formula ConstraintSet::conjunction() const {
  std::vector<Formula> parts;
  parts.reserve(constraints.size());
  for (const Constraint& c : constraints) parts.push_back(c.formula);
  return make_and(std::move(parts));
}

ConstraintSet ConstraintSet::filtered(std::string_view prefix) const {
  ConstraintSet out;
  for (const Constraint& c : constraints) {
    if (std::string_view(c.provenance).substr(0, prefix.size()) == prefix) out.constraints.push_back(c);
  }
  return out;
}

ConstraintSet ConstraintSet::without(std::string_view prefix) const {
  ConstraintSet out;
  for (const Constraint& c : constraints) {
    if (std::string_view(c.provenance).substr(0, prefix.size()) != prefix) out.constraints.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace {

int text_precedence(Kind kind) {
  switch (kind) {
    case Kind::kIff:
      return 1;
    case Kind::kImplies:
      return 2;
    case Kind::kOr:
      return 3;
    case Kind::kAnd:
      return 4;
    case Kind::kNot:
      return 5;
    default:
      return 6;
  }
}

// Single-element lists print as their element and empty ones as a constant,
// so they bind like what they print as.
const Formula& unwrap(const Formula& f) {
  const Formula* g = &f;
  while ((g->kind() == Kind::kAnd || g->kind() == Kind::kOr) && g->children().size() == 1) g = &g->children()[0];
  return *g;
}

int printed_precedence(const Formula& f) {
  const Formula& g = unwrap(f);
  if ((g.kind() == Kind::kAnd || g.kind() == Kind::kOr) && g.children().empty()) return text_precedence(Kind::kTrue);
  return text_precedence(g.kind());
}

void write_text(const Formula& node, std::string& out) {
  const Formula& f = unwrap(node);
  auto child = [&](const Formula& c, bool parens) {
    if (parens) out += '(';
    write_text(c, out);
    if (parens) out += ')';
  };
  const int p = text_precedence(f.kind());
  switch (f.kind()) {
    case Kind::kVar:
      out += f.name();
      return;
    case Kind::kTrue:
      out += '1';
      return;
    case Kind::kFalse:
      out += '0';
      return;
    case Kind::kNot:
      out += '!';
      child(f.children()[0], printed_precedence(f.children()[0]) < p);
      return;
    case Kind::kAnd:
    case Kind::kOr: {
      if (f.children().empty()) {
        out += f.kind() == Kind::kAnd ? '1' : '0';
        return;
      }
      const char* sep = f.kind() == Kind::kAnd ? " & " : " | ";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += sep;
        child(f.children()[i], printed_precedence(f.children()[i]) <= p);
      }
      return;
    }
    case Kind::kImplies:
    case Kind::kIff: {
      const char* op = f.kind() == Kind::kImplies ? " => " : " <=> ";
      child(f.children()[0], printed_precedence(f.children()[0]) <= p);
      out += op;
      child(f.children()[1], printed_precedence(f.children()[1]) <= p);
      return;
    }
  }
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, int line) : text_(text), line_(line) {}

  Formula parse() {
    Formula f = parse_iff();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw FormatError(line_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(std::string_view op) {
    skip_ws();
    if (text_.substr(pos_, op.size()) == op) {
      pos_ += op.size();
      return true;
    }
    return false;
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    while (accept("<=>")) lhs = Formula::equivalence(lhs, parse_implies());
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (accept("=>")) return Formula::implication(lhs, parse_implies());
    return lhs;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept("|")) parts.push_back(parse_and());
    return parts.size() == 1 ? parts.front() : Formula::disjunction(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_not()};
    while (accept("&")) parts.push_back(parse_not());
    return parts.size() == 1 ? parts.front() : Formula::conjunction(std::move(parts));
  }

  Formula parse_not() {
    if (accept("!")) return Formula::negation(parse_not());
    return parse_atom();
  }

  Formula parse_atom() {
    if (accept("(")) {
      Formula inner = parse_iff();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) fail(pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'" : "expected operand");
    std::string_view token = text_.substr(start, pos_ - start);
    if (token == "1") return Formula::constant(true);
    if (token == "0") return Formula::constant(false);
    return Formula::var(std::string(token));
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_text(const Formula& f) {
  std::string out;
  write_text(f, out);
  return out;
}

Formula parse_formula(std::string_view text, int line) { return FormulaParser(text, line).parse(); }

void write_model(const ConstraintSet& set, std::ostream& sink) {
  for (const Constraint& c : set.constraints) {
    sink << to_text(c.formula);
    if (!c.provenance.empty()) sink << "  # " << c.provenance;
    sink << '\n';
  }
}

ConstraintSet parse_model_text(std::string_view text) {
  ConstraintSet set;
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    std::string provenance;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      std::string_view tail = line.substr(hash + 1);
      while (!tail.empty() && tail.front() == ' ') tail.remove_prefix(1);
      provenance = std::string(tail);
      line = line.substr(0, hash);
    }
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.remove_suffix(1);
    set.constraints.push_back({parse_formula(line, line_no), std::move(provenance)});
  }
  return set;
}

}  // namespace kdiff::prop

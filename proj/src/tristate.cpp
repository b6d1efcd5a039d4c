#include "kdiff/tristate.hpp"

#include <charconv>
#include <sstream>

namespace kdiff {

char tri_char(Tri t) {
  switch (t) {
    case Tri::N:
      return 'n';
    case Tri::M:
      return 'm';
    case Tri::Y:
      return 'y';
  }
  return '?';
}

std::optional<Tri> tri_from_text(std::string_view text) {
  if (text == "n") return Tri::N;
  if (text == "m") return Tri::M;
  if (text == "y") return Tri::Y;
  return std::nullopt;
}

std::string value_text(const ConfigValue& v) {
  if (const Tri* t = std::get_if<Tri>(&v)) return std::string(1, tri_char(*t));
  return std::get<std::string>(v);
}

Configuration::Configuration(const KconfigModel& model) {
  values_.reserve(model.size());
  for (const ConfigItem& item : model.items()) {
    if (is_boolean_type(item.type))
      values_.emplace_back(Tri::N);
    else
      values_.emplace_back(std::string());
  }
}

Tri Configuration::tri(std::size_t i) const {
  if (const Tri* t = std::get_if<Tri>(&values_[i])) return *t;
  return std::get<std::string>(values_[i]).empty() ? Tri::N : Tri::Y;
}

void Configuration::set(const KconfigModel& model, std::string_view name, ConfigValue v) {
  auto idx = model.index_of(name);
  if (!idx) throw std::out_of_range("unknown option '" + std::string(name) + "'");
  values_.at(*idx) = std::move(v);
}

const ConfigValue& Configuration::get(const KconfigModel& model, std::string_view name) const {
  auto idx = model.index_of(name);
  if (!idx) throw std::out_of_range("unknown option '" + std::string(name) + "'");
  return values_.at(*idx);
}

std::string describe(const KconfigModel& model, const Configuration& cfg) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    if (i) out << ", ";
    out << model.items()[i].name << '=';
    if (model.items()[i].type == OptionType::kString)
      out << '"' << value_text(cfg[i]) << '"';
    else
      out << value_text(cfg[i]);
  }
  out << '}';
  return out.str();
}

std::string describe_enabled(const KconfigModel& model, const Configuration& cfg) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const std::string& name = model.items()[i].name;
    std::string part;
    if (const Tri* t = std::get_if<Tri>(&cfg[i])) {
      if (*t == Tri::N) continue;
      part = *t == Tri::M ? name + "=m" : name;
    } else {
      const std::string& v = std::get<std::string>(cfg[i]);
      if (v.empty()) continue;
      part = model.items()[i].type == OptionType::kString ? name + "=\"" + v + '"' : name + "=" + v;
    }
    if (!first) out << ", ";
    first = false;
    out << part;
  }
  out << '}';
  return out.str();
}

std::optional<long long> parse_integer(std::string_view text) {
  bool negative = false;
  std::string_view digits = text;
  int base = 10;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    digits.remove_prefix(2);
    base = 16;
  } else if (!digits.empty() && digits[0] == '-') {
    negative = true;
    digits.remove_prefix(1);
  }
  if (digits.empty()) return std::nullopt;
  long long value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return negative ? -value : value;
}

bool compare_values(ExprKind op, std::string_view lhs, std::string_view rhs) {
  auto a = parse_integer(lhs);
  auto b = parse_integer(rhs);
  switch (op) {
    case ExprKind::kEq:
      return a && b ? *a == *b : lhs == rhs;
    case ExprKind::kNeq:
      return a && b ? *a != *b : lhs != rhs;
    default:
      break;
  }
  if (!a || !b) {
    throw EvalError("ordering comparison between non-numeric values '" + std::string(lhs) + "' and '" +
                    std::string(rhs) + "'");
  }
  switch (op) {
    case ExprKind::kLt:
      return *a < *b;
    case ExprKind::kLeq:
      return *a <= *b;
    case ExprKind::kGt:
      return *a > *b;
    case ExprKind::kGeq:
      return *a >= *b;
    default:
      throw EvalError("not a comparison");
  }
}

Tri leaf_tri(const Expr& leaf, const Configuration& cfg, const KconfigModel& model) {
  if (leaf.kind() == ExprKind::kLiteral) return tri_from_text(leaf.text()).value_or(Tri::N);
  auto idx = model.index_of(leaf.text());
  // Undeclared symbols are constants and read as n.
  return idx ? cfg.tri(*idx) : Tri::N;
}

std::string leaf_text(const Expr& leaf, const Configuration& cfg, const KconfigModel& model) {
  if (leaf.kind() == ExprKind::kLiteral) return leaf.text();
  auto idx = model.index_of(leaf.text());
  return idx ? value_text(cfg[*idx]) : leaf.text();
}

Tri eval_expr(const Expr& e, const Configuration& cfg, const KconfigModel& model) {
  switch (e.kind()) {
    case ExprKind::kSym:
    case ExprKind::kLiteral:
      return leaf_tri(e, cfg, model);
    case ExprKind::kNot:
      return tri_not(eval_expr(*e.operand(), cfg, model));
    case ExprKind::kAnd:
      return tri_and(eval_expr(*e.lhs(), cfg, model), eval_expr(*e.rhs(), cfg, model));
    case ExprKind::kOr:
      return tri_or(eval_expr(*e.lhs(), cfg, model), eval_expr(*e.rhs(), cfg, model));
    default:
      return compare_values(e.kind(), leaf_text(*e.lhs(), cfg, model), leaf_text(*e.rhs(), cfg, model)) ? Tri::Y
                                                                                                         : Tri::N;
  }
}

Tri eval_condition(const ExprPtr& e, const Configuration& cfg, const KconfigModel& model) {
  return e ? eval_expr(*e, cfg, model) : Tri::Y;
}

Tri visibility(const ConfigItem& item, const Configuration& cfg, const KconfigModel& model) {
  if (item.prompts.empty()) return Tri::N;
  Tri dep = eval_condition(item.depends, cfg, model);
  Tri best = Tri::N;
  for (const Prompt& p : item.prompts) best = tri_or(best, tri_and(eval_condition(p.condition, cfg, model), dep));
  return best;
}

}  // namespace kdiff

#include "kdiff/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace kdiff {

using prop::Constraint;
using prop::Formula;

// ---------------------------------------------------------------------------
// Pair algebra
// ---------------------------------------------------------------------------

TriEncoding tri_constant(Tri t) { return {Formula::constant(t == Tri::Y), Formula::constant(t == Tri::M)}; }

TriEncoding enc_and(const TriEncoding& a, const TriEncoding& b) {
  Formula y = prop::make_and(a.y, b.y);
  Formula m = prop::make_and({prop::make_or(a.y, a.m), prop::make_or(b.y, b.m), prop::make_not(y)});
  return {y, m};
}

TriEncoding enc_or(const TriEncoding& a, const TriEncoding& b) {
  return {prop::make_or(a.y, b.y), prop::make_and({prop::make_or(a.m, b.m), prop::make_not(a.y), prop::make_not(b.y)})};
}

TriEncoding enc_not(const TriEncoding& a) { return {prop::make_not(prop::make_or(a.y, a.m)), a.m}; }

Formula enc_nonzero(const TriEncoding& a) { return prop::make_or(a.y, a.m); }

Formula enc_le(const TriEncoding& a, const TriEncoding& b) {
  return prop::make_and(prop::make_implies(a.y, b.y), prop::make_implies(a.m, prop::make_or(b.y, b.m)));
}

Formula enc_eq(const TriEncoding& a, const TriEncoding& b) {
  return prop::make_and(prop::make_iff(a.y, b.y), prop::make_iff(a.m, b.m));
}

TriEncoding enc_ceil(const TriEncoding& a, const Formula& when) {
  return {prop::make_or(a.y, prop::make_and(when, a.m)), prop::make_and(prop::make_not(when), a.m)};
}

// ---------------------------------------------------------------------------
// Numeric domains
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kEmpty;

bool same_value(OptionType type, const std::string& a, const std::string& b) {
  if (is_numeric_type(type)) {
    auto x = parse_integer(a);
    auto y = parse_integer(b);
    if (x && y) return *x == *y;
  }
  return a == b;
}

}  // namespace

const std::vector<std::string>& NumericDomain::values(const std::string& option) const {
  auto it = values_.find(option);
  return it == values_.end() ? kEmpty : it->second;
}

void NumericDomain::add(const std::string& option, OptionType type, const std::string& value) {
  auto& vals = values_[option];
  if (is_numeric_type(type)) {
    auto v = parse_integer(value);
    if (!v) return;
    for (const std::string& existing : vals) {
      if (parse_integer(existing) == v) return;
    }
    auto pos = std::find_if(vals.begin(), vals.end(), [&](const std::string& e) { return *parse_integer(e) > *v; });
    vals.insert(pos, value);
    return;
  }
  if (std::find(vals.begin(), vals.end(), value) == vals.end()) vals.push_back(value);
}

namespace {

void harvest_comparisons(const ExprPtr& e, const KconfigModel& model, NumericDomain& dom) {
  if (!e) return;
  if (is_comparison(e->kind())) {
    for (const auto& [sym, lit] : {std::pair{e->lhs(), e->rhs()}, std::pair{e->rhs(), e->lhs()}}) {
      if (sym->kind() != ExprKind::kSym || lit->kind() != ExprKind::kLiteral) continue;
      const ConfigItem* item = model.find(sym->text());
      if (item && is_numeric_type(item->type)) dom.add(item->name, item->type, lit->text());
    }
    return;
  }
  harvest_comparisons(e->lhs(), model, dom);
  harvest_comparisons(e->rhs(), model, dom);
}

}  // namespace

NumericDomain collect_numeric_values(const KconfigModel& model) {
  NumericDomain dom;
  for (const ConfigItem& item : model.items()) {
    if (is_boolean_type(item.type)) continue;
    dom.ensure(item.name);
    for (const Default& d : item.defaults) {
      if (d.value->kind() == ExprKind::kLiteral) dom.add(item.name, item.type, d.value->text());
    }
    for (const Range& r : item.ranges) {
      dom.add(item.name, item.type, r.low);
      dom.add(item.name, item.type, r.high);
    }
  }
  auto visit = [&](const ExprPtr& e) { harvest_comparisons(e, model, dom); };
  for (const ChoiceBlock& c : model.choices()) {
    for (const Prompt& p : c.prompts) visit(p.condition);
    visit(c.depends);
  }
  for (const ConfigItem& item : model.items()) {
    for (const Prompt& p : item.prompts) visit(p.condition);
    visit(item.depends);
    for (const Default& d : item.defaults) {
      visit(d.value);
      visit(d.condition);
    }
    for (const Select& s : item.selects) visit(s.condition);
    for (const Range& r : item.ranges) visit(r.condition);
  }
  return dom;
}

// ---------------------------------------------------------------------------
// Variables and expressions
// ---------------------------------------------------------------------------

std::string module_variable(const std::string& option) { return option + "_MODULE"; }

std::string value_variable(const std::string& option, const std::string& value) {
  std::string out = option + "_EQ_";
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '_') {
      out += static_cast<char>(c);
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "_x%02x", c);
      out += buf;
    }
  }
  return out;
}

namespace {

struct ValueCase {
  std::string text;
  Formula when;
};

std::vector<ValueCase> operand_cases(const Expr& leaf, const KconfigModel& model, const NumericDomain& dom) {
  if (leaf.kind() == ExprKind::kLiteral) return {{leaf.text(), Formula::constant(true)}};
  const ConfigItem* item = model.find(leaf.text());
  if (!item) return {{leaf.text(), Formula::constant(true)}};
  switch (item->type) {
    case OptionType::kBool: {
      Formula y = Formula::var(item->name);
      return {{"n", prop::make_not(y)}, {"y", y}};
    }
    case OptionType::kTristate: {
      Formula y = Formula::var(item->name);
      Formula m = Formula::var(module_variable(item->name));
      return {{"n", prop::make_and(prop::make_not(y), prop::make_not(m))}, {"m", m}, {"y", y}};
    }
    default: {
      const auto& vals = dom.values(item->name);
      if (vals.empty()) return {{"", Formula::constant(true)}};
      std::vector<ValueCase> out;
      for (const std::string& v : vals) out.push_back({v, Formula::var(value_variable(item->name, v))});
      return out;
    }
  }
}

Formula encode_comparison(const Expr& e, const KconfigModel& model, const NumericDomain& dom) {
  auto lhs = operand_cases(*e.lhs(), model, dom);
  auto rhs = operand_cases(*e.rhs(), model, dom);
  std::vector<Formula> terms;
  for (const ValueCase& a : lhs) {
    for (const ValueCase& b : rhs) {
      bool holds = false;
      try {
        holds = compare_values(e.kind(), a.text, b.text);
      } catch (const EvalError& err) {
        throw EncodeError(EncodeError::Kind::kUnsupportedComparison,
                          "cannot encode '" + to_string(e) + "': " + err.what());
      }
      if (holds) terms.push_back(prop::make_and(a.when, b.when));
    }
  }
  return prop::make_or(std::move(terms));
}

}  // namespace

TriEncoding encode_expr(const Expr& e, const KconfigModel& model, const NumericDomain& dom) {
  switch (e.kind()) {
    case ExprKind::kLiteral:
      return tri_constant(tri_from_text(e.text()).value_or(Tri::N));
    case ExprKind::kSym: {
      const ConfigItem* item = model.find(e.text());
      if (!item) return tri_constant(Tri::N);
      if (item->type == OptionType::kBool) return {Formula::var(item->name), Formula::constant(false)};
      if (item->type == OptionType::kTristate)
        return {Formula::var(item->name), Formula::var(module_variable(item->name))};
      // A value option in boolean position is y exactly when it holds nonempty text.
      std::vector<Formula> set;
      for (const std::string& v : dom.values(item->name)) {
        if (!v.empty()) set.push_back(Formula::var(value_variable(item->name, v)));
      }
      return {prop::make_or(std::move(set)), Formula::constant(false)};
    }
    case ExprKind::kNot:
      return enc_not(encode_expr(*e.operand(), model, dom));
    case ExprKind::kAnd:
      return enc_and(encode_expr(*e.lhs(), model, dom), encode_expr(*e.rhs(), model, dom));
    case ExprKind::kOr:
      return enc_or(encode_expr(*e.lhs(), model, dom), encode_expr(*e.rhs(), model, dom));
    default:
      return {encode_comparison(e, model, dom), Formula::constant(false)};
  }
}

Formula encode_numeric_constraint(ExprKind op, const std::string& option, const std::string& literal,
                                  const NumericDomain& dom) {
  const auto& vals = dom.values(option);
  if (vals.empty()) {
    throw EncodeError(EncodeError::Kind::kUnsupportedComparison,
                      "no known values for '" + option + "' in comparison with " + literal);
  }
  std::vector<Formula> terms;
  for (const std::string& v : vals) {
    bool holds = false;
    try {
      holds = compare_values(op, v, literal);
    } catch (const EvalError& err) {
      throw EncodeError(EncodeError::Kind::kUnsupportedComparison, err.what());
    }
    if (holds) terms.push_back(Formula::var(value_variable(option, v)));
  }
  return prop::make_or(std::move(terms));
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

Encoder::Encoder(const KconfigModel& model, EncoderOptions options)
    : model_(model), options_(options), domain_(collect_numeric_values(model)) {
  for (const ConfigItem& item : model.items()) {
    for (const Select& s : item.selects) {
      const ConfigItem* target = model.find(s.target);
      if (target && !is_boolean_type(target->type)) {
        throw EncodeError(EncodeError::Kind::kSelectOnNonBoolean,
                          "'" + item.name + "' selects non-boolean '" + s.target + "'");
      }
    }
  }
  for (const ChoiceBlock& c : model.choices()) {
    if (c.members.empty()) throw EncodeError(EncodeError::Kind::kEmptyChoice, c.id + " has no members");
  }
  auto diags = validate_model(model);
  if (has_errors(diags)) {
    std::string msg = "model has errors:";
    for (const Diagnostic& d : diags) {
      if (d.severity == Severity::kError) msg += "\n  " + format_diagnostic(model, d);
    }
    throw EncodeError(EncodeError::Kind::kInvalidModel, msg);
  }
}

TriEncoding Encoder::option_pair(const ConfigItem& item) const {
  return encode_expr(*Expr::sym(item.name), model_, domain_);
}

TriEncoding Encoder::condition(const ExprPtr& e) const {
  return e ? encode_expr(*e, model_, domain_) : tri_constant(Tri::Y);
}

TriEncoding Encoder::prompt_visibility(const std::vector<Prompt>& prompts, const TriEncoding& dep) const {
  TriEncoding vis = tri_constant(Tri::N);
  for (const Prompt& p : prompts) vis = enc_or(vis, enc_and(condition(p.condition), dep));
  return vis;
}

Formula Encoder::modules_off() const {
  if (!model_.modules_option()) return Formula::constant(false);
  return prop::make_not(Formula::var(*model_.modules_option()));
}

TriEncoding Encoder::reverse_bound(const ConfigItem& target) const {
  TriEncoding rev = tri_constant(Tri::N);
  for (const ConfigItem& selector : model_.items()) {
    for (const Select& s : selector.selects) {
      if (s.target == target.name) rev = enc_or(rev, enc_and(option_pair(selector), condition(s.condition)));
    }
  }
  return rev;
}

namespace {

void push(std::vector<Constraint>& out, Formula f, std::string provenance) {
  if (f.is_true()) return;
  out.push_back({std::move(f), std::move(provenance)});
}

}  // namespace

// Walks the defaults in order: the first whose condition is not n decides the
// value; without one the value is n. Each step is guarded by `guard`.
void Encoder::default_chain(const ConfigItem& item, const Formula& guard, const TriEncoding& dep,
                            const TriEncoding& raise, const Formula& round_up, std::vector<Constraint>& out) const {
  const TriEncoding self = option_pair(item);
  Formula none_before = Formula::constant(true);
  for (std::size_t i = 0; i < item.defaults.size(); ++i) {
    const Default& d = item.defaults[i];
    TriEncoding cond = condition(d.condition);
    Formula applies = enc_nonzero(cond);
    TriEncoding value = enc_and(enc_and(encode_expr(*d.value, model_, domain_), cond), dep);
    Formula target = enc_eq(self, enc_ceil(enc_or(value, raise), round_up));
    push(out, prop::make_implies(prop::make_and({guard, none_before, applies}), target),
         item.name + ":default#" + std::to_string(i));
    none_before = prop::make_and(none_before, prop::make_not(applies));
  }
  push(out, prop::make_implies(prop::make_and(guard, none_before), enc_eq(self, enc_ceil(raise, round_up))),
       item.name + ":no-default");
}

std::vector<Constraint> Encoder::select_constraints(const ConfigItem& selector) const {
  std::vector<Constraint> out;
  for (const Select& s : selector.selects) {
    const ConfigItem* target = model_.find(s.target);
    if (!target || !is_boolean_type(target->type)) {
      throw EncodeError(EncodeError::Kind::kSelectOnNonBoolean,
                        "'" + selector.name + "' selects non-boolean '" + s.target + "'");
    }
    Formula round_up = target->type == OptionType::kBool ? Formula::constant(true) : modules_off();
    TriEncoding lower = enc_ceil(enc_and(option_pair(selector), condition(s.condition)), round_up);
    push(out, enc_le(lower, option_pair(*target)), selector.name + ":select:" + target->name);
  }
  return out;
}

std::vector<Constraint> Encoder::encode_reverse_dependencies() const {
  std::vector<Constraint> out;
  for (const ConfigItem& item : model_.items()) {
    auto part = select_constraints(item);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<Constraint> Encoder::value_option(const ConfigItem& item) const {
  std::vector<Constraint> out;
  const auto& vals = domain_.values(item.name);
  if (vals.empty()) return out;
  std::vector<Formula> vars;
  for (const std::string& v : vals) vars.push_back(Formula::var(value_variable(item.name, v)));
  push(out, prop::make_or(vars), item.name + ":at-least-one");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      push(out, prop::make_not(prop::make_and(vars[i], vars[j])),
           item.name + ":at-most-one:" + vals[i] + ":" + vals[j]);
    }
  }

  auto var_for = [&](const std::string& text) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (same_value(item.type, vals[i], text)) return vars[i];
    }
    throw EncodeError(EncodeError::Kind::kInvalidModel, "value '" + text + "' of '" + item.name + "' not harvested");
  };

  const TriEncoding dep = condition(item.depends);
  const Formula visible = enc_nonzero(prompt_visibility(item.prompts, dep));

  // first_range[j]: range j is the first whose condition is not n.
  std::vector<Formula> first_range;
  Formula no_range = Formula::constant(true);
  for (const Range& r : item.ranges) {
    Formula applies = enc_nonzero(condition(r.condition));
    first_range.push_back(prop::make_and(no_range, applies));
    no_range = prop::make_and(no_range, prop::make_not(applies));
  }

  for (std::size_t j = 0; j < item.ranges.size(); ++j) {
    long long lo = *parse_integer(item.ranges[j].low);
    long long hi = *parse_integer(item.ranges[j].high);
    std::vector<Formula> inside;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      long long v = *parse_integer(vals[i]);
      if (lo <= v && v <= hi) inside.push_back(vars[i]);
    }
    push(out, prop::make_implies(prop::make_and(visible, first_range[j]), prop::make_or(std::move(inside))),
         item.name + ":range#" + std::to_string(j));
  }

  Formula none_before = Formula::constant(true);
  for (std::size_t i = 0; i < item.defaults.size(); ++i) {
    const Default& d = item.defaults[i];
    Formula applies = enc_nonzero(condition(d.condition));
    std::vector<Formula> outcome;
    for (std::size_t j = 0; j < item.ranges.size(); ++j) {
      long long lo = *parse_integer(item.ranges[j].low);
      long long hi = *parse_integer(item.ranges[j].high);
      long long v = *parse_integer(d.value->text());
      const std::string& clamped = v < lo ? item.ranges[j].low : v > hi ? item.ranges[j].high : d.value->text();
      outcome.push_back(prop::make_implies(first_range[j], var_for(clamped)));
    }
    outcome.push_back(prop::make_implies(no_range, var_for(d.value->text())));
    Formula guard = prop::make_and({prop::make_not(visible), enc_nonzero(dep), none_before, applies});
    push(out, prop::make_implies(guard, prop::make_and(std::move(outcome))), item.name + ":default#" + std::to_string(i));
    none_before = prop::make_and(none_before, prop::make_not(applies));
  }
  return out;
}

std::vector<Constraint> Encoder::encode_option(const ConfigItem& item) const {
  if (!is_boolean_type(item.type)) return value_option(item);
  std::vector<Constraint> out;
  const TriEncoding self = option_pair(item);
  const bool tristate = item.type == OptionType::kTristate;
  if (tristate) {
    push(out, prop::make_not(prop::make_and(self.y, self.m)), item.name + ":mutex");
    if (model_.modules_option()) {
      push(out, prop::make_implies(self.m, Formula::var(*model_.modules_option())), item.name + ":modules");
    }
  }
  const Formula round_up = tristate ? modules_off() : Formula::constant(true);
  const TriEncoding dep = condition(item.depends);

  if (item.choice) {
    // Members: the choice logic decides visible members, defaults the rest.
    const ChoiceBlock& choice = model_.choices()[*item.choice];
    const TriEncoding choice_dep = condition(choice.depends);
    const TriEncoding choice_vis =
        choice.prompts.empty() ? choice_dep : prompt_visibility(choice.prompts, choice_dep);
    const TriEncoding member_dep = enc_and(dep, choice_dep);
    const Formula member_round_up =
        choice.type == OptionType::kBool ? Formula::constant(true) : round_up;
    if (item.depends || choice.depends)
      push(out, enc_le(self, enc_ceil(member_dep, member_round_up)), item.name + ":depends");
    const Formula in_group =
        prop::make_and(enc_nonzero(prompt_visibility(item.prompts, member_dep)), enc_nonzero(choice_vis));
    default_chain(item, prop::make_not(in_group), member_dep, tri_constant(Tri::N), member_round_up, out);
    return out;
  }

  const TriEncoding raise = reverse_bound(item);
  const TriEncoding bound = options_.strict_dependencies ? dep : enc_or(dep, raise);
  if (item.depends) push(out, enc_le(self, enc_ceil(bound, round_up)), item.name + ":depends");
  if (!item.prompts.empty()) {
    TriEncoding vis = prompt_visibility(item.prompts, dep);
    push(out, prop::make_implies(enc_nonzero(vis), enc_le(self, enc_ceil(enc_or(vis, raise), round_up))),
         item.name + ":prompt");
    default_chain(item, prop::make_not(enc_nonzero(vis)), dep, raise, round_up, out);
  } else {
    default_chain(item, Formula::constant(true), dep, raise, round_up, out);
  }
  return out;
}

std::vector<Constraint> Encoder::encode_choice(const ChoiceBlock& choice) const {
  if (choice.members.empty()) {
    throw EncodeError(EncodeError::Kind::kEmptyChoice, choice.id + " has no members");
  }
  std::vector<Constraint> out;
  const TriEncoding choice_dep = condition(choice.depends);
  const TriEncoding vis = choice.prompts.empty() ? choice_dep : prompt_visibility(choice.prompts, choice_dep);
  const Formula bool_like =
      choice.type == OptionType::kBool ? Formula::constant(true) : modules_off();

  struct Member {
    const ConfigItem* item;
    TriEncoding self;
    Formula in_group;
    TriEncoding group_vis;
  };
  std::vector<Member> members;
  for (const std::string& name : choice.members) {
    const ConfigItem& item = *model_.find(name);
    TriEncoding dep = enc_and(condition(item.depends), choice_dep);
    TriEncoding own = prompt_visibility(item.prompts, dep);
    members.push_back({&item, option_pair(item), prop::make_and(enc_nonzero(own), enc_nonzero(vis)),
                       enc_and(own, vis)});
  }

  std::vector<Formula> set_y, set_m, groups;
  for (const Member& m : members) {
    set_y.push_back(prop::make_and(m.in_group, m.self.y));
    set_m.push_back(prop::make_and(m.in_group, m.self.m));
    groups.push_back(m.in_group);
  }
  const Formula any_y = prop::make_or(set_y);
  const Formula any_m = prop::make_or(set_m);

  // y mode: exactly one visible member is y. m mode: visible members are
  // independently n or m.
  const Formula mode_y = prop::make_or(
      prop::make_and(bool_like, enc_nonzero(vis)),
      prop::make_and({prop::make_not(bool_like), vis.y, prop::make_or(any_y, prop::make_not(any_m))}));
  const Formula mode_m = prop::make_and(
      prop::make_not(bool_like),
      prop::make_or(vis.m, prop::make_and({vis.y, prop::make_not(any_y), any_m})));

  push(out, prop::make_implies(prop::make_and(mode_y, prop::make_or(groups)), any_y), choice.id + ":at-least-one");
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      push(out, prop::make_implies(mode_y, prop::make_not(prop::make_and(set_y[i], set_y[j]))),
           choice.id + ":at-most-one:" + members[i].item->name + ":" + members[j].item->name);
    }
  }
  for (const Member& m : members) {
    const ConfigItem& item = *m.item;
    Formula member_bool_like = item.type == OptionType::kBool ? Formula::constant(true) : bool_like;
    TriEncoding reach = enc_ceil(m.group_vis, member_bool_like);
    push(out,
         prop::make_implies(prop::make_and(mode_y, m.in_group),
                            prop::make_and(prop::make_not(m.self.m), prop::make_implies(m.self.y, reach.y))),
         item.name + ":choice-y");
    Formula in_m_mode = item.type == OptionType::kBool ? prop::make_not(m.self.y) : enc_le(m.self, m.group_vis);
    push(out, prop::make_implies(prop::make_and(mode_m, m.in_group), in_m_mode), item.name + ":choice-m");
  }
  return out;
}

prop::ConstraintSet Encoder::translate() const {
  prop::ConstraintSet set;
  auto append = [&](std::vector<Constraint> part) {
    for (Constraint& c : part) set.constraints.push_back(std::move(c));
  };
  std::vector<bool> choice_done(model_.choices().size(), false);
  for (const ConfigItem& item : model_.items()) {
    if (item.choice && !choice_done[*item.choice]) {
      choice_done[*item.choice] = true;
      append(encode_choice(model_.choices()[*item.choice]));
    }
    append(encode_option(item));
    append(select_constraints(item));
  }
  return set;
}

std::vector<std::string> Encoder::variables() const {
  std::vector<std::string> out;
  for (const ConfigItem& item : model_.items()) {
    switch (item.type) {
      case OptionType::kBool:
        out.push_back(item.name);
        break;
      case OptionType::kTristate:
        out.push_back(item.name);
        out.push_back(module_variable(item.name));
        break;
      default:
        for (const std::string& v : domain_.values(item.name)) out.push_back(value_variable(item.name, v));
    }
  }
  return out;
}

std::vector<std::uint8_t> Encoder::embed_values(const Configuration& cfg) const {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < model_.size(); ++i) {
    const ConfigItem& item = model_.items()[i];
    switch (item.type) {
      case OptionType::kBool:
        out.push_back(cfg.tri(i) == Tri::Y);
        break;
      case OptionType::kTristate:
        out.push_back(cfg.tri(i) == Tri::Y);
        out.push_back(cfg.tri(i) == Tri::M);
        break;
      default: {
        std::string text = value_text(cfg[i]);
        for (const std::string& v : domain_.values(item.name)) out.push_back(same_value(item.type, v, text));
      }
    }
  }
  return out;
}

prop::Assignment Encoder::embed(const Configuration& cfg) const {
  auto names = variables();
  auto values = embed_values(cfg);
  prop::Assignment out;
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = values[i] != 0;
  return out;
}

prop::ConstraintSet translate(const KconfigModel& model, EncoderOptions options) {
  return Encoder(model, options).translate();
}

}  // namespace kdiff

// Translation of a kconfig model into propositional constraints.
//
// Variables:
//   NAME           option has value y (bool and tristate options)
//   NAME_MODULE    option has value m (tristate options only)
//   NAME_EQ_<v>    option has the harvested value v (int/hex/string options)
//
// Every tristate expression e is carried as a pair (e_y, e_m) of formulas,
// combined with the min/max/complement tables for &&, || and !. Each option
// contributes constraints stating that its value is the one the configuration
// repair would compute for it: bounded by dependencies and raised by selects
// when visible, given by the first applicable default when invisible.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdiff/kconfig.hpp"
#include "kdiff/prop.hpp"
#include "kdiff/tristate.hpp"

namespace kdiff {

struct TriEncoding {
  prop::Formula y;
  prop::Formula m;
};

TriEncoding tri_constant(Tri t);
TriEncoding enc_and(const TriEncoding& a, const TriEncoding& b);
TriEncoding enc_or(const TriEncoding& a, const TriEncoding& b);
TriEncoding enc_not(const TriEncoding& a);
/// Value is not n.
prop::Formula enc_nonzero(const TriEncoding& a);
/// Value of `a` is at most `b`.
prop::Formula enc_le(const TriEncoding& a, const TriEncoding& b);
prop::Formula enc_eq(const TriEncoding& a, const TriEncoding& b);
/// M rounded up to Y whenever `when` holds.
TriEncoding enc_ceil(const TriEncoding& a, const prop::Formula& when);

/// Harvested values of int/hex/string options. Numeric values are
/// deduplicated by integer value and sorted; string values keep first
/// occurrence order.
class NumericDomain {
 public:
  const std::vector<std::string>& values(const std::string& option) const;
  void add(const std::string& option, OptionType type, const std::string& value);
  void ensure(const std::string& option) { values_[option]; }
  const std::map<std::string, std::vector<std::string>>& all() const { return values_; }

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

NumericDomain collect_numeric_values(const KconfigModel& model);

class EncodeError : public std::runtime_error {
 public:
  enum class Kind { kUnsupportedComparison, kSelectOnNonBoolean, kEmptyChoice, kInvalidModel };
  EncodeError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string module_variable(const std::string& option);
std::string value_variable(const std::string& option, const std::string& value);

TriEncoding encode_expr(const Expr& e, const KconfigModel& model, const NumericDomain& dom);

/// Disjunction of the value variables of `option` satisfying `option <op> literal`.
prop::Formula encode_numeric_constraint(ExprKind op, const std::string& option, const std::string& literal,
                                        const NumericDomain& dom);

struct EncoderOptions {
  /// Bound options by their declared dependency alone, ignoring the raise a
  /// select can force past it. Selects that override dependencies then show
  /// up as differences against the oracle.
  bool strict_dependencies = false;
};

class Encoder {
 public:
  /// Throws EncodeError(kInvalidModel) when validation reports errors.
  explicit Encoder(const KconfigModel& model, EncoderOptions options = {});

  const NumericDomain& domain() const { return domain_; }

  std::vector<prop::Constraint> encode_option(const ConfigItem& item) const;
  std::vector<prop::Constraint> encode_reverse_dependencies() const;
  std::vector<prop::Constraint> encode_choice(const ChoiceBlock& choice) const;
  prop::ConstraintSet translate() const;

  /// Every variable of the encoding in declaration order.
  std::vector<std::string> variables() const;
  /// Maps a configuration onto the encoding's variables.
  prop::Assignment embed(const Configuration& cfg) const;
  /// Same as embed(), aligned with variables().
  std::vector<std::uint8_t> embed_values(const Configuration& cfg) const;

 private:
  TriEncoding option_pair(const ConfigItem& item) const;
  TriEncoding condition(const ExprPtr& e) const;
  TriEncoding prompt_visibility(const std::vector<Prompt>& prompts, const TriEncoding& dep) const;
  TriEncoding reverse_bound(const ConfigItem& target) const;
  prop::Formula modules_off() const;
  std::vector<prop::Constraint> select_constraints(const ConfigItem& selector) const;
  std::vector<prop::Constraint> value_option(const ConfigItem& item) const;
  void default_chain(const ConfigItem& item, const prop::Formula& guard, const TriEncoding& dep,
                     const TriEncoding& raise, const prop::Formula& round_up,
                     std::vector<prop::Constraint>& out) const;

  const KconfigModel& model_;
  EncoderOptions options_;
  NumericDomain domain_;
};

prop::ConstraintSet translate(const KconfigModel& model, EncoderOptions options = {});

}  // namespace kdiff

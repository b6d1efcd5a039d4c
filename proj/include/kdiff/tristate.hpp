// Three-valued kconfig semantics: values, configurations, and expression
// evaluation under a concrete configuration.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kdiff/kconfig.hpp"

namespace kdiff {

enum class Tri : std::uint8_t { N = 0, M = 1, Y = 2 };

constexpr int rank(Tri t) { return static_cast<int>(t); }
constexpr Tri tri_from_rank(int r) { return static_cast<Tri>(r); }

constexpr Tri tri_and(Tri a, Tri b) { return rank(a) < rank(b) ? a : b; }
constexpr Tri tri_or(Tri a, Tri b) { return rank(a) < rank(b) ? b : a; }
constexpr Tri tri_not(Tri a) { return tri_from_rank(2 - rank(a)); }
/// Rounds M up to Y, as kconfig does for options that cannot hold M.
constexpr Tri tri_ceil(Tri a) { return a == Tri::M ? Tri::Y : a; }

char tri_char(Tri t);
std::optional<Tri> tri_from_text(std::string_view text);

/// Value of one option: a Tri for bool/tristate options, text otherwise.
/// Empty text means the option has no value.
using ConfigValue = std::variant<Tri, std::string>;

std::string value_text(const ConfigValue& v);

/// A total assignment of values to the options of one model, indexed by the
/// model's declaration order.
class Configuration {
 public:
  Configuration() = default;
  /// All options at N / empty text.
  explicit Configuration(const KconfigModel& model);
  explicit Configuration(std::vector<ConfigValue> values) : values_(std::move(values)) {}

  const ConfigValue& operator[](std::size_t i) const { return values_[i]; }
  ConfigValue& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  const std::vector<ConfigValue>& values() const { return values_; }

  Tri tri(std::size_t i) const;
  void set(const KconfigModel& model, std::string_view name, ConfigValue v);
  const ConfigValue& get(const KconfigModel& model, std::string_view name) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<ConfigValue> values_;
};

/// Renders `{A=y, B=m, N=5}` listing every option.
std::string describe(const KconfigModel& model, const Configuration& cfg);
/// Renders `{A, NOPROMPT}` with enabled options only (m values get `=m`),
/// plus every non-boolean option that has a value.
std::string describe_enabled(const KconfigModel& model, const Configuration& cfg);

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<long long> parse_integer(std::string_view text);

/// Compares two operand texts with a comparison operator. Equality compares
/// integer values when both sides are numbers and text otherwise; ordering
/// requires numbers on both sides and throws EvalError if not.
bool compare_values(ExprKind op, std::string_view lhs, std::string_view rhs);

/// Value of a leaf in boolean position.
Tri leaf_tri(const Expr& leaf, const Configuration& cfg, const KconfigModel& model);
/// Text of a leaf in comparison position.
std::string leaf_text(const Expr& leaf, const Configuration& cfg, const KconfigModel& model);

Tri eval_expr(const Expr& e, const Configuration& cfg, const KconfigModel& model);
/// Null expressions (absent conditions) evaluate to Y.
Tri eval_condition(const ExprPtr& e, const Configuration& cfg, const KconfigModel& model);

/// Prompt visibility of an item from its own prompts and dependencies: N
/// without a prompt, else the best prompt condition limited by `depends`.
Tri visibility(const ConfigItem& item, const Configuration& cfg, const KconfigModel& model);

}  // namespace kdiff

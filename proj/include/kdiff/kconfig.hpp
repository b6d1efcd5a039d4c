// Kconfig subset: expression AST, declaration model, parser and validation.
//
// The supported language is line oriented:
//
//   config NAME
//     bool|boolean|tristate|int|hex|string ["prompt" [if EXPR]]
//     prompt "text" [if EXPR]
//     default VALUE [if EXPR]
//     depends on EXPR
//     select NAME [if EXPR]
//     range LOW HIGH [if EXPR]
//     option modules
//     help
//       free text, consumed and discarded
//
//   choice
//     bool|tristate ["prompt"]
//     prompt "text" [if EXPR]
//     depends on EXPR
//     config ...
//   endchoice
//
// Unquoted y/m/n and numbers are literals; every other identifier is a
// symbol reference.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kdiff {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind { kSym, kLiteral, kEq, kNeq, kLt, kLeq, kGt, kGeq, kNot, kAnd, kOr };

bool is_comparison(ExprKind kind);
bool is_ordering(ExprKind kind);

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable tristate expression node. Leaves carry text; inner nodes carry
/// one (Not) or two operands.
class Expr {
 public:
  static ExprPtr sym(std::string name);
  static ExprPtr literal(std::string text);
  static ExprPtr binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs);
  static ExprPtr negate(ExprPtr operand);
  static ExprPtr conj(ExprPtr lhs, ExprPtr rhs) { return binary(ExprKind::kAnd, std::move(lhs), std::move(rhs)); }
  static ExprPtr disj(ExprPtr lhs, ExprPtr rhs) { return binary(ExprKind::kOr, std::move(lhs), std::move(rhs)); }

  ExprKind kind() const { return kind_; }
  const std::string& text() const { return text_; }
  const ExprPtr& lhs() const { return lhs_; }
  const ExprPtr& rhs() const { return rhs_; }
  /// Operand of a Not node.
  const ExprPtr& operand() const { return lhs_; }

  bool is_leaf() const { return kind_ == ExprKind::kSym || kind_ == ExprKind::kLiteral; }

 private:
  Expr(ExprKind kind, std::string text, ExprPtr lhs, ExprPtr rhs)
      : kind_(kind), text_(std::move(text)), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

  ExprKind kind_;
  std::string text_;
  ExprPtr lhs_;
  ExprPtr rhs_;
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// Renders an expression in kconfig syntax; re-parsing yields an equal tree.
std::string to_string(const Expr& e);

/// Calls `fn(name)` for every symbol reference in `e` (depth first, left to right).
template <typename Fn>
void for_each_symbol(const ExprPtr& e, Fn&& fn) {
  if (!e) return;
  if (e->kind() == ExprKind::kSym) {
    fn(e->text());
    return;
  }
  for_each_symbol(e->lhs(), fn);
  for_each_symbol(e->rhs(), fn);
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

enum class OptionType { kBool, kTristate, kInt, kHex, kString };

std::string_view to_string(OptionType type);
bool is_boolean_type(OptionType type);
bool is_numeric_type(OptionType type);

struct Prompt {
  std::string text;
  ExprPtr condition;  // null when unconditional
};

struct Default {
  ExprPtr value;
  ExprPtr condition;
};

struct Select {
  std::string target;
  ExprPtr condition;
};

struct Range {
  std::string low;
  std::string high;
  ExprPtr condition;
};

struct ConfigItem {
  std::string name;
  OptionType type = OptionType::kBool;
  std::vector<Prompt> prompts;
  std::vector<Default> defaults;  // source order
  ExprPtr depends;                // conjunction of all `depends on` lines
  std::vector<Select> selects;
  std::vector<Range> ranges;
  std::optional<std::size_t> choice;  // index into KconfigModel::choices
  int line = 0;
};

struct ChoiceBlock {
  std::string id;
  OptionType type = OptionType::kBool;
  std::vector<Prompt> prompts;
  ExprPtr depends;
  std::vector<std::string> members;
  int line = 0;
};

/// A parsed kconfig file. Items keep declaration order, which the oracle's
/// repair pass depends on.
class KconfigModel {
 public:
  KconfigModel() = default;
  KconfigModel(std::vector<ConfigItem> items, std::vector<ChoiceBlock> choices,
               std::optional<std::string> modules_option, std::string source_name);

  const std::vector<ConfigItem>& items() const { return items_; }
  const std::vector<ChoiceBlock>& choices() const { return choices_; }
  const std::optional<std::string>& modules_option() const { return modules_option_; }
  const std::string& source_name() const { return source_name_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  const ConfigItem* find(std::string_view name) const;
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<ConfigItem> items_;
  std::vector<ChoiceBlock> choices_;
  std::optional<std::string> modules_option_;
  std::string source_name_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Structural equality ignoring source line numbers and source name.
bool structurally_equal(const KconfigModel& a, const KconfigModel& b);

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class DuplicateOption : public ParseError {
 public:
  DuplicateOption(const std::string& source, int line, const std::string& name);
};

KconfigModel parse_model(std::string_view source_text, std::string source_name);

/// Parses a standalone expression, e.g. for tests and generators.
ExprPtr parse_expr(std::string_view text);

/// Pretty-prints a model back into the accepted subset.
std::string print_model(const KconfigModel& model);

enum class Severity { kWarning, kError };

struct Diagnostic {
  Severity severity;
  std::string message;
  int line = 0;
};

std::vector<Diagnostic> validate_model(const KconfigModel& model);
bool has_errors(const std::vector<Diagnostic>& diagnostics);
std::string format_diagnostic(const KconfigModel& model, const Diagnostic& d);

std::vector<std::pair<std::string, OptionType>> collect_options(const KconfigModel& model);

}  // namespace kdiff

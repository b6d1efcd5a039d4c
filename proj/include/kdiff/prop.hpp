// Propositional formulas over named boolean variables.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kdiff::prop {

enum class Kind { kVar, kTrue, kFalse, kNot, kAnd, kOr, kImplies, kIff };

class Formula {
 public:
  /// Raw constructors: build exactly the node asked for.
  static Formula var(std::string name);
  static Formula constant(bool value);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula equivalence(Formula lhs, Formula rhs);

  Formula() : Formula(constant(true)) {}

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const std::vector<Formula>& children() const { return node_->children; }
  bool is_true() const { return kind() == Kind::kTrue; }
  bool is_false() const { return kind() == Kind::kFalse; }

  /// Identity of the shared node, used for memoization.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Kind kind, std::string name, std::vector<Formula> children);

  std::shared_ptr<const Node> node_;
};

// Folding builders: drop neutral constants, absorb dominating ones, flatten
// nested And/Or and cancel double negation.
Formula make_not(Formula f);
Formula make_and(std::vector<Formula> children);
Formula make_or(std::vector<Formula> children);
Formula make_and(Formula a, Formula b);
Formula make_or(Formula a, Formula b);
Formula make_implies(Formula a, Formula b);
Formula make_iff(Formula a, Formula b);

/// Constant folding over a whole tree (bottom-up application of the builders).
Formula fold_constants(const Formula& f);

/// Variables in order of first occurrence.
std::vector<std::string> variables(const Formula& f);
std::size_t node_count(const Formula& f);

class MissingVariable : public std::runtime_error {
 public:
  explicit MissingVariable(const std::string& name)
      : std::runtime_error("no value for variable '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class TooManyVariables : public std::runtime_error {
 public:
  TooManyVariables(std::size_t count, std::size_t bound)
      : std::runtime_error("equivalence check over " + std::to_string(count) + " variables exceeds the bound of " +
                           std::to_string(bound)) {}
};

using Assignment = std::map<std::string, bool, std::less<>>;

bool evaluate(const Formula& f, const Assignment& assignment);

/// Postfix program over variable indices for repeated evaluation.
class CompiledFormula {
 public:
  /// Variables not listed in `order` make construction throw MissingVariable.
  CompiledFormula(const Formula& f, const std::vector<std::string>& order);
  bool evaluate(const std::vector<std::uint8_t>& values) const;

 private:
  enum class Op : std::uint8_t { kVar, kTrue, kFalse, kNot, kAnd, kOr, kImplies, kIff };
  struct Instr {
    Op op;
    std::uint32_t arg;
  };
  void emit(const Formula& f, const std::map<std::string, std::uint32_t, std::less<>>& index);

  std::vector<Instr> code_;
  mutable std::vector<std::uint8_t> stack_;
};

inline constexpr std::size_t kEquivalenceBound = 24;

/// True iff `f` and `g` agree on every assignment of their joint variables.
bool equivalent(const Formula& f, const Formula& g);
/// Like equivalent(); on disagreement stores a distinguishing assignment.
bool equivalent(const Formula& f, const Formula& g, Assignment* counterexample);

// ---------------------------------------------------------------------------
// Constraint sets and the `.model` text format
// ---------------------------------------------------------------------------

struct Constraint {
  Formula formula;
  std::string provenance;  // "<item or choice>:<rule>[:detail]"
};

struct ConstraintSet {
  std::vector<Constraint> constraints;

  Formula conjunction() const;
  std::size_t size() const { return constraints.size(); }
  /// Constraints whose provenance begins with `prefix`.
  ConstraintSet filtered(std::string_view prefix) const;
  /// Copy without the constraints whose provenance begins with `prefix`.
  ConstraintSet without(std::string_view prefix) const;
};

/// `!`, `&`, `|`, `=>`, `<=>`, parentheses, `1`/`0` for constants.
std::string to_text(const Formula& f);

class FormatError : public std::runtime_error {
 public:
  FormatError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

Formula parse_formula(std::string_view text, int line = 1);

/// One constraint per line, `<formula>  # <provenance>`.
void write_model(const ConstraintSet& set, std::ostream& sink);
ConstraintSet parse_model_text(std::string_view text);

}  // namespace kdiff::prop

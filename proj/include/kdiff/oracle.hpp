// Reference semantics: a brute-force repair pass over concrete configurations.
//
// A configuration is valid when repairing it changes nothing. The repair walks
// the options in declaration order and recomputes each value from the current
// ones: visible options keep their value within the prompt bound and are raised
// by selects, invisible options take their first applicable default. Choices
// are resolved as a whole at the position of their first member.
//
// This module deliberately shares no code with the encoder.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kdiff/kconfig.hpp"
#include "kdiff/tristate.hpp"

namespace kdiff {

class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(int passes)
      : std::runtime_error("repair did not converge after " + std::to_string(passes) + " passes") {}
};

struct RepairOutcome {
  Configuration repaired;
  bool changed = false;
  /// Some select raised an option above what its dependencies allow.
  bool select_override_fired = false;
};

inline constexpr int kMaxRepairPasses = 32;

/// Repeats the repair pass until nothing changes. Throws NonConvergence after
/// kMaxRepairPasses passes.
RepairOutcome repair(const KconfigModel& model, const Configuration& cfg);
bool is_valid(const KconfigModel& model, const Configuration& cfg);

// ---------------------------------------------------------------------------
// .config files
// ---------------------------------------------------------------------------

class DotconfigError : public std::runtime_error {
 public:
  DotconfigError(int line, const std::string& message)
      : std::runtime_error(".config line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// `CONFIG_X=y`, `CONFIG_X=m`, `# CONFIG_X is not set`, `CONFIG_N=5`,
/// `CONFIG_S="text"`. Numeric options without a value are omitted.
void write_dotconfig(const KconfigModel& model, const Configuration& cfg, std::ostream& sink);
/// Options missing from the text stay at n / empty. Unknown names are ignored;
/// malformed lines and values of the wrong type throw DotconfigError.
Configuration parse_dotconfig(const KconfigModel& model, std::string_view text);
/// Equal values, with int/hex values compared as numbers.
bool same_configuration(const KconfigModel& model, const Configuration& a, const Configuration& b);

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual bool is_valid(const KconfigModel& model, const Configuration& cfg) = 0;
  /// Whether a select overrode a dependency while judging `cfg`.
  virtual bool select_override(const KconfigModel& model, const Configuration& cfg);
  virtual std::string name() const = 0;
};

class BuiltinOracle : public Oracle {
 public:
  bool is_valid(const KconfigModel& model, const Configuration& cfg) override;
  bool select_override(const KconfigModel& model, const Configuration& cfg) override;
  std::string name() const override { return "builtin"; }
};

class ProcessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs a kconfig `conf` binary as `conf --olddefconfig <model file>` with
/// KCONFIG_CONFIG pointing at the configuration under test, and calls the
/// configuration valid when the rewritten file holds the same values.
class ExternalConfOracle : public Oracle {
 public:
  ExternalConfOracle(std::filesystem::path binary, std::filesystem::path model_file);
  bool is_valid(const KconfigModel& model, const Configuration& cfg) override;
  std::string name() const override { return "exec:" + binary_.string(); }

 private:
  std::filesystem::path binary_;
  std::filesystem::path model_file_;
};

}  // namespace kdiff

// Differential testing: enumerate every configuration of a small model, ask an
// oracle which ones are valid, and compare with the translated formula.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kdiff/encoder.hpp"
#include "kdiff/kconfig.hpp"
#include "kdiff/oracle.hpp"
#include "kdiff/prop.hpp"
#include "kdiff/tristate.hpp"

namespace kdiff {

inline constexpr std::size_t kDefaultMaxOptions = 10;

class TooManyOptions : public std::runtime_error {
 public:
  TooManyOptions(std::size_t count, std::size_t bound)
      : std::runtime_error("model has " + std::to_string(count) + " options, more than the bound of " +
                           std::to_string(bound)),
        count_(count),
        bound_(bound) {}
  std::size_t count() const { return count_; }
  std::size_t bound() const { return bound_; }

 private:
  std::size_t count_;
  std::size_t bound_;
};

struct ConfigSpace {
  std::vector<Configuration> configurations;
  /// Options left out of the enumeration, e.g. numbers with no known value.
  std::vector<std::string> notes;
};

/// Cross product of the per-option domains: {n,y} for bool, {n,m,y} for
/// tristate, the harvested values for int/hex/string. Rows are ordered by the
/// total rank of their values, then by declaration order, so the smallest
/// configurations come first and earlier options are switched on first.
ConfigSpace enumerate_configs(const KconfigModel& model, std::size_t max_options = kDefaultMaxOptions);

struct TruthRow {
  Configuration configuration;
  bool valid = false;
  bool select_override = false;
};

struct TruthTable {
  std::vector<TruthRow> rows;
};

/// Throws whatever the oracle throws; one NonConvergence fails the table.
TruthTable ground_truth(const KconfigModel& model, Oracle& oracle, std::size_t max_options = kDefaultMaxOptions);

enum class Classification { kFailure, kKnownLimitation };
std::string_view to_string(Classification c);

struct Mismatch {
  Configuration configuration;
  /// The configuration rendered as `{A, B=m, N=5}`.
  std::string description;
  bool oracle_verdict = false;
  bool formula_verdict = false;
  Classification classification = Classification::kFailure;
  /// Provenance tags of the constraints that are false on this configuration.
  std::vector<std::string> violated;
};

std::string format_mismatch(const Mismatch& m);

struct TestReport {
  std::string name;
  std::size_t options = 0;
  std::size_t configurations = 0;
  std::size_t constraints = 0;
  std::vector<Mismatch> mismatches;
  std::vector<std::string> notes;
  /// Parse, validation or bound errors; the file then counts as failing.
  std::string error;
  double millis = 0;

  std::size_t failures() const;
  std::size_t known_limitations() const;
  bool pass() const { return error.empty() && failures() == 0; }
};

/// Comment directives read from a model file:
///   # difftest: drop-constraint <provenance prefix>
///   # difftest: real-kconfig-compatible
struct Directives {
  std::vector<std::string> drop_constraints;
  bool real_kconfig_compatible = false;
};

Directives parse_directives(std::string_view source);

struct CheckOptions {
  std::size_t max_options = kDefaultMaxOptions;
  EncoderOptions encoder;
  /// Constraints whose provenance starts with one of these are removed
  /// before comparing (used to prove the harness notices missing ones).
  std::vector<std::string> drop_constraints;
};

/// Compares `constraints` row by row against a truth table of `model`.
TestReport compare(const KconfigModel& model, const prop::ConstraintSet& constraints, const Encoder& encoder,
                   const TruthTable& table);

/// Translate, build the truth table, compare.
TestReport check_model(const KconfigModel& model, Oracle& oracle, const CheckOptions& options = {});

/// Disjunction over the valid rows of each row's full assignment to the
/// encoder's variables.
prop::Formula truth_table_formula(const TruthTable& table, const Encoder& encoder);

// ---------------------------------------------------------------------------
// Corpus runs
// ---------------------------------------------------------------------------

using OracleFactory = std::function<std::unique_ptr<Oracle>(const std::filesystem::path& model_file)>;

struct CorpusOptions {
  std::size_t max_options = kDefaultMaxOptions;
  unsigned jobs = 1;
  EncoderOptions encoder;
  /// Builtin oracle when empty.
  OracleFactory oracle;
  /// Only run files carrying the real-kconfig-compatible directive.
  bool compatible_only = false;
  /// Additional generated models.
  std::size_t generated = 0;
  std::uint64_t seed = 1;
};

struct CorpusReport {
  std::vector<TestReport> files;  // sorted by name
  std::uint64_t seed = 0;
  std::size_t generated = 0;

  std::size_t failing_files() const;
  bool pass() const { return failing_files() == 0; }
};

/// Reads and checks one model file, honouring its directives.
TestReport check_file(const std::filesystem::path& file, Oracle& oracle, const CheckOptions& options = {});

/// Checks every `.kconfig` file of `directory`. Per-file errors are recorded
/// in the report. Throws std::filesystem::filesystem_error if the directory
/// cannot be read.
CorpusReport run_corpus(const std::filesystem::path& directory, const CorpusOptions& options);

/// JSON document with one record per file. Timing fields are left out when
/// `with_timing` is false so runs can be compared byte for byte.
std::string report_json(const CorpusReport& report, bool with_timing = true);

/// Kconfig source of a random model with at most six options. References only
/// point backwards (selects point forwards), so repair always converges.
std::string generate_model(std::uint64_t seed);

}  // namespace kdiff

// kconfdiff: translate kconfig models to propositional formulas and test the
// translation against a brute-force oracle.
//
// Exit status: 0 pass, 1 differential failure, 2 input error, 3 bound exceeded.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kdiff/cnf.hpp"
#include "kdiff/difftest.hpp"
#include "kdiff/encoder.hpp"
#include "kdiff/kconfig.hpp"
#include "kdiff/oracle.hpp"
#include "kdiff/prop.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFailure = 1;
constexpr int kInputError = 2;
constexpr int kBoundExceeded = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

// Parses and validates; warnings go to stderr, errors throw.
kdiff::KconfigModel load_model(const std::string& path, const std::string& text) {
  kdiff::KconfigModel model = kdiff::parse_model(text, path);
  auto diags = kdiff::validate_model(model);
  for (const auto& d : diags) std::cerr << kdiff::format_diagnostic(model, d) << '\n';
  if (kdiff::has_errors(diags)) throw InputError(path + ": invalid model");
  return model;
}

// "builtin" or "exec:<path>".
kdiff::OracleFactory oracle_factory(const std::string& spec) {
  if (spec == "builtin") return {};
  if (spec.rfind("exec:", 0) == 0 && spec.size() > 5) {
    std::string binary = spec.substr(5);
    return [binary](const std::filesystem::path& model_file) {
      return std::make_unique<kdiff::ExternalConfOracle>(binary, model_file);
    };
  }
  throw InputError("unknown oracle '" + spec + "', expected builtin or exec:<path>");
}

std::unique_ptr<kdiff::Oracle> make_oracle(const std::string& spec, const std::string& model_file) {
  auto factory = oracle_factory(spec);
  if (!factory) return std::make_unique<kdiff::BuiltinOracle>();
  return factory(model_file);
}

int cmd_translate(const std::string& file, const std::string& model_out, const std::string& dimacs_out) {
  const std::string text = read_file(file);
  kdiff::KconfigModel model = load_model(file, text);
  kdiff::Encoder encoder(model);
  const kdiff::prop::ConstraintSet set = encoder.translate();

  std::ostringstream model_text;
  kdiff::prop::write_model(set, model_text);
  if (!model_out.empty()) {
    write_file(model_out, model_text.str());
  } else if (dimacs_out.empty()) {
    std::cout << model_text.str();
  }
  if (!dimacs_out.empty()) {
    auto cnf = kdiff::prop::tseitin_cnf(set.conjunction(), encoder.variables());
    std::ostringstream dimacs;
    kdiff::prop::write_dimacs(cnf, dimacs);
    write_file(dimacs_out, dimacs.str());
  }
  std::cerr << "variables: " << encoder.variables().size() << " constraints: " << set.size() << '\n';
  return kPass;
}

int cmd_check(const std::string& file, std::size_t max_options, const std::string& oracle_spec, bool strict) {
  const std::string text = read_file(file);
  kdiff::KconfigModel model = load_model(file, text);
  kdiff::CheckOptions options;
  options.max_options = max_options;
  options.encoder.strict_dependencies = strict;
  options.drop_constraints = kdiff::parse_directives(text).drop_constraints;
  auto oracle = make_oracle(oracle_spec, file);
  kdiff::TestReport report = kdiff::check_model(model, *oracle, options);

  for (const auto& note : report.notes) std::cout << "note: " << note << '\n';
  for (const auto& m : report.mismatches) std::cout << kdiff::format_mismatch(m) << '\n';
  std::cout << file << ": " << report.configurations << " configurations, " << report.failures() << " failures, "
            << report.known_limitations() << " known limitations\n";
  if (report.failures() > 0) return kFailure;
  if (report.known_limitations() > 0) std::cerr << "warning: mismatches caused by selects overriding dependencies\n";
  return kPass;
}

int cmd_corpus(const std::string& dir, kdiff::CorpusOptions options, const std::string& report_path) {
  if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir);
  kdiff::CorpusReport report = kdiff::run_corpus(dir, options);
  for (const auto& r : report.files) {
    if (r.pass()) continue;
    std::cout << "FAIL " << r.name;
    if (!r.error.empty()) std::cout << ": " << r.error;
    std::cout << '\n';
    for (const auto& m : r.mismatches) std::cout << "  " << kdiff::format_mismatch(m) << '\n';
  }
  std::cout << report.files.size() << " models, " << report.failing_files() << " failing\n";
  if (!report_path.empty()) write_file(report_path, kdiff::report_json(report));
  return report.pass() ? kPass : kFailure;
}

int cmd_stats(const std::string& file) {
  const std::string text = read_file(file);
  kdiff::KconfigModel model = load_model(file, text);
  kdiff::Encoder encoder(model);
  const auto set = encoder.translate();
  const auto cnf = kdiff::prop::tseitin_cnf(set.conjunction(), encoder.variables());
  std::cout << "options: " << model.size() << '\n'
            << "choices: " << model.choices().size() << '\n'
            << "constraints: " << set.size() << '\n'
            << "variables: " << encoder.variables().size() << '\n'
            << "cnf variables: " << cnf.num_vars << '\n'
            << "cnf clauses: " << cnf.clauses.size() << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translate kconfig models to propositional logic and test the translation"};
  app.require_subcommand(1);

  std::string file;
  std::string model_out;
  std::string dimacs_out;
  std::size_t max_options = kdiff::kDefaultMaxOptions;
  std::string oracle = "builtin";
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  std::size_t generated = 0;
  std::string report_path;
  bool strict = false;
  bool compatible_only = false;

  auto* translate = app.add_subcommand("translate", "Write the constraints of a model");
  translate->add_option("file", file, "kconfig file")->required();
  translate->add_option("--model", model_out, "write the constraint text here");
  translate->add_option("--dimacs", dimacs_out, "write DIMACS CNF here");

  auto* check = app.add_subcommand("check", "Compare the translation with the oracle on every configuration");
  check->add_option("file", file, "kconfig file")->required();
  check->add_option("--max-options", max_options, "largest model to enumerate");
  check->add_option("--oracle", oracle, "builtin or exec:<conf binary>");
  check->add_flag("--strict-dependencies", strict, "bound options by their dependencies alone");

  auto* corpus = app.add_subcommand("corpus", "Check every .kconfig file in a directory");
  corpus->add_option("dir", file, "corpus directory")->required();
  corpus->add_option("--max-options", max_options, "largest model to enumerate");
  corpus->add_option("--oracle", oracle, "builtin or exec:<conf binary>");
  corpus->add_option("--jobs", jobs, "files checked in parallel");
  corpus->add_option("--seed", seed, "seed of the generated models");
  corpus->add_option("--generated", generated, "number of generated models to add");
  corpus->add_option("--report", report_path, "write a JSON report here");
  corpus->add_flag("--strict-dependencies", strict, "bound options by their dependencies alone");
  corpus->add_flag("--compatible-only", compatible_only, "only files marked real-kconfig-compatible");

  auto* stats = app.add_subcommand("stats", "Print model and formula sizes");
  stats->add_option("file", file, "kconfig file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kInputError;
  }

  try {
    if (translate->parsed()) return cmd_translate(file, model_out, dimacs_out);
    if (check->parsed()) return cmd_check(file, max_options, oracle, strict);
    if (corpus->parsed()) {
      kdiff::CorpusOptions options;
      options.max_options = max_options;
      options.jobs = jobs;
      options.seed = seed;
      options.generated = generated;
      options.oracle = oracle_factory(oracle);
      options.encoder.strict_dependencies = strict;
      options.compatible_only = compatible_only;
      return cmd_corpus(file, options, report_path);
    }
    return cmd_stats(file);
  } catch (const kdiff::TooManyOptions& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBoundExceeded;
  } catch (const kdiff::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const kdiff::EncodeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const kdiff::ProcessError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}

#include "kdiff/difftest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace kdiff {

// ---------------------------------------------------------------------------
// Enumeration and ground truth
// ---------------------------------------------------------------------------

ConfigSpace enumerate_configs(const KconfigModel& model, std::size_t max_options) {
  if (model.size() > max_options) throw TooManyOptions(model.size(), max_options);
  ConfigSpace space;
  const NumericDomain dom = collect_numeric_values(model);

  std::vector<std::vector<ConfigValue>> domains;
  for (const ConfigItem& item : model.items()) {
    std::vector<ConfigValue> values;
    switch (item.type) {
      case OptionType::kBool:
        values = {Tri::N, Tri::Y};
        break;
      case OptionType::kTristate:
        values = {Tri::N, Tri::M, Tri::Y};
        break;
      default:
        for (const std::string& v : dom.values(item.name)) values.emplace_back(v);
        if (values.empty()) {
          space.notes.push_back(item.name + ": no known values, not enumerated");
          values.emplace_back(std::string());
        }
    }
    domains.push_back(std::move(values));
  }

  std::vector<std::vector<std::size_t>> rows;
  std::vector<std::size_t> idx(domains.size(), 0);
  while (true) {
    rows.push_back(idx);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == domains[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  auto weight = [](const std::vector<std::size_t>& r) {
    std::size_t w = 0;
    for (std::size_t v : r) w += v;
    return w;
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
    std::size_t wa = weight(a);
    std::size_t wb = weight(b);
    if (wa != wb) return wa < wb;
    return a > b;
  });

  for (const auto& r : rows) {
    std::vector<ConfigValue> values;
    for (std::size_t i = 0; i < r.size(); ++i) values.push_back(domains[i][r[i]]);
    space.configurations.emplace_back(std::move(values));
  }
  return space;
}

TruthTable ground_truth(const KconfigModel& model, Oracle& oracle, std::size_t max_options) {
  TruthTable table;
  for (Configuration& cfg : enumerate_configs(model, max_options).configurations) {
    TruthRow row;
    row.valid = oracle.is_valid(model, cfg);
    row.select_override = oracle.select_override(model, cfg);
    row.configuration = std::move(cfg);
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

std::string_view to_string(Classification c) {
  return c == Classification::kFailure ? "FAILURE" : "KNOWN-LIMITATION";
}

std::string format_mismatch(const Mismatch& m) {
  std::string out = std::string(to_string(m.classification)) + ": " + m.description +
                    " oracle=" + (m.oracle_verdict ? "valid" : "invalid") +
                    " formula=" + (m.formula_verdict ? "valid" : "invalid");
  if (!m.violated.empty()) {
    out += " violated:";
    for (const std::string& tag : m.violated) out += " " + tag;
  }
  return out;
}

std::size_t TestReport::failures() const {
  return static_cast<std::size_t>(std::count_if(mismatches.begin(), mismatches.end(), [](const Mismatch& m) {
    return m.classification == Classification::kFailure;
  }));
}

std::size_t TestReport::known_limitations() const { return mismatches.size() - failures(); }

TestReport compare(const KconfigModel& model, const prop::ConstraintSet& constraints, const Encoder& encoder,
                   const TruthTable& table) {
  TestReport report;
  report.name = model.source_name();
  report.options = model.size();
  report.configurations = table.rows.size();
  report.constraints = constraints.size();

  const auto vars = encoder.variables();
  std::vector<prop::CompiledFormula> compiled;
  for (const prop::Constraint& c : constraints.constraints) compiled.emplace_back(c.formula, vars);

  for (const TruthRow& row : table.rows) {
    const auto values = encoder.embed_values(row.configuration);
    std::vector<std::string> violated;
    for (std::size_t i = 0; i < compiled.size(); ++i) {
      if (!compiled[i].evaluate(values)) violated.push_back(constraints.constraints[i].provenance);
    }
    const bool formula = violated.empty();
    if (formula == row.valid) continue;
    Mismatch m;
    m.configuration = row.configuration;
    m.description = describe_enabled(model, row.configuration);
    m.oracle_verdict = row.valid;
    m.formula_verdict = formula;
    m.classification = row.select_override ? Classification::kKnownLimitation : Classification::kFailure;
    m.violated = std::move(violated);
    report.mismatches.push_back(std::move(m));
  }
  return report;
}

TestReport check_model(const KconfigModel& model, Oracle& oracle, const CheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (model.size() > options.max_options) throw TooManyOptions(model.size(), options.max_options);
  Encoder encoder(model, options.encoder);
  prop::ConstraintSet constraints = encoder.translate();
  for (const std::string& prefix : options.drop_constraints) constraints = constraints.without(prefix);
  const TruthTable table = ground_truth(model, oracle, options.max_options);
  TestReport report = compare(model, constraints, encoder, table);
  report.notes = enumerate_configs(model, options.max_options).notes;
  report.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

prop::Formula truth_table_formula(const TruthTable& table, const Encoder& encoder) {
  const auto vars = encoder.variables();
  std::vector<prop::Formula> rows;
  for (const TruthRow& row : table.rows) {
    if (!row.valid) continue;
    const auto values = encoder.embed_values(row.configuration);
    std::vector<prop::Formula> lits;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      prop::Formula v = prop::Formula::var(vars[i]);
      lits.push_back(values[i] ? v : prop::make_not(v));
    }
    rows.push_back(prop::make_and(std::move(lits)));
  }
  return prop::make_or(std::move(rows));
}

// ---------------------------------------------------------------------------
// Files and corpora
// ---------------------------------------------------------------------------

Directives parse_directives(std::string_view source) {
  Directives out;
  std::istringstream in{std::string(source)};
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find("# difftest:");
    if (pos == std::string::npos) continue;
    std::istringstream words(line.substr(pos + 11));
    std::string word;
    words >> word;
    if (word == "drop-constraint") {
      std::string prefix;
      if (words >> prefix) out.drop_constraints.push_back(prefix);
    } else if (word == "real-kconfig-compatible") {
      out.real_kconfig_compatible = true;
    }
  }
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TestReport check_source(const std::string& text, const std::string& name, Oracle& oracle, CheckOptions options) {
  const auto start = std::chrono::steady_clock::now();
  TestReport report;
  try {
    Directives directives = parse_directives(text);
    options.drop_constraints.insert(options.drop_constraints.end(), directives.drop_constraints.begin(),
                                    directives.drop_constraints.end());
    KconfigModel model = parse_model(text, name);
    report = check_model(model, oracle, options);
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  report.name = name;
  report.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

TestReport check_file(const std::filesystem::path& file, Oracle& oracle, const CheckOptions& options) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const std::exception& e) {
    TestReport report;
    report.name = file.filename().string();
    report.error = e.what();
    return report;
  }
  return check_source(text, file.filename().string(), oracle, options);
}

std::size_t CorpusReport::failing_files() const {
  return static_cast<std::size_t>(
      std::count_if(files.begin(), files.end(), [](const TestReport& r) { return !r.pass(); }));
}

CorpusReport run_corpus(const std::filesystem::path& directory, const CorpusOptions& options) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".kconfig") continue;
    if (options.compatible_only) {
      std::string text;
      try {
        text = read_file(entry.path());
      } catch (const std::exception&) {
        // Unreadable files still get a record below.
      }
      if (!parse_directives(text).real_kconfig_compatible) continue;
    }
    paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());

  CheckOptions check;
  check.max_options = options.max_options;
  check.encoder = options.encoder;

  const std::size_t total = paths.size() + options.generated;
  std::vector<TestReport> results(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    BuiltinOracle builtin;
    for (std::size_t i = next++; i < total; i = next++) {
      if (i < paths.size()) {
        std::unique_ptr<Oracle> own;
        Oracle* oracle = &builtin;
        if (options.oracle) {
          try {
            own = options.oracle(paths[i]);
            oracle = own.get();
          } catch (const std::exception& e) {
            results[i].name = paths[i].filename().string();
            results[i].error = e.what();
            continue;
          }
        }
        results[i] = check_file(paths[i], *oracle, check);
      } else {
        std::size_t k = i - paths.size();
        char name[64];
        std::snprintf(name, sizeof name, "generated-%04zu", k);
        results[i] = check_source(generate_model(options.seed + k), name, builtin, check);
      }
    }
  };
  const unsigned jobs = std::max(1u, options.jobs);
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  CorpusReport report;
  report.files = std::move(results);
  std::stable_sort(report.files.begin(), report.files.end(),
                   [](const TestReport& a, const TestReport& b) { return a.name < b.name; });
  report.seed = options.seed;
  report.generated = options.generated;
  return report;
}

std::string report_json(const CorpusReport& report, bool with_timing) {
  using nlohmann::json;
  json files = json::array();
  json failing = json::array();
  for (const TestReport& r : report.files) {
    json mismatches = json::array();
    for (const Mismatch& m : r.mismatches) {
      mismatches.push_back({{"configuration", m.description},
                            {"oracle", m.oracle_verdict},
                            {"formula", m.formula_verdict},
                            {"classification", std::string(to_string(m.classification))},
                            {"violated", m.violated}});
    }
    json rec = {{"name", r.name},
                {"options", r.options},
                {"configurations", r.configurations},
                {"constraints", r.constraints},
                {"failures", r.failures()},
                {"known_limitations", r.known_limitations()},
                {"mismatches", mismatches},
                {"notes", r.notes},
                {"pass", r.pass()}};
    if (!r.error.empty()) rec["error"] = r.error;
    if (with_timing) rec["millis"] = r.millis;
    files.push_back(std::move(rec));
    if (!r.pass()) failing.push_back(r.name);
  }
  json doc = {{"pass", report.pass()},
              {"files", report.files.size()},
              {"failing_files", failing},
              {"seed", report.seed},
              {"generated", report.generated},
              {"results", files}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Random models
// ---------------------------------------------------------------------------

namespace {

class ModelGenerator {
 public:
  explicit ModelGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string run() {
    const int count = pick(1, 6);
    const bool modules = count >= 2 && chance(0.2);
    const bool choice = count >= (modules ? 4 : 3) && chance(0.4);
    int choice_start = -1;
    int choice_size = 0;
    if (choice) {
      choice_size = pick(2, std::min(3, count - (modules ? 2 : 1)));
      choice_start = pick(modules ? 1 : 0, count - choice_size);
    }

    for (int i = 0; i < count; ++i) {
      Option o;
      o.name = "G" + std::to_string(i);
      o.tristate = !(modules && i == 0) && chance(0.5);
      o.in_choice = choice && i >= choice_start && i < choice_start + choice_size;
      options_.push_back(o);
    }
    if (modules) options_[0].name = "MODULES";

    std::ostringstream out;
    for (int i = 0; i < count; ++i) {
      if (choice && i == choice_start) emit_choice(out, choice_start, choice_size);
      if (options_[i].in_choice) continue;
      if (modules && i == 0) {
        out << "config MODULES\n\tbool \"modules\"\n\toption modules\n\n";
        continue;
      }
      emit_option(out, i);
    }
    return out.str();
  }

 private:
  struct Option {
    std::string name;
    bool tristate = false;
    bool in_choice = false;
  };

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  // Expression over the options declared before `limit`.
  std::string expr(int limit, int depth) {
    std::vector<int> refs;
    for (int j = 0; j < limit; ++j) refs.push_back(j);
    if (refs.empty()) return chance(0.5) ? "y" : "m";
    const std::string& sym = options_[refs[pick(0, static_cast<int>(refs.size()) - 1)]].name;
    if (depth <= 0) return sym;
    switch (pick(0, 5)) {
      case 0:
        return "!" + sym;
      case 1:
        return expr(limit, depth - 1) + " && " + expr(limit, depth - 1);
      case 2:
        return "(" + expr(limit, depth - 1) + " || " + expr(limit, depth - 1) + ")";
      case 3: {
        static const char* kVals[] = {"n", "m", "y"};
        return sym + (chance(0.5) ? " = " : " != ") + kVals[pick(0, 2)];
      }
      default:
        return sym;
    }
  }

  std::string tri_value(int limit) {
    switch (pick(0, 3)) {
      case 0:
        return "y";
      case 1:
        return "m";
      case 2:
        return "n";
      default:
        return expr(limit, 1);
    }
  }

  void emit_option(std::ostringstream& out, int i) {
    const Option& o = options_[i];
    out << "config " << o.name << "\n\t" << (o.tristate ? "tristate" : "bool");
    if (chance(0.7)) {
      out << " \"" << o.name << " prompt\"";
      if (i > 0 && chance(0.2)) out << " if " << expr(i, 1);
    }
    out << "\n";
    if (i > 0 && chance(0.4)) out << "\tdepends on " << expr(i, 2) << "\n";
    const int defaults = pick(0, 2);
    for (int d = 0; d < defaults; ++d) {
      out << "\tdefault " << tri_value(i);
      if (i > 0 && chance(0.5)) out << " if " << expr(i, 1);
      out << "\n";
    }
    if (chance(0.3)) {
      std::vector<int> targets;
      for (std::size_t j = i + 1; j < options_.size(); ++j) {
        if (!options_[j].in_choice && options_[j].name != "MODULES") targets.push_back(static_cast<int>(j));
      }
      if (!targets.empty()) {
        out << "\tselect " << options_[targets[pick(0, static_cast<int>(targets.size()) - 1)]].name;
        if (i > 0 && chance(0.3)) out << " if " << expr(i, 1);
        out << "\n";
      }
    }
    out << "\n";
  }

  void emit_choice(std::ostringstream& out, int start, int size) {
    const bool tristate = chance(0.4);
    out << "choice\n";
    if (chance(0.8)) out << "\tprompt \"choice prompt\"\n";
    out << "\t" << (tristate ? "tristate" : "bool") << "\n";
    if (start > 0 && chance(0.3)) out << "\tdepends on " << expr(start, 1) << "\n";
    out << "\n";
    for (int k = start; k < start + size; ++k) {
      Option& o = options_[k];
      o.tristate = tristate && chance(0.8);
      out << "config " << o.name << "\n\t" << (o.tristate ? "tristate" : "bool");
      if (chance(0.8)) out << " \"" << o.name << " prompt\"";
      out << "\n";
      if (start > 0 && chance(0.3)) out << "\tdepends on " << expr(start, 1) << "\n";
      if (chance(0.4)) out << "\tdefault " << tri_value(start) << "\n";
      if (chance(0.2)) {
        std::vector<int> targets;
        for (std::size_t j = start + size; j < options_.size(); ++j) {
          if (!options_[j].in_choice) targets.push_back(static_cast<int>(j));
        }
        if (!targets.empty()) out << "\tselect " << options_[targets[pick(0, static_cast<int>(targets.size()) - 1)]].name << "\n";
      }
      out << "\n";
    }
    out << "endchoice\n\n";
  }

  std::mt19937_64 rng_;
  std::vector<Option> options_;
};

}  // namespace

std::string generate_model(std::uint64_t seed) { return ModelGenerator(seed).run(); }

}  // namespace kdiff

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "kdiff/prop.hpp"
#include "support/models.hpp"

#ifndef KDIFF_CLI
#error "KDIFF_CLI must name the kconfdiff binary"
#endif

namespace kdiff {
namespace {

struct CliRun {
  int status = -1;
  std::string out;
  std::string err;
};

std::filesystem::path scratch() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / ("kdiff-cli-" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliRun run(const std::string& args) {
  const auto out = scratch() / "stdout";
  const auto err = scratch() / "stderr";
  std::string cmd = std::string(KDIFF_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  int raw = std::system(cmd.c_str());
  CliRun r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string src(const std::string& relative) { return testing::source_path(relative); }

TEST(Cli, TranslateNoPromptChoice) {
  CliRun r = run("translate " + src("corpus/choice_noprompt.kconfig"));
  ASSERT_EQ(r.status, 0) << r.err;
  prop::ConstraintSet set = prop::parse_model_text(r.out);
  prop::Formula expected = prop::parse_formula("(A | B) & !(A & B) & NOPROMPT");
  EXPECT_TRUE(prop::equivalent(set.conjunction(), expected)) << r.out;
  EXPECT_NE(r.err.find("constraints: 3"), std::string::npos);
}

TEST(Cli, TranslateWritesFiles) {
  const auto model = scratch() / "golden.model";
  const auto dimacs = scratch() / "golden.cnf";
  CliRun r = run("translate " + src("corpus/choice_noprompt.kconfig") + " --model " + model.string() +
              " --dimacs " + dimacs.string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(prop::parse_model_text(slurp(model)).size(), 3u);
  EXPECT_NE(slurp(dimacs).find("p cnf "), std::string::npos);
}

TEST(Cli, EmptyModel) {
  const auto empty = scratch() / "empty.kconfig";
  std::ofstream(empty).flush();
  const auto dimacs = scratch() / "empty.cnf";
  CliRun r = run("translate " + empty.string() + " --dimacs " + dimacs.string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::string cnf = slurp(dimacs);
  EXPECT_NE(cnf.find("p cnf 0 0\n"), std::string::npos) << cnf;
  EXPECT_EQ(run("translate " + empty.string()).out, "");
}

TEST(Cli, SyntaxErrorIsAnInputError) {
  CliRun r = run("translate " + src("tests/fixtures/syntax_error.kconfig"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find(":6:16:"), std::string::npos) << r.err;
  EXPECT_EQ(run("check /nonexistent/file.kconfig").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("check " + src("corpus/choice_noprompt.kconfig") + " --oracle bogus").status, 2);
}

TEST(Cli, CheckNoPromptChoicePasses) {
  CliRun r = run("check " + src("corpus/choice_noprompt.kconfig"));
  EXPECT_EQ(r.status, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("8 configurations, 0 failures"), std::string::npos) << r.out;
}

TEST(Cli, CheckSabotageFails) {
  CliRun r = run("check " + src("tests/fixtures/sabotage_choice_noprompt.kconfig"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("FAILURE: {A, B, NOPROMPT} oracle=invalid formula=valid"), std::string::npos) << r.out;
}

TEST(Cli, BoundExceeded) {
  CliRun r = run("check " + src("tests/fixtures/twelve_options.kconfig"));
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.err.find("12 options"), std::string::npos) << r.err;
  EXPECT_EQ(run("check " + src("tests/fixtures/twelve_options.kconfig") + " --max-options 12").status, 0);
}

TEST(Cli, StrictDependenciesWarnButPass) {
  CliRun r = run("check --strict-dependencies " + src("corpus/select_overrides_dependency.kconfig"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("KNOWN-LIMITATION"), std::string::npos) << r.out;
}

TEST(Cli, Corpus) {
  const auto report = scratch() / "report.json";
  CliRun r = run("corpus " + src("corpus") + " --jobs 4 --generated 10 --report " + report.string());
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find(", 0 failing"), std::string::npos);
  EXPECT_NE(slurp(report).find("\"generated-0009\""), std::string::npos);
  EXPECT_EQ(run("corpus /nonexistent/dir").status, 2);
}

TEST(Cli, CorpusWithSabotageFails) {
  const auto dir = scratch() / "corpus";
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(src("tests/fixtures/sabotage_choice_noprompt.kconfig"), dir / "sabotage.kconfig",
                             std::filesystem::copy_options::overwrite_existing);
  CliRun r = run("corpus " + dir.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("FAIL sabotage.kconfig"), std::string::npos) << r.out;
}

TEST(Cli, Stats) {
  CliRun r = run("stats " + src("corpus/choice_noprompt.kconfig"));
  ASSERT_EQ(r.status, 0);
  std::map<std::string, long> fields;
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    auto colon = line.find(": ");
    ASSERT_NE(colon, std::string::npos) << line;
    fields[line.substr(0, colon)] = std::stol(line.substr(colon + 2));
  }
  EXPECT_EQ(fields["options"], 3);
  EXPECT_EQ(fields["choices"], 1);
  EXPECT_EQ(fields["constraints"], 3);
  EXPECT_EQ(fields["variables"], 3);
  EXPECT_GE(fields["cnf variables"], fields["variables"]);
  EXPECT_GT(fields["cnf clauses"], 0);
}

}  // namespace
}  // namespace kdiff

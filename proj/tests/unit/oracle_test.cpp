#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kdiff/difftest.hpp"
#include "kdiff/oracle.hpp"
#include "support/models.hpp"

namespace kdiff {
namespace {

using testing::kNoPromptChoice;

Configuration golden_config(const KconfigModel& m, bool a, bool b, bool np) {
  Configuration cfg(m);
  cfg.set(m, "A", a ? Tri::Y : Tri::N);
  cfg.set(m, "B", b ? Tri::Y : Tri::N);
  cfg.set(m, "NOPROMPT", np ? Tri::Y : Tri::N);
  return cfg;
}

TEST(Repair, NoPromptChoiceValidRowIsUnchanged) {
  KconfigModel m = parse_model(kNoPromptChoice, "golden");
  RepairOutcome out = repair(m, golden_config(m, true, false, true));
  EXPECT_FALSE(out.changed);
  EXPECT_FALSE(out.select_override_fired);
}

TEST(Repair, NoPromptChoiceEmptyRowIsRepaired) {
  KconfigModel m = parse_model(kNoPromptChoice, "golden");
  RepairOutcome out = repair(m, golden_config(m, false, false, false));
  EXPECT_TRUE(out.changed);
  EXPECT_EQ(out.repaired.tri(2), Tri::Y);
  EXPECT_EQ(rank(out.repaired.tri(0)) + rank(out.repaired.tri(1)), rank(Tri::Y));
}

TEST(IsValid, NoPromptChoiceColumn) {
  KconfigModel m = parse_model(kNoPromptChoice, "golden");
  for (int bits = 0; bits < 8; ++bits) {
    bool a = bits & 1, b = bits & 2, np = bits & 4;
    bool expected = np && (a != b);
    EXPECT_EQ(is_valid(m, golden_config(m, a, b, np)), expected) << bits;
  }
}

TEST(IsValid, TrivialModels) {
  KconfigModel empty = parse_model("", "e");
  EXPECT_TRUE(is_valid(empty, Configuration(empty)));

  KconfigModel x = parse_model("config X\n\tbool \"x\"\n", "x");
  Configuration on(x);
  on.set(x, "X", Tri::Y);
  EXPECT_FALSE(repair(x, on).changed);
  EXPECT_TRUE(is_valid(x, Configuration(x)));

  // Without a prompt nothing can switch the option on.
  KconfigModel hidden = parse_model("config X\n\tbool\n", "x");
  Configuration h(hidden);
  h.set(hidden, "X", Tri::Y);
  EXPECT_FALSE(is_valid(hidden, h));
}

TEST(IsValid, SelectValidSet) {
  KconfigModel m = parse_model(testing::read_source("corpus/select_bool.kconfig"), "sel");
  std::vector<std::string> valid;
  for (int bits = 0; bits < 4; ++bits) {
    Configuration cfg(m);
    cfg.set(m, "O", bits & 1 ? Tri::Y : Tri::N);
    cfg.set(m, "P", bits & 2 ? Tri::Y : Tri::N);
    if (is_valid(m, cfg)) valid.push_back(describe_enabled(m, cfg));
  }
  EXPECT_EQ(valid, (std::vector<std::string>{"{}", "{P}", "{O, P}"}));
}

TEST(IsValid, TristateSelect) {
  KconfigModel m = parse_model(testing::read_source("corpus/select_tristate_selector.kconfig"), "sel");
  Configuration cfg(m);
  cfg.set(m, "O", Tri::M);
  EXPECT_FALSE(is_valid(m, cfg));
  cfg.set(m, "P", Tri::M);
  EXPECT_TRUE(is_valid(m, cfg));
  cfg.set(m, "P", Tri::Y);
  EXPECT_TRUE(is_valid(m, cfg));
}

TEST(Repair, SelectOverrideIsFlagged) {
  KconfigModel m = parse_model(testing::read_source("corpus/select_overrides_dependency.kconfig"), "ov");
  Configuration cfg(m);
  cfg.set(m, "O", Tri::Y);
  cfg.set(m, "P", Tri::Y);
  RepairOutcome out = repair(m, cfg);
  EXPECT_FALSE(out.changed);
  EXPECT_TRUE(out.select_override_fired);
  cfg.set(m, "O", Tri::N);
  EXPECT_FALSE(is_valid(m, cfg));
  EXPECT_FALSE(repair(m, cfg).select_override_fired);
}

TEST(Repair, ModulesOffRoundsUp) {
  KconfigModel m = parse_model(testing::read_source("corpus/modules_gating.kconfig"), "mod");
  Configuration cfg(m);
  cfg.set(m, "T", Tri::M);
  RepairOutcome out = repair(m, cfg);
  EXPECT_TRUE(out.changed);
  EXPECT_EQ(std::get<Tri>(out.repaired.get(m, "T")), Tri::Y);
  cfg.set(m, "MODULES", Tri::Y);
  EXPECT_TRUE(is_valid(m, cfg));
}

TEST(Repair, NumericClamping) {
  KconfigModel m = parse_model(testing::read_source("corpus/int_invisible_default.kconfig"), "num");
  Configuration cfg(m);
  cfg.set(m, "A", Tri::Y);
  cfg.set(m, "N", std::string("1"));
  RepairOutcome out = repair(m, cfg);
  EXPECT_EQ(value_text(out.repaired.get(m, "N")), "4");  // default 8, clamped to the range
  cfg.set(m, "A", Tri::N);
  EXPECT_EQ(value_text(repair(m, cfg).repaired.get(m, "N")), "2");
}

TEST(Repair, NonConvergence) {
  KconfigModel m = parse_model("config A\n\tbool\n\tdefault !A\n", "osc");
  EXPECT_THROW(repair(m, Configuration(m)), NonConvergence);
}

// Repairing twice changes nothing more, and the result is valid.
TEST(Repair, IdempotentOnCorpus) {
  for (const auto& entry : std::filesystem::directory_iterator(testing::source_path("corpus"))) {
    KconfigModel m = parse_model(testing::read_source("corpus/" + entry.path().filename().string()), "c");
    for (const Configuration& cfg : enumerate_configs(m).configurations) {
      RepairOutcome once = repair(m, cfg);
      RepairOutcome twice = repair(m, once.repaired);
      ASSERT_FALSE(twice.changed) << entry.path() << " " << describe(m, cfg);
      ASSERT_TRUE(is_valid(m, once.repaired));
      ASSERT_EQ(once.changed, !is_valid(m, cfg));
    }
  }
}

TEST(Dotconfig, Format) {
  KconfigModel m = parse_model("config A\n\tbool \"a\"\nconfig B\n\tbool \"b\"\n", "t");
  Configuration cfg(m);
  cfg.set(m, "A", Tri::Y);
  std::ostringstream out;
  write_dotconfig(m, cfg, out);
  EXPECT_EQ(out.str(), "CONFIG_A=y\n# CONFIG_B is not set\n");

  KconfigModel empty = parse_model("", "e");
  std::ostringstream none;
  write_dotconfig(empty, Configuration(empty), none);
  EXPECT_EQ(none.str(), "");
}

TEST(Dotconfig, RoundTrip) {
  KconfigModel m = parse_model(
      "config X\n\ttristate \"x\"\nconfig N\n\tint \"n\"\nconfig H\n\thex \"h\"\nconfig S\n\tstring \"s\"\n", "t");
  Configuration cfg(m);
  cfg.set(m, "X", Tri::M);
  cfg.set(m, "N", std::string("5"));
  cfg.set(m, "H", std::string("0x1f"));
  cfg.set(m, "S", std::string("say \"hi\" \\o/"));
  std::ostringstream out;
  write_dotconfig(m, cfg, out);
  EXPECT_NE(out.str().find("CONFIG_X=m\n"), std::string::npos);
  EXPECT_NE(out.str().find("CONFIG_N=5\n"), std::string::npos);
  EXPECT_EQ(parse_dotconfig(m, out.str()), cfg);

  Configuration blank(m);
  std::ostringstream b;
  write_dotconfig(m, blank, b);
  EXPECT_EQ(b.str(), "# CONFIG_X is not set\nCONFIG_S=\"\"\n");
  EXPECT_EQ(parse_dotconfig(m, b.str()), blank);
}

TEST(Dotconfig, Errors) {
  KconfigModel m = parse_model("config A\n\tbool \"a\"\nconfig N\n\tint \"n\"\n", "t");
  auto line_of = [&](const std::string& text) {
    try {
      parse_dotconfig(m, text);
    } catch (const DotconfigError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("CONFIG_A=y\nCONFIG_A=m\n"), 2);
  EXPECT_EQ(line_of("# comment\n\ngarbage\n"), 3);
  EXPECT_EQ(line_of("CONFIG_N=five\n"), 1);
  EXPECT_EQ(line_of("CONFIG_A\n"), 1);
  EXPECT_EQ(line_of("CONFIG_UNKNOWN=whatever\n"), -1);
}

class FakeConf : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = std::filesystem::temp_directory_path() / ("kdiff-fake-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    model_file = dir / "golden.kconfig";
    std::ofstream(model_file) << kNoPromptChoice;
  }
  void TearDown() override { std::filesystem::remove_all(dir); }

  std::filesystem::path script(const std::string& body) {
    auto path = dir / "conf";
    std::ofstream(path) << "#!/bin/sh\n" << body;
    std::filesystem::permissions(path, std::filesystem::perms::owner_all);
    return path;
  }

  std::filesystem::path dir;
  std::filesystem::path model_file;
};

TEST_F(FakeConf, UnchangedFileIsValid) {
  // Checks the calling convention, then leaves the configuration alone.
  auto conf = script("[ \"$1\" = --olddefconfig ] && [ -f \"$2\" ] && [ -f \"$KCONFIG_CONFIG\" ] || exit 9\n");
  KconfigModel m = parse_model(kNoPromptChoice, model_file.string());
  ExternalConfOracle oracle(conf, model_file);
  EXPECT_TRUE(oracle.is_valid(m, golden_config(m, true, false, true)));
}

TEST_F(FakeConf, RewrittenFileIsInvalid) {
  auto conf = script("printf 'CONFIG_A=y\\n# CONFIG_B is not set\\nCONFIG_NOPROMPT=y\\n' > \"$KCONFIG_CONFIG\"\n");
  KconfigModel m = parse_model(kNoPromptChoice, model_file.string());
  ExternalConfOracle oracle(conf, model_file);
  EXPECT_FALSE(oracle.is_valid(m, golden_config(m, true, true, true)));
  EXPECT_TRUE(oracle.is_valid(m, golden_config(m, true, false, true)));
}

TEST_F(FakeConf, FailingBinary) {
  auto conf = script("exit 1\n");
  KconfigModel m = parse_model(kNoPromptChoice, model_file.string());
  ExternalConfOracle oracle(conf, model_file);
  EXPECT_THROW(oracle.is_valid(m, Configuration(m)), ProcessError);
}

TEST(ExternalConf, MissingBinary) {
  EXPECT_THROW(ExternalConfOracle("/nonexistent/conf", "/nonexistent/model"), ProcessError);
}

}  // namespace
}  // namespace kdiff

#include <gtest/gtest.h>

#include "kdiff/kconfig.hpp"
#include "support/models.hpp"

namespace kdiff {
namespace {

using testing::kNoPromptChoice;

TEST(ParseModel, NoPromptChoice) {
  KconfigModel m = parse_model(kNoPromptChoice, "golden");
  ASSERT_EQ(m.size(), 3u);
  ASSERT_EQ(m.choices().size(), 1u);
  const ChoiceBlock& c = m.choices()[0];
  EXPECT_EQ(c.type, OptionType::kBool);
  EXPECT_EQ(c.members, (std::vector<std::string>{"A", "B", "NOPROMPT"}));
  ASSERT_EQ(c.prompts.size(), 1u);
  EXPECT_EQ(c.prompts[0].text, "choice prompt");

  const ConfigItem& a = m.items()[0];
  EXPECT_EQ(a.name, "A");
  EXPECT_EQ(a.type, OptionType::kBool);
  ASSERT_EQ(a.prompts.size(), 1u);
  EXPECT_TRUE(a.defaults.empty());
  EXPECT_EQ(a.choice, std::optional<std::size_t>(0));

  const ConfigItem& b = m.items()[1];
  ASSERT_EQ(b.defaults.size(), 1u);
  EXPECT_TRUE(expr_equal(b.defaults[0].value, Expr::literal("n")));

  const ConfigItem& np = m.items()[2];
  EXPECT_TRUE(np.prompts.empty());
  ASSERT_EQ(np.defaults.size(), 1u);
  EXPECT_TRUE(expr_equal(np.defaults[0].value, Expr::literal("y")));
  EXPECT_EQ(np.defaults[0].condition, nullptr);
}

TEST(ParseModel, EmptyInput) {
  KconfigModel m = parse_model("", "empty");
  EXPECT_EQ(m.size(), 0u);
  EXPECT_TRUE(m.choices().empty());
  EXPECT_FALSE(m.modules_option());
}

TEST(ParseModel, DependsMatchesHandBuiltTree) {
  KconfigModel m = parse_model("config X\n tristate \"x\"\n depends on Y && Z='m'\n", "t");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.items()[0].type, OptionType::kTristate);
  ExprPtr expected =
      Expr::conj(Expr::sym("Y"), Expr::binary(ExprKind::kEq, Expr::sym("Z"), Expr::literal("m")));
  EXPECT_TRUE(expr_equal(m.items()[0].depends, expected));
}

TEST(ParseModel, MultipleDependsAreConjoined) {
  KconfigModel m = parse_model("config X\n bool \"x\"\n depends on A\n depends on B || C\n", "t");
  ExprPtr expected = Expr::conj(Expr::sym("A"), Expr::disj(Expr::sym("B"), Expr::sym("C")));
  EXPECT_TRUE(expr_equal(m.items()[0].depends, expected));
}

TEST(ParseModel, AttributesInSourceOrder) {
  const char* text = R"(config MODULES
	bool "modules"
	option modules

config N
	int "n" if MODULES
	range 0 10 if MODULES
	range 0 5
	default 3 if MODULES
	default 1

config S
	string
	default "hello world"

config T
	tristate
	prompt "t"
	select U if N > 2
	help
	  Some "help" text with 'quotes' && operators.

config U
	tristate "u"
)";
  KconfigModel m = parse_model(text, "t");
  ASSERT_EQ(m.size(), 5u);
  EXPECT_EQ(m.modules_option(), std::optional<std::string>("MODULES"));
  const ConfigItem& n = m.items()[1];
  EXPECT_EQ(n.type, OptionType::kInt);
  ASSERT_EQ(n.ranges.size(), 2u);
  EXPECT_EQ(n.ranges[0].low, "0");
  EXPECT_EQ(n.ranges[0].high, "10");
  EXPECT_NE(n.ranges[0].condition, nullptr);
  EXPECT_EQ(n.ranges[1].condition, nullptr);
  ASSERT_EQ(n.defaults.size(), 2u);
  EXPECT_EQ(n.defaults[0].value->text(), "3");
  EXPECT_EQ(n.defaults[1].value->text(), "1");
  EXPECT_EQ(m.items()[2].defaults[0].value->text(), "hello world");
  const ConfigItem& t = m.items()[3];
  ASSERT_EQ(t.selects.size(), 1u);
  EXPECT_EQ(t.selects[0].target, "U");
  EXPECT_TRUE(expr_equal(t.selects[0].condition,
                         Expr::binary(ExprKind::kGt, Expr::sym("N"), Expr::literal("2"))));
  EXPECT_TRUE(validate_model(m).empty());
}

TEST(ParseModel, BoolAndBooleanAreSynonyms) {
  KconfigModel a = parse_model("config X\n\tbool \"x\"\n", "a");
  KconfigModel b = parse_model("config X\n\tboolean \"x\"\n", "b");
  EXPECT_TRUE(structurally_equal(a, b));
}

TEST(ParseModel, ChoiceTypeComesFromMembersWhenUndeclared) {
  KconfigModel m = parse_model("choice\n\tprompt \"c\"\nconfig A\n\ttristate \"a\"\nendchoice\n", "t");
  EXPECT_EQ(m.choices()[0].type, OptionType::kTristate);
}

TEST(ParseModel, ErrorsCarryPosition) {
  try {
    parse_model("config A\n\tbool \"a\"\n\tdepends on (B\n", "t");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_GT(e.column(), 0);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(ParseModel, RejectsConstructsOutsideTheSubset) {
  EXPECT_THROW(parse_model("menu \"m\"\n", "t"), ParseError);
  EXPECT_THROW(parse_model("config A\n\tbool \"a\"\n\tfrobnicate\n", "t"), ParseError);
  EXPECT_THROW(parse_model("choice\nconfig A\n\tbool \"a\"\n", "t"), ParseError);  // missing endchoice
  EXPECT_THROW(parse_model("choice\nendchoice\n", "t"), ParseError);                // empty choice
  EXPECT_THROW(parse_model("config A\n\tdepends on B\n", "t"), ParseError);        // no type
  EXPECT_THROW(parse_model("config A\n\tbool \"a\"\n\tdepends on B <= \n", "t"), ParseError);
}

TEST(ParseModel, DuplicateOption) {
  EXPECT_THROW(parse_model("config A\n\tbool\nconfig A\n\ttristate\n", "t"), DuplicateOption);
}

TEST(ParseExpr, PrecedenceAndParentheses) {
  ExprPtr e = parse_expr("A || B && !C = y");
  ExprPtr expected = Expr::disj(
      Expr::sym("A"),
      Expr::conj(Expr::sym("B"), Expr::negate(Expr::binary(ExprKind::kEq, Expr::sym("C"), Expr::literal("y")))));
  EXPECT_TRUE(expr_equal(e, expected));
  EXPECT_TRUE(expr_equal(parse_expr("(A || B) && C"),
                         Expr::conj(Expr::disj(Expr::sym("A"), Expr::sym("B")), Expr::sym("C"))));
}

TEST(ParseExpr, ComparisonOperators) {
  const std::pair<const char*, ExprKind> cases[] = {{"N = 1", ExprKind::kEq},  {"N != 1", ExprKind::kNeq},
                                                    {"N < 1", ExprKind::kLt},  {"N <= 1", ExprKind::kLeq},
                                                    {"N > 1", ExprKind::kGt},  {"N >= 1", ExprKind::kGeq}};
  for (const auto& [text, kind] : cases) EXPECT_EQ(parse_expr(text)->kind(), kind) << text;
}

TEST(ParseExpr, ToStringRoundTrips) {
  for (const char* text : {"A", "!A", "A && (B || C)", "!(A && B) || C = m", "N >= 0x10 && S != \"x y\"",
                           "((A || B) && (C || D))", "CPU > 3 && USB_BUS = 'm'"}) {
    ExprPtr e = parse_expr(text);
    EXPECT_TRUE(expr_equal(parse_expr(to_string(*e)), e)) << text << " -> " << to_string(*e);
  }
}

TEST(PrintModel, RoundTripsTheCorpus) {
  for (const char* name : {"corpus/choice_noprompt.kconfig", "corpus/ten_options_mixed.kconfig",
                           "corpus/nine_options_numeric.kconfig", "corpus/string_comparison.kconfig",
                           "corpus/help_text.kconfig", "corpus/multiple_prompts.kconfig"}) {
    KconfigModel m = parse_model(testing::read_source(name), name);
    KconfigModel again = parse_model(print_model(m), name);
    EXPECT_TRUE(structurally_equal(m, again)) << name << "\n" << print_model(m);
  }
}

TEST(ValidateModel, NoPromptChoiceHasNoDiagnostics) {
  EXPECT_TRUE(validate_model(parse_model(kNoPromptChoice, "golden")).empty());
}

TEST(ValidateModel, UndeclaredSymbolWarnsOnce) {
  auto diags = validate_model(parse_model("config A\n\tbool \"a\"\n\tdepends on UNDECLARED\n", "t"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].severity, Severity::kWarning);
  EXPECT_NE(diags[0].message.find("UNDECLARED"), std::string::npos);
  EXPECT_FALSE(has_errors(diags));
}

TEST(ValidateModel, SelectOnIntIsAnError) {
  auto diags = validate_model(parse_model("config B\n\tbool \"b\"\nconfig N\n\tint \"n\"\n\tselect B\n", "t"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].severity, Severity::kError);
}

TEST(ValidateModel, RuleTable) {
  enum Expect { kError, kWarning, kClean };
  struct Case {
    const char* text;
    Expect expect;
  };
  const Case cases[] = {
      {"config A\n\tbool \"a\"\n\trange 0 1\n", kError},
      {"config A\n\tbool \"a\"\n\tselect N\nconfig N\n\tint \"n\"\n", kError},
      {"config A\n\tbool \"a\"\n\tselect MISSING\n", kError},
      {"config A\n\tbool \"a\"\n\tselect X\nchoice\n\tprompt \"c\"\nconfig X\n\tbool \"x\"\nendchoice\n", kError},
      {"config N\n\tint \"n\"\n\tdefault A\nconfig A\n\tbool \"a\"\n", kError},
      {"config N\n\tint \"n\"\n\tdefault abc\n", kError},
      {"config MODULES\n\ttristate \"m\"\n\toption modules\n", kError},
      {"choice\n\tprompt \"c\"\nconfig S\n\tstring \"s\"\nendchoice\n", kError},
      {"config A\n\tbool \"a\"\n\tdepends on A < 3\n", kError},
      {"config N\n\tint \"n\"\nconfig A\n\tbool \"a\"\n\tdepends on N < x\n", kError},
      {"config X\n\ttristate \"x\"\nconfig X_MODULE\n\tbool \"x\"\n", kError},
      {"config N\n\tint \"n\"\nconfig A\n\tbool \"a\"\n\tdepends on N\n", kWarning},
      {"config A\n\tbool \"a\"\n\tdepends on 5\n", kWarning},
      {"config N\n\thex \"n\"\n\trange 0x0 0xff\n\tdefault 0x10\n", kClean},
  };
  for (const Case& c : cases) {
    auto diags = validate_model(parse_model(c.text, "t"));
    EXPECT_EQ(has_errors(diags), c.expect == kError) << c.text;
    EXPECT_EQ(diags.empty(), c.expect == kClean) << c.text;
  }
}

TEST(ValidateModel, DiagnosticsNameTheLine) {
  KconfigModel m = parse_model("config A\n\tbool \"a\"\n\n\nconfig N\n\tint \"n\"\n\tselect A\n", "file.kconfig");
  auto diags = validate_model(m);
  ASSERT_EQ(diags.size(), 1u);
  std::string text = format_diagnostic(m, diags[0]);
  EXPECT_NE(text.find("file.kconfig"), std::string::npos) << text;
  EXPECT_NE(text.find("error"), std::string::npos) << text;
}

TEST(CollectOptions, DeclarationOrder) {
  auto golden = collect_options(parse_model(kNoPromptChoice, "golden"));
  std::vector<std::pair<std::string, OptionType>> expected{
      {"A", OptionType::kBool}, {"B", OptionType::kBool}, {"NOPROMPT", OptionType::kBool}};
  EXPECT_EQ(golden, expected);
  EXPECT_TRUE(collect_options(parse_model("", "e")).empty());

  KconfigModel mixed = parse_model("config Z\n\ttristate\nconfig A\n\tint\nconfig M\n\tbool\n", "m");
  auto opts = collect_options(mixed);
  ASSERT_EQ(opts.size(), 3u);
  for (std::size_t i = 1; i < opts.size(); ++i) {
    EXPECT_LT(mixed.find(opts[i - 1].first)->line, mixed.find(opts[i].first)->line);
  }
  EXPECT_EQ(opts[1].second, OptionType::kInt);
}

}  // namespace
}  // namespace kdiff

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/expression.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace wsigma;
using namespace wsigma::cli;

namespace {

constexpr double kPi = std::numbers::pi;

double eval(const std::string& text, Vec chart = Vec(), Vec ambient = Vec()) {
  return Expression::parse(text)(chart, ambient);
}

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

RunConfig with(std::initializer_list<std::pair<std::string, std::string>> kv) {
  RunConfig cfg;
  for (const auto& [k, v] : kv) {
    const auto dot = k.find('.');
    cfg.set(k.substr(0, dot), k.substr(dot + 1), v);
  }
  return cfg;
}

const Json* find_check(const Json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

}  // namespace

// --- expressions -----------------------------------------------------------

TEST(Expression, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(eval("1 + 2*3^2"), 19.0);
  EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
  EXPECT_DOUBLE_EQ(eval("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
  EXPECT_DOUBLE_EQ(eval("7 - 2 - 1"), 4.0);
  EXPECT_DOUBLE_EQ(eval("2 * -3"), -6.0);
  EXPECT_DOUBLE_EQ(eval("1.5e1 + .5"), 15.5);
}

TEST(Expression, FunctionsAndConstants) {
  EXPECT_NEAR(eval("sin(pi/2) + cos(0) + tan(0)"), 2.0, 1e-15);
  EXPECT_NEAR(eval("exp(log(3)) + sqrt(16) + abs(-2)"), 9.0, 1e-14);
}

TEST(Expression, VariablesAndAliases) {
  const Vec u = vec({0.3, -1.1});
  const Vec x = vec({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(eval("u1 + 10*u2", u, x), 0.3 - 11.0);
  EXPECT_DOUBLE_EQ(eval("u + 10*v", u, x), 0.3 - 11.0);
  EXPECT_DOUBLE_EQ(eval("x + y*z - w", u, x), 1.0 + 6.0 - 4.0);
  EXPECT_DOUBLE_EQ(eval("x1 + x2*x3 - x4", u, x), 3.0);
  const auto e = Expression::parse("u2 * x3");
  EXPECT_EQ(e.chart_used(), 2);
  EXPECT_EQ(e.ambient_used(), 3);
}

TEST(Expression, Errors) {
  EXPECT_THROW(Expression::parse(""), ExpressionError);
  EXPECT_THROW(Expression::parse("1 +"), ExpressionError);
  EXPECT_THROW(Expression::parse("sin(1"), ExpressionError);
  EXPECT_THROW(Expression::parse("sin 1"), ExpressionError);
  EXPECT_THROW(Expression::parse("foo + 1"), ExpressionError);
  EXPECT_THROW(Expression::parse("1 2"), ExpressionError);
  EXPECT_THROW(Expression::parse("x9"), ExpressionError);
  EXPECT_THROW(Expression::parse("u4"), ExpressionError);
  EXPECT_THROW(Expression::parse("2 $ 3"), ExpressionError);
  // a variable the evaluation point does not have
  EXPECT_THROW(eval("x3", Vec(), vec({1.0, 2.0})), ExpressionError);
}

// --- configuration ---------------------------------------------------------

TEST(Config, DefaultsCoverEverySchemaKey) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.values().size(), config_schema().size());
  EXPECT_EQ(cfg.str("fixture.name"), "sphere");
  EXPECT_EQ(cfg.seed("run.seed"), 20240611u);
  EXPECT_DOUBLE_EQ(cfg.real("identities.tolerance"), 1e-11);
}

TEST(Config, ParsesSections) {
  const auto cfg = RunConfig::from_string(
      "; comment\n[fixture]\nname = torus\nparams = \"a=2 b=1\"\n\n[weight]\nmu0 = -0.5\n[analyze]\n");
  EXPECT_EQ(cfg.str("fixture.name"), "torus");
  EXPECT_EQ(cfg.str("fixture.params"), "a=2 b=1");
  EXPECT_DOUBLE_EQ(cfg.real("weight.mu0"), -0.5);
}

TEST(Config, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(RunConfig::from_string("[fixture]\nnmae = torus\n"), ConfigError);
  EXPECT_THROW(RunConfig::from_string("[fixtures]\nname = torus\n"), ConfigError);
  EXPECT_THROW(RunConfig::from_string("name = torus\n"), ConfigError);
  EXPECT_THROW(RunConfig::from_string("[fixture]\nname = a\nname = b\n"), ConfigError);  // duplicate key
}

TEST(Config, TypedGettersValidate) {
  EXPECT_THROW(with({{"analyze.r_max", "x"}}).integer("analyze.r_max", 0, 12), ConfigError);
  EXPECT_THROW(with({{"analyze.r_max", "13"}}).integer("analyze.r_max", 0, 12), ConfigError);
  EXPECT_THROW(with({{"weight.mu0", "1.5abc"}}).real("weight.mu0"), ConfigError);
  EXPECT_THROW(with({{"weight.mu0", "inf"}}).real("weight.mu0"), ConfigError);
  EXPECT_THROW(with({{"identities.inject_fault", "maybe"}}).boolean("identities.inject_fault"), ConfigError);
  EXPECT_THROW(with({{"flow.mode", "sideways"}}).choice("flow.mode", {"radial", "normal"}), ConfigError);
  EXPECT_THROW(with({{"variation.r", "0,,1"}}).ints("variation.r", 0, 3), ConfigError);
  EXPECT_THROW(with({{"identities.tolerance", "-1"}}).positive("identities.tolerance"), ConfigError);
  EXPECT_THROW(with({{"variation.lambda", "1 +"}}).expression("variation.lambda"), ConfigError);
  EXPECT_EQ(with({{"variation.r", " 0, 2 "}}).ints("variation.r", 0, 3), (std::vector<int>{0, 2}));
  EXPECT_TRUE(with({{"identities.inject_fault", "yes"}}).boolean("identities.inject_fault"));
}

TEST(Config, CommandLevelValidation) {
  EXPECT_THROW(cmd_analyze(with({{"fixture.name", "cube"}})), ConfigError);
  EXPECT_THROW(cmd_analyze(with({{"fixture.params", "R=-1"}})), ConfigError);
  EXPECT_THROW(cmd_analyze(with({{"fixture.params", "Q=1"}})), ConfigError);
  EXPECT_THROW(cmd_analyze(with({{"fixture.grid", "4"}})), ConfigError);
  EXPECT_THROW(cmd_analyze(with({{"fixture.grid", "12,12,12"}})), ConfigError);
  EXPECT_THROW(cmd_analyze(with({{"weight.function", "u1"}})), ConfigError);
  EXPECT_THROW(cmd_analyze(with({{"weight.function", "x5"}})), ConfigError);
  EXPECT_THROW(cmd_variation(with({{"variation.cases", "twist"}})), ConfigError);
  EXPECT_THROW(cmd_variation(with({{"variation.cases", "custom"}})), ConfigError);
  EXPECT_THROW(cmd_variation(with({{"variation.cases", "custom"}, {"variation.lambda", "u3"}})), ConfigError);
  EXPECT_THROW(cmd_minimality(with({{"weight.function", "x"}})), ConfigError);
  EXPECT_THROW(cmd_minimality(with({{"minimality.support_direction", "1,0"}})), ConfigError);
  EXPECT_THROW(cmd_flow(with({{"flow.mode", "normal"}, {"flow.ambient", "sphere"}, {"flow.radius", "4"}})),
               ConfigError);
}

// --- output helpers --------------------------------------------------------

TEST(Report, CsvQuotingAndLineEndings) {
  CsvTable t({"a", "b"});
  t.add_row({"1.5", "x,y"});
  t.add_row({"say \"hi\"", ""});
  EXPECT_EQ(t.str(), "a,b\n1.5,\"x,y\"\n\"say \"\"hi\"\"\",\n");
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.5e-12), "-2.5e-12");
}

TEST(Report, AtomicWriteLeavesNoTemporaries) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "wsigma_atomic_test";
  fs::remove_all(dir);
  write_atomic(dir / "r.json", "first\n");
  write_atomic(dir / "r.json", "second\n");
  std::ifstream in(dir / "r.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second\n");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1);
  fs::remove_all(dir);
}

// --- commands --------------------------------------------------------------

TEST(Commands, IdentitiesPassWithDefaults) {
  const auto res = cmd_identities(RunConfig(), 20240611);
  EXPECT_TRUE(res.passed());
  EXPECT_EQ(res.report["schema"], "wsigma-report/1");
  EXPECT_EQ(res.report["identities"].size(), 5u);
  ASSERT_EQ(res.report["notes"].size(), 4u);
  EXPECT_GT(res.report["notes"][0]["observed_gap_at_r1"].get<double>(), 0.1);
}

TEST(Commands, InjectedFaultNamesTheIdentity) {
  const auto res = cmd_identities(with({{"identities.inject_fault", "true"}}), 20240611);
  ASSERT_EQ(res.failures.size(), 1u);
  EXPECT_EQ(res.failures[0], "weighted_sigma_recursion");
}

TEST(Commands, ReportsAreDeterministic) {
  set_thread_count(1);
  const auto cfg = with({{"identities.instances", "200"}});
  EXPECT_EQ(cmd_identities(cfg, 7).report.dump(2), cmd_identities(cfg, 7).report.dump(2));
  EXPECT_NE(cmd_identities(cfg, 7).report.dump(2), cmd_identities(cfg, 8).report.dump(2));
  const auto v = with({{"variation.cases", "normal_ambient"}, {"variation.r", "1"}, {"weight.mu0", "0.5"}});
  EXPECT_EQ(cmd_variation(v).report.dump(2), cmd_variation(v).report.dump(2));
}

TEST(Commands, AnalyzeUnitSphereAndTorus) {
  const auto s = cmd_analyze(RunConfig());
  EXPECT_TRUE(s.passed());
  const auto& row0 = s.report["rows"][0];
  EXPECT_NEAR(row0["F"].get<double>(), 4.0 * kPi, 1e-10);
  EXPECT_NEAR(s.report["rows"][1]["F"].get<double>(), 8.0 * kPi, 1e-10);  // s_1 = 2 on the unit sphere
  ASSERT_NE(find_check(s.report, "zero_weight_equals_classical"), nullptr);

  const auto t = cmd_analyze(with({{"fixture.name", "torus"}, {"weight.mu0", "0.5"}}));
  EXPECT_NEAR(t.report["fixture"]["area"].get<double>(), 8.0 * kPi * kPi, 1e-8);
  // with a weight the weighted column moves off the classical one: F_0 = area, F_1 = int s_1 + 0.5 area
  const auto& r1 = t.report["rows"][1];
  EXPECT_NEAR(r1["sigma_weighted"].get<double>() - r1["sigma_classical"].get<double>(), 0.5 * 8.0 * kPi * kPi, 1e-8);
}

TEST(Commands, VariationShrinkingSphere) {
  // lambda = 1 along the inward normal shrinks the unit sphere: dA/dt = -8 pi.
  const auto res = cmd_variation(with({{"variation.cases", "normal_constant"}, {"variation.r", "0"}}));
  EXPECT_TRUE(res.passed());
  const auto& c = res.report["cases"][0];
  EXPECT_NEAR(c["closed_trace"]["analytic"].get<double>(), -8.0 * kPi, 1e-6 * 8.0 * kPi);
  EXPECT_NEAR(c["curvature_tensor"]["analytic"].get<double>(), -8.0 * kPi, 1e-6 * 8.0 * kPi);
  EXPECT_NEAR(c["closed_trace"]["fd"].get<double>(), -8.0 * kPi, 1e-6 * 8.0 * kPi);
}

TEST(Commands, VariationCustomExpressionsOnSphereAmbient) {
  const auto res = cmd_variation(with({{"fixture.name", "clifford_torus"},
                                       {"fixture.params", "a=0.6"},
                                       {"weight.mu0", "-0.5"},
                                       {"variation.cases", "custom"},
                                       {"variation.r", "1,2"},
                                       {"variation.lambda", "1 + 0.2*sin(u)*cos(v) + 0.1*x4"},
                                       {"variation.tau2", "0.1*cos(u)"}}));
  EXPECT_TRUE(res.passed()) << res.report["checks"].dump(2);
}

TEST(Commands, VariationTangentialIsNull) {
  const auto res = cmd_variation(
      with({{"fixture.name", "torus"}, {"weight.mu0", "1"}, {"variation.cases", "tangential"}}));
  EXPECT_TRUE(res.passed());
  for (const auto& c : res.report["cases"])
    EXPECT_LE(std::abs(c["closed_trace"]["fd"].get<double>()), 1e-7 * c["scale"].get<double>());
}

TEST(Commands, VariationWithPrintedIndexingFailsForVaryingWeights) {
  const auto res = cmd_variation(with({{"fixture.name", "torus"},
                                       {"weight.function", "0.3*z + 0.2*x"},
                                       {"variation.cases", "normal_ambient"},
                                       {"variation.r", "2"},
                                       {"variation.indexing", "as_printed"}}));
  EXPECT_FALSE(res.passed());
  const auto ok = cmd_variation(with({{"fixture.name", "torus"},
                                      {"weight.function", "0.3*z + 0.2*x"},
                                      {"variation.cases", "normal_ambient"},
                                      {"variation.r", "2"}}));
  EXPECT_TRUE(ok.passed()) << ok.report["checks"].dump(2);
}

TEST(Commands, MinimalityEuclideanAndSphere) {
  const auto e = cmd_minimality(with({{"fixture.name", "ellipsoid"}, {"weight.mu0", "0.5"},
                                      {"minimality.adjudicate", "false"}}));
  EXPECT_TRUE(e.passed()) << e.report["checks"].dump(2);
  EXPECT_EQ(e.tables.size(), 2u);  // one residual table per r

  const auto s = cmd_minimality(with({{"fixture.name", "clifford_torus"}, {"weight.mu0", "0.5"},
                                      {"minimality.adjudicate", "false"}}));
  EXPECT_TRUE(s.passed()) << s.report["checks"].dump(2);
  const auto& r2 = s.report["orders"][1];
  EXPECT_NEAR(r2["form_difference"]["max"].get<double>(), 1.0, 1e-12);  // 2 mu0 s_0
  EXPECT_GT(r2["combined_newton_contraction"]["plus"]["psi_component"]["max"].get<double>(), 0.1);
}

TEST(Commands, MinimalityAdjudicationVerdict) {
  const auto res = cmd_minimality(with({{"fixture.name", "great_sphere"}, {"fixture.grid", "8"},
                                        {"minimality.r", "1"}, {"minimality.adjudication_samples", "24"},
                                        {"minimality.adjudication_grid", "12"}}));
  EXPECT_TRUE(res.passed()) << res.report["checks"].dump(2);
  EXPECT_EQ(res.report["adjudication"]["verdict"], "first_variation form confirmed; grouped_weight form rejected");
}

TEST(Commands, FlowRadialAndNormal) {
  for (const char* R : {"0.5", "2"}) {
    const auto res = cmd_flow(with({{"weight.mu0", "-1"}, {"flow.R_init", R}}));
    EXPECT_TRUE(res.passed()) << R;
    EXPECT_LE(res.report["error"].get<double>(), 1e-6);
  }
  const auto none = cmd_flow(RunConfig());  // mu0 = 0: no critical radius
  EXPECT_TRUE(none.passed());
  EXPECT_TRUE(none.report["trace"]["target"].is_null());
  EXPECT_NE(none.report["trace"]["status"], "converged");

  const auto normal = cmd_flow(with({{"flow.mode", "normal"}, {"weight.mu0", "-1"}}));
  EXPECT_TRUE(normal.passed());
  EXPECT_EQ(normal.report["steps"].size(), 10u);
  EXPECT_EQ(normal.tables.front().second.size(), 11u);
}

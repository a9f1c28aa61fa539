#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cubealg/cli/session.hpp"
#include "cubealg/cli/statement.hpp"
#include "support/fixtures.hpp"

using namespace cubealg;
using namespace cubealg::cli;
namespace ops = cubealg::algebra::ops;

namespace {

std::string load_line() {
  return "LOAD \"" + fixtures::data_path("running_example.json") + "\" \"" +
         fixtures::data_path("running_sales.csv") + "\"";
}

Session loaded() {
  return execute(Session{}, parse_statement(load_line())).session;
}

Outcome run(const Session& s, const std::string& line) {
  return execute(s, parse_statement(line));
}

}  // namespace

TEST(Parse, RegionDice) {
  auto s = parse_statement("DICE Location.Region = flanders OR Location.Region = south");
  auto expected = algebra::or_(algebra::level_eq("Location", "Region", "flanders"),
                               algebra::level_eq("Location", "Region", "south"));
  EXPECT_EQ(s, Statement(stmt::Operation{ops::Dice{expected}}));
}

TEST(Parse, RollUp) {
  auto s = parse_statement("ROLLUP Location Country {sales: SUM}");
  EXPECT_EQ(s, Statement(stmt::Operation{
                   ops::RollUp{"Location", "Country", {{"sales", algebra::AggFn::kSum}}}}));
  auto d = parse_statement("drill-down Time Week {sales: avg, sales: COUNT-DISTINCT}");
  auto* op = std::get_if<stmt::Operation>(&d);
  ASSERT_TRUE(op);
  auto* dd = std::get_if<ops::DrillDown>(&op->op);
  ASSERT_TRUE(dd);
  EXPECT_EQ(dd->aggs[1].fn, algebra::AggFn::kCountDistinct);
}

TEST(Parse, NegatedComparison) {
  auto s = parse_statement("DICE (NOT sales < 10)");
  EXPECT_EQ(s, Statement(stmt::Operation{
                   ops::Dice{algebra::not_(algebra::measure_lt("sales", 10))}}));
}

TEST(Parse, Precedence) {
  auto c = parse_condition("a = 1 OR NOT b < 2 AND c > -3/4");
  auto expected = algebra::or_(
      algebra::measure_eq("a", 1),
      algebra::and_(algebra::not_(algebra::measure_lt("b", 2)),
                    algebra::measure_lt("c", exactnum::Rational(-3, 4),
                                        engine::Side::kConstLess)));
  EXPECT_EQ(*c, *expected);
  auto left = parse_condition("a = 1 AND b = 2 AND c = 3");
  auto* node = std::get_if<algebra::cond::And>(&left->node);
  ASSERT_TRUE(node);
  EXPECT_TRUE(std::holds_alternative<algebra::cond::And>(node->lhs->node));
}

TEST(Parse, GreaterThanDesugars) {
  auto c = parse_condition("sales > 49.99");
  EXPECT_EQ(*c, *algebra::measure_lt("sales", exactnum::Rational(4999, 100),
                                     engine::Side::kConstLess));
  auto l = parse_condition("Time.Week > w2");
  EXPECT_EQ(*l, *algebra::level_lt("Time", "Week", "w2", engine::Side::kConstLess));
}

TEST(Parse, OtherStatements) {
  EXPECT_EQ(parse_statement("LOAD \"a.json\" \"b.csv\" FILL 1/2"),
            Statement(stmt::Load{"a.json", "b.csv", exactnum::Rational(1, 2)}));
  EXPECT_EQ(parse_statement("show Location Time Product=lego tau1"),
            Statement(stmt::Show{"Location", "Time", {{"Product", "lego"}}, "tau1"}));
  EXPECT_EQ(parse_statement("SHOW A B"), Statement(stmt::Show{"A", "B", {}, std::nullopt}));
  EXPECT_EQ(parse_statement("SLICEDICE Location antwerp"),
            Statement(stmt::Operation{ops::SliceDice{"Location", "antwerp"}}));
  EXPECT_EQ(parse_statement("TRACE  # comment"), Statement(stmt::Trace{}));
  EXPECT_EQ(parse_statement("SNAPSHOT \"s.json\""), Statement(stmt::Snapshot{"s.json"}));
  EXPECT_EQ(parse_statement("CHECK"), Statement(stmt::Check{}));
  EXPECT_EQ(parse_statement("reset"), Statement(stmt::Reset{}));
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_statement("DICE sales < ", 7);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_EQ(e.column(), 14u);
  }
  try {
    parse_statement("PIVOT Location");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 1u);
    EXPECT_NE(std::string(e.what()).find("unknown keyword"), std::string::npos);
  }
  EXPECT_THROW(parse_statement("DICE (a = 1"), ParseError);
  EXPECT_THROW(parse_statement("DICE a = 1 b"), ParseError);
  EXPECT_THROW(parse_statement("ROLLUP L C {}"), ParseError);
  EXPECT_THROW(parse_statement("ROLLUP L C {s: MEDIAN}"), ParseError);
  EXPECT_THROW(parse_statement("LOAD a b"), ParseError);
  EXPECT_THROW(parse_statement("DICE s = 1/0"), ParseError);
  EXPECT_THROW(parse_statement("DICE s = \"x"), ParseError);
  EXPECT_THROW(parse_statement("DICE s ! 1"), ParseError);
  EXPECT_THROW(parse_statement("DICE a = 1 AND OR b = 2"), ParseError);
}

TEST(Render, QuotesWhenNeeded) {
  Statement s = stmt::Operation{ops::Dice{algebra::and_(
      algebra::level_eq("Time", "Year", "2014"), algebra::measure_eq("not", 3))}};
  EXPECT_EQ(render(s), "DICE Time.Year = \"2014\" AND \"not\" = 3");
  EXPECT_EQ(parse_statement(render(s)), s);
  EXPECT_EQ(render(parse_statement("DICE (a = 1 OR b = 2) AND NOT (c = 3)")),
            "DICE (a = 1 OR b = 2) AND NOT c = 3");
}

TEST(Script, ParsesLineNumbers) {
  auto lines = parse_script("# header\n\nTRACE\n  CHECK\n");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].line, 3u);
  EXPECT_EQ(lines[1].line, 4u);
  try {
    parse_script("TRACE\nBOGUS\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Session, NoCubeLoaded) {
  try {
    run(Session{}, "SHOW Location Time");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "no cube loaded");
  }
  EXPECT_THROW(run(Session{}, "CHECK"), Error);
}

TEST(Session, CheckAfterRollUp) {
  auto s = run(loaded(), "ROLLUP Location Country {sales: SUM}").session;
  auto check = run(s, "CHECK");
  EXPECT_EQ(check.output, "equivalent");
  EXPECT_FALSE(check.mismatch);
  EXPECT_EQ(run(loaded(), "CHECK").output, "nothing to check");
}

TEST(Session, CheckDetectsTampering) {
  auto s = run(loaded(), "ROLLUP Location Country {sales: SUM}").session;
  s.current->computed[0].values[0] =
      s.current->computed[0].values[0] + exactnum::ExactValue(1);
  auto check = run(s, "CHECK");
  EXPECT_TRUE(check.mismatch);
  EXPECT_EQ(check.output.rfind("1 mismatch(es)", 0), 0u) << check.output;
}

TEST(Session, ErrorsLeaveSessionUnchanged) {
  Session s = run(loaded(), "DICE Location.Country = belgium").session;
  Session before = s;
  EXPECT_THROW(run(s, "ROLLUP Location Planet {sales: SUM}"), Error);
  EXPECT_THROW(run(s, "DICE Location.City = belgium"), Error);
  EXPECT_EQ(*s.current, *before.current);
  EXPECT_EQ(s.current->op_log.size(), 1u);
}

TEST(Session, RegionalComparisonScript) {
  std::string script = load_line() + "\n" + fixtures::read("navigation.cubeql").substr(
                                                 fixtures::read("navigation.cubeql").find("DICE"));
  Session s;
  std::ostringstream out, err;
  auto result = run_script(script, s, out, err);
  EXPECT_FALSE(result.failed) << err.str();
  EXPECT_EQ(result.executed, 6u);
  EXPECT_EQ(s.current->op_log.size(), 4u);
  EXPECT_NE(out.str().find("DRILL-DOWN(Location, Region, {(sales, SUM)}): 124 flagged, 372 destroyed"),
            std::string::npos)
      << out.str();
  // The final grid has values in the marseille row only.
  auto grid = out.str().substr(out.str().find("tau1  Product=lego"));
  std::istringstream lines(grid);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    bool marseille = line.rfind("marseille", 0) == 0;
    EXPECT_EQ(line.find('/') != std::string::npos, marseille) << line;
  }
}

TEST(Session, TraceShowsSteps) {
  auto s = run(loaded(), "SLICE Location").session;
  auto t = run(s, "TRACE").output;
  EXPECT_NE(t.find("1. SLICE(Location)"), std::string::npos) << t;
  EXPECT_NE(t.find("γ[Product.Item]"), std::string::npos) << t;
  EXPECT_NE(t.find("σ[Location.All]"), std::string::npos) << t;
}

TEST(Session, ResetAndSnapshot) {
  auto path = (std::filesystem::temp_directory_path() / "cubealg_cli_snapshot.json").string();
  auto s = run(loaded(), "SLICEDICE Location paris").session;
  run(s, "SNAPSHOT \"" + path + "\"");
  auto restored = run(Session{}, "RESTORE \"" + path + "\"").session;
  EXPECT_EQ(*restored.current, *s.current);
  auto reset = run(s, "RESET").session;
  EXPECT_TRUE(reset.current->op_log.empty());
  EXPECT_EQ(reset.current->destroyed_count(), 0u);
  std::filesystem::remove(path);
  EXPECT_THROW(run(Session{}, "RESTORE \"" + path + "\""), Error);
}

TEST(Session, ShowDefaultsToLatestOutput) {
  auto s = run(loaded(), "ROLLUP Location Country {sales: SUM}").session;
  auto grid = run(s, "SHOW Location Product").output;
  EXPECT_EQ(grid.rfind("tau1  Time=jan01", 0), 0u) << grid;
  EXPECT_THROW(run(s, "SHOW Location Product Time=jan01 Time=jan02"), Error);
}

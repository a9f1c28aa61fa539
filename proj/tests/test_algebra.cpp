#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "cubealg/algebra/condition.hpp"
#include "cubealg/algebra/operations.hpp"
#include "cubealg/engine/engine.hpp"
#include "cubealg/error.hpp"
#include "cubealg/oracle/oracle.hpp"
#include "cubealg/oracle/random_cube.hpp"
#include "support/fixtures.hpp"

using namespace cubealg;
using namespace cubealg::algebra;
using engine::MeasureRef;
using exactnum::ExactValue;
namespace st = cubealg::engine::steps;

namespace {

MeasureRef tau(std::size_t i) { return MeasureRef::computed(i - 1); }

}  // namespace

TEST(Condition, TextForm) {
  auto c = or_(level_eq("Location", "Region", "flanders"),
               level_eq("Location", "Region", "south"));
  EXPECT_EQ(to_string(*c),
            "Location.Region = flanders OR Location.Region = south");
  auto d = and_(or_(measure_lt("sales", 10), measure_eq("sales", 3)),
                not_(measure_lt("sales", exactnum::Rational(1, 2), engine::Side::kConstLess)));
  EXPECT_EQ(to_string(*d), "(sales < 10 OR sales = 3) AND NOT sales > 1/2");
}

TEST(Condition, CompileResolvesNames) {
  auto s = fixtures::running_cube();
  EXPECT_THROW(compile_condition(*level_eq("Store", "City", "x"), s), UnknownName);
  EXPECT_THROW(compile_condition(*level_eq("Location", "City", "belgium"), s),
               ValidationError);
  EXPECT_THROW(compile_condition(*measure_lt("profit", 1), s), UnknownName);
}

TEST(Condition, EncodingShapes) {
  auto s = fixtures::running_cube();
  auto steps = compile_condition(*not_(measure_lt("sales", 10)), s);
  // Const, LtMeasure, then 1 - x as Const(-1), Prod, Const(1), Sum.
  ASSERT_EQ(steps.size(), 6u);
  EXPECT_EQ(steps[0], engine::TransformationStep(st::Const{10}));
  EXPECT_TRUE(std::holds_alternative<st::LtMeasure>(steps[1]));
  EXPECT_TRUE(std::holds_alternative<st::Sum>(steps[5]));
}

// DICE(sales > 50) written out with the constant 49.99.
TEST(Dice, SalesAboveLiteralList) {
  auto initial = fixtures::running_cube();
  auto s = engine::apply_sequence(initial, fixtures::sales_above_steps(), "sales > 49.99");
  auto rows = fixtures::running_rows();
  mpq_class bound = fixtures::decimal("49.99");
  std::size_t kept = 0;
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    bool keep = rows[c].sales > bound;
    kept += keep;
    ASSERT_EQ(s.live(c), keep) << c;
    if (keep) {
      EXPECT_EQ(s.protected_values[0][c], ExactValue(rows[c].sales));
      EXPECT_EQ(s.value(tau(1), c), ExactValue(rows[c].sales));
      EXPECT_EQ(s.flag[c], 1);
    }
  }
  EXPECT_GT(kept, 0u);
  EXPECT_LT(kept, s.cell_count());
  auto expected = oracle::oracle_apply(
      oracle::from_state(initial), ops::Dice{measure_lt("sales", fixtures::decimal("49.99"),
                                                        engine::Side::kConstLess)});
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    EXPECT_EQ(s.live(c), expected.live[c] != 0);
  }
}

TEST(Dice, CompiledMatchesLiteralOnFixture) {
  auto initial = fixtures::running_cube();
  auto literal = engine::apply_sequence(initial, fixtures::sales_above_steps(), "x");
  auto compiled = dice(initial, *measure_lt("sales", fixtures::decimal("49.99"),
                                            engine::Side::kConstLess));
  EXPECT_EQ(literal.destroyed, compiled.destroyed);
  EXPECT_EQ(literal.flag, compiled.flag);
  EXPECT_EQ(literal.protected_values, compiled.protected_values);
}

TEST(Dice, TwoCities) {
  auto initial = fixtures::running_cube();
  auto literal = engine::apply_sequence(initial, fixtures::two_cities_steps(), "x");
  auto c = or_(level_eq("Location", "City", "antwerp"),
               level_eq("Location", "City", "brussels"));
  auto compiled = dice(initial, *c);
  EXPECT_EQ(literal.destroyed, compiled.destroyed);
  EXPECT_EQ(literal.flag, compiled.flag);
  EXPECT_EQ(literal.computed[0].values, compiled.computed[0].values);
  for (std::size_t cell = 0; cell < initial.cell_count(); ++cell) {
    bool belgian = initial.schema->coordinate(cell, 1) < 2;
    EXPECT_EQ(compiled.live(cell), belgian);
  }
  EXPECT_TRUE(oracle::assert_equiv(compiled, oracle::oracle_apply(
                                                 oracle::from_state(initial), ops::Dice{c}))
                  .ok());
}

TEST(Slice, SumsOverLocations) {
  auto s = slice(fixtures::running_cube(), "Location");
  std::map<std::pair<std::string, std::string>, mpq_class> total;
  for (const auto& r : fixtures::running_rows()) total[{r.product, r.day}] += r.sales;
  auto rows = fixtures::running_rows();
  ASSERT_EQ(s.computed.size(), 1u);
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    bool antwerp = s.schema->coordinate(c, 1) == 0;
    ASSERT_EQ(s.live(c), antwerp);
    if (antwerp) {
      EXPECT_EQ(s.flag[c], 1);
      EXPECT_EQ(s.value(tau(1), c), ExactValue(total.at({rows[c].product, rows[c].day})));
    }
  }
  EXPECT_EQ(s.op_log.back().label, "SLICE(Location)");
}

TEST(SliceDice, KeepsOneCity) {
  auto s = slice_dice(fixtures::running_cube(), "Location", "antwerp");
  EXPECT_TRUE(s.computed.empty());
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    bool antwerp = s.schema->coordinate(c, 1) == 0;
    EXPECT_EQ(s.live(c), antwerp);
    EXPECT_EQ(s.flag[c], antwerp ? 1 : 0);
  }
  EXPECT_THROW(slice_dice(fixtures::running_cube(), "Location", "belgium"), ValidationError);
}

TEST(RollUp, TotalSalesPerCountry) {
  auto initial = fixtures::running_cube();
  auto s = roll_up(initial, "Location", "Country", {{"sales", AggFn::kSum}});
  std::map<std::tuple<std::string, std::string, std::string>, mpq_class> total;
  for (const auto& r : fixtures::running_rows()) {
    total[{r.product, fixtures::country_of().at(r.city), r.day}] += r.sales;
  }
  auto rows = fixtures::running_rows();
  std::set<std::string> flagged_cities;
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    EXPECT_TRUE(s.live(c));
    if (!s.flag[c]) continue;
    flagged_cities.insert(rows[c].city);
    EXPECT_EQ(s.value(tau(1), c),
              ExactValue(total.at({rows[c].product, fixtures::country_of().at(rows[c].city),
                                   rows[c].day})));
  }
  EXPECT_EQ(flagged_cities, (std::set<std::string>{"antwerp", "paris"}));
  EXPECT_EQ(s.flagged_count(), 2u * 4u * 31u);
}

TEST(RollUp, WeeklyAggregates) {
  auto initial = fixtures::running_cube();
  std::vector<Aggregate> aggs = {{"sales", AggFn::kAvg}, {"sales", AggFn::kMin},
                                 {"sales", AggFn::kMax}, {"sales", AggFn::kCount},
                                 {"sales", AggFn::kCountDistinct}};
  auto s = roll_up(initial, "Time", "Week", aggs);
  ASSERT_EQ(s.computed.size(), 5u);
  auto expected = oracle::oracle_apply(oracle::from_state(initial),
                                       ops::RollUp{"Time", "Week", aggs});
  auto report = oracle::assert_equiv(s, expected);
  EXPECT_TRUE(report.ok()) << report.summary();
  // Week w5 holds five days: jan27 .. jan31, represented by jan27.
  std::size_t c = s.schema->cell_index({0, 0, 26});
  EXPECT_EQ(s.flag[c], 1);
  EXPECT_EQ(s.value(tau(4), c), ExactValue(5));
  EXPECT_EQ(s.flag[s.schema->cell_index({0, 0, 27})], 0);
}

TEST(RollUp, EmptyAggregateListRejected) {
  EXPECT_THROW(roll_up(fixtures::running_cube(), "Location", "Country", {}),
               ValidationError);
  EXPECT_THROW(roll_up(fixtures::running_cube(), "Location", "Planet",
                       {{"sales", AggFn::kSum}}),
               UnknownName);
}

TEST(DrillDown, SameStepsAsRollUp) {
  auto s = fixtures::running_cube();
  EXPECT_EQ(compile(ops::DrillDown{"Location", "Region", {{"sales", AggFn::kSum}}}, s),
            compile(ops::RollUp{"Location", "Region", {{"sales", AggFn::kSum}}}, s));
}

TEST(Compile, RejectsWhileStepsPending) {
  auto s = engine::apply_step(fixtures::running_cube(), st::Const{1});
  EXPECT_THROW(compile(ops::Slice{"Location"}, s), ValidationError);
}

TEST(Compile, EndsWithFlag) {
  auto s = fixtures::running_cube();
  for (const OlapOp& op : std::vector<OlapOp>{
           ops::Dice{measure_lt("sales", 3)}, ops::Slice{"Time"},
           ops::SliceDice{"Product", "brio"},
           ops::RollUp{"Product", "Category", {{"sales", AggFn::kMax}}}}) {
    auto steps = compile(op, s);
    ASSERT_FALSE(steps.empty());
    EXPECT_TRUE(std::holds_alternative<st::MakeFlag>(steps.back())) << op_label(op);
  }
}

TEST(Pipeline, RegionalComparison) {
  auto initial = fixtures::running_cube();
  std::vector<OlapOp> pipeline = {
      ops::Dice{or_(level_eq("Location", "Region", "flanders"),
                    level_eq("Location", "Region", "south"))},
      ops::RollUp{"Location", "Country", {{"sales", AggFn::kSum}}},
      ops::Dice{level_eq("Location", "Country", "france")},
      ops::DrillDown{"Location", "Region", {{"sales", AggFn::kSum}}},
  };
  auto s = run_pipeline(initial, pipeline);
  auto expected = oracle::oracle_run(oracle::from_state(initial), pipeline);
  auto report = oracle::assert_equiv(s, expected);
  EXPECT_TRUE(report.ok()) << report.summary();
  // Only marseille survives; its value is its own sales.
  auto rows = fixtures::running_rows();
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    EXPECT_EQ(s.live(c), rows[c].city == "marseille");
    if (s.live(c)) {
      EXPECT_EQ(s.flag[c], 1);
      EXPECT_EQ(s.value(tau(1), c), ExactValue(rows[c].sales));
    }
  }
  EXPECT_EQ(s.op_log.size(), 4u);
}

TEST(Pipeline, CompositionIsAssociative) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) {
    auto initial = oracle::random_cube(rng);
    std::vector<OlapOp> pipeline;
    auto s = initial;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      auto op = oracle::random_op(rng, s);
      try {
        s = algebra::apply(s, op);
        pipeline.push_back(op);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) continue;
    auto whole = run_pipeline(initial, pipeline);
    auto split = run_pipeline(run_pipeline(initial, {pipeline[0]}),
                              {pipeline.begin() + 1, pipeline.end()});
    EXPECT_EQ(whole, split);
    EXPECT_EQ(whole, s);
  }
}

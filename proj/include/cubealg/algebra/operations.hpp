#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cubealg/algebra/condition.hpp"
#include "cubealg/engine/cube_state.hpp"
#include "cubealg/engine/step.hpp"

namespace cubealg::algebra {

enum class AggFn { kSum, kAvg, kMin, kMax, kCount, kCountDistinct };

// "SUM", "AVG", "MIN", "MAX", "COUNT", "COUNT-DISTINCT".
std::string to_string(AggFn f);
// Accepts the names above, case-insensitively, and COUNT_DISTINCT.
AggFn parse_agg_fn(const std::string& name);

struct Aggregate {
  std::string measure;
  AggFn fn = AggFn::kSum;
  bool operator==(const Aggregate&) const = default;
};

namespace ops {

struct Dice {
  ConditionPtr condition;
};
// Compares the condition trees, not the pointers.
bool operator==(const Dice& a, const Dice& b);
struct Slice {
  std::string dim;
  bool operator==(const Slice&) const = default;
};
struct SliceDice {
  std::string dim, member;
  bool operator==(const SliceDice&) const = default;
};
struct RollUp {
  std::string dim, level;
  std::vector<Aggregate> aggs;
  bool operator==(const RollUp&) const = default;
};
struct DrillDown {
  std::string dim, level;
  std::vector<Aggregate> aggs;
  bool operator==(const DrillDown&) const = default;
};

}  // namespace ops

using OlapOp = std::variant<ops::Dice, ops::Slice, ops::SliceDice, ops::RollUp,
                            ops::DrillDown>;

// Log label, e.g. "ROLL-UP(Location, Country, {(sales, SUM)})".
std::string op_label(const OlapOp& op);

// Full step list of one operation against `state`, ending in MakeFlag. All
// names are resolved here, so a successful compile only fails later on
// value-dependent errors (irrational MIN input and the like).
std::vector<engine::TransformationStep> compile(const OlapOp& op,
                                                const engine::CubeState& state);

engine::CubeState apply(engine::CubeState state, const OlapOp& op);

engine::CubeState dice(engine::CubeState state, const CellCondition& c);
engine::CubeState slice(engine::CubeState state, const std::string& dim);
engine::CubeState slice_dice(engine::CubeState state, const std::string& dim,
                             const std::string& member);
engine::CubeState roll_up(engine::CubeState state, const std::string& dim,
                          const std::string& level,
                          const std::vector<Aggregate>& aggs);
engine::CubeState drill_down(engine::CubeState state, const std::string& dim,
                             const std::string& level,
                             const std::vector<Aggregate>& aggs);

engine::CubeState run_pipeline(engine::CubeState state,
                               const std::vector<OlapOp>& ops);

}  // namespace cubealg::algebra

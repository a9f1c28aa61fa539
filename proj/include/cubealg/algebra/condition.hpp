#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cubealg/engine/cube_state.hpp"
#include "cubealg/engine/step.hpp"

namespace cubealg::algebra {

using engine::Side;
using exactnum::Rational;

struct CellCondition;
using ConditionPtr = std::shared_ptr<const CellCondition>;

namespace cond {

// dim.level = member
struct LevelEq {
  std::string dim, level, member;
  bool operator==(const LevelEq&) const = default;
};
// dim.level < member, or member < dim.level with kConstLess.
struct LevelLt {
  std::string dim, level, member;
  Side side = Side::kSubjectLess;
  bool operator==(const LevelLt&) const = default;
};
struct MeasureEq {
  std::string measure;
  Rational value;
  bool operator==(const MeasureEq&) const = default;
};
struct MeasureLt {
  std::string measure;
  Rational value;
  Side side = Side::kSubjectLess;
  bool operator==(const MeasureLt&) const = default;
};
struct Not {
  ConditionPtr arg;
};
struct And {
  ConditionPtr lhs, rhs;
};
struct Or {
  ConditionPtr lhs, rhs;
};

}  // namespace cond

struct CellCondition {
  std::variant<cond::LevelEq, cond::LevelLt, cond::MeasureEq, cond::MeasureLt,
               cond::Not, cond::And, cond::Or>
      node;
};

// Structural equality.
bool operator==(const CellCondition& a, const CellCondition& b);

ConditionPtr level_eq(std::string dim, std::string level, std::string member);
ConditionPtr level_lt(std::string dim, std::string level, std::string member,
                      Side side = Side::kSubjectLess);
ConditionPtr measure_eq(std::string measure, Rational value);
ConditionPtr measure_lt(std::string measure, Rational value,
                        Side side = Side::kSubjectLess);
ConditionPtr not_(ConditionPtr c);
ConditionPtr and_(ConditionPtr a, ConditionPtr b);
ConditionPtr or_(ConditionPtr a, ConditionPtr b);

// Statement syntax, e.g. `Location.City = antwerp OR NOT sales < 10`. Only
// the parentheses needed to re-parse the same tree are printed.
std::string to_string(const CellCondition& c);

// Steps leaving the 0/1 characteristic function of `c` in the last computed
// measure. New measures are numbered from state.computed.size(). Throws
// UnknownName / ValidationError for names that do not resolve in `state`.
std::vector<engine::TransformationStep> compile_condition(
    const CellCondition& c, const engine::CubeState& state);

// Same, appending to `out`; returns the ref of the result measure.
engine::MeasureRef compile_condition_into(
    const CellCondition& c, const engine::CubeState& state,
    std::vector<engine::TransformationStep>& out);

}  // namespace cubealg::algebra

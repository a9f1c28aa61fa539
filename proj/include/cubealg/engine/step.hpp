#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cubealg/exactnum/exact_value.hpp"

namespace cubealg::engine {

using exactnum::Rational;

// Reference to a measure of the current state: a protected measure by
// position, a computed measure tau_{index+1} by absolute position, or the
// flag.
struct MeasureRef {
  enum class Kind { kProtected, kComputed, kFlag };
  Kind kind = Kind::kProtected;
  std::size_t index = 0;

  static MeasureRef protected_measure(std::size_t i) {
    return {Kind::kProtected, i};
  }
  static MeasureRef computed(std::size_t i) { return {Kind::kComputed, i}; }
  static MeasureRef flag() { return {Kind::kFlag, 0}; }

  bool operator==(const MeasureRef&) const = default;
};

// Which operand of a comparison is the constant.
enum class Side {
  kSubjectLess,  // subject < c
  kConstLess,    // c < subject
};

namespace steps {

struct Const {
  Rational value;
  bool operator==(const Const&) const = default;
};
struct Sum {
  MeasureRef lhs, rhs;
  bool operator==(const Sum&) const = default;
};
struct Prod {
  MeasureRef lhs, rhs;
  bool operator==(const Prod&) const = default;
};
// a / 0 := a.
struct Quot {
  MeasureRef lhs, rhs;
  bool operator==(const Quot&) const = default;
};
struct EqMeasure {
  MeasureRef lhs, rhs;
  bool operator==(const EqMeasure&) const = default;
};
// Both operands must be rational in every live cell.
struct LtMeasure {
  MeasureRef lhs, rhs;
  bool operator==(const LtMeasure&) const = default;
};
// 1 iff the cell's coordinate along dim rolls up to member.
struct EqLevel {
  std::string dim, level, member;
  bool operator==(const EqLevel&) const = default;
};
// 1 iff the coordinate rolls up to some b with b < member (kSubjectLess) or
// member < b (kConstLess) under the induced order of the level.
struct LtLevel {
  std::string dim, level, member;
  Side side = Side::kSubjectLess;
  bool operator==(const LtLevel&) const = default;
};
// Constant selector; same values as EqLevel.
struct SelConst {
  std::string dim, level, member;
  bool operator==(const SelConst&) const = default;
};
// Level selector: 1 iff the coordinate is the representative of some member
// of the level.
struct SelLevel {
  std::string dim, level;
  bool operator==(const SelLevel&) const = default;
};
struct CountDistinct {
  MeasureRef arg;
  std::optional<MeasureRef> group_by;
  bool operator==(const CountDistinct&) const = default;
};
struct SumD {
  MeasureRef arg;
  bool operator==(const SumD&) const = default;
};
struct Min {
  MeasureRef arg;
  std::optional<MeasureRef> group_by;
  bool operator==(const Min&) const = default;
};
struct Max {
  MeasureRef arg;
  std::optional<MeasureRef> group_by;
  bool operator==(const Max&) const = default;
};
// Fresh prime labels for dom(dim.level), assigned in induced order.
struct Gamma {
  std::string dim, level;
  bool operator==(const Gamma&) const = default;
};
// value|labels.
struct Project {
  MeasureRef value, labels;
  bool operator==(const Project&) const = default;
};

// Where a flag or destructor takes its 0/1 values from: an existing measure
// or a selector evaluated on the spot.
using FlagSource = std::variant<MeasureRef, SelLevel, SelConst>;

struct MakeDestructor {
  FlagSource source;
  bool operator==(const MakeDestructor&) const = default;
};
// Ends an operation: keeps the last `arity` computed measures.
struct MakeFlag {
  std::size_t arity = 0;
  FlagSource source;
  bool operator==(const MakeFlag&) const = default;
};

}  // namespace steps

using TransformationStep =
    std::variant<steps::Const, steps::Sum, steps::Prod, steps::Quot,
                 steps::EqMeasure, steps::LtMeasure, steps::EqLevel,
                 steps::LtLevel, steps::SelConst, steps::SelLevel,
                 steps::CountDistinct, steps::SumD, steps::Min, steps::Max,
                 steps::Gamma, steps::Project, steps::MakeDestructor,
                 steps::MakeFlag>;

// True for steps that append a computed measure.
bool creates_measure(const TransformationStep& step);

// One step per line in tau-notation, numbering new measures from
// tau_{first_computed + 1}. Protected measures print by name.
std::string render_step(const TransformationStep& step,
                        const std::vector<std::string>& protected_names,
                        std::size_t new_index);
std::string render_steps(const std::vector<TransformationStep>& steps,
                         const std::vector<std::string>& protected_names,
                         std::size_t first_computed);

}  // namespace cubealg::engine

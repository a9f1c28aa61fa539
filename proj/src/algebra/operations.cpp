#include "cubealg/algebra/operations.hpp"

#include <algorithm>
#include <cctype>

#include "cubealg/detail/overloaded.hpp"
#include "cubealg/engine/engine.hpp"
#include "cubealg/error.hpp"

namespace cubealg::algebra {

using detail::Overloaded;
using engine::CubeState;
using engine::MeasureRef;
using engine::TransformationStep;
namespace steps = engine::steps;

std::string to_string(AggFn f) {
  switch (f) {
    case AggFn::kSum:
      return "SUM";
    case AggFn::kAvg:
      return "AVG";
    case AggFn::kMin:
      return "MIN";
    case AggFn::kMax:
      return "MAX";
    case AggFn::kCount:
      return "COUNT";
    case AggFn::kCountDistinct:
      return "COUNT-DISTINCT";
  }
  return "?";
}

AggFn parse_agg_fn(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char ch) { return std::toupper(ch); });
  std::replace(up.begin(), up.end(), '_', '-');
  for (AggFn f : {AggFn::kSum, AggFn::kAvg, AggFn::kMin, AggFn::kMax,
                  AggFn::kCount, AggFn::kCountDistinct}) {
    if (to_string(f) == up) return f;
  }
  throw UnknownName("aggregate function", name);
}

bool ops::operator==(const Dice& a, const Dice& b) {
  return a.condition && b.condition ? *a.condition == *b.condition
                                    : a.condition == b.condition;
}

namespace {

std::string agg_list(const std::vector<Aggregate>& aggs) {
  std::string out = "{";
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    if (i) out += ", ";
    out += "(" + aggs[i].measure + ", " + to_string(aggs[i].fn) + ")";
  }
  return out + "}";
}

// Accumulates a step list and hands out the refs of created measures.
class Builder {
 public:
  explicit Builder(const CubeState& state)
      : state_(state), next_(state.computed.size()) {}

  MeasureRef emit(TransformationStep step) {
    steps_.push_back(std::move(step));
    return MeasureRef::computed(next_++);
  }
  void finish(TransformationStep step) { steps_.push_back(std::move(step)); }
  MeasureRef condition(const CellCondition& c) {
    MeasureRef r = compile_condition_into(c, state_, steps_);
    next_ = r.index + 1;
    return r;
  }
  std::vector<TransformationStep> take() { return std::move(steps_); }

 private:
  const CubeState& state_;
  std::size_t next_;
  std::vector<TransformationStep> steps_;
};

const model::DimensionGraph& graph(const CubeState& s, const std::string& dim) {
  return s.schema->dimension(s.schema->dimension_index(dim));
}

std::string bottom_name(const model::DimensionGraph& g) {
  return g.level_name(g.bottom_level());
}

// Fresh labels at Bottom for every dimension but `dim`, then at `level` of
// `dim` when given, multiplied into one product labeling. Empty when there
// is nothing to label.
std::optional<MeasureRef> product_labels(Builder& b, const CubeState& s,
                                         const std::string& dim,
                                         const std::optional<std::string>& level) {
  std::vector<MeasureRef> parts;
  for (std::size_t j = 0; j < s.schema->dimension_count(); ++j) {
    const auto& g = s.schema->dimension(j);
    if (g.name() == dim) continue;
    parts.push_back(b.emit(steps::Gamma{g.name(), bottom_name(g)}));
  }
  if (level) parts.push_back(b.emit(steps::Gamma{dim, *level}));
  if (parts.empty()) return std::nullopt;
  MeasureRef acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    acc = b.emit(steps::Prod{acc, parts[i]});
  }
  return acc;
}

// Keeps `outputs` as the last measures, in order.
void gather(Builder& b, const std::vector<MeasureRef>& outputs,
            std::optional<MeasureRef> one) {
  if (outputs.size() < 2) return;
  for (const auto& o : outputs) b.emit(steps::Prod{o, *one});
}

std::vector<TransformationStep> compile_dice(const CubeState& s,
                                             const ops::Dice& op) {
  if (!op.condition) throw ValidationError("DICE needs a condition");
  Builder b(s);
  MeasureRef psi = b.condition(*op.condition);
  for (std::size_t i = 0; i < s.measure_names.size(); ++i) {
    b.emit(steps::Prod{MeasureRef::protected_measure(i), psi});
  }
  b.finish(steps::MakeDestructor{psi});
  b.finish(steps::MakeFlag{s.measure_names.size(), psi});
  return b.take();
}

std::vector<TransformationStep> compile_slice(const CubeState& s,
                                              const ops::Slice& op) {
  graph(s, op.dim);
  Builder b(s);
  std::size_t k = s.measure_names.size();
  std::optional<MeasureRef> one;
  if (k > 1) one = b.emit(steps::Const{1});
  auto labels = product_labels(b, s, op.dim, std::nullopt);
  std::vector<MeasureRef> outputs;
  for (std::size_t i = 0; i < k; ++i) {
    MeasureRef mu = MeasureRef::protected_measure(i);
    if (!labels) {
      outputs.push_back(b.emit(steps::SumD{mu}));
      continue;
    }
    MeasureRef p = b.emit(steps::Prod{mu, *labels});
    MeasureRef total = b.emit(steps::SumD{p});
    outputs.push_back(b.emit(steps::Project{total, *labels}));
  }
  gather(b, outputs, one);
  steps::SelLevel all{op.dim, std::string(model::kAllLevel)};
  b.finish(steps::MakeDestructor{all});
  b.finish(steps::MakeFlag{k, all});
  return b.take();
}

std::vector<TransformationStep> compile_slice_dice(const CubeState& s,
                                                   const ops::SliceDice& op) {
  const auto& g = graph(s, op.dim);
  if (!g.bottom_position(g.member_id(op.member))) {
    throw ValidationError("member '" + op.member + "' is not a " +
                          bottom_name(g) + " member of " + op.dim);
  }
  steps::SelConst sel{op.dim, bottom_name(g), op.member};
  return {steps::MakeDestructor{sel}, steps::MakeFlag{0, sel}};
}

std::vector<TransformationStep> compile_roll_up(
    const CubeState& s, const std::string& dim, const std::string& level,
    const std::vector<Aggregate>& aggs) {
  graph(s, dim).level_id(level);
  if (aggs.empty()) throw ValidationError("roll-up needs an aggregate");
  std::vector<MeasureRef> args;
  bool needs_one = aggs.size() > 1;
  for (const auto& a : aggs) {
    args.push_back(s.resolve(a.measure));
    needs_one |= a.fn == AggFn::kCount || a.fn == AggFn::kAvg;
  }

  Builder b(s);
  MeasureRef labels = *product_labels(b, s, dim, level);
  std::optional<MeasureRef> one;
  if (needs_one) one = b.emit(steps::Const{1});
  auto sum = [&](MeasureRef x) {
    MeasureRef p = b.emit(steps::Prod{x, labels});
    MeasureRef total = b.emit(steps::SumD{p});
    return b.emit(steps::Project{total, labels});
  };

  std::vector<MeasureRef> outputs;
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    MeasureRef alpha = args[i];
    switch (aggs[i].fn) {
      case AggFn::kSum:
        outputs.push_back(sum(alpha));
        break;
      case AggFn::kCount:
        outputs.push_back(sum(*one));
        break;
      case AggFn::kAvg: {
        MeasureRef total = sum(alpha);
        MeasureRef count = sum(*one);
        outputs.push_back(b.emit(steps::Quot{total, count}));
        break;
      }
      case AggFn::kMin:
        outputs.push_back(b.emit(steps::Min{alpha, labels}));
        break;
      case AggFn::kMax:
        outputs.push_back(b.emit(steps::Max{alpha, labels}));
        break;
      case AggFn::kCountDistinct:
        outputs.push_back(b.emit(steps::CountDistinct{alpha, labels}));
        break;
    }
  }
  gather(b, outputs, one);
  b.finish(steps::MakeFlag{aggs.size(), steps::SelLevel{dim, level}});
  return b.take();
}

}  // namespace

std::string op_label(const OlapOp& op) {
  return std::visit(
      Overloaded{
          [](const ops::Dice& o) {
            return "DICE(" + (o.condition ? to_string(*o.condition) : "") + ")";
          },
          [](const ops::Slice& o) { return "SLICE(" + o.dim + ")"; },
          [](const ops::SliceDice& o) {
            return "SLICE-DICE(" + o.dim + ", " + o.member + ")";
          },
          [](const ops::RollUp& o) {
            return "ROLL-UP(" + o.dim + ", " + o.level + ", " +
                   agg_list(o.aggs) + ")";
          },
          [](const ops::DrillDown& o) {
            return "DRILL-DOWN(" + o.dim + ", " + o.level + ", " +
                   agg_list(o.aggs) + ")";
          },
      },
      op);
}

std::vector<TransformationStep> compile(const OlapOp& op,
                                        const CubeState& state) {
  if (!state.pending_steps.empty()) {
    throw ValidationError("an operation is already in progress");
  }
  return std::visit(
      Overloaded{
          [&](const ops::Dice& o) { return compile_dice(state, o); },
          [&](const ops::Slice& o) { return compile_slice(state, o); },
          [&](const ops::SliceDice& o) { return compile_slice_dice(state, o); },
          [&](const ops::RollUp& o) {
            return compile_roll_up(state, o.dim, o.level, o.aggs);
          },
          [&](const ops::DrillDown& o) {
            return compile_roll_up(state, o.dim, o.level, o.aggs);
          },
      },
      op);
}

CubeState apply(CubeState state, const OlapOp& op) {
  auto list = compile(op, state);
  return engine::apply_sequence(std::move(state), list, op_label(op));
}

CubeState dice(CubeState state, const CellCondition& c) {
  return apply(std::move(state),
               ops::Dice{std::make_shared<const CellCondition>(c)});
}

CubeState slice(CubeState state, const std::string& dim) {
  return apply(std::move(state), ops::Slice{dim});
}

CubeState slice_dice(CubeState state, const std::string& dim,
                     const std::string& member) {
  return apply(std::move(state), ops::SliceDice{dim, member});
}

CubeState roll_up(CubeState state, const std::string& dim,
                  const std::string& level, const std::vector<Aggregate>& aggs) {
  return apply(std::move(state), ops::RollUp{dim, level, aggs});
}

CubeState drill_down(CubeState state, const std::string& dim,
                     const std::string& level,
                     const std::vector<Aggregate>& aggs) {
  return apply(std::move(state), ops::DrillDown{dim, level, aggs});
}

CubeState run_pipeline(CubeState state, const std::vector<OlapOp>& ops) {
  for (const auto& op : ops) state = apply(std::move(state), op);
  return state;
}

}  // namespace cubealg::algebra

#include "cubealg/algebra/condition.hpp"

#include "cubealg/detail/overloaded.hpp"
#include "cubealg/error.hpp"

namespace cubealg::algebra {

using detail::Overloaded;
using engine::MeasureRef;
using engine::TransformationStep;
namespace steps = engine::steps;

bool operator==(const CellCondition& a, const CellCondition& b) {
  if (a.node.index() != b.node.index()) return false;
  auto same = [](const ConditionPtr& x, const ConditionPtr& y) {
    return x && y ? *x == *y : x == y;
  };
  return std::visit(
      Overloaded{
          [&](const cond::Not& x) {
            return same(x.arg, std::get<cond::Not>(b.node).arg);
          },
          [&](const cond::And& x) {
            const auto& y = std::get<cond::And>(b.node);
            return same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
          },
          [&](const cond::Or& x) {
            const auto& y = std::get<cond::Or>(b.node);
            return same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
          },
          [&](const auto& x) {
            return x == std::get<std::decay_t<decltype(x)>>(b.node);
          },
      },
      a.node);
}

namespace {

ConditionPtr make(auto node) {
  return std::make_shared<const CellCondition>(CellCondition{std::move(node)});
}

}  // namespace

ConditionPtr level_eq(std::string dim, std::string level, std::string member) {
  return make(cond::LevelEq{std::move(dim), std::move(level), std::move(member)});
}
ConditionPtr level_lt(std::string dim, std::string level, std::string member,
                      Side side) {
  return make(cond::LevelLt{std::move(dim), std::move(level),
                            std::move(member), side});
}
ConditionPtr measure_eq(std::string measure, Rational value) {
  return make(cond::MeasureEq{std::move(measure), std::move(value)});
}
ConditionPtr measure_lt(std::string measure, Rational value, Side side) {
  return make(cond::MeasureLt{std::move(measure), std::move(value), side});
}
ConditionPtr not_(ConditionPtr c) { return make(cond::Not{std::move(c)}); }
ConditionPtr and_(ConditionPtr a, ConditionPtr b) {
  return make(cond::And{std::move(a), std::move(b)});
}
ConditionPtr or_(ConditionPtr a, ConditionPtr b) {
  return make(cond::Or{std::move(a), std::move(b)});
}

namespace {

int precedence(const CellCondition& c) {
  if (std::holds_alternative<cond::Or>(c.node)) return 1;
  if (std::holds_alternative<cond::And>(c.node)) return 2;
  return 3;
}

std::string render(const CellCondition& c);

std::string child(const ConditionPtr& c, int min_prec) {
  if (!c) throw ValidationError("incomplete condition");
  std::string s = render(*c);
  return precedence(*c) < min_prec ? "(" + s + ")" : s;
}

std::string compare(const std::string& subject, const std::string& constant,
                    Side side) {
  return side == Side::kSubjectLess ? subject + " < " + constant
                                    : subject + " > " + constant;
}

std::string render(const CellCondition& c) {
  return std::visit(
      Overloaded{
          [](const cond::LevelEq& a) {
            return a.dim + "." + a.level + " = " + a.member;
          },
          [](const cond::LevelLt& a) {
            return compare(a.dim + "." + a.level, a.member, a.side);
          },
          [](const cond::MeasureEq& a) {
            return a.measure + " = " + exactnum::render_rational(a.value);
          },
          [](const cond::MeasureLt& a) {
            return compare(a.measure, exactnum::render_rational(a.value),
                           a.side);
          },
          [](const cond::Not& n) { return "NOT " + child(n.arg, 3); },
          [](const cond::And& n) {
            return child(n.lhs, 2) + " AND " + child(n.rhs, 3);
          },
          [](const cond::Or& n) {
            return child(n.lhs, 1) + " OR " + child(n.rhs, 2);
          },
      },
      c.node);
}

void check_member(const engine::CubeState& s, const std::string& dim,
                  const std::string& level, const std::string& member) {
  const auto& g = s.schema->dimension(s.schema->dimension_index(dim));
  auto l = g.level_id(level);
  if (g.member_level(g.member_id(member)) != l) {
    throw ValidationError("member '" + member + "' is not at level '" + level +
                          "'");
  }
}

}  // namespace

std::string to_string(const CellCondition& c) { return render(c); }

MeasureRef compile_condition_into(const CellCondition& c,
                                  const engine::CubeState& state,
                                  std::vector<TransformationStep>& out) {
  // Index the next created measure will get.
  auto next = [&] {
    std::size_t n = state.computed.size();
    for (const auto& step : out) n += engine::creates_measure(step);
    return n;
  };
  auto emit = [&](TransformationStep step) {
    MeasureRef r = MeasureRef::computed(next());
    out.push_back(std::move(step));
    return r;
  };
  auto sub = [&](const ConditionPtr& p) {
    if (!p) throw ValidationError("incomplete condition");
    return compile_condition_into(*p, state, out);
  };
  return std::visit(
      Overloaded{
          [&](const cond::LevelEq& a) {
            check_member(state, a.dim, a.level, a.member);
            return emit(steps::EqLevel{a.dim, a.level, a.member});
          },
          [&](const cond::LevelLt& a) {
            check_member(state, a.dim, a.level, a.member);
            return emit(steps::LtLevel{a.dim, a.level, a.member, a.side});
          },
          [&](const cond::MeasureEq& a) {
            MeasureRef m = state.resolve(a.measure);
            MeasureRef k = emit(steps::Const{a.value});
            return emit(steps::EqMeasure{m, k});
          },
          [&](const cond::MeasureLt& a) {
            MeasureRef m = state.resolve(a.measure);
            MeasureRef k = emit(steps::Const{a.value});
            return a.side == Side::kSubjectLess
                       ? emit(steps::LtMeasure{m, k})
                       : emit(steps::LtMeasure{k, m});
          },
          [&](const cond::Not& n) {
            MeasureRef x = sub(n.arg);
            MeasureRef minus = emit(steps::Const{-1});
            MeasureRef neg = emit(steps::Prod{minus, x});
            MeasureRef one = emit(steps::Const{1});
            return emit(steps::Sum{one, neg});
          },
          [&](const cond::And& n) {
            MeasureRef a = sub(n.lhs);
            MeasureRef b = sub(n.rhs);
            return emit(steps::Prod{a, b});
          },
          [&](const cond::Or& n) {
            MeasureRef a = sub(n.lhs);
            MeasureRef b = sub(n.rhs);
            MeasureRef s = emit(steps::Sum{a, b});
            MeasureRef p = emit(steps::Prod{a, b});
            MeasureRef minus = emit(steps::Const{-1});
            MeasureRef neg = emit(steps::Prod{minus, p});
            return emit(steps::Sum{s, neg});
          },
      },
      c.node);
}

std::vector<TransformationStep> compile_condition(
    const CellCondition& c, const engine::CubeState& state) {
  std::vector<TransformationStep> out;
  compile_condition_into(c, state, out);
  return out;
}

}  // namespace cubealg::algebra

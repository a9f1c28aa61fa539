#include "cubealg/oracle/oracle.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "cubealg/detail/overloaded.hpp"
#include "cubealg/error.hpp"

namespace cubealg::oracle {

using algebra::AggFn;
using detail::Overloaded;
using exactnum::Rational;
using model::DimensionGraph;
namespace cond = algebra::cond;
namespace ops = algebra::ops;

ExactValue OracleCube::value(const std::string& measure,
                             std::size_t cell) const {
  for (std::size_t i = 0; i < measure_names.size(); ++i) {
    if (measure_names[i] == measure) return protected_values[i][cell];
  }
  if (measure == "flag") return ExactValue(flag[cell] ? 1 : 0);
  static const std::regex tau("tau([1-9][0-9]*)");
  std::smatch m;
  if (std::regex_match(measure, m, tau)) {
    std::size_t n = std::stoul(m[1]);
    if (n <= outputs.size()) return outputs[n - 1][cell];
  }
  throw UnknownName("measure", measure);
}

OracleCube from_view(const CubeView& view,
                     std::shared_ptr<const model::CubeSchema> schema) {
  OracleCube cube;
  cube.schema = std::move(schema);
  cube.measure_names = view.measure_names();
  std::size_t n = view.cell_count();
  cube.protected_values.assign(cube.measure_names.size(),
                               std::vector<ExactValue>(n));
  cube.outputs.assign(view.output_count(), std::vector<ExactValue>(n));
  cube.live.assign(n, 0);
  cube.flag.assign(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    if (!view.live(c)) continue;
    cube.live[c] = 1;
    cube.flag[c] = view.flagged(c);
    for (std::size_t m = 0; m < cube.measure_names.size(); ++m) {
      cube.protected_values[m][c] = view.protected_value(m, c);
    }
    for (std::size_t i = 0; i < view.output_count(); ++i) {
      cube.outputs[i][c] = view.output_value(i, c);
    }
  }
  return cube;
}

OracleCube from_state(const engine::CubeState& state) {
  return from_view(CubeView(state), state.schema);
}

std::optional<std::size_t> oracle_rolls_up(const DimensionGraph& g,
                                           std::size_t bottom_position,
                                           std::size_t level) {
  std::vector<std::size_t> stack{g.bottom_member(bottom_position)};
  std::set<std::size_t> seen;
  while (!stack.empty()) {
    std::size_t m = stack.back();
    stack.pop_back();
    if (!seen.insert(m).second) continue;
    if (g.member_level(m) == level) return m;
    for (auto p : g.parents(m)) stack.push_back(p);
  }
  return std::nullopt;
}

std::optional<std::size_t> oracle_representative(const DimensionGraph& g,
                                                 std::size_t member) {
  for (std::size_t p = 0; p < g.bottom_size(); ++p) {
    if (oracle_rolls_up(g, p, g.member_level(member)) == member) return p;
  }
  return std::nullopt;
}

namespace {

struct LevelAt {
  std::size_t dim;
  const DimensionGraph* g;
  std::size_t level;
};

LevelAt level_at(const OracleCube& cube, const std::string& dim,
                 const std::string& level) {
  std::size_t d = cube.schema->dimension_index(dim);
  const auto& g = cube.schema->dimension(d);
  return {d, &g, g.level_id(level)};
}

Rational rational(const ExactValue& v) {
  auto r = v.as_rational();
  if (!r) throw EvaluationError("irrational value " + exactnum::to_string(v));
  return *r;
}

bool holds(const OracleCube& cube, const algebra::CellCondition& c,
           std::size_t cell) {
  auto sub = [&](const algebra::ConditionPtr& p) {
    if (!p) throw ValidationError("incomplete condition");
    return holds(cube, *p, cell);
  };
  return std::visit(
      Overloaded{
          [&](const cond::LevelEq& a) {
            auto at = level_at(cube, a.dim, a.level);
            auto pos = cube.schema->coordinate(cell, at.dim);
            return oracle_rolls_up(*at.g, pos, at.level) ==
                   at.g->member_id(a.member);
          },
          [&](const cond::LevelLt& a) {
            auto at = level_at(cube, a.dim, a.level);
            auto pos = cube.schema->coordinate(cell, at.dim);
            auto b = oracle_rolls_up(*at.g, pos, at.level);
            if (!b) return false;
            auto rb = oracle_representative(*at.g, *b);
            auto rc = oracle_representative(*at.g, at.g->member_id(a.member));
            return a.side == algebra::Side::kSubjectLess ? rb < rc : rc < rb;
          },
          [&](const cond::MeasureEq& a) {
            return cube.value(a.measure, cell) == ExactValue(a.value);
          },
          [&](const cond::MeasureLt& a) {
            Rational v = rational(cube.value(a.measure, cell));
            return a.side == algebra::Side::kSubjectLess ? v < a.value
                                                         : a.value < v;
          },
          [&](const cond::Not& n) { return !sub(n.arg); },
          [&](const cond::And& n) {
            bool l = sub(n.lhs);
            bool r = sub(n.rhs);
            return l && r;
          },
          [&](const cond::Or& n) {
            bool l = sub(n.lhs);
            bool r = sub(n.rhs);
            return l || r;
          },
      },
      c.node);
}

// Keeps only `keep` cells alive, zeroing the rest.
OracleCube restrict(OracleCube cube, const std::vector<char>& keep) {
  for (std::size_t c = 0; c < cube.cell_count(); ++c) {
    if (cube.live[c] && keep[c]) continue;
    cube.live[c] = 0;
    cube.flag[c] = 0;
    for (auto& col : cube.protected_values) col[c] = ExactValue();
    for (auto& col : cube.outputs) col[c] = ExactValue();
  }
  return cube;
}

bool same_except(const model::CubeSchema& s, std::size_t a, std::size_t b,
                 std::size_t dim) {
  for (std::size_t j = 0; j < s.dimension_count(); ++j) {
    if (j != dim && s.coordinate(a, j) != s.coordinate(b, j)) return false;
  }
  return true;
}

ExactValue aggregate(AggFn f, const std::vector<ExactValue>& values) {
  switch (f) {
    case AggFn::kSum: {
      ExactValue sum;
      for (const auto& v : values) sum = sum + v;
      return sum;
    }
    case AggFn::kCount:
      return ExactValue(static_cast<long>(values.size()));
    case AggFn::kAvg:
      return aggregate(AggFn::kSum, values) /
             ExactValue(static_cast<long>(values.size()));
    case AggFn::kMin:
    case AggFn::kMax: {
      Rational best = rational(values.at(0));
      for (const auto& v : values) {
        best = f == AggFn::kMin ? std::min(best, rational(v))
                                : std::max(best, rational(v));
      }
      return ExactValue(best);
    }
    case AggFn::kCountDistinct:
      return ExactValue(static_cast<long>(
          std::set<ExactValue>(values.begin(), values.end()).size()));
  }
  return {};
}

OracleCube dice(const OracleCube& cube, const algebra::CellCondition& c) {
  OracleCube out = restrict(cube, oracle_select(cube, c));
  out.outputs = out.protected_values;
  for (std::size_t cell = 0; cell < out.cell_count(); ++cell) {
    out.flag[cell] = out.live[cell];
  }
  return out;
}

OracleCube slice(const OracleCube& cube, const std::string& dim) {
  auto at = level_at(cube, dim, std::string(model::kAllLevel));
  auto rep = oracle_representative(*at.g, at.g->member_id(model::kAllMember));
  const auto& s = *cube.schema;
  OracleCube out = cube;
  out.outputs.assign(cube.measure_names.size(),
                     std::vector<ExactValue>(cube.cell_count()));
  std::vector<char> keep(cube.cell_count(), 0);
  for (std::size_t x = 0; x < cube.cell_count(); ++x) {
    if (!cube.live[x] || s.coordinate(x, at.dim) != rep) continue;
    keep[x] = 1;
    for (std::size_t m = 0; m < cube.measure_names.size(); ++m) {
      ExactValue sum;
      for (std::size_t y = 0; y < cube.cell_count(); ++y) {
        if (cube.live[y] && same_except(s, x, y, at.dim)) {
          sum = sum + cube.protected_values[m][y];
        }
      }
      out.outputs[m][x] = sum;
    }
  }
  out = restrict(std::move(out), keep);
  for (std::size_t c = 0; c < out.cell_count(); ++c) out.flag[c] = out.live[c];
  return out;
}

OracleCube slice_dice(const OracleCube& cube, const std::string& dim,
                      const std::string& member) {
  std::size_t d = cube.schema->dimension_index(dim);
  const auto& g = cube.schema->dimension(d);
  auto pos = g.bottom_position(g.member_id(member));
  if (!pos) throw ValidationError("'" + member + "' is not a bottom member");
  std::vector<char> keep(cube.cell_count());
  for (std::size_t c = 0; c < cube.cell_count(); ++c) {
    keep[c] = cube.schema->coordinate(c, d) == *pos;
  }
  OracleCube out = restrict(cube, keep);
  out.outputs.clear();
  for (std::size_t c = 0; c < out.cell_count(); ++c) out.flag[c] = out.live[c];
  return out;
}

}  // namespace

std::vector<char> oracle_select(const OracleCube& cube,
                                const algebra::CellCondition& c) {
  std::vector<char> out(cube.cell_count(), 0);
  for (std::size_t cell = 0; cell < cube.cell_count(); ++cell) {
    if (cube.live[cell]) out[cell] = holds(cube, c, cell);
  }
  return out;
}

OracleCube oracle_aggregate(const OracleCube& cube, const std::string& dim,
                            const std::string& level,
                            const std::vector<algebra::Aggregate>& aggs) {
  auto at = level_at(cube, dim, level);
  const auto& s = *cube.schema;
  // Target member of every bottom position, -1 when there is none.
  std::vector<long> target(at.g->bottom_size());
  std::vector<char> is_rep(at.g->bottom_size(), 0);
  for (std::size_t p = 0; p < target.size(); ++p) {
    auto b = oracle_rolls_up(*at.g, p, at.level);
    target[p] = b ? static_cast<long>(*b) : -1;
    if (b && oracle_representative(*at.g, *b) == p) is_rep[p] = 1;
  }

  OracleCube out = cube;
  out.outputs.assign(aggs.size(), std::vector<ExactValue>(cube.cell_count()));
  for (std::size_t x = 0; x < cube.cell_count(); ++x) {
    if (!cube.live[x]) continue;
    long b = target[s.coordinate(x, at.dim)];
    out.flag[x] = is_rep[s.coordinate(x, at.dim)];
    if (b < 0) continue;
    for (std::size_t i = 0; i < aggs.size(); ++i) {
      std::vector<ExactValue> group;
      for (std::size_t y = 0; y < cube.cell_count(); ++y) {
        if (cube.live[y] && same_except(s, x, y, at.dim) &&
            target[s.coordinate(y, at.dim)] == b) {
          group.push_back(cube.value(aggs[i].measure, y));
        }
      }
      out.outputs[i][x] = aggregate(aggs[i].fn, group);
    }
  }
  return out;
}

OracleCube oracle_apply(const OracleCube& cube, const algebra::OlapOp& op) {
  return std::visit(
      Overloaded{
          [&](const ops::Dice& o) {
            if (!o.condition) throw ValidationError("DICE needs a condition");
            return dice(cube, *o.condition);
          },
          [&](const ops::Slice& o) { return slice(cube, o.dim); },
          [&](const ops::SliceDice& o) {
            return slice_dice(cube, o.dim, o.member);
          },
          [&](const ops::RollUp& o) {
            return oracle_aggregate(cube, o.dim, o.level, o.aggs);
          },
          [&](const ops::DrillDown& o) {
            return oracle_aggregate(cube, o.dim, o.level, o.aggs);
          },
      },
      op);
}

OracleCube oracle_run(OracleCube cube, const std::vector<algebra::OlapOp>& ops) {
  for (const auto& op : ops) cube = oracle_apply(cube, op);
  return cube;
}

std::string EquivReport::summary() const {
  if (ok()) return "equivalent";
  std::ostringstream out;
  out << mismatches.size() << " mismatch(es)";
  for (std::size_t i = 0; i < mismatches.size() && i < 10; ++i) {
    out << "\n  " << mismatches[i];
  }
  return out.str();
}

EquivReport assert_equiv(const engine::CubeState& state,
                         const OracleCube& expected) {
  EquivReport report;
  CubeView view(state);
  if (view.cell_count() != expected.cell_count()) {
    report.mismatches.push_back("cell counts differ");
    return report;
  }
  if (view.output_count() != expected.outputs.size()) {
    report.mismatches.push_back(
        "output arity " + std::to_string(view.output_count()) + " vs " +
        std::to_string(expected.outputs.size()));
    return report;
  }
  const auto& s = view.schema();
  for (std::size_t c = 0; c < view.cell_count(); ++c) {
    std::string where = s.describe(c);
    if (view.live(c) != static_cast<bool>(expected.live[c])) {
      report.mismatches.push_back(where + ": live " +
                                  (view.live(c) ? "engine" : "oracle") +
                                  " only");
      continue;
    }
    if (!view.live(c)) continue;
    if (view.flagged(c) != static_cast<bool>(expected.flag[c])) {
      report.mismatches.push_back(where + ": flag differs");
      continue;
    }
    if (!view.flagged(c)) continue;
    for (std::size_t m = 0; m < expected.measure_names.size(); ++m) {
      if (!(view.protected_value(m, c) == expected.protected_values[m][c])) {
        report.mismatches.push_back(where + ": " + expected.measure_names[m] +
                                    " differs");
      }
    }
    for (std::size_t i = 0; i < expected.outputs.size(); ++i) {
      if (!(view.output_value(i, c) == expected.outputs[i][c])) {
        report.mismatches.push_back(
            where + ": tau" + std::to_string(i + 1) + " engine " +
            exactnum::to_string(view.output_value(i, c)) + " oracle " +
            exactnum::to_string(expected.outputs[i][c]));
      }
    }
  }
  return report;
}

}  // namespace cubealg::oracle

#include "cubealg/oracle/random_cube.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cubealg/engine/engine.hpp"
#include "cubealg/error.hpp"
#include "cubealg/oracle/oracle.hpp"

namespace cubealg::oracle {

using algebra::AggFn;
using algebra::ConditionPtr;
using algebra::Side;
using exactnum::Rational;
using model::DimensionInstance;

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[uniform(rng, 0, items.size() - 1)];
}

Rational random_rational(std::mt19937_64& rng) {
  long num = std::uniform_int_distribution<long>(-100, 100)(rng);
  long den = std::uniform_int_distribution<long>(1, 100)(rng);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Drops members that no bottom member reaches, with their edges.
void prune(DimensionInstance& inst) {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [c, p] : inst.member_edges) parents[c].push_back(p);
  std::set<std::string> reached;
  std::vector<std::string> stack = inst.bottom_order;
  while (!stack.empty()) {
    std::string m = stack.back();
    stack.pop_back();
    if (!reached.insert(m).second) continue;
    for (const auto& p : parents[m]) stack.push_back(p);
  }
  std::erase_if(inst.members,
                [&](const auto& m) { return !reached.count(m.first); });
  std::erase_if(inst.member_edges, [&](const auto& e) {
    return !reached.count(e.first) || !reached.count(e.second);
  });
}

bool every_level_populated(const DimensionInstance& inst) {
  for (const auto& level : inst.schema.levels) {
    if (level == model::kAllLevel) continue;
    bool found = std::any_of(inst.members.begin(), inst.members.end(),
                             [&](const auto& m) { return m.second == level; });
    if (!found) return false;
  }
  return true;
}

DimensionInstance chain(std::mt19937_64& rng, const std::string& name,
                        const RandomCubeOptions& opts) {
  DimensionInstance inst;
  inst.schema.name = name;
  std::size_t depth = uniform(rng, 0, 2);
  inst.schema.levels.push_back("Bottom");
  for (std::size_t i = 1; i <= depth; ++i) {
    inst.schema.levels.push_back("L" + std::to_string(i));
  }
  inst.schema.levels.push_back(std::string(model::kAllLevel));
  for (std::size_t i = 0; i + 1 < inst.schema.levels.size(); ++i) {
    inst.schema.edges.emplace_back(inst.schema.levels[i],
                                   inst.schema.levels[i + 1]);
  }
  std::vector<std::string> above;
  for (std::size_t i = depth + 1; i-- > 0;) {
    const std::string& level = inst.schema.levels[i];
    std::size_t count = i == 0 ? uniform(rng, 1, opts.max_bottom)
                               : uniform(rng, 1, 3);
    std::vector<std::string> here;
    for (std::size_t j = 0; j < count; ++j) {
      std::string m = (i == 0 ? "b" : "l" + std::to_string(i) + "_") +
                      std::to_string(j);
      inst.members.emplace_back(m, level);
      here.push_back(m);
      if (!above.empty() && !chance(rng, opts.missing_parent)) {
        inst.member_edges.emplace_back(m, pick(rng, above));
      }
    }
    above = here;
  }
  inst.bottom_order = above;
  std::shuffle(inst.bottom_order.begin(), inst.bottom_order.end(), rng);
  return inst;
}

DimensionInstance diamond(std::mt19937_64& rng, const std::string& name,
                          const RandomCubeOptions& opts) {
  DimensionInstance inst;
  inst.schema.name = name;
  inst.schema.levels = {"Bottom", "A", "B", "C", std::string(model::kAllLevel)};
  inst.schema.edges = {{"Bottom", "A"}, {"Bottom", "B"}, {"A", "C"},
                       {"B", "C"}, {"C", "All"}};
  std::size_t cs = uniform(rng, 1, 2);
  std::map<std::string, std::vector<std::string>> a_of, b_of;
  std::vector<std::string> c_members;
  for (std::size_t i = 0; i < cs; ++i) {
    std::string c = "c" + std::to_string(i);
    c_members.push_back(c);
    inst.members.emplace_back(c, "C");
    for (const char* kind : {"a", "b"}) {
      std::size_t n = uniform(rng, 1, 2);
      for (std::size_t j = 0; j < n; ++j) {
        std::string m = kind + std::to_string(i) + std::to_string(j);
        inst.members.emplace_back(m, kind[0] == 'a' ? "A" : "B");
        inst.member_edges.emplace_back(m, c);
        (kind[0] == 'a' ? a_of : b_of)[c].push_back(m);
      }
    }
  }
  std::size_t n = uniform(rng, 1, opts.max_bottom);
  for (std::size_t j = 0; j < n; ++j) {
    std::string m = "b" + std::to_string(j);
    inst.members.emplace_back(m, "Bottom");
    const auto& c = pick(rng, c_members);
    inst.member_edges.emplace_back(m, pick(rng, a_of[c]));
    inst.member_edges.emplace_back(m, pick(rng, b_of[c]));
    inst.bottom_order.push_back(m);
  }
  std::shuffle(inst.bottom_order.begin(), inst.bottom_order.end(), rng);
  return inst;
}

std::vector<std::string> measure_pool(const engine::CubeState& state) {
  std::vector<std::string> out = state.measure_names;
  for (std::size_t i = 0; i < state.computed.size(); ++i) {
    out.push_back("tau" + std::to_string(i + 1));
  }
  out.push_back("flag");
  return out;
}

// Non-All levels of a dimension with their members.
std::vector<std::pair<std::string, std::vector<std::string>>> levels_of(
    const model::DimensionGraph& g) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (std::size_t l = 0; l < g.level_count(); ++l) {
    std::vector<std::string> members;
    for (auto m : g.level_members(l)) members.push_back(g.member_name(m));
    out.emplace_back(g.level_name(l), members);
  }
  return out;
}

}  // namespace

DimensionInstance random_dimension(std::mt19937_64& rng,
                                   const std::string& name,
                                   const RandomCubeOptions& opts) {
  for (;;) {
    DimensionInstance inst =
        chance(rng, 0.3) ? diamond(rng, name, opts) : chain(rng, name, opts);
    prune(inst);
    if (every_level_populated(inst)) return inst;
  }
}

engine::CubeState random_cube(std::mt19937_64& rng,
                              const RandomCubeOptions& opts) {
  std::size_t d = uniform(rng, 1, opts.max_dims);
  std::vector<model::DimensionGraph> graphs;
  for (std::size_t i = 0; i < d; ++i) {
    graphs.emplace_back(random_dimension(rng, "D" + std::to_string(i), opts));
  }
  auto schema = std::make_shared<const model::CubeSchema>(std::move(graphs));
  static const std::vector<std::string> names = {"sales", "cost", "qty"};
  std::vector<std::string> measures(
      names.begin(), names.begin() + std::min(opts.measures, names.size()));
  std::vector<engine::Fact> facts;
  for (std::size_t c = 0; c < schema->cell_count(); ++c) {
    engine::Fact f;
    for (std::size_t j = 0; j < d; ++j) {
      const auto& g = schema->dimension(j);
      f.members.push_back(g.member_name(g.bottom_member(schema->coordinate(c, j))));
    }
    for (std::size_t k = 0; k < measures.size(); ++k) {
      f.values.push_back(random_rational(rng));
    }
    facts.push_back(std::move(f));
  }
  return engine::init_cube(schema, measures, facts);
}

ConditionPtr random_condition(std::mt19937_64& rng,
                              const engine::CubeState& state, int depth) {
  if (depth > 0 && chance(rng, 0.6)) {
    switch (uniform(rng, 0, 2)) {
      case 0:
        return algebra::not_(random_condition(rng, state, depth - 1));
      case 1:
        return algebra::and_(random_condition(rng, state, depth - 1),
                             random_condition(rng, state, depth - 1));
      default:
        return algebra::or_(random_condition(rng, state, depth - 1),
                            random_condition(rng, state, depth - 1));
    }
  }
  Side side = chance(rng, 0.5) ? Side::kSubjectLess : Side::kConstLess;
  if (chance(rng, 0.5)) {
    const auto& g =
        state.schema->dimension(uniform(rng, 0, state.schema->dimension_count() - 1));
    auto levels = levels_of(g);
    const auto& [level, members] = pick(rng, levels);
    const auto& member = pick(rng, members);
    return chance(rng, 0.5) ? algebra::level_eq(g.name(), level, member)
                            : algebra::level_lt(g.name(), level, member, side);
  }
  std::string measure = pick(rng, measure_pool(state));
  Rational value = random_rational(rng);
  // Equality against a value that actually occurs, most of the time.
  std::vector<std::size_t> live;
  for (std::size_t c = 0; c < state.cell_count(); ++c) {
    if (state.live(c)) live.push_back(c);
  }
  if (!live.empty() && chance(rng, 0.7)) {
    auto v = state.value(state.resolve(measure), pick(rng, live)).as_rational();
    if (v) value = *v;
  }
  return chance(rng, 0.4) ? algebra::measure_eq(measure, value)
                          : algebra::measure_lt(measure, value, side);
}

algebra::OlapOp random_op(std::mt19937_64& rng, const engine::CubeState& state) {
  const auto& g =
      state.schema->dimension(uniform(rng, 0, state.schema->dimension_count() - 1));
  switch (uniform(rng, 0, 4)) {
    case 0:
      return algebra::ops::Dice{random_condition(rng, state)};
    case 1:
      return algebra::ops::Slice{g.name()};
    case 2:
      return algebra::ops::SliceDice{
          g.name(), g.member_name(g.bottom_member(uniform(rng, 0, g.bottom_size() - 1)))};
    default: {
      static const std::vector<AggFn> fns = {AggFn::kSum, AggFn::kAvg,
                                             AggFn::kMin, AggFn::kMax,
                                             AggFn::kCount,
                                             AggFn::kCountDistinct};
      auto pool = measure_pool(state);
      std::vector<algebra::Aggregate> aggs;
      std::size_t n = uniform(rng, 1, 2);
      for (std::size_t i = 0; i < n; ++i) {
        aggs.push_back({pick(rng, pool), pick(rng, fns)});
      }
      std::string level = pick(rng, levels_of(g)).first;
      if (chance(rng, 0.5)) return algebra::ops::RollUp{g.name(), level, aggs};
      return algebra::ops::DrillDown{g.name(), level, aggs};
    }
  }
}

DifferentialReport run_differential(std::uint64_t seed, std::size_t trials,
                                    const RandomCubeOptions& opts) {
  DifferentialReport report;
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    ++report.trials;
    engine::CubeState state = random_cube(rng, opts);
    OracleCube expected = from_state(state);
    std::string pipeline;
    std::size_t n = uniform(rng, opts.min_ops, opts.max_ops);
    for (std::size_t i = 0; i < n; ++i) {
      algebra::OlapOp op = random_op(rng, state);
      pipeline += (pipeline.empty() ? "" : "; ") + algebra::op_label(op);
      std::string where = "seed " + std::to_string(seed) + " trial " +
                          std::to_string(t) + " [" + pipeline + "]";
      std::optional<engine::CubeState> next;
      std::optional<OracleCube> next_expected;
      std::string engine_error, oracle_error;
      try {
        next = algebra::apply(state, op);
      } catch (const Error& e) {
        engine_error = e.what();
      }
      try {
        next_expected = oracle_apply(expected, op);
      } catch (const Error& e) {
        oracle_error = e.what();
      }
      ++report.operations;
      if (!next && !next_expected) {
        ++report.rejected;
        continue;
      }
      if (!next || !next_expected) {
        report.failures.push_back(where + ": only " +
                                  (next ? "oracle" : "engine") + " failed: " +
                                  engine_error + oracle_error);
        break;
      }
      auto equiv = assert_equiv(*next, *next_expected);
      if (!equiv.ok()) {
        report.failures.push_back(where + ": " + equiv.summary());
        break;
      }
      state = std::move(*next);
      expected = std::move(*next_expected);
    }
  }
  return report;
}

}  // namespace cubealg::oracle

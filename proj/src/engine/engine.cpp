#include "cubealg/engine/engine.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "cubealg/detail/overloaded.hpp"
#include "cubealg/error.hpp"

namespace cubealg::engine {

using exactnum::LabelingMeta;
using exactnum::Rational;
using model::DimensionGraph;

namespace {

using Column = std::vector<ExactValue>;

const std::regex& tau_pattern() {
  static const std::regex re("tau([1-9][0-9]*)");
  return re;
}

}  // namespace

std::size_t CubeState::live_count() const {
  return static_cast<std::size_t>(
      std::count(destroyed.begin(), destroyed.end(), 0));
}

std::size_t CubeState::flagged_count() const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cell_count(); ++c) n += live(c) && flag[c];
  return n;
}

std::size_t CubeState::destroyed_count() const {
  return cell_count() - live_count();
}

ExactValue CubeState::value(const MeasureRef& ref, std::size_t cell) const {
  switch (ref.kind) {
    case MeasureRef::Kind::kProtected:
      return protected_values.at(ref.index)[cell];
    case MeasureRef::Kind::kComputed:
      return computed.at(ref.index).values[cell];
    case MeasureRef::Kind::kFlag:
      return ExactValue(flag[cell] ? 1 : 0);
  }
  return {};
}

std::string CubeState::measure_name(const MeasureRef& ref) const {
  switch (ref.kind) {
    case MeasureRef::Kind::kProtected:
      return measure_names.at(ref.index);
    case MeasureRef::Kind::kComputed:
      return "tau" + std::to_string(ref.index + 1);
    case MeasureRef::Kind::kFlag:
      return "flag";
  }
  return {};
}

MeasureRef CubeState::resolve(const std::string& name) const {
  for (std::size_t i = 0; i < measure_names.size(); ++i) {
    if (measure_names[i] == name) return MeasureRef::protected_measure(i);
  }
  if (name == "flag") return MeasureRef::flag();
  std::smatch m;
  if (std::regex_match(name, m, tau_pattern())) {
    std::size_t n = std::stoul(m[1]);
    if (n <= computed.size()) return MeasureRef::computed(n - 1);
  }
  throw UnknownName("measure", name);
}

bool CubeState::operator==(const CubeState& other) const {
  if (schema != other.schema) {
    if (!schema || !other.schema) return false;
    if (schema->dimension_count() != other.schema->dimension_count()) {
      return false;
    }
    for (std::size_t i = 0; i < schema->dimension_count(); ++i) {
      if (!(schema->dimension(i).instance() ==
            other.schema->dimension(i).instance())) {
        return false;
      }
    }
  }
  return measure_names == other.measure_names &&
         protected_values == other.protected_values &&
         computed == other.computed && flag == other.flag &&
         destroyed == other.destroyed && allocator == other.allocator &&
         op_log == other.op_log && pending_label == other.pending_label &&
         pending_first_computed == other.pending_first_computed &&
         pending_steps == other.pending_steps &&
         pending_destructor == other.pending_destructor;
}

CubeState init_cube(std::shared_ptr<const model::CubeSchema> schema,
                    std::vector<std::string> measure_names,
                    const std::vector<Fact>& facts, const Rational& fill) {
  std::set<std::string> seen;
  for (const auto& name : measure_names) {
    if (name.empty() || name == "flag" ||
        std::regex_match(name, tau_pattern()) || !seen.insert(name).second) {
      throw ValidationError("invalid or duplicate measure name '" + name + "'");
    }
  }
  CubeState state;
  std::size_t cells = schema->cell_count();
  state.schema = std::move(schema);
  state.protected_values.assign(measure_names.size(),
                                std::vector<ExactValue>(cells, fill));
  state.measure_names = std::move(measure_names);
  state.flag.assign(cells, 1);
  state.destroyed.assign(cells, 0);

  const auto& cube = *state.schema;
  std::vector<char> filled(cells, 0);
  for (const auto& fact : facts) {
    if (fact.members.size() != cube.dimension_count() ||
        fact.values.size() != state.measure_names.size()) {
      throw ValidationError("fact has the wrong number of fields");
    }
    model::CellAddress address(cube.dimension_count());
    for (std::size_t i = 0; i < address.size(); ++i) {
      const auto& g = cube.dimension(i);
      auto pos = g.bottom_position(g.member_id(fact.members[i]));
      if (!pos) {
        throw UnknownName("bottom member", g.name() + "." + fact.members[i]);
      }
      address[i] = *pos;
    }
    std::size_t cell = cube.cell_index(address);
    if (filled[cell]) {
      throw ValidationError("duplicate fact for cell " + cube.describe(cell));
    }
    filled[cell] = 1;
    for (std::size_t k = 0; k < fact.values.size(); ++k) {
      state.protected_values[k][cell] = ExactValue(fact.values[k]);
    }
  }
  return state;
}

namespace {

using detail::Overloaded;

struct LevelRef {
  std::size_t dim = 0;
  const DimensionGraph* graph = nullptr;
  DimensionGraph::LevelId level = 0;
};

LevelRef resolve_level(const CubeState& s, const std::string& dim,
                       const std::string& level) {
  LevelRef r;
  r.dim = s.schema->dimension_index(dim);
  r.graph = &s.schema->dimension(r.dim);
  r.level = r.graph->level_id(level);
  return r;
}

DimensionGraph::MemberId resolve_member(const LevelRef& r,
                                        const std::string& member) {
  auto m = r.graph->member_id(member);
  if (r.graph->member_level(m) != r.level) {
    throw ValidationError("member '" + member + "' is not at level '" +
                          r.graph->level_name(r.level) + "'");
  }
  return m;
}

void check_ref(const CubeState& s, const MeasureRef& r) {
  bool ok = true;
  switch (r.kind) {
    case MeasureRef::Kind::kProtected:
      ok = r.index < s.measure_names.size();
      break;
    case MeasureRef::Kind::kComputed:
      ok = r.index < s.computed.size();
      break;
    case MeasureRef::Kind::kFlag:
      break;
  }
  if (!ok) throw UnknownName("measure", s.measure_name(r));
}

// The stored column of a measure, or the flag materialised into `scratch`.
const Column& column(const CubeState& s, const MeasureRef& r, Column& scratch) {
  check_ref(s, r);
  switch (r.kind) {
    case MeasureRef::Kind::kProtected:
      return s.protected_values[r.index];
    case MeasureRef::Kind::kComputed:
      return s.computed[r.index].values;
    case MeasureRef::Kind::kFlag:
      break;
  }
  scratch.assign(s.cell_count(), ExactValue());
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    if (s.flag[c]) scratch[c] = ExactValue(1);
  }
  return scratch;
}

const LabelingMeta& labeling_of(const CubeState& s, const MeasureRef& r) {
  check_ref(s, r);
  if (r.kind != MeasureRef::Kind::kComputed || !s.computed[r.index].labeling) {
    throw EvaluationError("measure " + s.measure_name(r) +
                          " is not a prime labeling");
  }
  return *s.computed[r.index].labeling;
}

// Lifts a predicate on bottom positions of one dimension to a 0/1 column.
Column indicator(const CubeState& s, std::size_t dim,
                 const std::vector<char>& by_position) {
  Column out(s.cell_count());
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    if (s.live(c) && by_position[s.schema->coordinate(c, dim)]) {
      out[c] = ExactValue(1);
    }
  }
  return out;
}

std::vector<char> rolls_up_to(const LevelRef& r, DimensionGraph::MemberId c) {
  std::vector<char> out(r.graph->bottom_size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = r.graph->rolls_up(p, r.level) == c;
  }
  return out;
}

Column eq_level(const CubeState& s, const std::string& dim,
                const std::string& level, const std::string& member) {
  auto r = resolve_level(s, dim, level);
  return indicator(s, r.dim, rolls_up_to(r, resolve_member(r, member)));
}

Column lt_level(const CubeState& s, const steps::LtLevel& t) {
  auto r = resolve_level(s, t.dim, t.level);
  auto c = resolve_member(r, t.member);
  std::vector<char> by_position(r.graph->bottom_size());
  for (std::size_t p = 0; p < by_position.size(); ++p) {
    auto b = r.graph->rolls_up(p, r.level);
    if (!b) continue;
    auto cmp = r.graph->induced_compare(*b, c);
    by_position[p] = t.side == Side::kSubjectLess ? cmp < 0 : cmp > 0;
  }
  return indicator(s, r.dim, by_position);
}

Column sel_level(const CubeState& s, const std::string& dim,
                 const std::string& level) {
  auto r = resolve_level(s, dim, level);
  std::vector<char> by_position(r.graph->bottom_size());
  for (std::size_t p = 0; p < by_position.size(); ++p) {
    by_position[p] = r.graph->is_representative(p, r.level);
  }
  return indicator(s, r.dim, by_position);
}

Column evaluate_source(const CubeState& s, const steps::FlagSource& source) {
  return std::visit(
      Overloaded{
          [&](const MeasureRef& r) {
            Column scratch;
            return Column(column(s, r, scratch));
          },
          [&](const steps::SelLevel& t) { return sel_level(s, t.dim, t.level); },
          [&](const steps::SelConst& t) {
            return eq_level(s, t.dim, t.level, t.member);
          },
      },
      source);
}

void require_boolean(const CubeState& s, const Column& col, const char* what) {
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    if (s.live(c) && !col[c].is_boolean()) {
      throw EvaluationError(std::string("non-Boolean ") + what + " in cell " +
                            s.schema->describe(c));
    }
  }
}

Rational require_rational(const CubeState& s, const ExactValue& v,
                          std::size_t cell, const char* what) {
  auto r = v.as_rational();
  if (!r) {
    throw EvaluationError(std::string(what) + " on irrational value " +
                          exactnum::to_string(v) + " in cell " +
                          s.schema->describe(cell));
  }
  return *r;
}

template <class F>
Column cellwise(const CubeState& s, const MeasureRef& a, const MeasureRef& b,
                F f) {
  Column sa, sb;
  const Column& ca = column(s, a, sa);
  const Column& cb = column(s, b, sb);
  Column out(s.cell_count());
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    if (s.live(c)) out[c] = f(ca[c], cb[c], c);
  }
  return out;
}

// Live cells partitioned by group label; ungrouped means one group. Cells
// whose label is 0 (no roll-up target) belong to no group.
std::map<ExactValue, std::vector<std::size_t>> groups(
    const CubeState& s, const std::optional<MeasureRef>& group_by) {
  std::map<ExactValue, std::vector<std::size_t>> out;
  if (!group_by) {
    auto& all = out[ExactValue(1)];
    for (std::size_t c = 0; c < s.cell_count(); ++c) {
      if (s.live(c)) all.push_back(c);
    }
    return out;
  }
  labeling_of(s, *group_by);
  const Column& labels = s.computed[group_by->index].values;
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    if (s.live(c) && !labels[c].is_zero()) out[labels[c]].push_back(c);
  }
  return out;
}

template <class Reduce>
Column per_group(const CubeState& s, const MeasureRef& arg,
                 const std::optional<MeasureRef>& group_by, Reduce reduce) {
  Column scratch;
  const Column& values = column(s, arg, scratch);
  Column out(s.cell_count());
  for (const auto& [label, cells] : groups(s, group_by)) {
    ExactValue result = reduce(values, cells);
    for (std::size_t c : cells) out[c] = result;
  }
  return out;
}

ComputedMeasure compute(CubeState& s, const TransformationStep& step) {
  ComputedMeasure m;
  m.values = std::visit(
      Overloaded{
          [&](const steps::Const& t) {
            Column out(s.cell_count());
            for (std::size_t c = 0; c < s.cell_count(); ++c) {
              if (s.live(c)) out[c] = ExactValue(t.value);
            }
            return out;
          },
          [&](const steps::Sum& t) {
            return cellwise(s, t.lhs, t.rhs,
                            [](auto& a, auto& b, auto) { return a + b; });
          },
          [&](const steps::Prod& t) {
            Column out = cellwise(s, t.lhs, t.rhs,
                                  [](auto& a, auto& b, auto) { return a * b; });
            bool la = t.lhs.kind == MeasureRef::Kind::kComputed &&
                      s.computed[t.lhs.index].labeling;
            bool lb = t.rhs.kind == MeasureRef::Kind::kComputed &&
                      s.computed[t.rhs.index].labeling;
            if (la && lb) {
              m.labeling = LabelingMeta::product(*s.computed[t.lhs.index].labeling,
                                                 *s.computed[t.rhs.index].labeling);
            }
            return out;
          },
          [&](const steps::Quot& t) {
            return cellwise(s, t.lhs, t.rhs,
                            [](auto& a, auto& b, auto) { return a / b; });
          },
          [&](const steps::EqMeasure& t) {
            return cellwise(s, t.lhs, t.rhs, [](auto& a, auto& b, auto) {
              return ExactValue(a == b ? 1 : 0);
            });
          },
          [&](const steps::LtMeasure& t) {
            return cellwise(s, t.lhs, t.rhs, [&](auto& a, auto& b, auto c) {
              Rational x = require_rational(s, a, c, "comparison");
              Rational y = require_rational(s, b, c, "comparison");
              return ExactValue(x < y ? 1 : 0);
            });
          },
          [&](const steps::EqLevel& t) {
            return eq_level(s, t.dim, t.level, t.member);
          },
          [&](const steps::LtLevel& t) { return lt_level(s, t); },
          [&](const steps::SelConst& t) {
            return eq_level(s, t.dim, t.level, t.member);
          },
          [&](const steps::SelLevel& t) { return sel_level(s, t.dim, t.level); },
          [&](const steps::CountDistinct& t) {
            return per_group(s, t.arg, t.group_by, [](auto& v, auto& cells) {
              std::set<ExactValue> distinct;
              for (auto c : cells) distinct.insert(v[c]);
              return ExactValue(static_cast<long>(distinct.size()));
            });
          },
          [&](const steps::SumD& t) {
            return per_group(s, t.arg, std::nullopt, [](auto& v, auto& cells) {
              ExactValue::Accumulator acc;
              for (auto c : cells) acc.add(v[c]);
              return acc.value();
            });
          },
          [&](const steps::Min& t) {
            return per_group(s, t.arg, t.group_by, [&](auto& v, auto& cells) {
              Rational best = require_rational(s, v[cells[0]], cells[0], "min");
              for (auto c : cells) {
                best = std::min(best, require_rational(s, v[c], c, "min"));
              }
              return ExactValue(best);
            });
          },
          [&](const steps::Max& t) {
            return per_group(s, t.arg, t.group_by, [&](auto& v, auto& cells) {
              Rational best = require_rational(s, v[cells[0]], cells[0], "max");
              for (auto c : cells) {
                best = std::max(best, require_rational(s, v[c], c, "max"));
              }
              return ExactValue(best);
            });
          },
          [&](const steps::Gamma& t) {
            auto r = resolve_level(s, t.dim, t.level);
            auto members = r.graph->level_members_induced(r.level);
            auto labels = s.allocator.allocate(members.size());
            std::map<DimensionGraph::MemberId, ExactValue> label_of;
            for (std::size_t i = 0; i < members.size(); ++i) {
              label_of[members[i]] = exactnum::label_value(labels[i]);
            }
            std::vector<ExactValue> by_position(r.graph->bottom_size());
            for (std::size_t p = 0; p < by_position.size(); ++p) {
              if (auto b = r.graph->rolls_up(p, r.level)) {
                by_position[p] = label_of.at(*b);
              }
            }
            m.labeling = LabelingMeta::single(t.dim, t.level, std::move(labels));
            Column out(s.cell_count());
            for (std::size_t c = 0; c < s.cell_count(); ++c) {
              if (s.live(c)) out[c] = by_position[s.schema->coordinate(c, r.dim)];
            }
            return out;
          },
          [&](const steps::Project& t) {
            const auto& meta = labeling_of(s, t.labels);
            const Column& labels = s.computed[t.labels.index].values;
            Column scratch;
            const Column& values = column(s, t.value, scratch);
            std::map<ExactValue, exactnum::ProjectionIndex> indexes;
            Column out(s.cell_count());
            for (std::size_t c = 0; c < s.cell_count(); ++c) {
              if (!s.live(c)) continue;
              auto it = indexes.find(values[c]);
              if (it == indexes.end()) {
                it = indexes
                         .emplace(values[c], exactnum::ProjectionIndex(
                                                 values[c], meta.primes))
                         .first;
              }
              out[c] = it->second.project(labels[c]);
            }
            return out;
          },
          [&](const steps::MakeDestructor&) -> Column {
            throw EvaluationError("destructor does not create a measure");
          },
          [&](const steps::MakeFlag&) -> Column {
            throw EvaluationError("flag does not create a measure");
          },
      },
      step);
  return m;
}

void check_source(const CubeState& s, const steps::FlagSource& source) {
  std::visit(Overloaded{
                 [&](const MeasureRef& r) { check_ref(s, r); },
                 [&](const steps::SelLevel& t) { resolve_level(s, t.dim, t.level); },
                 [&](const steps::SelConst& t) {
                   resolve_member(resolve_level(s, t.dim, t.level), t.member);
                 },
             },
             source);
}

CubeState finalize_impl(CubeState state, std::size_t arity,
                        const steps::FlagSource& flag,
                        const std::optional<steps::FlagSource>& destructor) {
  if (arity > state.computed.size()) {
    throw EvaluationError("output arity " + std::to_string(arity) +
                          " exceeds the " +
                          std::to_string(state.computed.size()) +
                          " computed measures");
  }
  Column flag_col = evaluate_source(state, flag);
  require_boolean(state, flag_col, "flag");
  if (destructor) {
    Column d = evaluate_source(state, *destructor);
    require_boolean(state, d, "destructor");
    for (std::size_t c = 0; c < state.cell_count(); ++c) {
      if (state.live(c) && d[c].is_zero()) state.destroyed[c] = 1;
    }
  }

  std::vector<ComputedMeasure> kept(
      std::make_move_iterator(state.computed.end() - arity),
      std::make_move_iterator(state.computed.end()));
  state.computed = std::move(kept);
  for (std::size_t c = 0; c < state.cell_count(); ++c) {
    if (state.live(c)) {
      state.flag[c] = flag_col[c].is_zero() ? 0 : 1;
      continue;
    }
    state.flag[c] = 0;
    for (auto& col : state.protected_values) col[c] = ExactValue();
    for (auto& m : state.computed) m.values[c] = ExactValue();
  }

  state.op_log.push_back({state.pending_label.empty() ? std::string("custom")
                                                       : state.pending_label,
                          state.pending_first_computed,
                          std::move(state.pending_steps)});
  state.pending_steps.clear();
  state.pending_label.clear();
  state.pending_destructor.reset();
  state.pending_first_computed = state.computed.size();
  return state;
}

}  // namespace

CubeState apply_step(CubeState state, const TransformationStep& step) {
  if (state.pending_steps.empty()) {
    state.pending_first_computed = state.computed.size();
  }
  if (const auto* d = std::get_if<steps::MakeDestructor>(&step)) {
    check_source(state, d->source);
    state.pending_destructor = d->source;
    state.pending_steps.push_back(step);
    return state;
  }
  if (const auto* f = std::get_if<steps::MakeFlag>(&step)) {
    check_source(state, f->source);
    state.pending_steps.push_back(step);
    auto destructor = state.pending_destructor;
    return finalize_impl(std::move(state), f->arity, f->source, destructor);
  }
  std::size_t index = state.computed.size();
  ComputedMeasure m = compute(state, step);
  m.provenance = render_step(step, state.measure_names, index);
  state.computed.push_back(std::move(m));
  state.pending_steps.push_back(step);
  return state;
}

CubeState finalize_operation(CubeState state, std::size_t arity,
                             const steps::FlagSource& flag,
                             const std::optional<steps::FlagSource>& destructor) {
  if (state.pending_steps.empty()) {
    state.pending_first_computed = state.computed.size();
  }
  if (destructor) {
    check_source(state, *destructor);
    state.pending_steps.push_back(steps::MakeDestructor{*destructor});
  }
  check_source(state, flag);
  state.pending_steps.push_back(steps::MakeFlag{arity, flag});
  return finalize_impl(std::move(state), arity, flag, destructor);
}

CubeState apply_sequence(CubeState state,
                         const std::vector<TransformationStep>& list,
                         const std::string& label) {
  if (!list.empty() && state.pending_steps.empty()) state.pending_label = label;
  for (const auto& step : list) state = apply_step(std::move(state), step);
  return state;
}

CubeState replay_log(CubeState initial, const std::vector<OpLogEntry>& log) {
  for (const auto& entry : log) {
    initial = apply_sequence(std::move(initial), entry.steps, entry.label);
  }
  return initial;
}

std::vector<MeasureInfo> list_measures(const CubeState& state) {
  std::vector<MeasureInfo> out;
  for (const auto& name : state.measure_names) {
    out.push_back({name, "protected", true, false});
  }
  for (std::size_t i = 0; i < state.computed.size(); ++i) {
    const auto& m = state.computed[i];
    out.push_back({"tau" + std::to_string(i + 1), m.provenance, false,
                   m.labeling.has_value()});
  }
  return out;
}

}  // namespace cubealg::engine

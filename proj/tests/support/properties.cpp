#include "support/properties.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cubealg/algebra/condition.hpp"
#include "cubealg/engine/engine.hpp"
#include "cubealg/exactnum/labels.hpp"
#include "cubealg/io/snapshot.hpp"
#include "cubealg/model/dimension.hpp"
#include "cubealg/oracle/random_cube.hpp"
#include "support/fixtures.hpp"

namespace properties {

using namespace cubealg;
using exactnum::ExactValue;
using exactnum::Rational;

namespace {

std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Truth of `c` in a cell of the tiny cube. Coordinate p of dimension X is
// member x<p> at level B and xg<p> at level G; both levels are ordered by p.
bool truth(const algebra::CellCondition& c, const engine::CubeState& s,
           std::size_t cell) {
  namespace cond = algebra::cond;
  auto position = [&](const std::string& dim) {
    return s.schema->coordinate(cell, s.schema->dimension_index(dim));
  };
  // Position of a member in its level, or the all member.
  auto index = [](const std::string& member) -> long {
    return member == "all" ? 0 : member.back() - '0';
  };
  auto value = [&](const std::string& measure) -> Rational {
    if (measure == "flag") return s.flag[cell];
    auto it = std::find(s.measure_names.begin(), s.measure_names.end(), measure);
    return *s.protected_values[it - s.measure_names.begin()][cell].as_rational();
  };
  if (auto* a = std::get_if<cond::LevelEq>(&c.node)) {
    return a->level == "All" || position(a->dim) == static_cast<std::size_t>(index(a->member));
  }
  if (auto* a = std::get_if<cond::LevelLt>(&c.node)) {
    if (a->level == "All") return false;
    long p = static_cast<long>(position(a->dim)), m = index(a->member);
    return a->side == engine::Side::kSubjectLess ? p < m : m < p;
  }
  if (auto* a = std::get_if<cond::MeasureEq>(&c.node)) return value(a->measure) == a->value;
  if (auto* a = std::get_if<cond::MeasureLt>(&c.node)) {
    return a->side == engine::Side::kSubjectLess ? value(a->measure) < a->value
                                                 : a->value < value(a->measure);
  }
  if (auto* n = std::get_if<cond::Not>(&c.node)) return !truth(*n->arg, s, cell);
  if (auto* n = std::get_if<cond::And>(&c.node)) {
    return truth(*n->lhs, s, cell) && truth(*n->rhs, s, cell);
  }
  auto* n = std::get_if<cond::Or>(&c.node);
  return truth(*n->lhs, s, cell) || truth(*n->rhs, s, cell);
}

}  // namespace

std::string boolean_closure(std::mt19937_64& rng) {
  auto state = fixtures::tiny_cube(rng);
  auto c = oracle::random_condition(rng, state, 3);
  auto s = state;
  for (const auto& step : algebra::compile_condition(*c, state)) {
    s = engine::apply_step(s, step);
  }
  const auto& result = s.computed.back().values;
  for (std::size_t cell = 0; cell < 8; ++cell) {
    ExactValue want(truth(*c, state, cell) ? 1 : 0);
    if (result[cell] != want) {
      return algebra::to_string(*c) + ": cell " + state.schema->describe(cell) +
             " gives " + exactnum::to_string(result[cell]);
    }
  }
  return {};
}

std::string prime_sum(std::mt19937_64& rng) {
  exactnum::LabelAllocator alloc;
  alloc.allocate(below(rng, 30));  // labels used by earlier operations
  std::size_t dims = 1 + below(rng, 3);
  std::vector<std::vector<std::uint64_t>> labels(dims);
  std::vector<std::uint64_t> primes;
  for (auto& l : labels) {
    l = alloc.allocate(1 + below(rng, 5));
    for (auto p : l) {
      if (p != 1) primes.push_back(p);
    }
  }
  std::sort(primes.begin(), primes.end());
  // Every combination of per-dimension labels is one cell.
  std::vector<ExactValue> cell_labels{ExactValue(1)};
  for (const auto& l : labels) {
    std::vector<ExactValue> next;
    for (const auto& prefix : cell_labels) {
      for (auto p : l) next.push_back(prefix * exactnum::label_value(p));
    }
    cell_labels = next;
  }
  std::vector<ExactValue> values;
  ExactValue::Accumulator sum;
  for (const auto& label : cell_labels) {
    ExactValue v = fixtures::random_rational(rng, 100);
    // Some values carry a radical that is not a labeling prime.
    if (rng() % 4 == 0) v = v + ExactValue::radical(1009, fixtures::random_rational(rng, 5));
    values.push_back(v);
    sum.add(v * label);
  }
  ExactValue encoded = sum.value();
  exactnum::ProjectionIndex index(encoded, primes);
  for (std::size_t i = 0; i < cell_labels.size(); ++i) {
    ExactValue direct = exactnum::project_value(encoded, cell_labels[i], primes);
    if (direct != values[i] || index.project(cell_labels[i]) != values[i]) {
      return "label " + exactnum::to_string(cell_labels[i]) + " decodes to " +
             exactnum::to_string(direct) + ", expected " + exactnum::to_string(values[i]);
    }
  }
  return {};
}

std::string soundness(std::mt19937_64& rng) {
  model::DimensionInstance inst;
  inst.schema = {"D", {"Bottom", "A", "B", "C", "All"},
                 {{"Bottom", "A"}, {"Bottom", "B"}, {"A", "C"}, {"B", "C"}, {"C", "All"}}};
  std::map<std::string, std::vector<std::string>> level;
  std::size_t nb = 2 + below(rng, 3);
  for (std::size_t i = 0; i < nb; ++i) level["Bottom"].push_back("b" + std::to_string(i));
  for (std::string l : {"A", "B", "C"}) {
    for (std::size_t i = 0; i < 2; ++i) level[l].push_back(l + std::to_string(i));
  }
  for (const auto& [l, ms] : level) {
    for (const auto& m : ms) inst.members.emplace_back(m, l);
  }
  // Each parent gets at least one child, so every member is reached.
  auto link = [&](const std::string& from, const std::string& to) {
    const auto& children = level[from];
    const auto& parents = level[to];
    for (std::size_t i = 0; i < children.size(); ++i) {
      const auto& parent = i < parents.size() ? parents[i] : parents[below(rng, parents.size())];
      inst.member_edges.emplace_back(children[i], parent);
    }
  };
  link("Bottom", "A");
  link("Bottom", "B");
  link("A", "C");
  link("B", "C");
  if (rng() % 5 == 0) inst.member_edges.emplace_back("A0", "C1");
  inst.bottom_order = level["Bottom"];
  std::shuffle(inst.member_edges.begin(), inst.member_edges.end(), rng);

  std::map<std::string, std::vector<std::string>> parents;
  std::map<std::string, std::string> level_of;
  for (const auto& [m, l] : inst.members) level_of[m] = l;
  for (const auto& [c, p] : inst.member_edges) parents[c].push_back(p);
  bool unsound = false;
  for (const auto& b : level["Bottom"]) {
    std::set<std::string> seen;
    std::function<void(const std::string&)> walk = [&](const std::string& m) {
      if (!seen.insert(m).second) return;
      for (const auto& p : parents[m]) walk(p);
    };
    walk(b);
    std::map<std::string, int> per_level;
    for (const auto& m : seen) {
      if (++per_level[level_of[m]] > 1) unsound = true;
    }
  }
  auto report = model::validate_graph(model::DimensionGraph(inst));
  if (report.ok() == unsound) {
    std::ostringstream out;
    out << "brute force says " << (unsound ? "unsound" : "sound")
        << ", validation says " << report.summary() << "; edges:";
    for (const auto& [c, p] : inst.member_edges) out << " " << c << "->" << p;
    return out.str();
  }
  return {};
}

std::string snapshot_round_trip(std::mt19937_64& rng) {
  oracle::RandomCubeOptions opts;
  opts.measures = 1 + below(rng, 3);
  auto s = oracle::random_cube(rng, opts);
  for (std::size_t i = 0, n = below(rng, 3); i < n; ++i) {
    try {
      s = algebra::apply(s, oracle::random_op(rng, s));
    } catch (const Error&) {
    }
  }
  if (rng() % 3 == 0) {
    const auto& g = s.schema->dimension(0);
    s = engine::apply_step(s, engine::steps::Gamma{g.name(), g.level_name(g.bottom_level())});
  }
  auto text = io::snapshot_text(s);
  auto back = io::restore_text(text);
  if (!(back == s)) return "state differs after restore";
  if (io::snapshot_text(back) != text) return "snapshot text differs after restore";
  return {};
}

std::string statement_round_trip(std::mt19937_64& rng) {
  auto s = fixtures::random_statement(rng);
  std::string text = cli::render(s);
  try {
    if (!(cli::parse_statement(text) == s)) return "reparse differs: " + text;
  } catch (const std::exception& e) {
    return text + ": " + e.what();
  }
  return {};
}

std::string rational_round_trip(std::mt19937_64& rng) {
  // Wide magnitudes: up to 30 digits on either side.
  auto digits = [&](std::size_t n) {
    std::string d(1, static_cast<char>('1' + below(rng, 9)));
    for (std::size_t i = 1; i < n; ++i) d += static_cast<char>('0' + below(rng, 10));
    return d;
  };
  Rational q(mpz_class(digits(1 + below(rng, 30))), mpz_class(digits(1 + below(rng, 30))));
  q.canonicalize();
  if (rng() % 2) q = -q;
  std::string text = exactnum::render_rational(q);
  if (exactnum::parse_rational(text) != q) return "p/q literal " + text;
  // Decimal spelling of an integer divided by a power of ten.
  std::string whole = digits(1 + below(rng, 12)), frac = digits(1 + below(rng, 12));
  Rational d(mpz_class(whole + frac),
             mpz_class("1" + std::string(frac.size(), '0')));
  d.canonicalize();
  if (exactnum::parse_rational(whole + "." + frac) != d) {
    return "decimal literal " + whole + "." + frac;
  }
  return {};
}

}  // namespace properties

#include "support/fixtures.hpp"

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "cubealg/engine/engine.hpp"
#include "cubealg/io/cube_io.hpp"

namespace fixtures {

using namespace cubealg;
using engine::MeasureRef;
namespace st = engine::steps;

namespace {

MeasureRef tau(std::size_t i) { return MeasureRef::computed(i - 1); }
MeasureRef mu(std::size_t i) { return MeasureRef::protected_measure(i - 1); }

model::DimensionInstance flat(const std::string& name, const std::string& level,
                              const std::vector<std::string>& members) {
  model::DimensionInstance inst;
  inst.schema = {name, {level, "All"}, {{level, "All"}}};
  for (const auto& m : members) inst.members.emplace_back(m, level);
  inst.bottom_order = members;
  return inst;
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool coin(std::mt19937_64& rng) { return rng() & 1; }

}  // namespace

std::string data_path(const std::string& name) {
  return std::string(CUBEALG_DATA_DIR) + "/" + name;
}

std::string read(const std::string& name) {
  std::ifstream in(data_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

CubeState running_cube() {
  return io::load_cube(read("running_example.json"), read("running_sales.csv"));
}

model::DimensionInstance running_dimension(const std::string& name) {
  for (const auto& d :
       io::parse_cube_definition(read("running_example.json")).dimensions) {
    if (d.schema.name == name) return d;
  }
  throw std::runtime_error("no dimension " + name);
}

model::DimensionInstance unsound_time() {
  return io::parse_cube_definition(read("unsound_time.json")).dimensions.at(0);
}

CubeState cities_cube() {
  std::vector<std::string> products, days;
  for (int i = 0; i < 10; ++i) products.push_back("p" + std::to_string(i));
  for (int i = 0; i < 100; ++i) days.push_back("d" + std::to_string(i));
  std::vector<model::DimensionGraph> graphs;
  graphs.emplace_back(flat("Product", "Item", products));
  graphs.emplace_back(running_dimension("Location"));
  graphs.emplace_back(flat("Time", "Day", days));
  auto schema = std::make_shared<const model::CubeSchema>(std::move(graphs));
  return engine::init_cube(schema, {"sales"}, {}, 1);
}

mpq_class decimal(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return mpq_class(text, 10);
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::string den = "1" + std::string(text.size() - dot - 1, '0');
  mpq_class q(digits + "/" + den, 10);
  q.canonicalize();
  return q;
}

std::vector<Row> running_rows() {
  std::istringstream in(read("running_sales.csv"));
  std::string line;
  std::getline(in, line);
  if (line != "Product,Location,Time,sales") {
    throw std::runtime_error("unexpected header " + line);
  }
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream f(line);
    Row r;
    std::string s;
    std::getline(f, r.product, ',');
    std::getline(f, r.city, ',');
    std::getline(f, r.day, ',');
    std::getline(f, s);
    r.sales = decimal(s);
    rows.push_back(r);
  }
  return rows;
}

const std::map<std::string, std::string>& country_of() {
  static const std::map<std::string, std::string> m = {
      {"antwerp", "belgium"}, {"brussels", "belgium"},
      {"paris", "france"},    {"marseille", "france"}};
  return m;
}

const std::map<std::string, std::string>& region_of() {
  static const std::map<std::string, std::string> m = {
      {"antwerp", "flanders"}, {"brussels", "capital"},
      {"paris", "north"},      {"marseille", "south"}};
  return m;
}

std::vector<engine::TransformationStep> sales_above_steps() {
  return {
      st::Const{decimal("49.99")},
      st::LtMeasure{tau(1), mu(1)},
      st::Prod{mu(1), tau(2)},
      st::MakeDestructor{tau(2)},
      st::MakeFlag{1, tau(2)},
  };
}

std::vector<engine::TransformationStep> two_cities_steps() {
  return {
      st::SelConst{"Location", "City", "antwerp"},
      st::SelConst{"Location", "City", "brussels"},
      st::Sum{tau(1), tau(2)},
      st::Prod{tau(3), mu(1)},
      st::MakeDestructor{tau(3)},
      st::MakeFlag{1, tau(3)},
  };
}

std::vector<engine::TransformationStep> cities_per_country_steps() {
  return {
      st::Gamma{"Location", "Country"},
      st::Gamma{"Location", "City"},
      st::Prod{tau(1), tau(2)},
      st::SumD{tau(3)},
      st::Gamma{"Product", "Item"},
      st::CountDistinct{tau(5), std::nullopt},
      st::Gamma{"Time", "Day"},
      st::CountDistinct{tau(7), std::nullopt},
      st::Prod{tau(6), tau(8)},
      st::Quot{tau(4), tau(9)},
      st::Project{tau(10), tau(2)},
      st::SumD{tau(11)},
      st::Quot{tau(12), tau(9)},
      st::Project{tau(13), tau(1)},
      st::MakeFlag{1, st::SelLevel{"Location", "City"}},
  };
}

CubeState tiny_cube(std::mt19937_64& rng) {
  std::vector<model::DimensionGraph> graphs;
  for (std::string d : {"X", "Y", "Z"}) {
    std::string lower(1, static_cast<char>(d[0] - 'A' + 'a'));
    model::DimensionInstance inst;
    inst.schema = {d, {"B", "G", "All"}, {{"B", "G"}, {"G", "All"}}};
    inst.members = {{lower + "0", "B"}, {lower + "1", "B"},
                    {lower + "g0", "G"}, {lower + "g1", "G"}};
    inst.member_edges = {{lower + "0", lower + "g0"}, {lower + "1", lower + "g1"}};
    inst.bottom_order = {lower + "0", lower + "1"};
    graphs.emplace_back(inst);
  }
  auto schema = std::make_shared<const model::CubeSchema>(std::move(graphs));
  std::vector<engine::Fact> facts;
  for (std::string x : {"x0", "x1"}) {
    for (std::string y : {"y0", "y1"}) {
      for (std::string z : {"z0", "z1"}) {
        facts.push_back({{x, y, z}, {random_rational(rng, 3), random_rational(rng, 3)}});
      }
    }
  }
  return engine::init_cube(schema, {"sales", "cost"}, facts);
}

mpq_class random_rational(std::mt19937_64& rng, long bound) {
  std::uniform_int_distribution<long> num(-bound, bound), den(1, bound);
  mpq_class q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

namespace {

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {
      "sales", "Location", "City", "antwerp", "x-y",   "_u1",   "tau2",
      "not",   "And",      "FILL", "2014",    "a b",   "q\"t",  "back\\slash",
      "DICE",  "show",     "é",    "",        "12/5",  "jan01", "-3"};
  return n;
}

algebra::ConditionPtr random_condition(std::mt19937_64& rng, int depth) {
  using engine::Side;
  if (depth > 0 && rng() % 3 != 0) {
    switch (rng() % 3) {
      case 0:
        return algebra::not_(random_condition(rng, depth - 1));
      case 1:
        return algebra::and_(random_condition(rng, depth - 1),
                             random_condition(rng, depth - 1));
      default:
        return algebra::or_(random_condition(rng, depth - 1),
                            random_condition(rng, depth - 1));
    }
  }
  Side side = coin(rng) ? Side::kSubjectLess : Side::kConstLess;
  switch (rng() % 4) {
    case 0:
      return algebra::level_eq(pick(rng, names()), pick(rng, names()),
                               pick(rng, names()));
    case 1:
      return algebra::level_lt(pick(rng, names()), pick(rng, names()),
                               pick(rng, names()), side);
    case 2:
      return algebra::measure_eq(pick(rng, names()), random_rational(rng));
    default:
      return algebra::measure_lt(pick(rng, names()), random_rational(rng), side);
  }
}

std::vector<algebra::Aggregate> random_aggs(std::mt19937_64& rng) {
  static const std::vector<algebra::AggFn> fns = {
      algebra::AggFn::kSum, algebra::AggFn::kAvg,   algebra::AggFn::kMin,
      algebra::AggFn::kMax, algebra::AggFn::kCount, algebra::AggFn::kCountDistinct};
  std::vector<algebra::Aggregate> out;
  for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) {
    out.push_back({pick(rng, names()), pick(rng, fns)});
  }
  return out;
}

}  // namespace

cli::Statement random_statement(std::mt19937_64& rng) {
  namespace stmt = cli::stmt;
  namespace ops = algebra::ops;
  switch (rng() % 12) {
    case 0: {
      stmt::Load l{pick(rng, names()), pick(rng, names()), std::nullopt};
      if (coin(rng)) l.fill = random_rational(rng);
      return l;
    }
    case 1:
      return stmt::Operation{ops::Dice{random_condition(rng, 4)}};
    case 2:
      return stmt::Operation{ops::Slice{pick(rng, names())}};
    case 3:
      return stmt::Operation{ops::SliceDice{pick(rng, names()), pick(rng, names())}};
    case 4:
      return stmt::Operation{
          ops::RollUp{pick(rng, names()), pick(rng, names()), random_aggs(rng)}};
    case 5:
      return stmt::Operation{
          ops::DrillDown{pick(rng, names()), pick(rng, names()), random_aggs(rng)}};
    case 6: {
      stmt::Show s{pick(rng, names()), pick(rng, names()), {}, std::nullopt};
      for (std::size_t i = 0, n = rng() % 3; i < n; ++i) {
        s.fixed.emplace_back(pick(rng, names()), pick(rng, names()));
      }
      if (coin(rng)) s.measure = pick(rng, names());
      return s;
    }
    case 7:
      return stmt::Trace{};
    case 8:
      return stmt::Snapshot{pick(rng, names())};
    case 9:
      return stmt::Restore{pick(rng, names())};
    case 10:
      return stmt::Check{};
    default:
      return stmt::Reset{};
  }
}

}  // namespace fixtures

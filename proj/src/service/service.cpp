#include "cubealg/service/service.hpp"

#include <httplib.h>

#include <iostream>
#include <sstream>

#include "cubealg/cli/statement.hpp"
#include "cubealg/detail/overloaded.hpp"
#include "cubealg/engine/engine.hpp"
#include "cubealg/io/cube_io.hpp"
#include "cubealg/io/snapshot.hpp"
#include "cubealg/io/view.hpp"
#include "cubealg/oracle/oracle.hpp"

namespace cubealg::service {

namespace {

using detail::Overloaded;
using engine::Side;
namespace cond = algebra::cond;
namespace ops = algebra::ops;

// Maps to 404.
class NotFound : public Error {
 public:
  using Error::Error;
};
// Maps to 400.
class BadRequest : public Error {
 public:
  using Error::Error;
};

Response error(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw BadRequest(std::string("malformed JSON body: ") + e.what());
  }
}

const json& member(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

std::string text(const json& obj, const char* key) {
  const json& v = member(obj, key);
  if (!v.is_string()) {
    throw ValidationError(std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

exactnum::Rational rational(const json& v) {
  if (v.is_string()) return exactnum::parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return exactnum::Rational(v.get<long>());
  throw ValidationError("expected a rational as \"p/q\" text or an integer");
}

const char* side_name(Side s) {
  return s == Side::kSubjectLess ? "subjectLess" : "constLess";
}

Side side_of(const json& v) {
  if (!v.contains("side")) return Side::kSubjectLess;
  std::string s = text(v, "side");
  if (s == "subjectLess") return Side::kSubjectLess;
  if (s == "constLess") return Side::kConstLess;
  throw ValidationError("side must be subjectLess or constLess");
}

json aggs_to_json(const std::vector<algebra::Aggregate>& aggs) {
  json out = json::array();
  for (const auto& a : aggs) {
    out.push_back({{"measure", a.measure}, {"fn", algebra::to_string(a.fn)}});
  }
  return out;
}

std::vector<algebra::Aggregate> aggs_from_json(const json& v) {
  const json& list = member(v, "aggs");
  if (!list.is_array()) throw ValidationError("aggs must be an array");
  std::vector<algebra::Aggregate> out;
  for (const auto& a : list) {
    out.push_back({text(a, "measure"), algebra::parse_agg_fn(text(a, "fn"))});
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

json state_summary(const engine::CubeState& state) {
  json measures = json::array();
  for (const auto& m : engine::list_measures(state)) {
    measures.push_back({{"name", m.name},
                        {"provenance", m.provenance},
                        {"protected", m.is_protected},
                        {"labeling", m.is_labeling}});
  }
  return {{"flaggedCellCount", state.flagged_count()},
          {"destroyedCellCount", state.destroyed_count()},
          {"opCount", state.op_log.size()},
          {"measures", measures}};
}

json log_entry(const engine::CubeState& state, std::size_t i) {
  const auto& e = state.op_log[i];
  json steps = json::array();
  for (const auto& s : e.steps) steps.push_back(io::step_to_json(s));
  return {{"index", i + 1},
          {"label", e.label},
          {"firstComputed", e.first_computed},
          {"steps", steps},
          {"trace", lines_of(engine::render_steps(e.steps, state.measure_names,
                                                  e.first_computed))}};
}

std::string random_id(std::mt19937_64& rng) {
  static const char* digits = "0123456789abcdef";
  std::string id;
  std::uint64_t v = rng();
  for (int i = 0; i < 16; ++i, v >>= 4) id += digits[v & 15];
  return id;
}

engine::CubeState replay_prefix(const engine::CubeState& initial,
                                const std::vector<engine::OpLogEntry>& log,
                                std::size_t n) {
  return engine::replay_log(
      initial, std::vector<engine::OpLogEntry>(log.begin(), log.begin() + n));
}

// Runs `fn`, turning library errors into HTTP statuses. `failure` is the
// status for errors in otherwise well-formed requests.
template <class Fn>
Response guarded(int failure, Fn&& fn) {
  try {
    return fn();
  } catch (const NotFound& e) {
    return error(404, e.what());
  } catch (const BadRequest& e) {
    return error(400, e.what());
  } catch (const Error& e) {
    return error(failure, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  }
}

}  // namespace

json condition_to_json(const algebra::CellCondition& c) {
  return std::visit(
      Overloaded{
          [](const cond::LevelEq& a) -> json {
            return {{"kind", "LevelEq"}, {"dim", a.dim}, {"level", a.level},
                    {"member", a.member}};
          },
          [](const cond::LevelLt& a) -> json {
            return {{"kind", "LevelLt"}, {"dim", a.dim}, {"level", a.level},
                    {"member", a.member}, {"side", side_name(a.side)}};
          },
          [](const cond::MeasureEq& a) -> json {
            return {{"kind", "MeasureEq"}, {"measure", a.measure},
                    {"value", exactnum::render_rational(a.value)}};
          },
          [](const cond::MeasureLt& a) -> json {
            return {{"kind", "MeasureLt"}, {"measure", a.measure},
                    {"value", exactnum::render_rational(a.value)},
                    {"side", side_name(a.side)}};
          },
          [](const cond::Not& n) -> json {
            return {{"kind", "Not"}, {"arg", condition_to_json(*n.arg)}};
          },
          [](const cond::And& n) -> json {
            return {{"kind", "And"}, {"lhs", condition_to_json(*n.lhs)},
                    {"rhs", condition_to_json(*n.rhs)}};
          },
          [](const cond::Or& n) -> json {
            return {{"kind", "Or"}, {"lhs", condition_to_json(*n.lhs)},
                    {"rhs", condition_to_json(*n.rhs)}};
          },
      },
      c.node);
}

algebra::ConditionPtr condition_from_json(const json& v) {
  if (v.is_string()) return cli::parse_condition(v.get<std::string>());
  std::string kind = text(v, "kind");
  if (kind == "LevelEq") {
    return algebra::level_eq(text(v, "dim"), text(v, "level"), text(v, "member"));
  }
  if (kind == "LevelLt") {
    return algebra::level_lt(text(v, "dim"), text(v, "level"), text(v, "member"),
                             side_of(v));
  }
  if (kind == "MeasureEq") {
    return algebra::measure_eq(text(v, "measure"), rational(member(v, "value")));
  }
  if (kind == "MeasureLt") {
    return algebra::measure_lt(text(v, "measure"), rational(member(v, "value")),
                               side_of(v));
  }
  if (kind == "Not") return algebra::not_(condition_from_json(member(v, "arg")));
  if (kind == "And") {
    return algebra::and_(condition_from_json(member(v, "lhs")),
                         condition_from_json(member(v, "rhs")));
  }
  if (kind == "Or") {
    return algebra::or_(condition_from_json(member(v, "lhs")),
                        condition_from_json(member(v, "rhs")));
  }
  throw ValidationError("unknown condition kind '" + kind + "'");
}

json op_to_json(const algebra::OlapOp& op) {
  return std::visit(
      Overloaded{
          [](const ops::Dice& o) -> json {
            return {{"type", "DICE"}, {"condition", condition_to_json(*o.condition)}};
          },
          [](const ops::Slice& o) -> json {
            return {{"type", "SLICE"}, {"dim", o.dim}};
          },
          [](const ops::SliceDice& o) -> json {
            return {{"type", "SLICE-DICE"}, {"dim", o.dim}, {"member", o.member}};
          },
          [](const ops::RollUp& o) -> json {
            return {{"type", "ROLL-UP"}, {"dim", o.dim}, {"level", o.level},
                    {"aggs", aggs_to_json(o.aggs)}};
          },
          [](const ops::DrillDown& o) -> json {
            return {{"type", "DRILL-DOWN"}, {"dim", o.dim}, {"level", o.level},
                    {"aggs", aggs_to_json(o.aggs)}};
          },
      },
      op);
}

algebra::OlapOp op_from_json(const json& v) {
  std::string type = text(v, "type");
  if (type == "DICE") return ops::Dice{condition_from_json(member(v, "condition"))};
  if (type == "SLICE") return ops::Slice{text(v, "dim")};
  if (type == "SLICE-DICE") return ops::SliceDice{text(v, "dim"), text(v, "member")};
  if (type == "ROLL-UP") {
    return ops::RollUp{text(v, "dim"), text(v, "level"), aggs_from_json(v)};
  }
  if (type == "DRILL-DOWN") {
    return ops::DrillDown{text(v, "dim"), text(v, "level"), aggs_from_json(v)};
  }
  throw ValidationError("unknown operation type '" + type + "'");
}

json schema_summary(const engine::CubeState& state) {
  const auto& cube = *state.schema;
  json dims = json::array();
  for (std::size_t d = 0; d < cube.dimension_count(); ++d) {
    const auto& g = cube.dimension(d);
    json levels = json::array();
    for (std::size_t l = 0; l < g.level_count(); ++l) {
      json members = json::array();
      for (auto m : g.level_members_induced(l)) members.push_back(g.member_name(m));
      levels.push_back({{"name", g.level_name(l)}, {"members", members}});
    }
    json edges = json::array();
    for (const auto& [from, to] : g.schema().edges) edges.push_back({from, to});
    dims.push_back({{"name", g.name()},
                    {"bottomLevel", g.level_name(g.bottom_level())},
                    {"levels", levels},
                    {"levelEdges", edges}});
  }
  return {{"dimensions", dims},
          {"measures", state.measure_names},
          {"cellCount", state.cell_count()}};
}

Service::Service() : rng_(std::random_device{}()) {}

std::shared_ptr<Service::Slot> Service::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("no session '" + id + "'");
  return it->second;
}

std::string Service::add(std::shared_ptr<Slot> slot) {
  std::lock_guard lock(mu_);
  std::string id;
  do {
    id = random_id(rng_);
  } while (sessions_.count(id));
  sessions_.emplace(id, std::move(slot));
  return id;
}

std::size_t Service::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

Response Service::create_session(const std::string& body) {
  return guarded(400, [&]() -> Response {
    json req = parse_body(body);
    const json& def_doc = member(req, "cubeDef");
    io::CubeDefinition def = def_doc.is_string()
                                 ? io::parse_cube_definition(def_doc.get<std::string>())
                                 : io::definition_from_json(def_doc);
    std::string facts = req.contains("facts") ? text(req, "facts") : std::string();
    exactnum::Rational fill = 0;
    if (req.contains("fill")) fill = rational(req.at("fill"));
    auto schema = io::build_schema(def);
    std::vector<engine::Fact> rows;
    if (!facts.empty()) rows = io::parse_facts(facts, def);
    auto slot = std::make_shared<Slot>();
    slot->initial = engine::init_cube(schema, def.measures, rows, fill);
    slot->current = slot->initial;
    json summary = schema_summary(slot->initial);
    std::string id = add(slot);
    return {201, {{"sessionId", id}, {"schemaSummary", summary}}};
  });
}

Response Service::get_schema(const std::string& id) const {
  return guarded(422, [&]() -> Response {
    auto slot = find(id);
    std::shared_lock lock(slot->mu);
    return {200, schema_summary(slot->current)};
  });
}

Response Service::post_op(const std::string& id, const std::string& body) {
  return guarded(422, [&]() -> Response {
    auto slot = find(id);
    json req = parse_body(body);
    algebra::OlapOp op;
    if (req.contains("statement")) {
      auto statement = cli::parse_statement(text(req, "statement"));
      auto* o = std::get_if<cli::stmt::Operation>(&statement);
      if (!o) throw ValidationError("only OLAP operation statements are accepted");
      op = o->op;
    } else if (req.contains("op")) {
      op = op_from_json(req.at("op"));
    } else {
      throw BadRequest("body needs 'statement' or 'op'");
    }
    std::unique_lock lock(slot->mu);
    engine::CubeState next = algebra::apply(slot->current, op);
    slot->current = std::move(next);
    slot->ops.push_back(op);
    const auto& state = slot->current;
    json out = state_summary(state);
    const auto& last = state.op_log.back();
    out["label"] = last.label;
    out["stepTrace"] = lines_of(
        engine::render_steps(last.steps, state.measure_names, last.first_computed));
    return {200, out};
  });
}

Response Service::get_view(const std::string& id,
                           const std::map<std::string, std::string>& query) const {
  return guarded(422, [&]() -> Response {
    auto slot = find(id);
    auto param = [&](const char* key) -> std::optional<std::string> {
      auto it = query.find(key);
      if (it == query.end() || it->second.empty()) return std::nullopt;
      return it->second;
    };
    auto row = param("row"), col = param("col");
    if (!row || !col) throw BadRequest("view needs 'row' and 'col'");
    std::map<std::string, std::string> fixed;
    if (auto f = param("fixed")) {
      std::istringstream in(*f);
      std::string pair;
      while (std::getline(in, pair, ',')) {
        auto eq = pair.find('=');
        if (eq == std::string::npos) {
          throw BadRequest("fixed entries look like Dim=member");
        }
        fixed[pair.substr(0, eq)] = pair.substr(eq + 1);
      }
    }
    std::optional<int> approx;
    if (auto a = param("approx")) {
      try {
        approx = std::stoi(*a);
      } catch (const std::exception&) {
        throw BadRequest("approx must be a digit count");
      }
      if (*approx < 1 || *approx > 100) throw BadRequest("approx must be 1..100");
    }
    std::shared_lock lock(slot->mu);
    const auto& state = slot->current;
    std::string measure = param("measure").value_or(
        state.computed.empty() ? state.measure_names.at(0) : "tau1");
    return {200, io::view_to_json(
                     io::export_view(state, *row, *col, fixed, measure, approx))};
  });
}

Response Service::get_log(const std::string& id) const {
  return guarded(422, [&]() -> Response {
    auto slot = find(id);
    std::shared_lock lock(slot->mu);
    json entries = json::array();
    for (std::size_t i = 0; i < slot->current.op_log.size(); ++i) {
      json e = log_entry(slot->current, i);
      e["op"] = op_to_json(slot->ops[i]);
      entries.push_back(e);
    }
    return {200, {{"entries", entries}}};
  });
}

Response Service::replay(const std::string& id, const std::string& body) {
  return guarded(422, [&]() -> Response {
    auto slot = find(id);
    json req = parse_body(body);
    const json& k = member(req, "prefixLength");
    if (!k.is_number_integer() || k.get<long>() < 0) {
      throw BadRequest("prefixLength must be a non-negative integer");
    }
    auto fresh = std::make_shared<Slot>();
    {
      std::shared_lock lock(slot->mu);
      auto n = k.get<std::size_t>();
      if (n > slot->current.op_log.size()) {
        throw ValidationError("prefixLength exceeds the log length " +
                              std::to_string(slot->current.op_log.size()));
      }
      fresh->initial = slot->initial;
      fresh->current = replay_prefix(slot->initial, slot->current.op_log, n);
      fresh->ops.assign(slot->ops.begin(), slot->ops.begin() + n);
    }
    json out = state_summary(fresh->current);
    out["sessionId"] = add(fresh);
    return {201, out};
  });
}

Response Service::remove(const std::string& id) {
  std::lock_guard lock(mu_);
  if (!sessions_.erase(id)) return error(404, "no session '" + id + "'");
  return {204, nullptr};
}

Response Service::selfcheck(const std::string& id) const {
  return guarded(422, [&]() -> Response {
    auto slot = find(id);
    std::shared_lock lock(slot->mu);
    const auto& log = slot->current.op_log;
    bool replay_ok = engine::replay_log(slot->initial, log) == slot->current;
    std::string oracle = "nothing to check";
    bool oracle_ok = true;
    if (!log.empty()) {
      auto before = replay_prefix(slot->initial, log, log.size() - 1);
      auto report = oracle::assert_equiv(
          slot->current,
          oracle::oracle_apply(oracle::from_state(before), slot->ops.back()));
      oracle = report.summary();
      oracle_ok = report.ok();
    }
    return {200,
            {{"ok", replay_ok && oracle_ok},
             {"replay", replay_ok},
             {"oracle", oracle}}};
  });
}

void mount(Service& service, httplib::Server& server) {
  server.set_default_headers({
      {"Access-Control-Allow-Origin", "*"},
      {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
      {"Access-Control-Allow-Headers", "Content-Type"},
  });
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), "application/json");
  };
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Post("/sessions", [&, reply](const httplib::Request& req,
                                      httplib::Response& res) {
    reply(res, service.create_session(req.body));
  });
  server.Get(R"(/sessions/([^/]+)/schema)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_schema(req.matches[1]));
             });
  server.Post(R"(/sessions/([^/]+)/ops)",
              [&, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.post_op(req.matches[1], req.body));
              });
  server.Get(R"(/sessions/([^/]+)/view)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               std::map<std::string, std::string> query;
               for (const auto& [k, v] : req.params) query[k] = v;
               reply(res, service.get_view(req.matches[1], query));
             });
  server.Get(R"(/sessions/([^/]+)/log)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_log(req.matches[1]));
             });
  server.Post(R"(/sessions/([^/]+)/replay)",
              [&, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.replay(req.matches[1], req.body));
              });
  server.Get(R"(/sessions/([^/]+)/selfcheck)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.selfcheck(req.matches[1]));
             });
  server.Delete(R"(/sessions/([^/]+))",
                [&, reply](const httplib::Request& req, httplib::Response& res) {
                  reply(res, service.remove(req.matches[1]));
                });
}

bool serve(const std::string& host, int port) {
  Service service;
  httplib::Server server;
  mount(service, server);
  if (!server.bind_to_port(host, port)) return false;
  std::cerr << "listening on " << host << ":" << port << "\n";
  return server.listen_after_bind();
}

}  // namespace cubealg::service

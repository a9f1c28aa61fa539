#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubealg/algebra/operations.hpp"
#include "cubealg/engine/cube_state.hpp"

namespace httplib {
class Server;
}

namespace cubealg::service {

using nlohmann::json;

struct Response {
  int status = 200;
  json body;
};

// Structured operations as the web client sends them:
//   {"type": "DICE", "condition": <condition>}
//   {"type": "SLICE", "dim": "Product"}
//   {"type": "SLICE-DICE", "dim": "Location", "member": "antwerp"}
//   {"type": "ROLL-UP" | "DRILL-DOWN", "dim", "level",
//    "aggs": [{"measure": "sales", "fn": "SUM"}]}
// A condition is either statement text or a tree of
//   {"kind": "LevelEq" | "LevelLt", "dim", "level", "member", "side"?}
//   {"kind": "MeasureEq" | "MeasureLt", "measure", "value": "p/q", "side"?}
//   {"kind": "Not", "arg"}, {"kind": "And" | "Or", "lhs", "rhs"}
// with side "subjectLess" (default) or "constLess".
json condition_to_json(const algebra::CellCondition& c);
algebra::ConditionPtr condition_from_json(const json& v);
json op_to_json(const algebra::OlapOp& op);
algebra::OlapOp op_from_json(const json& v);

json schema_summary(const engine::CubeState& state);

// Session registry behind the HTTP routes. Every handler is callable without
// a server; bodies are raw request text, queries are decoded parameters.
class Service {
 public:
  Service();

  Response create_session(const std::string& body);
  Response get_schema(const std::string& id) const;
  Response post_op(const std::string& id, const std::string& body);
  Response get_view(const std::string& id,
                    const std::map<std::string, std::string>& query) const;
  Response get_log(const std::string& id) const;
  Response replay(const std::string& id, const std::string& body);
  Response remove(const std::string& id);
  Response selfcheck(const std::string& id) const;

  std::size_t session_count() const;

 private:
  struct Slot {
    mutable std::shared_mutex mu;
    engine::CubeState initial;
    engine::CubeState current;
    // One entry per logged operation.
    std::vector<algebra::OlapOp> ops;
  };

  std::shared_ptr<Slot> find(const std::string& id) const;
  std::string add(std::shared_ptr<Slot> slot);

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::mt19937_64 rng_;
};

// Registers the routes, CORS headers included.
void mount(Service& service, httplib::Server& server);

// Blocks until the server stops. Returns false if the port cannot be bound.
bool serve(const std::string& host, int port);

}  // namespace cubealg::service

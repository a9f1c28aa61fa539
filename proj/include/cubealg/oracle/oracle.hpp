#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cubealg/algebra/condition.hpp"
#include "cubealg/algebra/operations.hpp"
#include "cubealg/engine/cube_state.hpp"
#include "cubealg/model/cube_schema.hpp"

// Brute-force semantics of the classical operations, computed by iterating
// over cells and the roll-up relation. Nothing here touches prime labels,
// label allocation or step lists.
namespace cubealg::oracle {

using exactnum::ExactValue;

// Read-only window on the observable parts of an engine state.
class CubeView {
 public:
  explicit CubeView(const engine::CubeState& state) : state_(state) {}

  const model::CubeSchema& schema() const { return *state_.schema; }
  std::size_t cell_count() const { return state_.cell_count(); }
  bool live(std::size_t cell) const { return state_.live(cell); }
  bool flagged(std::size_t cell) const { return state_.flag[cell] != 0; }
  const std::vector<std::string>& measure_names() const {
    return state_.measure_names;
  }
  std::size_t output_count() const { return state_.computed.size(); }
  const ExactValue& protected_value(std::size_t m, std::size_t cell) const {
    return state_.protected_values[m][cell];
  }
  const ExactValue& output_value(std::size_t i, std::size_t cell) const {
    return state_.computed[i].values[cell];
  }

 private:
  const engine::CubeState& state_;
};

// The oracle's own cube: live cells, their protected values, the named
// outputs tau1.. of the last operation and the flag. Destroyed cells hold
// zeros and flag 0.
struct OracleCube {
  std::shared_ptr<const model::CubeSchema> schema;
  std::vector<std::string> measure_names;
  std::vector<std::vector<ExactValue>> protected_values;
  std::vector<std::vector<ExactValue>> outputs;
  std::vector<char> live;
  std::vector<char> flag;

  std::size_t cell_count() const { return live.size(); }
  // "sales", "tau2" or "flag"; throws UnknownName.
  ExactValue value(const std::string& measure, std::size_t cell) const;
};

OracleCube from_view(const CubeView& view,
                     std::shared_ptr<const model::CubeSchema> schema);
OracleCube from_state(const engine::CubeState& state);

// The member of `level` that `bottom` rolls up to, by walking parent edges.
std::optional<std::size_t> oracle_rolls_up(const model::DimensionGraph& g,
                                           std::size_t bottom_position,
                                           std::size_t level);
// Smallest bottom position rolling up to `member`.
std::optional<std::size_t> oracle_representative(const model::DimensionGraph& g,
                                                 std::size_t member);

// Cells selected by `c` among live cells.
std::vector<char> oracle_select(const OracleCube& cube,
                                const algebra::CellCondition& c);

OracleCube oracle_aggregate(const OracleCube& cube, const std::string& dim,
                            const std::string& level,
                            const std::vector<algebra::Aggregate>& aggs);

OracleCube oracle_apply(const OracleCube& cube, const algebra::OlapOp& op);
OracleCube oracle_run(OracleCube cube, const std::vector<algebra::OlapOp>& ops);

struct EquivReport {
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
  std::string summary() const;
};

// Compares live cells, flags on live cells, and every protected and output
// value on flagged cells.
EquivReport assert_equiv(const engine::CubeState& state,
                         const OracleCube& expected);

}  // namespace cubealg::oracle

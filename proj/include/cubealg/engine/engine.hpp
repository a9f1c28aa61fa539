#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cubealg/engine/cube_state.hpp"
#include "cubealg/engine/step.hpp"

namespace cubealg::engine {

// One input fact: a bottom member name per dimension plus one value per
// protected measure.
struct Fact {
  std::vector<std::string> members;
  std::vector<exactnum::Rational> values;
};

// Fresh session state: every cell live and flagged, no computed measures.
// Cells without a fact hold `fill` in every protected measure. Throws
// UnknownName for unknown members and ValidationError for duplicates or
// arity mismatches.
CubeState init_cube(std::shared_ptr<const model::CubeSchema> schema,
                    std::vector<std::string> measure_names,
                    const std::vector<Fact>& facts,
                    const exactnum::Rational& fill = 0);

// Applies one atomic transformation. MakeDestructor records the destructor
// source; MakeFlag finalizes the pending operation. The input is taken by
// value so failed steps never touch the caller's state.
CubeState apply_step(CubeState state, const TransformationStep& step);

// Destroys the cells where the destructor is 0, keeps the protected
// measures and the last `arity` computed measures (renamed tau1..), sets the
// flag and appends the operation to the log. Sources must be 0/1 in every
// live cell.
CubeState finalize_operation(CubeState state, std::size_t arity,
                             const steps::FlagSource& flag,
                             const std::optional<steps::FlagSource>& destructor);

// Folds apply_step over the list. `label` names the operation in the log.
CubeState apply_sequence(CubeState state,
                         const std::vector<TransformationStep>& steps,
                         const std::string& label = {});

// Re-applies logged operations, in order, to an initial state.
CubeState replay_log(CubeState initial, const std::vector<OpLogEntry>& log);

struct MeasureInfo {
  std::string name;
  std::string provenance;
  bool is_protected = false;
  bool is_labeling = false;
};
std::vector<MeasureInfo> list_measures(const CubeState& state);

}  // namespace cubealg::engine

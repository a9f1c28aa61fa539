#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "cubealg/engine/cube_state.hpp"
#include "cubealg/engine/step.hpp"

namespace cubealg::io {

using nlohmann::json;

inline constexpr std::string_view kSnapshotFormat = "cubealg-snapshot";
inline constexpr int kSnapshotVersion = 1;

// Measure refs serialize as "mu<i>", "tau<i>" (both 1-based) or "flag".
json ref_to_json(const engine::MeasureRef& ref);
engine::MeasureRef ref_from_json(const json& v);

// {"op": "Prod", "lhs": "mu1", "rhs": "tau3"} and so on; the op names are
// the step type names.
json step_to_json(const engine::TransformationStep& step);
engine::TransformationStep step_from_json(const json& v);

// Every field of the state, values in canonical radical form. restore
// throws ValidationError on a foreign document or a version mismatch.
json snapshot(const engine::CubeState& state);
engine::CubeState restore(const json& doc);

std::string snapshot_text(const engine::CubeState& state);
engine::CubeState restore_text(std::string_view text);

}  // namespace cubealg::io

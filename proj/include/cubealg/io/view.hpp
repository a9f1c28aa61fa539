#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubealg/engine/cube_state.hpp"

namespace cubealg::io {

enum class CellStatus {
  kActive,     // live and flagged: the value is shown
  kInactive,   // live, flag 0
  kDestroyed,  // blank
};

struct ViewCell {
  CellStatus status = CellStatus::kDestroyed;
  std::optional<std::string> value;
  std::optional<std::string> approx;
};

// Two-dimensional cut of a cube: bottom members of `row_dim` by those of
// `col_dim`, every other dimension pinned to one bottom member.
struct View {
  std::string row_dim, col_dim, measure;
  std::vector<std::pair<std::string, std::string>> fixed;
  std::vector<std::string> rows, cols;
  std::vector<std::vector<ViewCell>> cells;  // [row][col]
};

// Dimensions missing from `fixed` are pinned to their first bottom member.
// `approx_digits` adds a decimal approximation to every shown value.
// Throws UnknownName / ValidationError.
View export_view(const engine::CubeState& state, const std::string& row_dim,
                 const std::string& col_dim,
                 const std::map<std::string, std::string>& fixed,
                 const std::string& measure,
                 std::optional<int> approx_digits = std::nullopt);

nlohmann::json view_to_json(const View& view);

// Plain-text grid. Inactive cells print as "-", destroyed ones stay blank.
std::string render_view(const View& view);

}  // namespace cubealg::io

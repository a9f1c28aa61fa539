#include "cubealg/io/view.hpp"

#include <algorithm>
#include <sstream>

#include "cubealg/error.hpp"

namespace cubealg::io {

namespace {

const char* status_name(CellStatus s) {
  switch (s) {
    case CellStatus::kActive:
      return "active";
    case CellStatus::kInactive:
      return "inactive";
    case CellStatus::kDestroyed:
      return "destroyed";
  }
  return "?";
}

std::vector<std::string> bottom_names(const model::DimensionGraph& g) {
  std::vector<std::string> out;
  for (std::size_t p = 0; p < g.bottom_size(); ++p) {
    out.push_back(g.member_name(g.bottom_member(p)));
  }
  return out;
}

}  // namespace

View export_view(const engine::CubeState& state, const std::string& row_dim,
                 const std::string& col_dim,
                 const std::map<std::string, std::string>& fixed,
                 const std::string& measure, std::optional<int> approx_digits) {
  const auto& cube = *state.schema;
  std::size_t r = cube.dimension_index(row_dim);
  std::size_t c = cube.dimension_index(col_dim);
  if (r == c) throw ValidationError("row and column dimension must differ");
  engine::MeasureRef ref = state.resolve(measure);

  model::CellAddress address(cube.dimension_count(), 0);
  for (const auto& [dim, member] : fixed) {
    std::size_t d = cube.dimension_index(dim);
    if (d == r || d == c) {
      throw ValidationError("dimension " + dim + " is both shown and fixed");
    }
    const auto& g = cube.dimension(d);
    auto pos = g.bottom_position(g.member_id(member));
    if (!pos) {
      throw ValidationError("'" + member + "' is not a bottom member of " + dim);
    }
    address[d] = *pos;
  }

  View view;
  view.row_dim = row_dim;
  view.col_dim = col_dim;
  view.measure = measure;
  for (std::size_t d = 0; d < cube.dimension_count(); ++d) {
    if (d == r || d == c) continue;
    const auto& g = cube.dimension(d);
    view.fixed.emplace_back(g.name(), g.member_name(g.bottom_member(address[d])));
  }
  view.rows = bottom_names(cube.dimension(r));
  view.cols = bottom_names(cube.dimension(c));
  view.cells.assign(view.rows.size(), std::vector<ViewCell>(view.cols.size()));
  for (std::size_t i = 0; i < view.rows.size(); ++i) {
    for (std::size_t j = 0; j < view.cols.size(); ++j) {
      address[r] = i;
      address[c] = j;
      std::size_t cell = cube.cell_index(address);
      ViewCell& out = view.cells[i][j];
      if (!state.live(cell)) {
        out.status = CellStatus::kDestroyed;
      } else if (!state.flag[cell]) {
        out.status = CellStatus::kInactive;
      } else {
        out.status = CellStatus::kActive;
        auto v = state.value(ref, cell);
        out.value = exactnum::to_string(v);
        if (approx_digits) out.approx = exactnum::approximate(v, *approx_digits);
      }
    }
  }
  return view;
}

nlohmann::json view_to_json(const View& view) {
  nlohmann::json fixed = nlohmann::json::object();
  for (const auto& [d, m] : view.fixed) fixed[d] = m;
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& row : view.cells) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : row) {
      nlohmann::json j = {{"status", status_name(cell.status)}};
      if (cell.value) j["value"] = *cell.value;
      if (cell.approx) j["approx"] = *cell.approx;
      cells.push_back(j);
    }
    grid.push_back(cells);
  }
  return {{"rowDim", view.row_dim}, {"colDim", view.col_dim},
          {"measure", view.measure}, {"fixed", fixed},
          {"rows", view.rows},       {"cols", view.cols},
          {"cells", grid}};
}

std::string render_view(const View& view) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> head{view.row_dim + " \\ " + view.col_dim};
  head.insert(head.end(), view.cols.begin(), view.cols.end());
  table.push_back(head);
  for (std::size_t i = 0; i < view.rows.size(); ++i) {
    std::vector<std::string> line{view.rows[i]};
    for (const auto& cell : view.cells[i]) {
      switch (cell.status) {
        case CellStatus::kActive:
          line.push_back(*cell.value + (cell.approx ? " ~" + *cell.approx : ""));
          break;
        case CellStatus::kInactive:
          line.push_back("-");
          break;
        case CellStatus::kDestroyed:
          line.emplace_back();
          break;
      }
    }
    table.push_back(line);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : table) {
    for (std::size_t j = 0; j < line.size(); ++j) {
      width[j] = std::max(width[j], line[j].size());
    }
  }
  std::ostringstream out;
  out << view.measure;
  for (const auto& [d, m] : view.fixed) out << "  " << d << "=" << m;
  out << "\n";
  for (const auto& line : table) {
    std::string text;
    for (std::size_t j = 0; j < line.size(); ++j) {
      std::string cell = line[j];
      if (j + 1 < line.size()) cell.resize(width[j], ' ');
      text += (j ? "  " : "") + cell;
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << "\n";
  }
  return out.str();
}

}  // namespace cubealg::io

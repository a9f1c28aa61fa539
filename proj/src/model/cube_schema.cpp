#include "cubealg/model/cube_schema.hpp"

#include <set>

#include "cubealg/error.hpp"

namespace cubealg::model {

CubeSchema::CubeSchema(std::vector<DimensionGraph> graphs)
    : graphs_(std::move(graphs)) {
  if (graphs_.empty()) {
    throw ValidationError("a cube needs at least one dimension");
  }
  std::set<std::string> names;
  for (const auto& g : graphs_) {
    if (!names.insert(g.name()).second) {
      throw ValidationError("duplicate dimension '" + g.name() + "'");
    }
    auto report = validate_graph(g);
    if (!report.ok()) {
      throw ValidationError("dimension " + g.name() + ": " + report.summary());
    }
    for (const auto& w : report.warnings) {
      warnings_.push_back(g.name() + ": " + w);
    }
    matrix_.dims.push_back(g.name());
  }
  extents_.resize(graphs_.size());
  strides_.resize(graphs_.size());
  for (std::size_t i = graphs_.size(); i-- > 0;) {
    extents_[i] = graphs_[i].bottom_size();
    strides_[i] = cell_count_;
    cell_count_ *= extents_[i];
  }
}

std::size_t CubeSchema::dimension_index(std::string_view name) const {
  for (std::size_t i = 0; i < matrix_.dims.size(); ++i) {
    if (matrix_.dims[i] == name) return i;
  }
  throw UnknownName("dimension", std::string(name));
}

CellAddress CubeSchema::address(std::size_t cell) const {
  CellAddress out(graphs_.size());
  for (std::size_t i = 0; i < graphs_.size(); ++i) out[i] = coordinate(cell, i);
  return out;
}

std::size_t CubeSchema::cell_index(const CellAddress& address) const {
  if (address.size() != graphs_.size()) {
    throw ValidationError("cell address has wrong arity");
  }
  std::size_t cell = 0;
  for (std::size_t i = 0; i < graphs_.size(); ++i) {
    if (address[i] >= extents_[i]) {
      throw ValidationError("cell coordinate out of range");
    }
    cell += address[i] * strides_[i];
  }
  return cell;
}

std::string CubeSchema::describe(std::size_t cell) const {
  std::string out = "(";
  for (std::size_t i = 0; i < graphs_.size(); ++i) {
    if (i) out += ", ";
    const auto& g = graphs_[i];
    out += g.member_name(g.bottom_member(coordinate(cell, i)));
  }
  return out + ")";
}

}  // namespace cubealg::model

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cubealg/model/dimension.hpp"

namespace cubealg::model {

struct MatrixSchema {
  std::vector<std::string> dims;

  bool operator==(const MatrixSchema&) const = default;
};

// One bottom position per dimension.
using CellAddress = std::vector<std::size_t>;

// Matrix schema plus one validated dimension graph per dimension. Cells are
// laid out row-major over the bottom orders.
class CubeSchema {
 public:
  // Throws ValidationError if a graph fails validate_graph or the dimension
  // names are not unique.
  explicit CubeSchema(std::vector<DimensionGraph> graphs);

  const MatrixSchema& matrix() const { return matrix_; }
  std::size_t dimension_count() const { return graphs_.size(); }
  const DimensionGraph& dimension(std::size_t i) const { return graphs_[i]; }
  std::size_t dimension_index(std::string_view name) const;  // UnknownName
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::size_t cell_count() const { return cell_count_; }
  std::size_t extent(std::size_t dim) const { return extents_[dim]; }
  std::size_t stride(std::size_t dim) const { return strides_[dim]; }
  std::size_t coordinate(std::size_t cell, std::size_t dim) const {
    return cell / strides_[dim] % extents_[dim];
  }
  CellAddress address(std::size_t cell) const;
  std::size_t cell_index(const CellAddress& address) const;
  // Human-readable "(lego, antwerp, jan01)".
  std::string describe(std::size_t cell) const;

 private:
  MatrixSchema matrix_;
  std::vector<DimensionGraph> graphs_;
  std::vector<std::size_t> extents_;
  std::vector<std::size_t> strides_;
  std::size_t cell_count_ = 1;
  std::vector<std::string> warnings_;
};

}  // namespace cubealg::model

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cubealg/engine/step.hpp"
#include "cubealg/exactnum/exact_value.hpp"
#include "cubealg/exactnum/labels.hpp"
#include "cubealg/model/cube_schema.hpp"

namespace cubealg::engine {

using exactnum::ExactValue;

struct ComputedMeasure {
  std::vector<ExactValue> values;  // one per cell; zero in destroyed cells
  std::optional<exactnum::LabelingMeta> labeling;
  // Rendered step that produced the measure.
  std::string provenance;

  bool operator==(const ComputedMeasure&) const = default;
};

struct OpLogEntry {
  std::string label;
  // Number of computed measures when the operation started.
  std::size_t first_computed = 0;
  std::vector<TransformationStep> steps;

  bool operator==(const OpLogEntry&) const = default;
};

// A data cube in the middle of an OLAP session.
//
// All per-cell vectors cover the full matrix in row-major order; destroyed
// cells keep their slot with zero values and a zero flag. Protected
// measures never change in a live cell. Steps of the operation in progress
// accumulate in `pending_steps` until a MakeFlag finalizes them.
struct CubeState {
  std::shared_ptr<const model::CubeSchema> schema;
  std::vector<std::string> measure_names;
  std::vector<std::vector<ExactValue>> protected_values;  // [measure][cell]
  std::vector<ComputedMeasure> computed;
  std::vector<std::uint8_t> flag;
  std::vector<std::uint8_t> destroyed;
  exactnum::LabelAllocator allocator;
  std::vector<OpLogEntry> op_log;

  std::string pending_label;
  std::size_t pending_first_computed = 0;
  std::vector<TransformationStep> pending_steps;
  std::optional<steps::FlagSource> pending_destructor;

  std::size_t cell_count() const { return flag.size(); }
  bool live(std::size_t cell) const { return destroyed[cell] == 0; }
  std::size_t live_count() const;
  std::size_t flagged_count() const;
  std::size_t destroyed_count() const;

  // Value of a measure in a live cell; flag reads as 0/1.
  ExactValue value(const MeasureRef& ref, std::size_t cell) const;
  // Name as used by statements: protected name, "tau<N>", or "flag".
  std::string measure_name(const MeasureRef& ref) const;
  // Resolves a statement-level name; throws UnknownName.
  MeasureRef resolve(const std::string& name) const;

  // Schemas compare by content of their dimension instances.
  bool operator==(const CubeState& other) const;
};

}  // namespace cubealg::engine

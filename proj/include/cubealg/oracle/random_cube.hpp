#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cubealg/algebra/operations.hpp"
#include "cubealg/engine/cube_state.hpp"

namespace cubealg::oracle {

struct RandomCubeOptions {
  std::size_t max_dims = 3;
  std::size_t max_bottom = 4;
  std::size_t measures = 1;
  // Probability that a chain member is left without a parent.
  double missing_parent = 0.1;
  // Pipeline length range for run_differential.
  std::size_t min_ops = 1;
  std::size_t max_ops = 3;
};

// A sound random dimension: a chain Bottom -> L1 -> .. -> All of depth up to
// 3, or the diamond Bottom -> A, Bottom -> B, A -> C, B -> C, C -> All.
model::DimensionInstance random_dimension(std::mt19937_64& rng,
                                          const std::string& name,
                                          const RandomCubeOptions& opts = {});

// Fresh cube with random rationals num/den, num in [-100, 100], den in
// [1, 100], in every cell.
engine::CubeState random_cube(std::mt19937_64& rng,
                              const RandomCubeOptions& opts = {});

algebra::ConditionPtr random_condition(std::mt19937_64& rng,
                                       const engine::CubeState& state,
                                       int depth = 2);

algebra::OlapOp random_op(std::mt19937_64& rng, const engine::CubeState& state);

struct DifferentialReport {
  std::size_t trials = 0;
  std::size_t operations = 0;
  // Operations both sides rejected with an error.
  std::size_t rejected = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Random cubes, each run through a pipeline of min_ops to max_ops random
// operations, compared with the oracle after every operation.
DifferentialReport run_differential(std::uint64_t seed, std::size_t trials,
                                    const RandomCubeOptions& opts = {});

}  // namespace cubealg::oracle

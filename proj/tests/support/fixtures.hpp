#pragma once

#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cubealg/cli/statement.hpp"
#include "cubealg/engine/cube_state.hpp"
#include "cubealg/engine/step.hpp"
#include "cubealg/exactnum/exact_value.hpp"
#include "cubealg/model/dimension.hpp"

namespace cubealg::exactnum {
// Readable values in test failure messages.
inline void PrintTo(const ExactValue& v, std::ostream* os) { *os << to_string(v); }
}  // namespace cubealg::exactnum

namespace fixtures {

using cubealg::engine::CubeState;

std::string data_path(const std::string& name);
std::string read(const std::string& name);

// Product x Location x Time, 4 x 4 x 31, from data/.
CubeState running_cube();
cubealg::model::DimensionInstance running_dimension(const std::string& name);
cubealg::model::DimensionInstance unsound_time();

// 10 products x the four cities x 100 days, sales 1 everywhere.
CubeState cities_cube();

// Sales of the running fact table, read without the library:
// (product, city, day) -> exact value.
struct Row {
  std::string product, city, day;
  mpq_class sales;
};
std::vector<Row> running_rows();
mpq_class decimal(const std::string& text);

// city -> country, city -> region of the running example, written out.
const std::map<std::string, std::string>& country_of();
const std::map<std::string, std::string>& region_of();

// Literal step lists from the worked examples.
std::vector<cubealg::engine::TransformationStep> sales_above_steps();
std::vector<cubealg::engine::TransformationStep> two_cities_steps();
std::vector<cubealg::engine::TransformationStep> cities_per_country_steps();

// 2 x 2 x 2 cube with one level above the bottom in each dimension and two
// measures.
CubeState tiny_cube(std::mt19937_64& rng);

// Random statements for the parse/render law.
cubealg::cli::Statement random_statement(std::mt19937_64& rng);
mpq_class random_rational(std::mt19937_64& rng, long bound = 1000);

}  // namespace fixtures

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cubealg/engine/engine.hpp"
#include "cubealg/model/cube_schema.hpp"

namespace cubealg::io {

using nlohmann::json;

// Parsed cube definition document:
//
//   { "dimensions": [ { "name", "levels": [{"name"}], "levelEdges": [[f, t]],
//                       "members": [{"name", "level"}],
//                       "memberEdges": [[child, parent]],
//                       "bottomOrder": [..] } ],
//     "measures": [ {"name"} ] }
struct CubeDefinition {
  std::vector<model::DimensionInstance> dimensions;
  std::vector<std::string> measures;

  bool operator==(const CubeDefinition&) const = default;
};

CubeDefinition definition_from_json(const json& doc);
json definition_to_json(const CubeDefinition& def);
// Throws ValidationError on malformed JSON or missing fields.
CubeDefinition parse_cube_definition(std::string_view text);

// Validates every graph; throws ValidationError listing the problems.
std::shared_ptr<const model::CubeSchema> build_schema(const CubeDefinition& def);

// Delimiter-separated facts with a mandatory header naming every dimension
// and measure once, in any order. Tab if the header has one, comma
// otherwise. Blank lines are skipped.
std::vector<engine::Fact> parse_facts(std::string_view text,
                                      const CubeDefinition& def);

engine::CubeState load_cube(std::string_view definition_text,
                            std::string_view facts_text,
                            const exactnum::Rational& fill = 0);
engine::CubeState load_cube_files(const std::string& definition_path,
                                  const std::string& facts_path,
                                  const exactnum::Rational& fill = 0);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace cubealg::io

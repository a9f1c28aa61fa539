#include "cubealg/io/cube_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "cubealg/error.hpp"

namespace cubealg::io {

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw ValidationError(where + ": expected a string");
  return v.get<std::string>();
}

std::pair<std::string, std::string> pair_of(const json& v,
                                            const std::string& where) {
  if (!v.is_array() || v.size() != 2) {
    throw ValidationError(where + ": expected a pair");
  }
  return {text(v[0], where), text(v[1], where)};
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

}  // namespace

CubeDefinition definition_from_json(const json& doc) {
  CubeDefinition def;
  const json& dims = field(doc, "dimensions", "cube definition");
  if (!dims.is_array()) throw ValidationError("dimensions must be an array");
  for (const auto& d : dims) {
    model::DimensionInstance inst;
    inst.schema.name = text(field(d, "name", "dimension"), "dimension name");
    std::string where = "dimension " + inst.schema.name;
    for (const auto& l : field(d, "levels", where)) {
      inst.schema.levels.push_back(text(field(l, "name", where), where));
    }
    if (d.contains("levelEdges")) {
      for (const auto& e : d.at("levelEdges")) {
        inst.schema.edges.push_back(pair_of(e, where + " levelEdges"));
      }
    }
    if (d.contains("members")) {
      for (const auto& m : d.at("members")) {
        inst.members.emplace_back(text(field(m, "name", where), where),
                                  text(field(m, "level", where), where));
      }
    }
    if (d.contains("memberEdges")) {
      for (const auto& e : d.at("memberEdges")) {
        inst.member_edges.push_back(pair_of(e, where + " memberEdges"));
      }
    }
    for (const auto& b : field(d, "bottomOrder", where)) {
      inst.bottom_order.push_back(text(b, where + " bottomOrder"));
    }
    def.dimensions.push_back(std::move(inst));
  }
  for (const auto& m : field(doc, "measures", "cube definition")) {
    def.measures.push_back(text(field(m, "name", "measure"), "measure name"));
  }
  return def;
}

json definition_to_json(const CubeDefinition& def) {
  json dims = json::array();
  for (const auto& inst : def.dimensions) {
    json levels = json::array();
    for (const auto& l : inst.schema.levels) levels.push_back({{"name", l}});
    json level_edges = json::array();
    for (const auto& [f, t] : inst.schema.edges) level_edges.push_back({f, t});
    json members = json::array();
    for (const auto& [n, l] : inst.members) {
      members.push_back({{"name", n}, {"level", l}});
    }
    json member_edges = json::array();
    for (const auto& [c, p] : inst.member_edges) member_edges.push_back({c, p});
    dims.push_back({{"name", inst.schema.name},
                    {"levels", levels},
                    {"levelEdges", level_edges},
                    {"members", members},
                    {"memberEdges", member_edges},
                    {"bottomOrder", inst.bottom_order}});
  }
  json measures = json::array();
  for (const auto& m : def.measures) measures.push_back({{"name", m}});
  return {{"dimensions", dims}, {"measures", measures}};
}

CubeDefinition parse_cube_definition(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed cube definition: ") + e.what());
  }
  try {
    return definition_from_json(doc);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed cube definition: ") + e.what());
  }
}

std::shared_ptr<const model::CubeSchema> build_schema(const CubeDefinition& def) {
  std::vector<model::DimensionGraph> graphs;
  for (const auto& inst : def.dimensions) graphs.emplace_back(inst);
  return std::make_shared<const model::CubeSchema>(std::move(graphs));
}

std::vector<engine::Fact> parse_facts(std::string_view input,
                                      const CubeDefinition& def) {
  std::istringstream in{std::string(input)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  char delim = ',';
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    delim = line.find('\t') != std::string::npos ? '\t' : ',';
    header = split(line, delim);
  }
  if (header.empty()) throw ValidationError("fact table has no header row");

  // Column of each dimension, then of each measure.
  std::vector<std::size_t> dim_col(def.dimensions.size(), header.size());
  std::vector<std::size_t> measure_col(def.measures.size(), header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    bool known = false;
    for (std::size_t i = 0; i < def.dimensions.size(); ++i) {
      if (def.dimensions[i].schema.name != header[c]) continue;
      if (dim_col[i] != header.size()) {
        throw ValidationError("fact header repeats column '" + header[c] + "'");
      }
      dim_col[i] = c;
      known = true;
    }
    for (std::size_t i = 0; i < def.measures.size(); ++i) {
      if (def.measures[i] != header[c]) continue;
      if (measure_col[i] != header.size()) {
        throw ValidationError("fact header repeats column '" + header[c] + "'");
      }
      measure_col[i] = c;
      known = true;
    }
    if (!known) throw UnknownName("fact column", header[c]);
  }
  for (std::size_t i = 0; i < dim_col.size(); ++i) {
    if (dim_col[i] == header.size()) {
      throw ValidationError("fact header lacks dimension '" +
                            def.dimensions[i].schema.name + "'");
    }
  }
  for (std::size_t i = 0; i < measure_col.size(); ++i) {
    if (measure_col[i] == header.size()) {
      throw ValidationError("fact header lacks measure '" + def.measures[i] +
                            "'");
    }
  }

  std::vector<engine::Fact> facts;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line, delim);
    if (cells.size() != header.size()) {
      throw ValidationError("fact line " + std::to_string(line_no) + ": " +
                            std::to_string(cells.size()) + " fields, expected " +
                            std::to_string(header.size()));
    }
    engine::Fact f;
    for (auto c : dim_col) f.members.push_back(cells[c]);
    for (auto c : measure_col) {
      try {
        f.values.push_back(exactnum::parse_rational(cells[c]));
      } catch (const ValidationError& e) {
        throw ValidationError("fact line " + std::to_string(line_no) + ": " +
                              e.what());
      }
    }
    facts.push_back(std::move(f));
  }
  return facts;
}

engine::CubeState load_cube(std::string_view definition_text,
                            std::string_view facts_text,
                            const exactnum::Rational& fill) {
  CubeDefinition def = parse_cube_definition(definition_text);
  auto schema = build_schema(def);
  auto facts = parse_facts(facts_text, def);
  return engine::init_cube(schema, def.measures, facts, fill);
}

engine::CubeState load_cube_files(const std::string& definition_path,
                                  const std::string& facts_path,
                                  const exactnum::Rational& fill) {
  return load_cube(read_file(definition_path), read_file(facts_path), fill);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("cannot write '" + path + "'");
}

}  // namespace cubealg::io

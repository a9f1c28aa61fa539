#include "cubealg/io/snapshot.hpp"

#include <regex>

#include "cubealg/detail/overloaded.hpp"
#include "cubealg/error.hpp"
#include "cubealg/io/cube_io.hpp"

namespace cubealg::io {

using detail::Overloaded;
using engine::MeasureRef;
using engine::TransformationStep;
using exactnum::ExactValue;
namespace steps = engine::steps;

json ref_to_json(const MeasureRef& ref) {
  switch (ref.kind) {
    case MeasureRef::Kind::kProtected:
      return "mu" + std::to_string(ref.index + 1);
    case MeasureRef::Kind::kComputed:
      return "tau" + std::to_string(ref.index + 1);
    case MeasureRef::Kind::kFlag:
      return "flag";
  }
  return nullptr;
}

MeasureRef ref_from_json(const json& v) {
  static const std::regex re("(mu|tau)([1-9][0-9]*)");
  std::string s = v.is_string() ? v.get<std::string>() : std::string();
  if (s == "flag") return MeasureRef::flag();
  std::smatch m;
  if (!std::regex_match(s, m, re)) {
    throw ValidationError("malformed measure reference " + v.dump());
  }
  std::size_t index = std::stoul(m[2]) - 1;
  return m[1] == "mu" ? MeasureRef::protected_measure(index)
                      : MeasureRef::computed(index);
}

namespace {

const char* side_name(engine::Side s) {
  return s == engine::Side::kSubjectLess ? "subjectLess" : "constLess";
}

engine::Side side_from(const json& v) {
  std::string s = v.get<std::string>();
  if (s == "subjectLess") return engine::Side::kSubjectLess;
  if (s == "constLess") return engine::Side::kConstLess;
  throw ValidationError("malformed side '" + s + "'");
}

json optional_ref(const std::optional<MeasureRef>& r) {
  return r ? ref_to_json(*r) : json(nullptr);
}

std::optional<MeasureRef> optional_ref_from(const json& v, const char* key) {
  if (!v.contains(key) || v.at(key).is_null()) return std::nullopt;
  return ref_from_json(v.at(key));
}

json source_to_json(const steps::FlagSource& s) {
  return std::visit(
      Overloaded{
          [](const MeasureRef& r) { return ref_to_json(r); },
          [](const steps::SelLevel& t) {
            return json{{"op", "SelLevel"}, {"dim", t.dim}, {"level", t.level}};
          },
          [](const steps::SelConst& t) {
            return json{{"op", "SelConst"},
                        {"dim", t.dim},
                        {"level", t.level},
                        {"member", t.member}};
          },
      },
      s);
}

steps::FlagSource source_from_json(const json& v) {
  if (v.is_string()) return ref_from_json(v);
  std::string op = v.at("op").get<std::string>();
  if (op == "SelLevel") {
    return steps::SelLevel{v.at("dim").get<std::string>(),
                           v.at("level").get<std::string>()};
  }
  if (op == "SelConst") {
    return steps::SelConst{v.at("dim").get<std::string>(),
                           v.at("level").get<std::string>(),
                           v.at("member").get<std::string>()};
  }
  throw ValidationError("malformed flag source " + v.dump());
}

json binary(const char* op, const MeasureRef& a, const MeasureRef& b) {
  return {{"op", op}, {"lhs", ref_to_json(a)}, {"rhs", ref_to_json(b)}};
}

json grouped(const char* op, const MeasureRef& arg,
             const std::optional<MeasureRef>& group_by) {
  return {{"op", op}, {"arg", ref_to_json(arg)}, {"groupBy", optional_ref(group_by)}};
}

json level_atom(const char* op, const std::string& dim, const std::string& level,
                const std::string& member) {
  return {{"op", op}, {"dim", dim}, {"level", level}, {"member", member}};
}

std::string str(const json& v, const char* key) {
  return v.at(key).get<std::string>();
}

json labeling_to_json(const exactnum::LabelingMeta& meta) {
  json comps = json::array();
  for (const auto& c : meta.components) {
    comps.push_back({{"dim", c.dim}, {"level", c.level}, {"labels", c.labels}});
  }
  return {{"components", comps}, {"primes", meta.primes}};
}

exactnum::LabelingMeta labeling_from_json(const json& v) {
  exactnum::LabelingMeta meta;
  for (const auto& c : v.at("components")) {
    meta.components.push_back({str(c, "dim"), str(c, "level"),
                               c.at("labels").get<std::vector<std::uint64_t>>()});
  }
  meta.primes = v.at("primes").get<std::vector<std::uint64_t>>();
  return meta;
}

json values_to_json(const std::vector<ExactValue>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(exactnum::to_string(v));
  return out;
}

std::vector<ExactValue> values_from_json(const json& v) {
  std::vector<ExactValue> out;
  for (const auto& s : v) out.push_back(exactnum::parse_exact(s.get<std::string>()));
  return out;
}

json steps_to_json(const std::vector<TransformationStep>& list) {
  json out = json::array();
  for (const auto& s : list) out.push_back(step_to_json(s));
  return out;
}

std::vector<TransformationStep> steps_from_json(const json& v) {
  std::vector<TransformationStep> out;
  for (const auto& s : v) out.push_back(step_from_json(s));
  return out;
}

}  // namespace

json step_to_json(const TransformationStep& step) {
  return std::visit(
      Overloaded{
          [](const steps::Const& s) {
            return json{{"op", "Const"},
                        {"value", exactnum::render_rational(s.value)}};
          },
          [](const steps::Sum& s) { return binary("Sum", s.lhs, s.rhs); },
          [](const steps::Prod& s) { return binary("Prod", s.lhs, s.rhs); },
          [](const steps::Quot& s) { return binary("Quot", s.lhs, s.rhs); },
          [](const steps::EqMeasure& s) {
            return binary("EqMeasure", s.lhs, s.rhs);
          },
          [](const steps::LtMeasure& s) {
            return binary("LtMeasure", s.lhs, s.rhs);
          },
          [](const steps::EqLevel& s) {
            return level_atom("EqLevel", s.dim, s.level, s.member);
          },
          [](const steps::LtLevel& s) {
            json j = level_atom("LtLevel", s.dim, s.level, s.member);
            j["side"] = side_name(s.side);
            return j;
          },
          [](const steps::SelConst& s) {
            return level_atom("SelConst", s.dim, s.level, s.member);
          },
          [](const steps::SelLevel& s) {
            return json{{"op", "SelLevel"}, {"dim", s.dim}, {"level", s.level}};
          },
          [](const steps::CountDistinct& s) {
            return grouped("CountDistinct", s.arg, s.group_by);
          },
          [](const steps::SumD& s) {
            return json{{"op", "SumD"}, {"arg", ref_to_json(s.arg)}};
          },
          [](const steps::Min& s) { return grouped("Min", s.arg, s.group_by); },
          [](const steps::Max& s) { return grouped("Max", s.arg, s.group_by); },
          [](const steps::Gamma& s) {
            return json{{"op", "Gamma"}, {"dim", s.dim}, {"level", s.level}};
          },
          [](const steps::Project& s) {
            return json{{"op", "Project"},
                        {"value", ref_to_json(s.value)},
                        {"labels", ref_to_json(s.labels)}};
          },
          [](const steps::MakeDestructor& s) {
            return json{{"op", "MakeDestructor"},
                        {"source", source_to_json(s.source)}};
          },
          [](const steps::MakeFlag& s) {
            return json{{"op", "MakeFlag"},
                        {"arity", s.arity},
                        {"source", source_to_json(s.source)}};
          },
      },
      step);
}

TransformationStep step_from_json(const json& v) {
  try {
    std::string op = str(v, "op");
    auto lhs = [&] { return ref_from_json(v.at("lhs")); };
    auto rhs = [&] { return ref_from_json(v.at("rhs")); };
    auto arg = [&] { return ref_from_json(v.at("arg")); };
    if (op == "Const") {
      return steps::Const{exactnum::parse_rational(str(v, "value"))};
    }
    if (op == "Sum") return steps::Sum{lhs(), rhs()};
    if (op == "Prod") return steps::Prod{lhs(), rhs()};
    if (op == "Quot") return steps::Quot{lhs(), rhs()};
    if (op == "EqMeasure") return steps::EqMeasure{lhs(), rhs()};
    if (op == "LtMeasure") return steps::LtMeasure{lhs(), rhs()};
    if (op == "EqLevel") {
      return steps::EqLevel{str(v, "dim"), str(v, "level"), str(v, "member")};
    }
    if (op == "LtLevel") {
      return steps::LtLevel{str(v, "dim"), str(v, "level"), str(v, "member"),
                            side_from(v.at("side"))};
    }
    if (op == "SelConst") {
      return steps::SelConst{str(v, "dim"), str(v, "level"), str(v, "member")};
    }
    if (op == "SelLevel") return steps::SelLevel{str(v, "dim"), str(v, "level")};
    if (op == "CountDistinct") {
      return steps::CountDistinct{arg(), optional_ref_from(v, "groupBy")};
    }
    if (op == "SumD") return steps::SumD{arg()};
    if (op == "Min") return steps::Min{arg(), optional_ref_from(v, "groupBy")};
    if (op == "Max") return steps::Max{arg(), optional_ref_from(v, "groupBy")};
    if (op == "Gamma") return steps::Gamma{str(v, "dim"), str(v, "level")};
    if (op == "Project") {
      return steps::Project{ref_from_json(v.at("value")),
                            ref_from_json(v.at("labels"))};
    }
    if (op == "MakeDestructor") {
      return steps::MakeDestructor{source_from_json(v.at("source"))};
    }
    if (op == "MakeFlag") {
      return steps::MakeFlag{v.at("arity").get<std::size_t>(),
                             source_from_json(v.at("source"))};
    }
    throw UnknownName("step", op);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed step: ") + e.what());
  }
}

json snapshot(const engine::CubeState& state) {
  CubeDefinition def;
  for (std::size_t i = 0; i < state.schema->dimension_count(); ++i) {
    def.dimensions.push_back(state.schema->dimension(i).instance());
  }
  def.measures = state.measure_names;

  json protected_values = json::array();
  for (const auto& col : state.protected_values) {
    protected_values.push_back(values_to_json(col));
  }
  json computed = json::array();
  for (const auto& m : state.computed) {
    computed.push_back(
        {{"values", values_to_json(m.values)},
         {"labeling", m.labeling ? labeling_to_json(*m.labeling) : json(nullptr)},
         {"provenance", m.provenance}});
  }
  json log = json::array();
  for (const auto& e : state.op_log) {
    log.push_back({{"label", e.label},
                   {"firstComputed", e.first_computed},
                   {"steps", steps_to_json(e.steps)}});
  }
  return {
      {"format", kSnapshotFormat},
      {"version", kSnapshotVersion},
      {"cube", definition_to_json(def)},
      {"protected", protected_values},
      {"computed", computed},
      {"flag", state.flag},
      {"destroyed", state.destroyed},
      {"allocator",
       {{"nextPrimeIndex", state.allocator.next_prime_index()},
        {"firstLabelIssued", state.allocator.first_label_issued()}}},
      {"opLog", log},
      {"pending",
       {{"label", state.pending_label},
        {"firstComputed", state.pending_first_computed},
        {"steps", steps_to_json(state.pending_steps)},
        {"destructor", state.pending_destructor
                           ? source_to_json(*state.pending_destructor)
                           : json(nullptr)}}},
  };
}

engine::CubeState restore(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != kSnapshotFormat) {
    throw ValidationError("not a cube snapshot");
  }
  if (doc.value("version", 0) != kSnapshotVersion) {
    throw ValidationError("unsupported snapshot version " +
                          doc.at("version").dump());
  }
  try {
    engine::CubeState s;
    CubeDefinition def = definition_from_json(doc.at("cube"));
    s.schema = build_schema(def);
    s.measure_names = def.measures;
    for (const auto& col : doc.at("protected")) {
      s.protected_values.push_back(values_from_json(col));
    }
    for (const auto& m : doc.at("computed")) {
      engine::ComputedMeasure cm;
      cm.values = values_from_json(m.at("values"));
      if (!m.at("labeling").is_null()) {
        cm.labeling = labeling_from_json(m.at("labeling"));
      }
      cm.provenance = str(m, "provenance");
      s.computed.push_back(std::move(cm));
    }
    s.flag = doc.at("flag").get<std::vector<std::uint8_t>>();
    s.destroyed = doc.at("destroyed").get<std::vector<std::uint8_t>>();
    const json& alloc = doc.at("allocator");
    s.allocator = exactnum::LabelAllocator(
        alloc.at("nextPrimeIndex").get<std::uint64_t>(),
        alloc.at("firstLabelIssued").get<bool>());
    for (const auto& e : doc.at("opLog")) {
      s.op_log.push_back({str(e, "label"), e.at("firstComputed").get<std::size_t>(),
                          steps_from_json(e.at("steps"))});
    }
    const json& pending = doc.at("pending");
    s.pending_label = str(pending, "label");
    s.pending_first_computed = pending.at("firstComputed").get<std::size_t>();
    s.pending_steps = steps_from_json(pending.at("steps"));
    if (!pending.at("destructor").is_null()) {
      s.pending_destructor = source_from_json(pending.at("destructor"));
    }

    std::size_t cells = s.schema->cell_count();
    bool shape_ok = s.flag.size() == cells && s.destroyed.size() == cells &&
                    s.protected_values.size() == s.measure_names.size();
    for (const auto& col : s.protected_values) shape_ok &= col.size() == cells;
    for (const auto& m : s.computed) shape_ok &= m.values.size() == cells;
    if (!shape_ok) throw ValidationError("snapshot shape does not match its cube");
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed snapshot: ") + e.what());
  }
}

std::string snapshot_text(const engine::CubeState& state) {
  return snapshot(state).dump(1);
}

engine::CubeState restore_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed snapshot: ") + e.what());
  }
  return restore(doc);
}

}  // namespace cubealg::io

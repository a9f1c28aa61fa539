#include "cubealg/engine/step.hpp"

#include <sstream>

#include "cubealg/detail/overloaded.hpp"

namespace cubealg::engine {

namespace {

using detail::Overloaded;

std::string tau(std::size_t index) { return "τ" + std::to_string(index + 1); }

std::string ref(const MeasureRef& r, const std::vector<std::string>& names) {
  switch (r.kind) {
    case MeasureRef::Kind::kProtected:
      return r.index < names.size() ? names[r.index]
                                    : "μ" + std::to_string(r.index + 1);
    case MeasureRef::Kind::kComputed:
      return tau(r.index);
    case MeasureRef::Kind::kFlag:
      return "φ";
  }
  return "?";
}

std::string grouped(const char* fn, const MeasureRef& arg,
                    const std::optional<MeasureRef>& group_by,
                    const std::vector<std::string>& names) {
  std::string out = fn;
  if (group_by) out += "|" + ref(*group_by, names);
  return out + "(" + ref(arg, names) + ")";
}

std::string source(const steps::FlagSource& s,
                   const std::vector<std::string>& names) {
  return std::visit(
      Overloaded{
          [&](const MeasureRef& r) { return ref(r, names); },
          [](const steps::SelLevel& s) {
            return "σ[" + s.dim + "." + s.level + "]";
          },
          [](const steps::SelConst& s) {
            return "σ[" + s.dim + "." + s.level + "=" + s.member + "]";
          },
      },
      s);
}

}  // namespace

bool creates_measure(const TransformationStep& step) {
  return !std::holds_alternative<steps::MakeDestructor>(step) &&
         !std::holds_alternative<steps::MakeFlag>(step);
}

std::string render_step(const TransformationStep& step,
                        const std::vector<std::string>& names,
                        std::size_t new_index) {
  auto r = [&](const MeasureRef& m) { return ref(m, names); };
  std::string lhs = tau(new_index) + " = ";
  return std::visit(
      Overloaded{
          [&](const steps::Const& s) {
            return lhs + exactnum::render_rational(s.value);
          },
          [&](const steps::Sum& s) { return lhs + r(s.lhs) + " + " + r(s.rhs); },
          [&](const steps::Prod& s) {
            return lhs + r(s.lhs) + " · " + r(s.rhs);
          },
          [&](const steps::Quot& s) { return lhs + r(s.lhs) + " / " + r(s.rhs); },
          [&](const steps::EqMeasure& s) {
            return lhs + "(" + r(s.lhs) + " = " + r(s.rhs) + ")";
          },
          [&](const steps::LtMeasure& s) {
            return lhs + "(" + r(s.lhs) + " < " + r(s.rhs) + ")";
          },
          [&](const steps::EqLevel& s) {
            return lhs + "(" + s.dim + "." + s.level + " = " + s.member + ")";
          },
          [&](const steps::LtLevel& s) {
            std::string subject = s.dim + "." + s.level;
            return s.side == Side::kSubjectLess
                       ? lhs + "(" + subject + " < " + s.member + ")"
                       : lhs + "(" + s.member + " < " + subject + ")";
          },
          [&](const steps::SelConst& s) {
            return lhs + "σ[" + s.dim + "." + s.level + "=" + s.member + "]";
          },
          [&](const steps::SelLevel& s) {
            return lhs + "σ[" + s.dim + "." + s.level + "]";
          },
          [&](const steps::CountDistinct& s) {
            return lhs + grouped("#≠", s.arg, s.group_by, names);
          },
          [&](const steps::SumD& s) { return lhs + "SUM_d(" + r(s.arg) + ")"; },
          [&](const steps::Min& s) {
            return lhs + grouped("min", s.arg, s.group_by, names);
          },
          [&](const steps::Max& s) {
            return lhs + grouped("max", s.arg, s.group_by, names);
          },
          [&](const steps::Gamma& s) {
            return lhs + "γ[" + s.dim + "." + s.level + "]";
          },
          [&](const steps::Project& s) {
            return lhs + r(s.value) + "|" + r(s.labels);
          },
          [&](const steps::MakeDestructor& s) {
            return "δ = " + source(s.source, names);
          },
          [&](const steps::MakeFlag& s) {
            return "φ(" + std::to_string(s.arity) + ") = " +
                   source(s.source, names);
          },
      },
      step);
}

std::string render_steps(const std::vector<TransformationStep>& list,
                         const std::vector<std::string>& names,
                         std::size_t first_computed) {
  std::ostringstream out;
  std::size_t next = first_computed;
  for (const auto& step : list) {
    out << render_step(step, names, next) << "\n";
    if (creates_measure(step)) ++next;
  }
  return out.str();
}

}  // namespace cubealg::engine

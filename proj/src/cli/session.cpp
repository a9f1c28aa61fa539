#include "cubealg/cli/session.hpp"

#include <iostream>
#include <sstream>

#include "cubealg/detail/overloaded.hpp"
#include "cubealg/engine/engine.hpp"
#include "cubealg/io/cube_io.hpp"
#include "cubealg/io/snapshot.hpp"
#include "cubealg/io/view.hpp"
#include "cubealg/oracle/oracle.hpp"

namespace cubealg::cli {

namespace {

using detail::Overloaded;

const engine::CubeState& loaded(const Session& s) {
  if (!s.current) throw Error("no cube loaded");
  return *s.current;
}

std::string describe_cube(const engine::CubeState& state) {
  std::ostringstream out;
  const auto& cube = *state.schema;
  for (std::size_t d = 0; d < cube.dimension_count(); ++d) {
    const auto& g = cube.dimension(d);
    out << (d ? " x " : "") << g.name() << "(" << g.bottom_size() << ")";
  }
  out << " = " << state.cell_count() << " cells; measures:";
  for (const auto& m : state.measure_names) out << " " << m;
  return out.str();
}

std::string describe_result(const engine::CubeState& state) {
  std::ostringstream out;
  out << state.op_log.back().label << ": " << state.flagged_count()
      << " flagged, " << state.destroyed_count() << " destroyed, outputs:";
  if (state.computed.empty()) out << " none";
  for (std::size_t i = 0; i < state.computed.size(); ++i) out << " tau" << i + 1;
  return out.str();
}

std::string trace(const engine::CubeState& state) {
  if (state.op_log.empty()) return "no operations";
  std::ostringstream out;
  for (std::size_t i = 0; i < state.op_log.size(); ++i) {
    out << i + 1 << ". " << state.op_log[i].label << "\n";
  }
  const auto& last = state.op_log.back();
  out << "steps of " << last.label << ":\n"
      << engine::render_steps(last.steps, state.measure_names,
                              last.first_computed);
  std::string text = out.str();
  while (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

}  // namespace

Outcome execute(Session session, const Statement& statement) {
  Outcome result;
  std::visit(
      Overloaded{
          [&](const stmt::Load& l) {
            auto state = io::load_cube_files(l.cube, l.facts, l.fill.value_or(0));
            result.output = "loaded " + describe_cube(state);
            session = Session{state, state, std::nullopt, std::nullopt};
          },
          [&](const stmt::Operation& o) {
            const auto& before = loaded(session);
            auto after = algebra::apply(before, o.op);
            session.previous = before;
            session.last_op = o.op;
            session.current = std::move(after);
            result.output = describe_result(*session.current);
          },
          [&](const stmt::Show& v) {
            const auto& state = loaded(session);
            std::string measure = v.measure.value_or(
                state.computed.empty() ? state.measure_names.at(0) : "tau1");
            std::map<std::string, std::string> fixed;
            for (const auto& [d, m] : v.fixed) {
              if (!fixed.emplace(d, m).second) {
                throw ValidationError("dimension " + d + " fixed twice");
              }
            }
            auto view = io::export_view(state, v.row, v.col, fixed, measure);
            result.output = io::render_view(view);
            if (!result.output.empty() && result.output.back() == '\n') {
              result.output.pop_back();
            }
          },
          [&](const stmt::Trace&) { result.output = trace(loaded(session)); },
          [&](const stmt::Snapshot& p) {
            io::write_file(p.path, io::snapshot_text(loaded(session)));
            result.output = "snapshot written to " + p.path;
          },
          [&](const stmt::Restore& p) {
            auto state = io::restore_text(io::read_file(p.path));
            result.output = "restored " + p.path + " (" +
                            std::to_string(state.op_log.size()) +
                            " operations in log)";
            session = Session{state, state, std::nullopt, std::nullopt};
          },
          [&](const stmt::Check&) {
            const auto& state = loaded(session);
            if (!session.last_op) {
              result.output = "nothing to check";
              return;
            }
            auto expected = oracle::oracle_apply(
                oracle::from_state(*session.previous), *session.last_op);
            auto report = oracle::assert_equiv(state, expected);
            result.output = report.summary();
            result.mismatch = !report.ok();
          },
          [&](const stmt::Reset&) {
            loaded(session);
            session.current = session.initial;
            session.previous.reset();
            session.last_op.reset();
            result.output = "reset to " + describe_cube(*session.current);
          },
      },
      statement);
  result.session = std::move(session);
  return result;
}

RunResult run_script(std::string_view script, Session& session,
                     std::ostream& out, std::ostream& err) {
  RunResult run;
  std::vector<ScriptLine> lines;
  try {
    lines = parse_script(script);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    run.failed = true;
    return run;
  }
  for (const auto& [line, statement] : lines) {
    try {
      Outcome o = execute(session, statement);
      session = std::move(o.session);
      out << "> " << render(statement) << "\n" << o.output << "\n";
      run.mismatch = run.mismatch || o.mismatch;
      ++run.executed;
    } catch (const std::exception& e) {
      err << "error: line " << line << ": " << e.what() << "\n";
      run.failed = true;
      return run;
    }
  }
  return run;
}

RunResult repl(std::istream& in, std::ostream& out, Session& session) {
  RunResult run;
  std::string line;
  std::size_t n = 0;
  while (out << "cubealg> " << std::flush, std::getline(in, line)) {
    ++n;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (line.substr(first) == "quit" || line.substr(first) == "exit") break;
    try {
      Outcome o = execute(session, parse_statement(line, n));
      session = std::move(o.session);
      out << o.output << "\n";
      run.mismatch = run.mismatch || o.mismatch;
      ++run.executed;
    } catch (const std::exception& e) {
      out << "error: " << e.what() << "\n";
      run.failed = true;
    }
  }
  out << "\n";
  return run;
}

}  // namespace cubealg::cli

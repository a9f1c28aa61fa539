#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "cubealg/algebra/operations.hpp"
#include "cubealg/cli/statement.hpp"
#include "cubealg/engine/cube_state.hpp"

namespace cubealg::cli {

struct Session {
  // State after LOAD or RESTORE; RESET goes back to it.
  std::optional<engine::CubeState> initial;
  std::optional<engine::CubeState> current;
  // State before the most recent operation, and that operation, for CHECK.
  std::optional<engine::CubeState> previous;
  std::optional<algebra::OlapOp> last_op;
};

struct Outcome {
  Session session;
  std::string output;
  // Set by CHECK when the oracle disagrees.
  bool mismatch = false;
};

// Runs one statement on a copy of `session`. Throws on any error, in which
// case the caller's session is untouched.
Outcome execute(Session session, const Statement& statement);

struct RunResult {
  std::size_t executed = 0;
  bool mismatch = false;
  bool failed = false;
};

// Parses and executes a whole script, printing each statement's output.
// Stops at the first error, which goes to `err` with its line number.
RunResult run_script(std::string_view script, Session& session,
                     std::ostream& out, std::ostream& err);

// Line-by-line loop with a prompt; errors are reported and the loop goes on.
// "quit" or "exit" or end of input ends it.
RunResult repl(std::istream& in, std::ostream& out, Session& session);

}  // namespace cubealg::cli

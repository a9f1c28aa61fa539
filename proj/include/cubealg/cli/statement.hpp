#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cubealg/algebra/condition.hpp"
#include "cubealg/algebra/operations.hpp"
#include "cubealg/error.hpp"

namespace cubealg::cli {

// Syntax error; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

namespace stmt {

struct Load {
  std::string cube, facts;
  std::optional<exactnum::Rational> fill;
  bool operator==(const Load&) const = default;
};
// DICE, SLICE, SLICEDICE, ROLLUP, DRILLDOWN.
struct Operation {
  algebra::OlapOp op;
  bool operator==(const Operation&) const = default;
};
struct Show {
  std::string row, col;
  std::vector<std::pair<std::string, std::string>> fixed;
  std::optional<std::string> measure;  // defaults at execution time
  bool operator==(const Show&) const = default;
};
struct Trace {
  bool operator==(const Trace&) const = default;
};
struct Snapshot {
  std::string path;
  bool operator==(const Snapshot&) const = default;
};
struct Restore {
  std::string path;
  bool operator==(const Restore&) const = default;
};
struct Check {
  bool operator==(const Check&) const = default;
};
struct Reset {
  bool operator==(const Reset&) const = default;
};

}  // namespace stmt

using Statement =
    std::variant<stmt::Load, stmt::Operation, stmt::Show, stmt::Trace,
                 stmt::Snapshot, stmt::Restore, stmt::Check, stmt::Reset>;

// One statement per line. Keywords are case-insensitive; `#` starts a
// comment. `line` only labels error positions.
Statement parse_statement(std::string_view text, std::size_t line = 1);

// The condition grammar on its own, e.g. "NOT sales < 10".
algebra::ConditionPtr parse_condition(std::string_view text);

struct ScriptLine {
  std::size_t line;
  Statement statement;
};
// Skips blank and comment-only lines.
std::vector<ScriptLine> parse_script(std::string_view text);

// Canonical text; parse_statement(render(s)) == s. Names that are not plain
// identifiers, or that collide with NOT/AND/OR/FILL, come out quoted.
std::string render(const Statement& s);
std::string render_condition(const algebra::CellCondition& c);

}  // namespace cubealg::cli

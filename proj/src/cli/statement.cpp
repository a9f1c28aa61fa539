#include "cubealg/cli/statement.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cubealg/detail/overloaded.hpp"

namespace cubealg::cli {

using algebra::ConditionPtr;
using detail::Overloaded;
using engine::Side;

ParseError::ParseError(const std::string& message, std::size_t line,
                       std::size_t column)
    : Error("line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { kId, kString, kNumber, kSymbol, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  std::size_t column = 0;
};

bool id_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool id_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<Token> lex(std::string_view src, std::size_t line) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg, std::size_t at) {
    throw ParseError(msg, line, at + 1);
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '#') break;
    std::size_t start = i;
    if (id_start(c)) {
      while (i < src.size() && id_char(src[i])) ++i;
      out.push_back({Tok::kId, std::string(src.substr(start, i - start)), start + 1});
    } else if (digit(c) || (c == '-' && i + 1 < src.size() && digit(src[i + 1]))) {
      if (c == '-') ++i;
      while (i < src.size() && digit(src[i])) ++i;
      if (i + 1 < src.size() && src[i] == '.' && digit(src[i + 1])) {
        ++i;
        while (i < src.size() && digit(src[i])) ++i;
      }
      if (i + 1 < src.size() && src[i] == '/' && digit(src[i + 1])) {
        ++i;
        while (i < src.size() && digit(src[i])) ++i;
      }
      if (i < src.size() && id_char(src[i])) {
        fail("malformed number", start);
      }
      out.push_back({Tok::kNumber, std::string(src.substr(start, i - start)), start + 1});
    } else if (c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i++];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\\') {
          if (i >= src.size()) break;
          d = src[i++];
          if (d == 'n') d = '\n';
          else if (d == 't') d = '\t';
        }
        text += d;
      }
      if (!closed) fail("unterminated string", start);
      out.push_back({Tok::kString, text, start + 1});
    } else if (std::string_view(".=<>(){},:").find(c) != std::string_view::npos) {
      out.push_back({Tok::kSymbol, std::string(1, c), start + 1});
      ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Tok::kEnd, "", src.size() + 1});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, std::size_t line) : toks_(lex(src, line)), line_(line) {}

  Statement statement() {
    const Token& t = peek();
    if (t.kind != Tok::kId) fail(t, "expected a statement keyword");
    std::string kw = upper(t.text);
    next();
    Statement s = [&]() -> Statement {
      if (kw == "LOAD") return load();
      if (kw == "DICE") return stmt::Operation{algebra::ops::Dice{condition()}};
      if (kw == "SLICE") return stmt::Operation{algebra::ops::Slice{name("dimension")}};
      if (kw == "SLICEDICE" || kw == "SLICE-DICE") {
        std::string dim = name("dimension");
        return stmt::Operation{algebra::ops::SliceDice{dim, name("member")}};
      }
      if (kw == "ROLLUP" || kw == "ROLL-UP") {
        std::string dim = name("dimension");
        std::string level = name("level");
        return stmt::Operation{algebra::ops::RollUp{dim, level, aggs()}};
      }
      if (kw == "DRILLDOWN" || kw == "DRILL-DOWN") {
        std::string dim = name("dimension");
        std::string level = name("level");
        return stmt::Operation{algebra::ops::DrillDown{dim, level, aggs()}};
      }
      if (kw == "SHOW") return show();
      if (kw == "TRACE") return stmt::Trace{};
      if (kw == "SNAPSHOT") return stmt::Snapshot{string("path")};
      if (kw == "RESTORE") return stmt::Restore{string("path")};
      if (kw == "CHECK") return stmt::Check{};
      if (kw == "RESET") return stmt::Reset{};
      fail(t, "unknown keyword '" + t.text + "'");
    }();
    expect_end();
    return s;
  }

  ConditionPtr whole_condition() {
    ConditionPtr c = condition();
    expect_end();
    return c;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(msg, line_, t.column);
  }
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_symbol(char c) const {
    return peek().kind == Tok::kSymbol && peek().text[0] == c;
  }
  bool at_keyword(const char* kw) const {
    return peek().kind == Tok::kId && upper(peek().text) == kw;
  }
  void expect_symbol(char c) {
    if (!at_symbol(c)) fail(peek(), std::string("expected '") + c + "'");
    next();
  }
  void expect_end() {
    if (peek().kind != Tok::kEnd) fail(peek(), "unexpected '" + peek().text + "'");
  }

  std::string name(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::kId && t.kind != Tok::kString) {
      fail(t, std::string("expected ") + what);
    }
    return next().text;
  }
  // Members may also be written as bare numbers.
  std::string member() {
    if (peek().kind == Tok::kNumber) return next().text;
    return name("member");
  }
  std::string string(const char* what) {
    if (peek().kind != Tok::kString) fail(peek(), std::string("expected quoted ") + what);
    return next().text;
  }
  exactnum::Rational number() {
    const Token& t = peek();
    if (t.kind != Tok::kNumber) fail(t, "expected a number");
    try {
      return exactnum::parse_rational(next().text);
    } catch (const ValidationError& e) {
      fail(t, e.what());
    }
  }

  stmt::Load load() {
    stmt::Load s;
    s.cube = string("cube definition path");
    s.facts = string("fact table path");
    if (at_keyword("FILL")) {
      next();
      s.fill = number();
    }
    return s;
  }

  stmt::Show show() {
    stmt::Show s;
    s.row = name("row dimension");
    s.col = name("column dimension");
    while (peek().kind == Tok::kId || peek().kind == Tok::kString) {
      if (!(peek(1).kind == Tok::kSymbol && peek(1).text == "=")) break;
      std::string dim = next().text;
      next();
      s.fixed.emplace_back(dim, member());
    }
    if (peek().kind != Tok::kEnd) s.measure = name("measure");
    return s;
  }

  std::vector<algebra::Aggregate> aggs() {
    std::vector<algebra::Aggregate> out;
    expect_symbol('{');
    do {
      std::string measure = name("measure");
      expect_symbol(':');
      const Token& f = peek();
      std::string fn = name("aggregate function");
      try {
        out.push_back({measure, algebra::parse_agg_fn(fn)});
      } catch (const UnknownName&) {
        fail(f, "unknown aggregate function '" + fn + "'");
      }
    } while (at_symbol(',') && (next(), true));
    expect_symbol('}');
    return out;
  }

  ConditionPtr condition() {
    ConditionPtr c = conjunction();
    while (at_keyword("OR")) {
      next();
      c = algebra::or_(c, conjunction());
    }
    return c;
  }
  ConditionPtr conjunction() {
    ConditionPtr c = negation();
    while (at_keyword("AND")) {
      next();
      c = algebra::and_(c, negation());
    }
    return c;
  }
  ConditionPtr negation() {
    if (at_keyword("NOT")) {
      next();
      return algebra::not_(negation());
    }
    if (at_symbol('(')) {
      next();
      ConditionPtr c = condition();
      expect_symbol(')');
      return c;
    }
    return atom();
  }
  ConditionPtr atom() {
    const Token& first = peek();
    if (first.kind == Tok::kId &&
        (upper(first.text) == "AND" || upper(first.text) == "OR")) {
      fail(first, "expected a condition");
    }
    std::string subject = name("dimension or measure");
    if (at_symbol('.')) {
      next();
      std::string level = name("level");
      char op = comparison();
      std::string m = member();
      if (op == '=') return algebra::level_eq(subject, level, m);
      return algebra::level_lt(subject, level, m,
                               op == '<' ? Side::kSubjectLess : Side::kConstLess);
    }
    char op = comparison();
    exactnum::Rational v = number();
    if (op == '=') return algebra::measure_eq(subject, v);
    return algebra::measure_lt(subject, v,
                               op == '<' ? Side::kSubjectLess : Side::kConstLess);
  }
  char comparison() {
    const Token& t = peek();
    if (t.kind != Tok::kSymbol || std::string_view("=<>").find(t.text[0]) ==
                                      std::string_view::npos) {
      fail(t, "expected '=', '<' or '>'");
    }
    return next().text[0];
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

bool plain_identifier(const std::string& s) {
  if (s.empty() || !id_start(s[0])) return false;
  if (!std::all_of(s.begin(), s.end(), id_char)) return false;
  std::string up = upper(s);
  return up != "NOT" && up != "AND" && up != "OR" && up != "FILL";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '\t') {
      out += "\\t";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string ident(const std::string& s) {
  return plain_identifier(s) ? s : quoted(s);
}

int precedence(const algebra::CellCondition& c) {
  if (std::holds_alternative<algebra::cond::Or>(c.node)) return 1;
  if (std::holds_alternative<algebra::cond::And>(c.node)) return 2;
  return 3;
}

std::string condition_text(const algebra::CellCondition& c);

std::string child(const ConditionPtr& c, int min_prec) {
  if (!c) throw ValidationError("incomplete condition");
  std::string s = condition_text(*c);
  return precedence(*c) < min_prec ? "(" + s + ")" : s;
}

std::string condition_text(const algebra::CellCondition& c) {
  namespace cond = algebra::cond;
  auto op = [](Side side) { return side == Side::kSubjectLess ? " < " : " > "; };
  return std::visit(
      Overloaded{
          [](const cond::LevelEq& a) {
            return ident(a.dim) + "." + ident(a.level) + " = " + ident(a.member);
          },
          [&](const cond::LevelLt& a) {
            return ident(a.dim) + "." + ident(a.level) + op(a.side) + ident(a.member);
          },
          [](const cond::MeasureEq& a) {
            return ident(a.measure) + " = " + exactnum::render_rational(a.value);
          },
          [&](const cond::MeasureLt& a) {
            return ident(a.measure) + op(a.side) + exactnum::render_rational(a.value);
          },
          [](const cond::Not& n) { return "NOT " + child(n.arg, 3); },
          [](const cond::And& n) {
            return child(n.lhs, 2) + " AND " + child(n.rhs, 3);
          },
          [](const cond::Or& n) {
            return child(n.lhs, 1) + " OR " + child(n.rhs, 2);
          },
      },
      c.node);
}

std::string agg_text(const std::vector<algebra::Aggregate>& aggs) {
  std::string out = "{";
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    if (i) out += ", ";
    out += ident(aggs[i].measure) + ": " + algebra::to_string(aggs[i].fn);
  }
  return out + "}";
}

std::string op_text(const algebra::OlapOp& op) {
  namespace ops = algebra::ops;
  return std::visit(
      Overloaded{
          [](const ops::Dice& o) {
            if (!o.condition) throw ValidationError("incomplete condition");
            return "DICE " + condition_text(*o.condition);
          },
          [](const ops::Slice& o) { return "SLICE " + ident(o.dim); },
          [](const ops::SliceDice& o) {
            return "SLICEDICE " + ident(o.dim) + " " + ident(o.member);
          },
          [](const ops::RollUp& o) {
            return "ROLLUP " + ident(o.dim) + " " + ident(o.level) + " " +
                   agg_text(o.aggs);
          },
          [](const ops::DrillDown& o) {
            return "DRILLDOWN " + ident(o.dim) + " " + ident(o.level) + " " +
                   agg_text(o.aggs);
          },
      },
      op);
}

}  // namespace

Statement parse_statement(std::string_view text, std::size_t line) {
  return Parser(text, line).statement();
}

ConditionPtr parse_condition(std::string_view text) {
  return Parser(text, 1).whole_condition();
}

std::vector<ScriptLine> parse_script(std::string_view text) {
  std::vector<ScriptLine> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back({n, parse_statement(line, n)});
  }
  return out;
}

std::string render_condition(const algebra::CellCondition& c) {
  return condition_text(c);
}

std::string render(const Statement& s) {
  return std::visit(
      Overloaded{
          [](const stmt::Load& l) {
            std::string out = "LOAD " + quoted(l.cube) + " " + quoted(l.facts);
            if (l.fill) out += " FILL " + exactnum::render_rational(*l.fill);
            return out;
          },
          [](const stmt::Operation& o) { return op_text(o.op); },
          [](const stmt::Show& v) {
            std::string out = "SHOW " + ident(v.row) + " " + ident(v.col);
            for (const auto& [d, m] : v.fixed) out += " " + ident(d) + "=" + ident(m);
            if (v.measure) out += " " + ident(*v.measure);
            return out;
          },
          [](const stmt::Trace&) { return std::string("TRACE"); },
          [](const stmt::Snapshot& p) { return "SNAPSHOT " + quoted(p.path); },
          [](const stmt::Restore& p) { return "RESTORE " + quoted(p.path); },
          [](const stmt::Check&) { return std::string("CHECK"); },
          [](const stmt::Reset&) { return std::string("RESET"); },
      },
      s);
}

}  // namespace cubealg::cli
